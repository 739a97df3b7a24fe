//! `jaws` command line: analyze, sample, simulate, minima, trainability.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::algebra::{JawsModel, SimpleComponent};
use crate::error::{JawsError, Result};
use crate::landscape::{
    gp_conditions, loss_variance, minima_density_grid, overparameterization_ratios, sector_variance,
    trainability_verdict, welch_satterthwaite, GpThresholds, MinimaDensitySpec, TrainabilityReport,
    TrainabilityThresholds, DEFAULT_GRID,
};
use crate::model::{load_model, load_sequence};
use crate::randmat::RngState;
use crate::simulator::{mc_model, McOptions};
use crate::stats::{gamma_cdf, ks_two_sample, EmpiricalDistribution, KsResult};
use crate::wishart_process::{
    loss_gamma_params, sample_gradient_given_loss, sample_hessian_at_critical, sample_loss, RANK_TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;

/// Largest sector dimension `simulate` accepts.
pub const MAX_SIM_DIM: usize = 256;
pub const DEFAULT_BUDGET: f64 = 5e10;

#[derive(Parser, Debug)]
#[command(name = "jaws", version, about = "Wishart-process loss landscapes of quantum neural networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed-form report: degrees of freedom, variance, GP conditions, minima summary.
    Analyze(RunConfig),
    /// Draws from the asymptotic loss, gradient and Hessian laws.
    Sample(RunConfig),
    /// Exact circuit Monte-Carlo with goodness-of-fit against the asymptotic laws.
    Simulate(RunConfig),
    /// Local-minima density grid and regime labels.
    Minima(RunConfig),
    /// Trainability verdict over a size sequence.
    Trainability(RunConfig),
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// JSON model file.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// JSON size-sequence file for the trainability verdict.
    #[arg(long)]
    pub sequence: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Output directory for CSV files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Bins across the minima-density support.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    /// Largest accepted `t` in `Var ~ (ln N)^-t`.
    #[arg(long, default_value_t = TrainabilityThresholds::default().variance_exponent)]
    pub threshold_variance_exponent: f64,
    /// Floor on the scaled variance for the GP verdict.
    #[arg(long, default_value_t = GpThresholds::default().variance_floor)]
    pub threshold_variance: f64,
    /// Ceiling on the third-cumulant scale for the GP verdict.
    #[arg(long, default_value_t = GpThresholds::default().cumulant_ceiling)]
    pub threshold_cumulant: f64,
    /// Largest accepted `samples · Σ dim³` for `simulate`.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: f64,
}

impl RunConfig {
    fn gp(&self) -> GpThresholds {
        GpThresholds {
            variance_floor: self.threshold_variance,
            cumulant_ceiling: self.threshold_cumulant,
        }
    }

    fn trainability(&self) -> TrainabilityThresholds {
        TrainabilityThresholds {
            variance_exponent: self.threshold_variance_exponent,
        }
    }

    fn model(&self) -> Result<JawsModel> {
        let path = self
            .model
            .as_ref()
            .ok_or_else(|| JawsError::InvalidModel("--model is required".into()))?;
        let m = load_model(path)?;
        if m.components.is_empty() {
            return Err(JawsError::InvalidModel("model has no components".into()));
        }
        Ok(m)
    }

    fn out_dir(&self) -> Result<&Path> {
        self.out
            .as_deref()
            .ok_or_else(|| JawsError::InvalidModel("--out is required".into()))
    }
}

#[derive(Debug)]
enum Failure {
    Invalid(JawsError),
    Budget(String),
}

impl From<JawsError> for Failure {
    fn from(e: JawsError) -> Self {
        Failure::Invalid(e)
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Analyze(c) => cmd_analyze(c),
        Command::Sample(c) => cmd_sample(c),
        Command::Simulate(c) => cmd_simulate(c),
        Command::Minima(c) => cmd_minima(c),
        Command::Trainability(c) => cmd_trainability(c),
    };
    match result {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(Failure::Invalid(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
        Err(Failure::Budget(msg)) => {
            let _ = writeln!(err, "refused: {msg}");
            EXIT_BUDGET
        }
    }
}

/// Seventeen significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> JawsError {
    JawsError::Io(format!("{}: {e}", path.display()))
}

/// Writes `dir/name` and returns `name` for the run log.
fn write_csv<'a>(
    dir: &Path,
    name: &'a str,
    header: &[String],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<&'a str> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path).map_err(|e| io_err(&path, e))?;
    w.write_record(header).map_err(|e| io_err(&path, e))?;
    for r in rows {
        w.write_record(&r).map_err(|e| io_err(&path, e))?;
    }
    w.flush().map_err(|e| io_err(&path, e))?;
    Ok(name)
}

fn is_rank_one(c: &SimpleComponent) -> bool {
    c.input_rank(RANK_TOL) == 1
}

fn trainability_text(r: &TrainabilityReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "trainability:");
    for d in &r.sizes {
        let _ = writeln!(
            s,
            "  size N={} variance={} p={} max_beta_r={} minima_condition={}",
            d.ambient_dim, d.variance, d.total_params, d.max_beta_r, d.minima_condition
        );
    }
    let _ = writeln!(s, "  variance_value: {}", r.variance_value);
    let _ = writeln!(s, "  decay_exponent: {} +/- {}", r.decay_exponent, r.decay_std_error);
    let _ = writeln!(s, "  variance_verdict: {}", r.variance_verdict.label());
    let _ = writeln!(s, "  minima_condition: {}", r.minima_condition);
    let _ = writeln!(s, "  overall: {}", if r.overall { "trainable" } else { "not trainable" });
    s
}

fn cmd_analyze(cfg: &RunConfig) -> std::result::Result<String, Failure> {
    let m = cfg.model()?;
    let ratios = overparameterization_ratios(&m)?;
    let spec = MinimaDensitySpec::from_model(&m)?;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "model: components={} total_params={} normalization={}",
        m.components.len(),
        m.total_params,
        m.normalization
    );
    let mut max_beta_r: f64 = 0.0;
    for (i, c) in m.components.iter().enumerate() {
        let st = c.stats()?;
        max_beta_r = max_beta_r.max(c.beta() * st.dof_real);
        let _ = writeln!(
            s,
            "sector {i}: field={} dim={} index={} params={} r={} r_rounded={} gamma={} o_bar={} sigma={} \
             purity={} variance={} regime={}",
            c.field,
            c.dim,
            c.index,
            c.sector_params,
            st.dof_real,
            st.dof,
            ratios[i],
            st.mean_eig,
            st.std_eig,
            c.input_purity(),
            sector_variance(c),
            if spec.sectors[i].underparameterized { "underparameterized" } else { "overparameterized" }
        );
    }
    let _ = writeln!(s, "variance: {}", loss_variance(&m));
    let gp = gp_conditions(&m, cfg.gp())?;
    let _ = writeln!(
        s,
        "gp: scaled_variance={} cumulant_scale={} variance_nonvanishing={} cumulant_vanishing={} verdict={}",
        gp.scaled_variance,
        gp.cumulant_scale,
        gp.variance_nonvanishing,
        gp.cumulant_vanishing,
        if gp.gaussian_process { "GP" } else { "non-GP" }
    );
    match welch_satterthwaite(&m) {
        Ok((k, th)) => {
            let _ = writeln!(s, "minima: regime={} k_eff={k} theta_eff={th}", spec.regime().label());
        }
        Err(_) => {
            let _ = writeln!(s, "minima: regime={} point mass at 0", spec.regime().label());
        }
    }
    let _ = writeln!(
        s,
        "minima_condition: {} (p={} max_beta_r={})",
        m.total_params as f64 >= max_beta_r,
        m.total_params,
        max_beta_r
    );
    if let Some(p) = &cfg.sequence {
        let seq = load_sequence(p)?;
        s.push_str(&trainability_text(&trainability_verdict(&seq, cfg.trainability())?));
    }
    Ok(s)
}

/// Equal-width histogram over `[min, max]`.
pub fn histogram(samples: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if samples.is_empty() || bins == 0 {
        return Vec::new();
    }
    let w = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for x in samples {
        let j = (((x - lo) / w) as usize).min(bins - 1);
        counts[j] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(j, c)| (lo + j as f64 * w, lo + (j + 1) as f64 * w, c))
        .collect()
}

fn render_histogram(title: &str, h: &[(f64, f64, usize)]) -> String {
    let top = h.iter().map(|b| b.2).max().unwrap_or(1).max(1);
    let mut s = format!("{title}\n");
    for (lo, hi, c) in h {
        let bar = "#".repeat(c * 50 / top);
        let _ = writeln!(s, "{lo:>12.5e} {hi:>12.5e} {c:>8} {bar}");
    }
    s
}

fn cmd_sample(cfg: &RunConfig) -> std::result::Result<String, Failure> {
    let m = cfg.model()?;
    let n = cfg.samples.unwrap_or(10_000);
    if n == 0 {
        return Err(JawsError::Domain("--samples must be at least 1".into()).into());
    }
    let dir = cfg.out_dir()?;
    let derivatives = m.components.iter().all(is_rank_one);
    let mut rng = RngState::from_seed(cfg.seed);
    let k = m.components.len();
    let p = m.total_params;

    let mut loss_rows = Vec::with_capacity(n);
    let mut grad_rows = Vec::new();
    let mut hess_rows = Vec::new();
    let mut totals = Vec::with_capacity(n);
    for i in 0..n {
        let mut r = rng.split();
        let d = sample_loss(&m, &mut r)?;
        totals.push(d.total);
        let mut row = vec![i.to_string(), fmt_f64(d.total)];
        row.extend(d.components.iter().map(|x| fmt_f64(*x)));
        loss_rows.push(row);
        if derivatives {
            let g = sample_gradient_given_loss(&m, &d.components, &mut r)?;
            let mut row = vec![i.to_string(), fmt_f64(d.total)];
            row.extend(g.values.iter().map(|x| fmt_f64(*x)));
            grad_rows.push(row);
            let h = sample_hessian_at_critical(&m, &d.components, &mut r)?;
            let mut row = vec![i.to_string(), fmt_f64(d.total)];
            for a in 0..p {
                for b in a..p {
                    row.push(fmt_f64(h.matrix[(a, b)]));
                }
            }
            hess_rows.push(row);
        }
    }

    let mut header = vec!["sample_id".to_string(), "loss".to_string()];
    header.extend((0..k).map(|a| format!("z_{a}")));
    let lp = write_csv(dir, "loss.csv", &header, loss_rows.into_iter())?;
    let mut s = format!("wrote {}\n", lp);
    if derivatives {
        let mut header = vec!["sample_id".to_string(), "loss".to_string()];
        header.extend((0..p).map(|a| format!("grad_{a}")));
        let gp = write_csv(dir, "gradient.csv", &header, grad_rows.into_iter())?;
        let mut header = vec!["sample_id".to_string(), "loss".to_string()];
        for a in 0..p {
            for b in a..p {
                header.push(format!("h_{a}_{b}"));
            }
        }
        let hp = write_csv(dir, "hessian.csv", &header, hess_rows.into_iter())?;
        let _ = writeln!(s, "wrote {}\nwrote {}", gp, hp);
    } else {
        let _ = writeln!(s, "skipped gradient and Hessian draws: the conditional laws need rank-1 inputs");
    }
    let h = histogram(&totals, 40);
    let hist_rows = h
        .iter()
        .map(|(lo, hi, c)| vec![fmt_f64(*lo), fmt_f64(*hi), c.to_string()]);
    let hp = write_csv(
        dir,
        "loss_hist.csv",
        &["bin_lo".into(), "bin_hi".into(), "count".into()],
        hist_rows,
    )?;
    let _ = writeln!(s, "wrote {}", hp);
    let e = EmpiricalDistribution::new(totals);
    let _ = writeln!(s, "loss: mean={} variance={}", e.mean, e.variance);
    s.push_str(&render_histogram("loss histogram", &h));
    Ok(s)
}

fn ks_row(name: &str, r: &KsResult, n: usize) -> Vec<String> {
    vec![name.to_string(), fmt_f64(r.statistic), fmt_f64(r.p_value), n.to_string()]
}

fn cmd_simulate(cfg: &RunConfig) -> std::result::Result<String, Failure> {
    let m = cfg.model()?;
    let n = cfg.samples.unwrap_or(1_000);
    if let Some(c) = m.components.iter().find(|c| c.dim > MAX_SIM_DIM) {
        return Err(JawsError::Unsupported(format!(
            "sector dimension {} exceeds the simulator limit {MAX_SIM_DIM}",
            c.dim
        ))
        .into());
    }
    let cost = n as f64 * m.components.iter().map(|c| (c.dim as f64).powi(3)).sum::<f64>();
    if cost > cfg.budget {
        return Err(Failure::Budget(format!(
            "estimated cost {cost:e} (samples x sum dim^3) exceeds budget {:e}",
            cfg.budget
        )));
    }
    let dir = cfg.out_dir()?;
    let mut rng = RngState::from_seed(cfg.seed);
    let opts = McOptions {
        gradient: true,
        hessian: false,
    };
    let mc = mc_model(&m, n, opts, &mut rng.split())?;
    let p = m.total_params;
    let mut header = vec!["sample_id".to_string(), "loss".to_string()];
    header.extend((0..p).map(|a| format!("grad_{a}")));
    let rows = mc.samples.iter().enumerate().map(|(i, s)| {
        let mut r = vec![i.to_string(), fmt_f64(s.loss)];
        r.extend(s.gradient.iter().map(|x| fmt_f64(*x)));
        r
    });
    let sp = write_csv(dir, "simulate.csv", &header, rows)?;

    // asymptotic prediction on an independent substream
    let mut wrng = rng.split();
    let draws = (0..n)
        .map(|_| sample_loss(&m, &mut wrng))
        .collect::<Result<Vec<_>>>()?;
    let theory: Vec<f64> = draws.iter().map(|d| d.total).collect();
    let sim: Vec<f64> = mc.samples.iter().map(|s| s.loss).collect();
    let mut fit = vec![ks_row("loss_vs_wishart", &ks_two_sample(&sim, &theory), n)];
    if m.components.len() == 1 && is_rank_one(&m.components[0]) {
        let c = &m.components[0];
        let (k, th) = loss_gamma_params(c)?;
        let nrm = m.normalization;
        let r = mc.loss.ks_against(|z| gamma_cdf(z / nrm, k, th));
        fit.push(ks_row("loss_vs_gamma", &r, n));
        let mut pred = Vec::with_capacity(n * p);
        for s in &mc.samples {
            let g = sample_gradient_given_loss(&m, &[s.loss / nrm], &mut wrng)?;
            pred.extend(g.values);
        }
        let simg: Vec<f64> = mc.samples.iter().flat_map(|s| s.gradient.iter().copied()).collect();
        fit.push(ks_row("gradient_vs_conditional", &ks_two_sample(&simg, &pred), simg.len()));
    }
    let fp = write_csv(
        dir,
        "fit.csv",
        &["quantity".into(), "ks_statistic".into(), "p_value".into(), "samples".into()],
        fit.clone().into_iter(),
    )?;
    let mut s = format!("wrote {}\nwrote {}\n", sp, fp);
    let _ = writeln!(s, "{:<26} {:>24} {:>24} {:>8}", "quantity", "ks_statistic", "p_value", "samples");
    for r in &fit {
        let _ = writeln!(s, "{:<26} {:>24} {:>24} {:>8}", r[0], r[1], r[2], r[3]);
    }
    Ok(s)
}

fn cmd_minima(cfg: &RunConfig) -> std::result::Result<String, Failure> {
    let m = cfg.model()?;
    let dir = cfg.out_dir()?;
    let spec = MinimaDensitySpec::from_model(&m)?;
    let g = minima_density_grid(&m, cfg.grid)?;
    let rows = g
        .z
        .iter()
        .zip(&g.density)
        .map(|(z, d)| vec![fmt_f64(*z), fmt_f64(*d)]);
    let path = write_csv(dir, "minima.csv", &["z".into(), "density".into()], rows)?;
    let mut s = format!("wrote {}\n", path);
    for (i, sec) in spec.sectors.iter().enumerate() {
        let _ = writeln!(
            s,
            "sector {i}: gamma={} shape={} scale={} loss_scale={} regime={}",
            sec.ratio,
            sec.shape,
            sec.scale,
            sec.loss_scale,
            if sec.underparameterized { "underparameterized" } else { "overparameterized" }
        );
    }
    let _ = writeln!(s, "regime: {}", g.regime.label());
    let _ = writeln!(s, "point_mass_at_zero: {}", g.point_mass);
    let _ = writeln!(s, "continuous_mass: {}", g.continuous_mass());
    match welch_satterthwaite(&m) {
        Ok((k, th)) => {
            let _ = writeln!(s, "welch_satterthwaite: k_eff={k} theta_eff={th}");
        }
        Err(_) => {
            let _ = writeln!(s, "welch_satterthwaite: undefined");
        }
    }
    Ok(s)
}

fn cmd_trainability(cfg: &RunConfig) -> std::result::Result<String, Failure> {
    let path = cfg
        .sequence
        .as_ref()
        .ok_or_else(|| JawsError::InvalidModel("--sequence is required".into()))?;
    let seq = load_sequence(path)?;
    Ok(trainability_text(&trainability_verdict(&seq, cfg.trainability())?))
}
