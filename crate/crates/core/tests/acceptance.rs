//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Built with `harness = false` so every line is printed regardless of outcome.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use jaws::algebra::{dim_automorphism, hermitian_basis, project_into_component, spectrum_stats};
use jaws::algebra::{FieldTag, JawsModel, SimpleComponent};
use jaws::landscape::{
    loss_variance, minima_density_grid, trainability_verdict, welch_satterthwaite, TrainabilityThresholds,
    DEFAULT_GRID,
};
use jaws::model::load_sequence;
use jaws::quad::integrate;
use jaws::randmat::wishart::normalized_spectrum;
use jaws::randmat::{marchenko_pastur_pdf, marchenko_pastur_support, mp_log_moment};
use jaws::randmat::{wishart_bartlett, wishart_direct, RngState};
use jaws::simulator::{build_ansatz, mc_landscape, McOptions};
use jaws::stats::{gamma_pdf, ks_two_sample, slope_through_origin};
use jaws::wishart_process::{gradient_variance_slope, is_psd, loss_pdf_rank1, sample_hessian_at_critical};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn pure(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[0] = 1.0;
    v
}

fn manifest(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn c1_variance() -> Outcome {
    let n = 8;
    let obs = vec![-1.7, -0.9, -0.35, 0.1, 0.45, 0.8, 1.3, 2.2];
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, field) in FieldTag::ALL.into_iter().enumerate() {
        let t0 = Instant::now();
        let c = SimpleComponent::new(field, n, 1.0, obs.clone(), pure(n), 1).unwrap();
        let mc = mc_landscape(&c, 100_000, McOptions::default(), &mut RngState::from_seed(100 + k as u64)).unwrap();
        let predicted = loss_variance(&JawsModel::single(c.clone()).unwrap());
        let rel = (mc.loss.variance - predicted).abs() / predicted;
        let elapsed = t0.elapsed();
        // Exact finite-N Haar value for a pure input, for the diagnostic only
        let st = spectrum_stats(&obs, false).unwrap();
        let haar = 2.0 * st.std_eig.powi(2) / (field.beta() as f64 * n as f64 + 2.0);
        let ok = rel <= 0.05 && elapsed < Duration::from_secs(120);
        pass &= ok;
        parts.push(format!(
            "{field}: mc {:.4e} formula {:.4e} rel {:.3} (exact Haar {:.4e}, {:.1}s)",
            mc.loss.variance,
            predicted,
            rel,
            haar,
            elapsed.as_secs_f64()
        ));
    }
    outcome(pass, parts.join("; "))
}

fn c2_flat_loss_law() -> Outcome {
    let n = 64;
    let t0 = Instant::now();
    let mut obs = vec![1.0; n];
    obs[0] = 0.0;
    let c = SimpleComponent::new(FieldTag::Complex, n, 1.0, obs, pure(n), 1).unwrap();
    let r = c.stats().unwrap().dof_real;
    let mc = mc_landscape(&c, 10_000, McOptions::default(), &mut RngState::from_seed(200)).unwrap();
    let cdf = |z: f64| {
        if z <= 0.0 {
            0.0
        } else {
            integrate(|x| loss_pdf_rank1(&c, x).unwrap(), 0.0, z, 1e-12)
        }
    };
    let ks = mc.loss.ks_against(cdf);
    let elapsed = t0.elapsed();
    outcome(
        ks.passes(0.01) && elapsed < Duration::from_secs(300),
        format!(
            "shifted r = {r:.3}; KS D = {:.4}, p = {:.3e}; loss mean {:.5} sd {:.5}; {:.1}s",
            ks.statistic,
            ks.p_value,
            mc.loss.mean,
            mc.loss.std(),
            elapsed.as_secs_f64()
        ),
    )
}

fn c3_porter_thomas() -> Outcome {
    let n = 64;
    let mut obs = vec![0.0; n];
    obs[n - 1] = 1.0;
    let c = SimpleComponent::new(FieldTag::Complex, n, 1.0, obs, pure(n), 1).unwrap();
    let mc = mc_landscape(&c, 10_000, McOptions::default(), &mut RngState::from_seed(300)).unwrap();
    let mean = 1.0 / n as f64;
    let ks = mc.loss.ks_against(|z| 1.0 - (-z.max(0.0) / mean).exp());
    outcome(
        ks.passes(0.01),
        format!("Exp(mean 1/64): KS D = {:.4}, p = {:.3}", ks.statistic, ks.p_value),
    )
}

fn c4_conditional_gradient() -> Outcome {
    let n = 64;
    let p = 4;
    // flat observable: r = N - 1, the largest reachable after the zero shift
    let mut obs = vec![1.0; n];
    obs[0] = 0.0;
    let c = SimpleComponent::new(FieldTag::Complex, n, 1.0, obs, pure(n), p).unwrap();
    let opts = McOptions {
        gradient: true,
        hessian: false,
    };
    let mc = mc_landscape(&c, 20_000, opts, &mut RngState::from_seed(400)).unwrap();
    let mut pairs = mc.loss_gradient_pairs();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let bins = 20;
    let per = pairs.len() / bins;
    let (mut zs, mut vs, mut ws) = (Vec::new(), Vec::new(), Vec::new());
    for b in 0..bins {
        let chunk = &pairs[b * per..(b + 1) * per];
        let m = chunk.len() as f64;
        zs.push(chunk.iter().map(|x| x.0).sum::<f64>() / m);
        // gradient mean is zero by symmetry
        vs.push(chunk.iter().map(|x| x.1 * x.1).sum::<f64>() / m);
        ws.push(m);
    }
    let slope = slope_through_origin(&zs, &vs, &ws);
    let want = gradient_variance_slope(&c).unwrap();
    let rel = (slope - want).abs() / want;
    outcome(
        rel <= 0.10,
        format!("binned slope {slope:.5e}, closed form {want:.5e}, rel {rel:.4}"),
    )
}

fn c5_hessian_sign() -> Outcome {
    let n = 16;
    let mut obs = vec![0.0; n];
    for (i, o) in obs.iter_mut().enumerate().skip(4) {
        *o = 1.0 + 0.1 * i as f64;
    }
    let c = SimpleComponent::new(FieldTag::Complex, n, 1.0, obs, pure(n), 3).unwrap();
    let m = JawsModel::single(c).unwrap();
    let mut rng = RngState::from_seed(500);
    let (mut psd, mut violations) = (0, 0);
    for _ in 0..10_000 {
        let d = sample_hessian_at_critical(&m, &[0.5], &mut rng).unwrap();
        if is_psd(&d.matrix, 0.0) {
            psd += 1;
            if d.sector_gaussians[0].iter().any(|&g| g < 0.0) {
                violations += 1;
            }
        }
    }
    outcome(
        violations == 0 && psd > 0,
        format!("{psd} PSD draws of 10000, {violations} with a negative G"),
    )
}

fn c6_bartlett_vs_direct() -> Outcome {
    let (dim, dof, draws, reps) = (6, 9, 10_000, 20);
    let mut pass = true;
    let mut parts = Vec::new();
    let mut rng = RngState::from_seed(600);
    for field in FieldTag::ALL {
        let mut accepted = 0;
        for _ in 0..reps {
            let mut cols = vec![[Vec::with_capacity(draws), Vec::with_capacity(draws)]; 2];
            for _ in 0..draws {
                let a = wishart_bartlett(field, dim, dof, &mut rng).matrix;
                let b = wishart_direct(field, dim, dof, &mut rng).matrix;
                cols[0][0].push(a.component(0, 0, 0));
                cols[0][1].push(a.component(3, 1, 0));
                cols[1][0].push(b.component(0, 0, 0));
                cols[1][1].push(b.component(3, 1, 0));
            }
            // Bonferroni over the two marginals keeps the repetition at the 1% level
            let ok = (0..2).all(|e| ks_two_sample(&cols[0][e], &cols[1][e]).passes(0.005));
            accepted += ok as usize;
        }
        pass &= accepted >= 18;
        parts.push(format!("{field}: {accepted}/{reps}"));
    }
    outcome(pass, parts.join(", "))
}

fn c7_marchenko_pastur() -> Outcome {
    let (dim, gamma) = (200, 0.5);
    let dof = (dim as f64 / gamma) as usize;
    let mut rng = RngState::from_seed(700);
    let mut eig = Vec::new();
    for _ in 0..10 {
        eig.extend(normalized_spectrum::<f64, _>(dim, dof, &mut rng));
    }
    let (lo, hi) = marchenko_pastur_support(gamma);
    let bins = 40;
    let w = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    let mut outside = 0usize;
    for &x in &eig {
        if x < lo || x >= hi {
            outside += 1;
        } else {
            counts[(((x - lo) / w) as usize).min(bins - 1)] += 1;
        }
    }
    let total = eig.len() as f64;
    let mut l1 = outside as f64 / total;
    for (k, &cnt) in counts.iter().enumerate() {
        let a = lo + k as f64 * w;
        let mass = integrate(|x| marchenko_pastur_pdf(gamma, x), a, a + w, 1e-12);
        l1 += (cnt as f64 / total - mass).abs();
    }
    let lm = mp_log_moment(1.0).unwrap();
    outcome(
        l1 <= 0.05 && (lm + 1.0).abs() <= 1e-6,
        format!("L1 = {l1:.4}, log-moment(1) = {lm:.10}"),
    )
}

fn sector_with_dof(r: usize, p: usize, trace: f64) -> SimpleComponent {
    let mut obs = vec![1.0; r + 1];
    obs[0] = 0.0;
    let mut rho = vec![0.0; r + 1];
    rho[0] = trace;
    SimpleComponent::new(FieldTag::Real, r + 1, 1.0, obs, rho, p).unwrap()
}

fn c8_welch_satterthwaite() -> Outcome {
    let c = sector_with_dof(200, 100, 1.0);
    let m = JawsModel::new(vec![c.clone(), c], 200, 1.0).unwrap();
    let dens = minima_density_grid(&m, DEFAULT_GRID).unwrap();
    let (k, th) = welch_satterthwaite(&m).unwrap();
    let sup = dens
        .z
        .iter()
        .zip(&dens.density)
        .map(|(z, d)| (d - gamma_pdf(*z, k, th)).abs())
        .fold(0.0, f64::max);

    // ō·Trρ = ½ per sector with β r = m
    let mm = 40;
    let mut obs = vec![1.0; mm + 1];
    obs[0] = 0.0;
    let ob = mm as f64 / (mm + 1) as f64;
    let mut rho = vec![0.0; mm + 1];
    rho[0] = 0.5 / ob;
    let h = SimpleComponent::new(FieldTag::Real, mm + 1, 1.0, obs, rho, 1).unwrap();
    let hm = JawsModel::new(vec![h.clone(), h], 2, 1.0).unwrap();
    let (hk, hth) = welch_satterthwaite(&hm).unwrap();
    let exact = (hk - mm as f64).abs() <= 1e-9 * mm as f64 && (hth - 1.0 / mm as f64).abs() <= 1e-12;
    outcome(
        sup <= 1e-2 && exact,
        format!("sup-norm {sup:.3e} (k_eff {k:.3}, θ_eff {th:.5}); hand example k {hk} θ {hth}"),
    )
}

fn c9_exact_identities() -> Outcome {
    let mut rng = RngState::from_seed(900);
    let mut worst_dof: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(2..40);
        let s: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let st = spectrum_stats(&s, true).unwrap();
        if st.mean_eig > 0.0 {
            let lhs = (n as f64 / st.dof_real - 1.0).max(0.0).sqrt();
            worst_dof = worst_dof.max((lhs - st.std_eig / st.mean_eig).abs());
        }
    }
    let mut dims_ok = true;
    for n in 1..50 {
        dims_ok &= dim_automorphism(FieldTag::Real, n) == n * (n - 1) / 2;
        dims_ok &= dim_automorphism(FieldTag::Complex, n) == n * n;
        dims_ok &= dim_automorphism(FieldTag::Quaternion, n) == n * (2 * n + 1);
    }
    let mut worst_proj: f64 = 0.0;
    let basis = hermitian_basis(5);
    for _ in 0..20 {
        let sub: Vec<DMatrix<Complex64>> = basis.iter().filter(|_| rng.random_bool(0.5)).cloned().collect();
        if sub.is_empty() {
            continue;
        }
        let a = DMatrix::from_fn(5, 5, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let a = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
        let once = project_into_component(&a, &sub).unwrap().element;
        let twice = project_into_component(&once, &sub).unwrap().element;
        worst_proj = worst_proj.max((twice - once).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let mut worst_norm: f64 = 0.0;
    for field in [FieldTag::Complex, FieldTag::Quaternion, FieldTag::Real] {
        for r in [2usize, 5, 17] {
            let c = sector_with_dof(r, 1, 0.7);
            let c = SimpleComponent { field, ..c };
            let mass = integrate(|z| loss_pdf_rank1(&c, z).unwrap(), 0.0, 50.0, 1e-13);
            worst_norm = worst_norm.max((mass - 1.0).abs());
        }
    }
    outcome(
        worst_dof < 1e-10 && dims_ok && worst_proj < 1e-10 && worst_norm < 1e-10,
        format!(
            "dof identity {worst_dof:.1e}, automorphism dims {}, idempotence {worst_proj:.1e}, gamma mass {worst_norm:.1e}",
            if dims_ok { "ok" } else { "WRONG" }
        ),
    )
}

fn c10_finite_differences() -> Outcome {
    let n = 8;
    let mut rng = RngState::from_seed(1000);
    let mut parts = Vec::new();
    let mut pass = true;
    for field in FieldTag::ALL {
        let (mut gmax, mut hmax): (f64, f64) = (0.0, 0.0);
        for _ in 0..100 {
            let obs: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let mut rho: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let t: f64 = rho.iter().sum();
            rho.iter_mut().for_each(|x| *x /= t);
            let c = SimpleComponent::new(field, n, 1.0, obs, rho, 4).unwrap();
            let o = c.shifted_observable();
            let a = build_ansatz(&c, &mut rng).unwrap();
            let g = a.grad_eval(&c.input_spectrum, &o).unwrap();
            let gf = a.fd_gradient(&c.input_spectrum, &o, 1e-5).unwrap();
            gmax = g.iter().zip(&gf).map(|(x, y)| (x - y).abs()).fold(gmax, f64::max);
            let h = a.hessian_eval(&c.input_spectrum, &o).unwrap();
            let hf = a.fd_hessian(&c.input_spectrum, &o, 1e-4).unwrap();
            hmax = hmax.max((h - hf).abs().max());
        }
        pass &= gmax <= 1e-6 && hmax <= 1e-4;
        parts.push(format!("{field}: grad {gmax:.1e}, hess {hmax:.1e}"));
    }
    outcome(pass, parts.join("; "))
}

fn c11_phase_transition() -> Outcome {
    // ℂ sector with r = 10: γ = p / 20
    let sector = |p: usize| {
        let mut obs = vec![1.0; 11];
        obs[0] = 0.0;
        SimpleComponent::new(FieldTag::Complex, 11, 1.0, obs, pure(11), p).unwrap()
    };
    let under = minima_density_grid(&JawsModel::single(sector(18)).unwrap(), DEFAULT_GRID).unwrap();
    let over = minima_density_grid(&JawsModel::single(sector(22)).unwrap(), DEFAULT_GRID).unwrap();
    let mixed = minima_density_grid(&JawsModel::new(vec![sector(18), sector(22)], 40, 1.0).unwrap(), DEFAULT_GRID)
        .unwrap();
    let diff = under
        .z
        .iter()
        .map(|&z| (under.eval(z) - mixed.eval(z)).abs())
        .fold(0.0, f64::max);
    let m_under = under.continuous_mass();
    let m_over = over.continuous_mass();
    let pass = (m_under - 1.0).abs() <= 1e-3
        && !under.point_mass
        && m_over == 0.0
        && over.point_mass
        && !mixed.point_mass
        && (mixed.continuous_mass() - 1.0).abs() <= 1e-3
        && diff <= 1e-9;
    outcome(
        pass,
        format!(
            "γ=0.9 mass {m_under:.6}; γ=1.1 mass {m_over} point-mass {}; mixed ({}) vs lone sector sup {diff:.1e}",
            over.point_mass,
            mixed.regime.label()
        ),
    )
}

fn c12_trainability() -> Outcome {
    let th = TrainabilityThresholds::default();
    let exp = trainability_verdict(&load_sequence(&manifest("examples/models/sequence_exponential.json")).unwrap(), th)
        .unwrap();
    let poly = trainability_verdict(&load_sequence(&manifest("examples/models/sequence_polynomial.json")).unwrap(), th)
        .unwrap();
    outcome(
        !exp.overall && poly.overall,
        format!(
            "exponential: t = {:.2} ± {:.2} {} overall {}; polynomial: t = {:.2} ± {:.2} {} overall {}",
            exp.decay_exponent,
            exp.decay_std_error,
            exp.variance_verdict.label(),
            exp.overall,
            poly.decay_exponent,
            poly.decay_std_error,
            poly.variance_verdict.label(),
            poly.overall
        ),
    )
}

fn run_cli(args: &[&str], out: &Path) -> (i32, Vec<u8>, Vec<(String, Vec<u8>)>) {
    let o = Command::new(env!("CARGO_BIN_EXE_jaws"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(out)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    (o.status.code().unwrap_or(-1), o.stdout, files)
}

fn c13_determinism() -> Outcome {
    let model = manifest("examples/models/two_sector_mixed_regime.json");
    let rank1 = manifest("examples/models/rank1_complex.json");
    let seq = manifest("examples/models/sequence_polynomial.json");
    let (model, rank1, seq) = (model.to_str().unwrap(), rank1.to_str().unwrap(), seq.to_str().unwrap());
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("analyze", vec!["analyze", "--model", model, "--sequence", seq]),
        ("sample", vec!["sample", "--model", rank1, "--seed", "7", "--samples", "500"]),
        ("simulate", vec!["simulate", "--model", rank1, "--seed", "7", "--samples", "300"]),
        ("minima", vec!["minima", "--model", model, "--grid", "512"]),
        ("trainability", vec!["trainability", "--sequence", seq]),
    ];
    let mut bad = Vec::new();
    for (name, args) in &cases {
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let a = run_cli(args, d1.path());
        let b = run_cli(args, d2.path());
        if a.0 != 0 || a != b {
            bad.push(format!("{name} (exit {})", a.0));
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} subcommands byte-identical across two runs", cases.len())
        } else {
            format!("differs or fails: {}", bad.join(", "))
        },
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("barren-plateau variance at N=8", c1_variance),
        ("loss law for a flat observable", c2_flat_loss_law),
        ("Porter–Thomas loss", c3_porter_thomas),
        ("conditional gradient variance", c4_conditional_gradient),
        ("Hessian sign structure", c5_hessian_sign),
        ("Bartlett vs direct Wishart", c6_bartlett_vs_direct),
        ("Marčenko–Pastur", c7_marchenko_pastur),
        ("Welch–Satterthwaite collapse", c8_welch_satterthwaite),
        ("exact identities", c9_exact_identities),
        ("derivatives vs finite differences", c10_finite_differences),
        ("minima-density phase transition", c11_phase_transition),
        ("trainability fixtures", c12_trainability),
        ("CLI determinism", c13_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let id = format!("{}", k + 1);
        if !filter.is_empty() && !filter.iter().any(|x| *x == id) {
            continue;
        }
        let t0 = Instant::now();
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name} [{:.1}s]: {}",
            k + 1,
            if o.pass { "PASS" } else { "FAIL" },
            t0.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
