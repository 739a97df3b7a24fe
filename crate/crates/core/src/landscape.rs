//! Closed-form landscape quantities: variance, Gaussian-process conditions,
//! local-minima density and the trainability verdict.

use serde::{Deserialize, Serialize};

use crate::algebra::{JawsModel, SimpleComponent, SpectralStats};
use crate::error::{JawsError, Result};
use crate::randmat::mp_log_moment;
use crate::stats::{gamma_cdf, linear_fit};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn sector_stats(i: usize, c: &SimpleComponent) -> Result<SpectralStats> {
    c.stats().map_err(|e| JawsError::DegenerateComponent {
        component: i,
        reason: e.to_string(),
    })
}

/// `I_α Tr_α(O_s²) · I_α Tr_α(ρ²) / dim Aut` for one sector, `O_s` the shifted observable.
pub fn sector_variance(c: &SimpleComponent) -> f64 {
    let o2: f64 = c.shifted_observable().iter().map(|x| x * x).sum();
    c.index * o2 * c.index * c.input_purity() / c.dim_automorphism() as f64
}

/// Loss variance over the initialization, without the normalization factor.
pub fn loss_variance(model: &JawsModel) -> f64 {
    model.components.iter().map(sector_variance).sum()
}

/// `γ_α = p_α / (β_α r_α)` with the real-valued degrees of freedom.
pub fn overparameterization_ratios(model: &JawsModel) -> Result<Vec<f64>> {
    model
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let st = sector_stats(i, c)?;
            Ok(c.sector_params as f64 / (c.beta() * st.dof_real))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Underparameterized,
    Overparameterized,
    Mixed,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Underparameterized => "underparameterized",
            Regime::Overparameterized => "overparameterized",
            Regime::Mixed => "mixed",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorGamma {
    /// `β r / 2`.
    pub shape: f64,
    /// `2 / (β r)`.
    pub scale: f64,
    /// `ō · Tr ρ` with the ambient trace.
    pub loss_scale: f64,
    pub ratio: f64,
    pub underparameterized: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimaDensitySpec {
    pub sectors: Vec<SectorGamma>,
}

impl MinimaDensitySpec {
    pub fn from_model(model: &JawsModel) -> Result<Self> {
        let sectors = model
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let st = sector_stats(i, c)?;
                let br = c.beta() * st.dof_real;
                let ratio = c.sector_params as f64 / br;
                Ok(SectorGamma {
                    shape: 0.5 * br,
                    scale: 2.0 / br,
                    loss_scale: st.mean_eig * c.index * c.input_trace(),
                    ratio,
                    underparameterized: ratio < 1.0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MinimaDensitySpec { sectors })
    }

    pub fn underparameterized(&self) -> impl Iterator<Item = &SectorGamma> {
        self.sectors.iter().filter(|s| s.underparameterized)
    }

    pub fn regime(&self) -> Regime {
        let n_under = self.underparameterized().count();
        if n_under == self.sectors.len() && n_under > 0 {
            Regime::Underparameterized
        } else if n_under == 0 {
            Regime::Overparameterized
        } else {
            Regime::Mixed
        }
    }
}

/// Density of local minima on a uniform grid.
///
/// `point_mass` is set when no sector is underparameterized; the continuous
/// part is then identically zero and the grid is empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimaDensity {
    pub step: f64,
    pub z: Vec<f64>,
    pub density: Vec<f64>,
    pub point_mass: bool,
    pub regime: Regime,
}

/// Default number of bins spanning the widest sector.
pub const DEFAULT_GRID: usize = 4096;

impl MinimaDensity {
    pub fn continuous_mass(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.step
    }

    pub fn mean(&self) -> f64 {
        self.z.iter().zip(&self.density).map(|(z, d)| z * d).sum::<f64>() * self.step
    }

    /// Linear interpolation; constant below the first node, zero past the last.
    pub fn eval(&self, z: f64) -> f64 {
        if self.z.is_empty() || z < 0.0 {
            return 0.0;
        }
        if z <= self.z[0] {
            return self.density[0];
        }
        let j = ((z - self.z[0]) / self.step).floor() as usize;
        if j + 1 >= self.z.len() {
            return 0.0;
        }
        let t = (z - self.z[j]) / self.step;
        self.density[j] * (1.0 - t) + self.density[j + 1] * t
    }
}

/// Convolution of the scaled unit-mean gammas of every underparameterized sector.
///
/// Each sector is discretized into exact bin masses from its CDF on
/// `[jΔ, (j+1)Δ)`, which stays finite for shapes below one; the bin-mass
/// sequences are convolved and reported as densities at the bin-sum centres.
pub fn minima_density_grid(model: &JawsModel, grid: usize) -> Result<MinimaDensity> {
    if grid < 16 {
        return Err(JawsError::Domain(format!("grid resolution {grid} is too small")));
    }
    let spec = MinimaDensitySpec::from_model(model)?;
    let regime = spec.regime();
    let under: Vec<&SectorGamma> = spec.underparameterized().collect();
    if under.is_empty() {
        return Ok(MinimaDensity {
            step: 0.0,
            z: Vec::new(),
            density: Vec::new(),
            point_mass: true,
            regime,
        });
    }
    let mean: f64 = under.iter().map(|s| s.loss_scale).sum();
    let var: f64 = under.iter().map(|s| s.loss_scale.powi(2) * s.scale).sum();
    let step = (mean + 12.0 * var.sqrt()) / grid as f64;

    let mut acc = vec![1.0];
    for s in &under {
        let upper = s.loss_scale * (1.0 + 12.0 * s.scale.sqrt());
        let nb = ((upper / step).ceil() as usize).max(1);
        let cdf = |j: usize| gamma_cdf(j as f64 * step / s.loss_scale, s.shape, s.scale);
        let bins: Vec<f64> = (0..nb).map(|j| cdf(j + 1) - cdf(j)).collect();
        let mut next = vec![0.0; acc.len() + nb - 1];
        for (a, &x) in acc.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (b, &y) in bins.iter().enumerate() {
                next[a + b] += x * y;
            }
        }
        acc = next;
    }
    let offset = 0.5 * under.len() as f64;
    let z = (0..acc.len()).map(|j| (j as f64 + offset) * step).collect();
    let density = acc.iter().map(|m| m / step).collect();
    Ok(MinimaDensity {
        step,
        z,
        density,
        point_mass: false,
        regime,
    })
}

/// Continuous part of the minima density at `z`; zero when all sectors are overparameterized.
pub fn minima_density(model: &JawsModel, z: f64) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(JawsError::Domain(format!("minima density needs z >= 0, got {z}")));
    }
    Ok(minima_density_grid(model, DEFAULT_GRID)?.eval(z))
}

/// Single gamma `(k_eff, θ_eff)` matching the first two moments of the convolution.
pub fn welch_satterthwaite(model: &JawsModel) -> Result<(f64, f64)> {
    let spec = MinimaDensitySpec::from_model(model)?;
    let (mut m, mut v) = (0.0, 0.0);
    for s in spec.underparameterized() {
        m += s.loss_scale;
        v += s.loss_scale.powi(2) * s.scale;
    }
    if m == 0.0 && v == 0.0 {
        return Err(JawsError::Undefined(
            "no underparameterized sector: the minima law is a point mass at zero".into(),
        ));
    }
    Ok((m * m / v, v / m))
}

/// Additive constant inside the Kac–Rice log-density.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KacRiceConstant {
    /// `ln(π max(2,β) / (2√β))`, the regularized form.
    Regularized,
    /// `ln(π max(2,β) / (4√β))`, the form stated alongside the exact density.
    Exact,
}

/// Per-parameter leading-order log-density of critical points of one sector at loss `z`.
pub fn kac_rice_log_density(component: &SimpleComponent, z: f64, gamma: f64) -> Result<f64> {
    kac_rice_log_density_with(component, z, gamma, KacRiceConstant::Regularized)
}

pub fn kac_rice_log_density_with(
    component: &SimpleComponent,
    z: f64,
    gamma: f64,
    constant: KacRiceConstant,
) -> Result<f64> {
    if !(z > 0.0) {
        return Err(JawsError::Domain(format!("Kac–Rice density needs z > 0, got {z}")));
    }
    if !(gamma > 0.0) {
        return Err(JawsError::Domain(format!("ratio must be positive, got {gamma}")));
    }
    if gamma >= 1.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let st = component.stats()?;
    let b = component.beta();
    let mx = component.field.chi_dof() as f64;
    let denom = match constant {
        KacRiceConstant::Regularized => 2.0,
        KacRiceConstant::Exact => 4.0,
    };
    let x = z / (st.mean_eig * component.index * component.input_trace());
    Ok((std::f64::consts::PI * mx / (denom * b.sqrt())).ln()
        + (1.0 - x + x.ln()) / (2.0 * gamma)
        + 0.5 * mx
        - 1.0
        - EULER_GAMMA
        + mp_log_moment(gamma)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GpThresholds {
    /// Scaled variance must exceed this.
    pub variance_floor: f64,
    /// Third-cumulant scale must fall below this.
    pub cumulant_ceiling: f64,
}

impl Default for GpThresholds {
    /// `ceiling = floor^{3/2}`, so a rank-1 sector can never pass both tests.
    fn default() -> Self {
        GpThresholds {
            variance_floor: 1e-2,
            cumulant_ceiling: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GpReport {
    pub scaled_variance: f64,
    pub cumulant_scale: f64,
    pub sector_cumulants: Vec<f64>,
    pub variance_nonvanishing: bool,
    pub cumulant_vanishing: bool,
    pub gaussian_process: bool,
}

/// `𝒩² Var` against the floor and `max_α 𝒩³ I³ ō³ Tr_α(ρ³) / r²` against the ceiling.
pub fn gp_conditions(model: &JawsModel, thresholds: GpThresholds) -> Result<GpReport> {
    let n = model.normalization;
    let scaled_variance = n * n * loss_variance(model);
    let sector_cumulants = model
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let st = sector_stats(i, c)?;
            Ok((n * c.index * st.mean_eig).powi(3) * c.input_cube_trace() / st.dof_real.powi(2))
        })
        .collect::<Result<Vec<f64>>>()?;
    let cumulant_scale = sector_cumulants.iter().copied().fold(0.0, f64::max);
    let variance_nonvanishing = scaled_variance > thresholds.variance_floor;
    let cumulant_vanishing = cumulant_scale < thresholds.cumulant_ceiling;
    Ok(GpReport {
        scaled_variance,
        cumulant_scale,
        sector_cumulants,
        variance_nonvanishing,
        cumulant_vanishing,
        gaussian_process: variance_nonvanishing && cumulant_vanishing,
    })
}

/// Covariance of the loss at two inputs sharing each sector's eigenbasis.
pub fn gp_covariance_diagonal(model: &JawsModel, rho: &[Vec<f64>], rho_prime: &[Vec<f64>]) -> Result<f64> {
    let k = model.components.len();
    if rho.len() != k || rho_prime.len() != k {
        return Err(JawsError::Shape(format!(
            "need {k} input spectra per side, got {} and {}",
            rho.len(),
            rho_prime.len()
        )));
    }
    let mut total = 0.0;
    for (i, c) in model.components.iter().enumerate() {
        if rho[i].len() != c.dim || rho_prime[i].len() != c.dim {
            return Err(JawsError::Shape(format!(
                "component {i}: input spectra must have {} entries",
                c.dim
            )));
        }
        let o2: f64 = c.shifted_observable().iter().map(|x| x * x).sum();
        let overlap: f64 = rho[i].iter().zip(&rho_prime[i]).map(|(a, b)| a * b).sum();
        total += c.index * o2 / c.dim_automorphism() as f64 * c.index * overlap;
    }
    Ok(model.normalization.powi(2) * total)
}

/// Variance bound for a near-maximally-mixed sector.
pub fn low_purity_bound(component: &SimpleComponent, normalization: f64) -> Result<f64> {
    let n = component.dim as f64;
    let cap = n.powf(-0.999);
    let p = component.input_purity();
    if p > cap {
        return Err(JawsError::NotApplicable(format!(
            "input purity {p} exceeds dim^-0.999 = {cap}"
        )));
    }
    let m = (n / n.powf(0.999).floor()).ceil();
    Ok(normalization.powi(2) * m * m * sector_variance(component))
}

/// A model together with the ambient Hilbert-space dimension it describes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizedModel {
    pub ambient_dim: f64,
    pub model: JawsModel,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainabilityThresholds {
    /// Largest accepted `t` in `Var ~ (ln N)^{-t}`.
    pub variance_exponent: f64,
}

impl Default for TrainabilityThresholds {
    fn default() -> Self {
        TrainabilityThresholds { variance_exponent: 3.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceVerdict {
    NonVanishing,
    Vanishing,
    Inconclusive,
}

impl VarianceVerdict {
    pub fn label(self) -> &'static str {
        match self {
            VarianceVerdict::NonVanishing => "non-vanishing",
            VarianceVerdict::Vanishing => "vanishing",
            VarianceVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeDiagnostics {
    pub ambient_dim: f64,
    pub variance: f64,
    pub total_params: usize,
    pub max_beta_r: f64,
    pub minima_condition: bool,
    pub dof_real: Vec<f64>,
    pub ratios: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainabilityReport {
    /// Variance at the largest size.
    pub variance_value: f64,
    pub variance_verdict: VarianceVerdict,
    /// `-d ln Var / d ln ln N` over the fitting window.
    pub decay_exponent: f64,
    pub decay_std_error: f64,
    pub minima_condition: bool,
    pub overall: bool,
    pub sizes: Vec<SizeDiagnostics>,
}

/// Number of largest sizes the decay exponent is fitted on.
pub fn fit_window(n: usize) -> usize {
    n.div_ceil(2).max(3).min(n)
}

/// Non-vanishing variance and `p ≥ max β r` across a sequence of growing sizes.
///
/// The decay exponent is the negated slope of `ln Var` against `ln ln N` on
/// the largest sizes. The verdict is decided when the exponent is at least one
/// standard error away from the threshold.
pub fn trainability_verdict(
    sequence: &[SizedModel],
    thresholds: TrainabilityThresholds,
) -> Result<TrainabilityReport> {
    if sequence.len() < 3 {
        return Err(JawsError::TrendUnfit(sequence.len()));
    }
    let mut seq: Vec<&SizedModel> = sequence.iter().collect();
    seq.sort_by(|a, b| a.ambient_dim.total_cmp(&b.ambient_dim));
    let mut sizes = Vec::with_capacity(seq.len());
    for s in &seq {
        if !(s.ambient_dim > 1.0) {
            return Err(JawsError::Domain(format!(
                "ambient dimension must exceed 1, got {}",
                s.ambient_dim
            )));
        }
        let mut dof_real = Vec::new();
        let mut max_beta_r: f64 = 0.0;
        for (i, c) in s.model.components.iter().enumerate() {
            let st = sector_stats(i, c)?;
            dof_real.push(st.dof_real);
            max_beta_r = max_beta_r.max(c.beta() * st.dof_real);
        }
        sizes.push(SizeDiagnostics {
            ambient_dim: s.ambient_dim,
            variance: loss_variance(&s.model),
            total_params: s.model.total_params,
            max_beta_r,
            minima_condition: s.model.total_params as f64 >= max_beta_r,
            ratios: overparameterization_ratios(&s.model)?,
            dof_real,
        });
    }

    let w = fit_window(sizes.len());
    let tail = &sizes[sizes.len() - w..];
    let xs: Vec<f64> = tail.iter().map(|s| s.ambient_dim.ln().ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|s| s.variance.ln()).collect();
    let (decay_exponent, decay_std_error, variance_verdict) = if ys.iter().all(|y| y.is_finite()) {
        let (a, b) = linear_fit(&xs, &ys);
        let mx = xs.iter().sum::<f64>() / w as f64;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
        let se = (rss / (w as f64 - 2.0) / sxx).sqrt();
        let e = -b;
        let t = thresholds.variance_exponent;
        let verdict = if e + se < t {
            VarianceVerdict::NonVanishing
        } else if e - se > t {
            VarianceVerdict::Vanishing
        } else {
            VarianceVerdict::Inconclusive
        };
        (e, se, verdict)
    } else {
        (f64::NAN, f64::NAN, VarianceVerdict::Inconclusive)
    };

    let minima_condition = sizes.iter().all(|s| s.minima_condition);
    Ok(TrainabilityReport {
        variance_value: sizes.last().map(|s| s.variance).unwrap_or(f64::NAN),
        variance_verdict,
        decay_exponent,
        decay_std_error,
        minima_condition,
        overall: variance_verdict == VarianceVerdict::NonVanishing && minima_condition,
        sizes,
    })
}
