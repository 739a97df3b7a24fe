//! Asymptotic joint law of loss, gradient and Hessian.
//!
//! Each sector contributes an independent Wishart draw. Losses are reported
//! relative to the sector's observable floor (minimum eigenvalue times the
//! input trace), so `z_α ≥ 0`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::algebra::{JawsModel, SimpleComponent, SpectralStats};
use crate::error::{JawsError, Result};
use crate::randmat::wishart::bartlett_generic;
use crate::randmat::{chi2_sample, chi_sample, wishart_diagonal};
use crate::stats::gamma_pdf;

/// Relative tolerance used to decide that an input spectrum is rank one.
pub const RANK_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossDraw {
    /// `z_α` per component.
    pub components: Vec<f64>,
    /// `𝒩 Σ_α z_α`; the per-sector values exclude the normalization.
    pub total: f64,
    /// Diagonal of each component's Wishart draw in the input eigenbasis.
    pub wishart_diagonals: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalGradientDraw {
    pub values: Vec<f64>,
    pub conditioning: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalHessianDraw {
    pub matrix: DMatrix<f64>,
    pub conditioning: Vec<f64>,
    /// Gaussian factors `G_{α,i}` per sector, in that sector's parameter order.
    pub sector_gaussians: Vec<Vec<f64>>,
}

/// Parameter indices each sector acts on.
///
/// When the sector counts fit inside `p` every generator acts on exactly one
/// sector and sectors take consecutive blocks. Otherwise sector `α` acts on
/// the first `p_α` generators, so generators are shared between sectors.
pub fn param_layout(model: &JawsModel) -> Vec<Vec<usize>> {
    if model.is_fully_controllable() {
        let mut off = 0;
        model
            .components
            .iter()
            .map(|c| {
                let v: Vec<usize> = (off..off + c.sector_params).collect();
                off += c.sector_params;
                v
            })
            .collect()
    } else {
        model
            .components
            .iter()
            .map(|c| (0..c.sector_params).collect())
            .collect()
    }
}

fn component_stats(i: usize, c: &SimpleComponent) -> Result<SpectralStats> {
    c.stats().map_err(|e| JawsError::DegenerateComponent {
        component: i,
        reason: e.to_string(),
    })
}

fn require_rank_one(i: usize, c: &SimpleComponent) -> Result<()> {
    if c.input_rank(RANK_TOL) != 1 {
        return Err(JawsError::Unsupported(format!(
            "component {i}: the conditional derivative laws need a rank-1 input; \
             use the exact simulator for mixed inputs"
        )));
    }
    Ok(())
}

fn check_conditioning(model: &JawsModel, z: &[f64]) -> Result<()> {
    if z.len() != model.components.len() {
        return Err(JawsError::Shape(format!(
            "{} conditioning losses for {} components",
            z.len(),
            model.components.len()
        )));
    }
    if let Some(bad) = z.iter().find(|&&x| !(x >= 0.0)) {
        return Err(JawsError::Domain(format!("conditioning loss must be >= 0, got {bad}")));
    }
    Ok(())
}

/// One draw of `z_α = (I_α ō_α / r_α) Σ_μ ρ_μ W_μμ` per component.
pub fn sample_loss<R: Rng + ?Sized>(model: &JawsModel, rng: &mut R) -> Result<LossDraw> {
    let mut components = Vec::with_capacity(model.components.len());
    let mut diags = Vec::with_capacity(model.components.len());
    for (i, c) in model.components.iter().enumerate() {
        let st = component_stats(i, c)?;
        if c.input_trace() <= 0.0 {
            return Err(JawsError::DegenerateComponent {
                component: i,
                reason: "input spectrum is zero".into(),
            });
        }
        let w = wishart_diagonal(c.field, c.dim, st.dof, rng);
        let acc: f64 = c.input_spectrum.iter().zip(&w).map(|(p, x)| p * x).sum();
        components.push(c.index * st.mean_eig / st.dof as f64 * acc);
        diags.push(w);
    }
    Ok(LossDraw {
        total: model.normalization * components.iter().sum::<f64>(),
        components,
        wishart_diagonals: diags,
    })
}

/// Rebuilds `z_α` from stored Wishart diagonals.
pub fn reconstruct_loss(model: &JawsModel, draw: &LossDraw) -> Result<Vec<f64>> {
    model
        .components
        .iter()
        .enumerate()
        .zip(&draw.wishart_diagonals)
        .map(|((i, c), w)| {
            let st = component_stats(i, c)?;
            let acc: f64 = c.input_spectrum.iter().zip(w).map(|(p, x)| p * x).sum();
            Ok(c.index * st.mean_eig / st.dof as f64 * acc)
        })
        .collect()
}

/// Gamma shape and scale of the rank-1 loss law: `βr/2` and `2 I ō Tr ρ / (βr)`.
pub fn loss_gamma_params(component: &SimpleComponent) -> Result<(f64, f64)> {
    let st = component.stats()?;
    let br = component.beta() * st.dof_real;
    Ok((
        0.5 * br,
        2.0 * component.index * st.mean_eig * component.input_trace() / br,
    ))
}

/// Density of the sector loss for a rank-1 input.
pub fn loss_pdf_rank1(component: &SimpleComponent, z: f64) -> Result<f64> {
    if z < 0.0 {
        return Err(JawsError::Domain(format!("loss density needs z >= 0, got {z}")));
    }
    require_rank_one(0, component)?;
    let (k, theta) = loss_gamma_params(component)?;
    Ok(gamma_pdf(z, k, theta))
}

/// Standard deviation of the conditional gradient entry divided by `√z`.
///
/// Entry law: `(2 I σ / (β N)) · √(z Tr ρ / (I ō)) · G · χ`.
pub fn gradient_scale(component: &SimpleComponent, st: &SpectralStats) -> f64 {
    let b = component.beta();
    2.0 * component.index * st.std_eig / (b * component.dim as f64)
        * (component.input_trace() / (component.index * st.mean_eig)).sqrt()
}

/// Closed-form `Var[∂ℓ | z] / z` for one sector.
pub fn gradient_variance_slope(component: &SimpleComponent) -> Result<f64> {
    let st = component.stats()?;
    let s = gradient_scale(component, &st);
    Ok(s * s * component.field.chi_dof() as f64)
}

pub fn sample_gradient_given_loss<R: Rng + ?Sized>(
    model: &JawsModel,
    z: &[f64],
    rng: &mut R,
) -> Result<ConditionalGradientDraw> {
    check_conditioning(model, z)?;
    let layout = param_layout(model);
    let mut values = vec![0.0; model.total_params];
    for (a, c) in model.components.iter().enumerate() {
        require_rank_one(a, c)?;
        let st = component_stats(a, c)?;
        if z[a] == 0.0 {
            continue;
        }
        let pref = model.normalization * gradient_scale(c, &st) * z[a].sqrt();
        let k = c.field.chi_dof() as f64;
        for &i in &layout[a] {
            let g: f64 = rng.sample(StandardNormal);
            values[i] += pref * g * chi_sample(k, rng);
        }
    }
    Ok(ConditionalGradientDraw {
        values,
        conditioning: z.to_vec(),
    })
}

/// Prefactor of the critical-point Hessian entry, `(2 I σ / N²) · √(z Tr ρ / (I β ō))`.
pub fn hessian_scale(component: &SimpleComponent, st: &SpectralStats, z: f64) -> f64 {
    let n = component.dim as f64;
    2.0 * component.index * st.std_eig / (n * n)
        * (z * component.input_trace() / (component.index * component.beta() * st.mean_eig)).sqrt()
}

/// Real Wishart `p × p` matrix with `dof` degrees of freedom.
fn real_wishart<R: Rng + ?Sized>(p: usize, dof: usize, rng: &mut R) -> DMatrix<f64> {
    let w = bartlett_generic::<f64, R>(p, dof, rng);
    DMatrix::from_fn(p, p, |r, c| w[(r, c)])
}

pub fn sample_hessian_at_critical<R: Rng + ?Sized>(
    model: &JawsModel,
    z: &[f64],
    rng: &mut R,
) -> Result<ConditionalHessianDraw> {
    check_conditioning(model, z)?;
    let layout = param_layout(model);
    let p = model.total_params;
    let mut h = DMatrix::<f64>::zeros(p, p);
    let mut sector_gaussians = Vec::with_capacity(model.components.len());
    for (a, c) in model.components.iter().enumerate() {
        let idx = &layout[a];
        if idx.is_empty() {
            sector_gaussians.push(Vec::new());
            continue;
        }
        require_rank_one(a, c)?;
        let st = component_stats(a, c)?;
        let k = c.field.chi_dof() as f64;
        let g: Vec<f64> = (0..idx.len()).map(|_| rng.sample(StandardNormal)).collect();
        let chi: Vec<f64> = (0..idx.len()).map(|_| chi_sample(k, rng)).collect();
        let dof = c.field.beta() as usize * st.dof;
        let w = real_wishart(idx.len(), dof, rng);
        let s = model.normalization * hessian_scale(c, &st, z[a]);
        if s != 0.0 {
            for li in 0..idx.len() {
                for lj in 0..=li {
                    let v = s * g[li] * chi[lj] * w[(li, lj)];
                    h[(idx[li], idx[lj])] += v;
                    if li != lj {
                        h[(idx[lj], idx[li])] += v;
                    }
                }
            }
        }
        sector_gaussians.push(g);
    }
    Ok(ConditionalHessianDraw {
        matrix: h,
        conditioning: z.to_vec(),
        sector_gaussians,
    })
}

/// `N⁻¹ √Σ W √Σ` with `Σ` diagonal χ²(max(2, β)) and `W` real Wishart with `β r` dof.
pub fn regularized_hessian_sample<R: Rng + ?Sized>(component: &SimpleComponent, rng: &mut R) -> Result<DMatrix<f64>> {
    let p = component.sector_params;
    if p == 0 {
        return Err(JawsError::Domain("regularized Hessian needs at least one sector parameter".into()));
    }
    let st = component.stats()?;
    let k = component.field.chi_dof() as f64;
    let sq: Vec<f64> = (0..p).map(|_| chi2_sample(k, rng).sqrt()).collect();
    let w = real_wishart(p, component.field.beta() as usize * st.dof, rng);
    let n = component.dim as f64;
    Ok(DMatrix::from_fn(p, p, |r, c| sq[r] * w[(r, c)] * sq[c] / n))
}

/// `true` when every eigenvalue is at least `-tol`.
pub fn is_psd(m: &DMatrix<f64>, tol: f64) -> bool {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .all(|&e| e >= -tol)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FieldTag;
    use crate::randmat::RngState;

    fn rank1_sector(field: FieldTag, n: usize, obs: Vec<f64>, p: usize) -> SimpleComponent {
        let mut rho = vec![0.0; n];
        rho[0] = 1.0;
        SimpleComponent::new(field, n, 1.0, obs, rho, p).unwrap()
    }

    #[test]
    fn reconstruction_is_exact() {
        let c = SimpleComponent::new(FieldTag::Complex, 4, 1.5, vec![0.0, 1.0, 2.0, 3.0], vec![0.4, 0.3, 0.2, 0.1], 2).unwrap();
        let m = JawsModel::single(c).unwrap();
        let mut rng = RngState::from_seed(1);
        let d = sample_loss(&m, &mut rng).unwrap();
        assert_eq!(reconstruct_loss(&m, &d).unwrap(), d.components);
        assert_eq!(d.total, d.components.iter().sum::<f64>());
    }

    #[test]
    fn zero_loss_gives_zero_derivatives() {
        let c = rank1_sector(FieldTag::Complex, 8, vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0], 3);
        let m = JawsModel::single(c).unwrap();
        let mut rng = RngState::from_seed(2);
        let g = sample_gradient_given_loss(&m, &[0.0], &mut rng).unwrap();
        assert!(g.values.iter().all(|&x| x == 0.0));
        let h = sample_hessian_at_critical(&m, &[0.0], &mut rng).unwrap();
        assert!(h.matrix.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn mixed_input_rejected_for_derivatives() {
        let c = SimpleComponent::new(FieldTag::Real, 2, 1.0, vec![0.0, 1.0], vec![0.5, 0.5], 1).unwrap();
        let m = JawsModel::single(c).unwrap();
        let mut rng = RngState::from_seed(3);
        assert!(matches!(
            sample_gradient_given_loss(&m, &[1.0], &mut rng),
            Err(JawsError::Unsupported(_))
        ));
    }

    #[test]
    fn degenerate_component_reported() {
        let c = SimpleComponent::new(FieldTag::Real, 2, 1.0, vec![1.0, 1.0], vec![1.0, 0.0], 1).unwrap();
        let m = JawsModel::single(c).unwrap();
        let mut rng = RngState::from_seed(3);
        assert!(matches!(
            sample_loss(&m, &mut rng),
            Err(JawsError::DegenerateComponent { component: 0, .. })
        ));
    }

    #[test]
    fn hessian_is_symmetric() {
        let c = rank1_sector(FieldTag::Quaternion, 6, vec![0.0, 1.0, 1.0, 2.0, 2.0, 2.0], 5);
        let m = JawsModel::single(c).unwrap();
        let mut rng = RngState::from_seed(4);
        let h = sample_hessian_at_critical(&m, &[0.7], &mut rng).unwrap();
        assert_eq!(h.matrix, h.matrix.transpose());
    }

    #[test]
    fn layout_blocks_and_sharing() {
        let a = rank1_sector(FieldTag::Real, 2, vec![0.0, 1.0], 2);
        let b = rank1_sector(FieldTag::Real, 2, vec![0.0, 1.0], 3);
        let m = JawsModel::new(vec![a.clone(), b.clone()], 5, 1.0).unwrap();
        assert_eq!(param_layout(&m), vec![vec![0, 1], vec![2, 3, 4]]);
        let m = JawsModel::new(vec![a, b], 3, 1.0).unwrap();
        assert_eq!(param_layout(&m), vec![vec![0, 1], vec![0, 1, 2]]);
    }

    #[test]
    fn regularized_hessian_psd_full_rank() {
        let c = rank1_sector(FieldTag::Complex, 16, (0..16).map(|i| (i % 4) as f64).collect(), 6);
        let mut rng = RngState::from_seed(5);
        for _ in 0..50 {
            let h = regularized_hessian_sample(&c, &mut rng).unwrap();
            assert!(is_psd(&h, 1e-10));
        }
    }
}
