//! Marčenko–Pastur law with ratio `γ = dim / dof`, the limiting spectrum of `W / dof`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{JawsError, Result};
use crate::quad;

/// Support endpoints `((1 − √γ)², (1 + √γ)²)`.
pub fn marchenko_pastur_support(gamma: f64) -> (f64, f64) {
    let s = gamma.sqrt();
    ((1.0 - s).powi(2), (1.0 + s).powi(2))
}

/// Point mass at zero, `1 − 1/γ` for `γ ≥ 1`.
pub fn marchenko_pastur_atom(gamma: f64) -> f64 {
    if gamma >= 1.0 {
        1.0 - 1.0 / gamma
    } else {
        0.0
    }
}

/// Continuous part of the density; zero outside the support.
pub fn marchenko_pastur_pdf(gamma: f64, lambda: f64) -> f64 {
    assert!(gamma > 0.0, "MP ratio must be positive");
    let (lo, hi) = marchenko_pastur_support(gamma);
    if lambda <= lo || lambda >= hi || lambda <= 0.0 {
        return 0.0;
    }
    ((hi - lambda) * (lambda - lo)).sqrt() / (2.0 * PI * gamma * lambda)
}

/// `∫ ln λ dμ_MP^γ` for `0 < γ ≤ 1`.
///
/// With `λ = γ₋ + (γ₊ − γ₋) sin²u` the square-root edges cancel against the
/// Jacobian and the integrand in `u ∈ (0, π/2)` is smooth apart from the
/// `ln λ` endpoint at `γ = 1`.
pub fn mp_log_moment(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(JawsError::Domain(format!("MP ratio must be positive, got {gamma}")));
    }
    if gamma > 1.0 {
        return Err(JawsError::Unsupported(format!(
            "MP log-moment diverges for ratio {gamma} > 1 (atom at zero)"
        )));
    }
    let (lo, hi) = marchenko_pastur_support(gamma);
    let w = hi - lo;
    let pref = w * w / (PI * gamma);
    let f = |u: f64| {
        let (s, c) = u.sin_cos();
        let lam = lo + w * s * s;
        if lam <= 0.0 {
            return 0.0;
        }
        pref * (s * s) * (c * c) * lam.ln() / lam
    };
    Ok(quad::integrate(f, 0.0, FRAC_PI_2, 1e-11))
}
