//! Exact Monte-Carlo of the parameterized circuit over ℝ, ℂ and ℍ.

pub mod ansatz;
pub mod pauli;

pub use ansatz::{finite_difference_gradient, finite_difference_hessian, AnsatzInstance, Generator};
pub use pauli::{parse_pauli_text, spectrum_from_pauli};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{FieldTag, JawsModel, SimpleComponent};
use crate::error::{JawsError, Result};
use crate::randmat::{Quaternion, RngState};
use crate::stats::EmpiricalDistribution;
use crate::wishart_process::param_layout;

/// Circuit draw for any field.
#[derive(Clone, Debug)]
pub enum Ansatz {
    Real(AnsatzInstance<f64>),
    Complex(AnsatzInstance<Complex64>),
    Quaternion(AnsatzInstance<Quaternion>),
}

macro_rules! each {
    ($s:expr, $a:ident => $e:expr) => {
        match $s {
            Ansatz::Real($a) => $e,
            Ansatz::Complex($a) => $e,
            Ansatz::Quaternion($a) => $e,
        }
    };
}

impl Ansatz {
    pub fn field(&self) -> FieldTag {
        match self {
            Ansatz::Real(_) => FieldTag::Real,
            Ansatz::Complex(_) => FieldTag::Complex,
            Ansatz::Quaternion(_) => FieldTag::Quaternion,
        }
    }

    pub fn num_params(&self) -> usize {
        each!(self, a => a.num_params())
    }

    pub fn loss_eval(&self, theta: &[f64], rho: &[f64], obs: &[f64]) -> Result<f64> {
        each!(self, a => a.loss_eval(theta, rho, obs))
    }

    pub fn grad_eval(&self, rho: &[f64], obs: &[f64]) -> Result<Vec<f64>> {
        each!(self, a => a.grad_eval(rho, obs))
    }

    pub fn hessian_eval(&self, rho: &[f64], obs: &[f64]) -> Result<DMatrix<f64>> {
        each!(self, a => a.hessian_eval(rho, obs))
    }

    pub fn fd_gradient(&self, rho: &[f64], obs: &[f64], step: f64) -> Result<Vec<f64>> {
        each!(self, a => finite_difference_gradient(a, rho, obs, step))
    }

    pub fn fd_hessian(&self, rho: &[f64], obs: &[f64], step: f64) -> Result<DMatrix<f64>> {
        each!(self, a => finite_difference_hessian(a, rho, obs, step))
    }

    /// Largest deviation from unitarity of `U(θ)`.
    pub fn unitarity_defect(&self, theta: &[f64]) -> f64 {
        each!(self, a => a.unitary(theta).unitarity_defect())
    }
}

/// Draws the conjugators and `p_α` generators of one sector.
pub fn build_ansatz(component: &SimpleComponent, rng: &mut RngState) -> Result<Ansatz> {
    let (n, i, p) = (component.dim, component.index, component.sector_params);
    Ok(match component.field {
        FieldTag::Real => Ansatz::Real(AnsatzInstance::sample(n, i, p, rng)?),
        FieldTag::Complex => Ansatz::Complex(AnsatzInstance::sample(n, i, p, rng)?),
        FieldTag::Quaternion => Ansatz::Quaternion(AnsatzInstance::sample(n, i, p, rng)?),
    })
}

/// What each Monte-Carlo draw evaluates beyond the loss.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct McOptions {
    pub gradient: bool,
    pub hessian: bool,
}

/// One joint draw of loss, gradient and Hessian at `θ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LandscapeSample {
    pub loss: f64,
    pub gradient: Vec<f64>,
    pub hessian: Option<DMatrix<f64>>,
}

#[derive(Clone, Debug)]
pub struct McLandscape {
    pub loss: EmpiricalDistribution,
    pub gradient: Vec<EmpiricalDistribution>,
    pub hessian_diagonal: Vec<EmpiricalDistribution>,
    pub samples: Vec<LandscapeSample>,
}

impl McLandscape {
    fn from_samples(samples: Vec<LandscapeSample>, p: usize) -> Self {
        let loss = EmpiricalDistribution::new(samples.iter().map(|s| s.loss).collect());
        let gradient = if samples.first().is_some_and(|s| !s.gradient.is_empty()) {
            (0..p)
                .map(|i| EmpiricalDistribution::new(samples.iter().map(|s| s.gradient[i]).collect()))
                .collect()
        } else {
            Vec::new()
        };
        let hessian_diagonal = if samples.first().is_some_and(|s| s.hessian.is_some()) {
            (0..p)
                .map(|i| {
                    EmpiricalDistribution::new(
                        samples
                            .iter()
                            .map(|s| s.hessian.as_ref().map_or(f64::NAN, |h| h[(i, i)]))
                            .collect(),
                    )
                })
                .collect()
        } else {
            Vec::new()
        };
        McLandscape {
            loss,
            gradient,
            hessian_diagonal,
            samples,
        }
    }

    /// `(loss, gradient entry)` pairs pooled over all entries.
    pub fn loss_gradient_pairs(&self) -> Vec<(f64, f64)> {
        self.samples
            .iter()
            .flat_map(|s| s.gradient.iter().map(move |g| (s.loss, *g)))
            .collect()
    }
}

pub const MIN_SAMPLES: usize = 100;

fn draw(
    component: &SimpleComponent,
    obs: &[f64],
    opts: McOptions,
    rng: &mut RngState,
) -> Result<LandscapeSample> {
    let a = build_ansatz(component, rng)?;
    let rho = &component.input_spectrum;
    let zero = vec![0.0; a.num_params()];
    Ok(LandscapeSample {
        loss: a.loss_eval(&zero, rho, obs)?,
        gradient: if opts.gradient {
            a.grad_eval(rho, obs)?
        } else {
            Vec::new()
        },
        hessian: if opts.hessian {
            Some(a.hessian_eval(rho, obs)?)
        } else {
            None
        },
    })
}

/// Independent circuit draws for one sector at `θ = 0`.
///
/// Losses use the observable shifted to a zero floor, the convention the
/// Wishart-process laws are stated in. Each draw runs on its own RNG substream.
pub fn mc_landscape(
    component: &SimpleComponent,
    n_samples: usize,
    opts: McOptions,
    rng: &mut RngState,
) -> Result<McLandscape> {
    if n_samples < MIN_SAMPLES {
        return Err(JawsError::Domain(format!(
            "need at least {MIN_SAMPLES} samples, got {n_samples}"
        )));
    }
    let obs = component.shifted_observable();
    let samples = (0..n_samples)
        .map(|_| draw(component, &obs, opts, &mut rng.split()))
        .collect::<Result<Vec<_>>>()?;
    Ok(McLandscape::from_samples(samples, component.sector_params))
}

/// Direct sum of independently simulated sectors, scaled by the normalization.
///
/// Sector gradients and Hessians are placed on the parameter indices given by
/// [`param_layout`]; sectors sharing a generator index add up.
pub fn mc_model(model: &JawsModel, n_samples: usize, opts: McOptions, rng: &mut RngState) -> Result<McLandscape> {
    if model.components.is_empty() {
        return Err(JawsError::InvalidModel("model has no components".into()));
    }
    if n_samples < MIN_SAMPLES {
        return Err(JawsError::Domain(format!(
            "need at least {MIN_SAMPLES} samples, got {n_samples}"
        )));
    }
    let layout = param_layout(model);
    let p = model.total_params;
    let nrm = model.normalization;
    let obs: Vec<Vec<f64>> = model.components.iter().map(|c| c.shifted_observable()).collect();
    let mut samples = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let mut r = rng.split();
        let mut s = LandscapeSample {
            loss: 0.0,
            gradient: if opts.gradient { vec![0.0; p] } else { Vec::new() },
            hessian: opts.hessian.then(|| DMatrix::zeros(p, p)),
        };
        for ((c, o), idx) in model.components.iter().zip(&obs).zip(&layout) {
            let d = draw(c, o, opts, &mut r.split())?;
            s.loss += nrm * d.loss;
            for (k, g) in idx.iter().zip(&d.gradient) {
                s.gradient[*k] += nrm * g;
            }
            if let (Some(hm), Some(dh)) = (s.hessian.as_mut(), d.hessian.as_ref()) {
                for (a, ia) in idx.iter().enumerate() {
                    for (b, ib) in idx.iter().enumerate() {
                        hm[(*ia, *ib)] += nrm * dh[(a, b)];
                    }
                }
            }
        }
        samples.push(s);
    }
    Ok(McLandscape::from_samples(samples, p))
}
