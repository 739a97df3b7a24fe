//! Parameterized circuit on one simple sector.
//!
//! `U(θ) = g₀† V(θ) h` with `V(θ) = ∏_i exp(θ_i K_i)` and `K_i = g_i A_i g_i†`.
//! The loss is `I · Re Tr(ρ U O U†)` with `ρ` diagonal in the standard basis
//! and `O` diagonal in its own; both conjugators are Haar, so this has the
//! same law as the `U† O U` convention.

use nalgebra::DMatrix;

use crate::algebra::FieldTag;
use crate::error::{JawsError, Result};
use crate::randmat::haar::{haar_frame, HouseholderHaar};
use crate::randmat::matrix::{inner, inner_re, Mat, Scalar};

/// Rank-one (ℂ, ℍ) or rank-two (ℝ) anti-Hermitian generator in its rotated frame.
#[derive(Clone, Debug)]
pub enum Generator<T> {
    /// `a bᵀ − b aᵀ`.
    Plane { a: Vec<T>, b: Vec<T> },
    /// `a u a†` with `u` an imaginary unit.
    Phase { a: Vec<T>, unit: T },
}

impl<T: Scalar> Generator<T> {
    /// `K v`.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        match self {
            Generator::Plane { a, b } => {
                let (pa, pb) = (inner(a, v), inner(b, v));
                a.iter().zip(b).map(|(x, y)| *x * pb - *y * pa).collect()
            }
            Generator::Phase { a, unit } => {
                let s = *unit * inner(a, v);
                a.iter().map(|x| *x * s).collect()
            }
        }
    }

    /// `v ← exp(θ K) v`.
    pub fn exp_apply(&self, theta: f64, v: &mut [T]) {
        let (s, c) = theta.sin_cos();
        match self {
            Generator::Plane { a, b } => {
                // K² = −(a aᵀ + b bᵀ) on span{a, b}
                let (pa, pb) = (inner(a, v), inner(b, v));
                let ca = pb.scale(s) - pa.scale(1.0 - c);
                let cb = -pa.scale(s) - pb.scale(1.0 - c);
                for ((x, ai), bi) in v.iter_mut().zip(a).zip(b) {
                    *x += *ai * ca + *bi * cb;
                }
            }
            Generator::Phase { a, unit } => {
                let m = unit.scale(s) + T::from_real(c - 1.0);
                let coef = m * inner(a, v);
                for (x, ai) in v.iter_mut().zip(a) {
                    *x += *ai * coef;
                }
            }
        }
    }

    pub fn to_dense(&self, n: usize) -> Mat<T> {
        let mut m = Mat::zeros(n, n);
        for c in 0..n {
            let mut e = vec![T::zero(); n];
            e[c] = T::one();
            m.set_column(c, &self.apply(&e));
        }
        m
    }
}

/// One random draw of the circuit for a sector of dimension `dim`.
#[derive(Clone, Debug)]
pub struct AnsatzInstance<T> {
    pub dim: usize,
    pub index: f64,
    pub g0: HouseholderHaar<T>,
    pub h: HouseholderHaar<T>,
    pub generators: Vec<Generator<T>>,
}

impl<T: Scalar> AnsatzInstance<T> {
    /// Haar conjugators and `p` generators. Quaternionic sectors use one frame
    /// for each run of three parameters, one per imaginary unit.
    pub fn sample<R: rand::Rng + ?Sized>(dim: usize, index: f64, params: usize, rng: &mut R) -> Result<Self> {
        if dim < 2 {
            return Err(JawsError::Unsupported(format!(
                "a sector of dimension {dim} has no nontrivial generator"
            )));
        }
        let g0 = HouseholderHaar::sample(dim, rng);
        let h = HouseholderHaar::sample(dim, rng);
        let mut generators = Vec::with_capacity(params);
        match T::FIELD {
            FieldTag::Real => {
                for _ in 0..params {
                    let mut f = haar_frame::<T, R>(dim, 2, rng);
                    let b = f.pop().expect("two columns");
                    let a = f.pop().expect("two columns");
                    generators.push(Generator::Plane { a, b });
                }
            }
            FieldTag::Complex => {
                for _ in 0..params {
                    let a = haar_frame::<T, R>(dim, 1, rng).pop().expect("one column");
                    generators.push(Generator::Phase { a, unit: T::imag_unit(0) });
                }
            }
            FieldTag::Quaternion => {
                let mut a = Vec::new();
                for i in 0..params {
                    if i % 3 == 0 {
                        a = haar_frame::<T, R>(dim, 1, rng).pop().expect("one column");
                    }
                    generators.push(Generator::Phase {
                        a: a.clone(),
                        unit: T::imag_unit(i % 3),
                    });
                }
            }
        }
        Ok(AnsatzInstance {
            dim,
            index,
            g0,
            h,
            generators,
        })
    }

    pub fn num_params(&self) -> usize {
        self.generators.len()
    }

    fn check(&self, rho: &[f64], obs: &[f64]) -> Result<()> {
        if rho.len() != self.dim || obs.len() != self.dim {
            return Err(JawsError::Shape(format!(
                "spectra of length {} and {} for a sector of dimension {}",
                rho.len(),
                obs.len(),
                self.dim
            )));
        }
        Ok(())
    }

    /// `h diag(o) h† v`.
    fn observable_apply(&self, obs: &[f64], v: &[T]) -> Vec<T> {
        let mut w = v.to_vec();
        self.h.apply_adjoint(&mut w);
        for (x, o) in w.iter_mut().zip(obs) {
            *x = x.scale(*o);
        }
        self.h.apply(&mut w);
        w
    }

    /// `(ρ_μ, g₀ e_μ)` for the nonzero input eigenvalues.
    fn input_states(&self, rho: &[f64]) -> Vec<(f64, Vec<T>)> {
        rho.iter()
            .enumerate()
            .filter(|(_, r)| **r != 0.0)
            .map(|(mu, r)| (*r, self.g0.column(mu)))
            .collect()
    }

    /// `V(θ)† v`.
    fn v_adjoint_apply(&self, theta: &[f64], v: &mut [T]) {
        for (g, t) in self.generators.iter().zip(theta) {
            g.exp_apply(-t, v);
        }
    }

    pub fn loss_eval(&self, theta: &[f64], rho: &[f64], obs: &[f64]) -> Result<f64> {
        self.check(rho, obs)?;
        if theta.len() != self.num_params() {
            return Err(JawsError::Shape(format!(
                "{} angles for {} parameters",
                theta.len(),
                self.num_params()
            )));
        }
        let mut acc = 0.0;
        for (r, mut psi) in self.input_states(rho) {
            self.v_adjoint_apply(theta, &mut psi);
            let ow = self.observable_apply(obs, &psi);
            acc += r * inner_re(&psi, &ow);
        }
        Ok(self.index * acc)
    }

    /// `∂_i ℓ = −2 I Σ_μ ρ_μ Re⟨K_i φ_μ | O' φ_μ⟩` at `θ = 0`.
    pub fn grad_eval(&self, rho: &[f64], obs: &[f64]) -> Result<Vec<f64>> {
        self.check(rho, obs)?;
        let mut g = vec![0.0; self.num_params()];
        for (r, phi) in self.input_states(rho) {
            let ophi = self.observable_apply(obs, &phi);
            for (gi, k) in g.iter_mut().zip(&self.generators) {
                *gi -= 2.0 * r * inner_re(&k.apply(&phi), &ophi);
            }
        }
        for x in g.iter_mut() {
            *x *= self.index;
        }
        Ok(g)
    }

    /// `∂_i ∂_j ℓ = −2 I Σ_μ ρ_μ Re⟨K_i φ_μ | (K_j O' − O' K_j) φ_μ⟩` at `θ = 0`, `i ≤ j`.
    pub fn hessian_eval(&self, rho: &[f64], obs: &[f64]) -> Result<DMatrix<f64>> {
        self.check(rho, obs)?;
        let p = self.num_params();
        let mut hm = DMatrix::zeros(p, p);
        for (r, phi) in self.input_states(rho) {
            let ophi = self.observable_apply(obs, &phi);
            let kphi: Vec<Vec<T>> = self.generators.iter().map(|k| k.apply(&phi)).collect();
            for j in 0..p {
                let a = self.generators[j].apply(&ophi);
                let b = self.observable_apply(obs, &kphi[j]);
                let cj: Vec<T> = a.iter().zip(&b).map(|(x, y)| *x - *y).collect();
                for i in 0..=j {
                    hm[(i, j)] -= 2.0 * r * inner_re(&kphi[i], &cj);
                }
            }
        }
        for j in 0..p {
            for i in 0..j {
                hm[(j, i)] = hm[(i, j)];
            }
        }
        Ok(hm * self.index)
    }

    /// Dense `U(θ) = g₀† V(θ) h`.
    pub fn unitary(&self, theta: &[f64]) -> Mat<T> {
        let n = self.dim;
        let mut u = Mat::zeros(n, n);
        for c in 0..n {
            let mut col = self.h.column(c);
            for (g, t) in self.generators.iter().zip(theta).rev() {
                g.exp_apply(*t, &mut col);
            }
            self.g0.apply_adjoint(&mut col);
            u.set_column(c, &col);
        }
        u
    }

    /// Dense `exp(θ K_i)`.
    pub fn generator_exp(&self, i: usize, theta: f64) -> Mat<T> {
        let n = self.dim;
        let mut m = Mat::identity(n);
        for c in 0..n {
            let mut col = m.column(c);
            self.generators[i].exp_apply(theta, &mut col);
            m.set_column(c, &col);
        }
        m
    }
}

/// Central differences of [`AnsatzInstance::loss_eval`] at `θ = 0`.
pub fn finite_difference_gradient<T: Scalar>(
    a: &AnsatzInstance<T>,
    rho: &[f64],
    obs: &[f64],
    step: f64,
) -> Result<Vec<f64>> {
    let p = a.num_params();
    let mut th = vec![0.0; p];
    (0..p)
        .map(|i| {
            th[i] = step;
            let up = a.loss_eval(&th, rho, obs)?;
            th[i] = -step;
            let dn = a.loss_eval(&th, rho, obs)?;
            th[i] = 0.0;
            Ok((up - dn) / (2.0 * step))
        })
        .collect()
}

/// Nested central differences at `θ = 0`.
pub fn finite_difference_hessian<T: Scalar>(
    a: &AnsatzInstance<T>,
    rho: &[f64],
    obs: &[f64],
    step: f64,
) -> Result<DMatrix<f64>> {
    let p = a.num_params();
    let mut hm = DMatrix::zeros(p, p);
    let mut th = vec![0.0; p];
    for i in 0..p {
        for j in i..p {
            let mut acc = 0.0;
            for (si, sj, w) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
                th[i] += si * step;
                th[j] += sj * step;
                acc += w * a.loss_eval(&th, rho, obs)?;
                th[i] = 0.0;
                th[j] = 0.0;
            }
            hm[(i, j)] = acc / (4.0 * step * step);
            hm[(j, i)] = hm[(i, j)];
        }
    }
    Ok(hm)
}
