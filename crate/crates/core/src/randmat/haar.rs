//! Haar sampling on SO(N), U(N) and Sp(N) by Householder QR of a Gaussian
//! matrix with the diagonal of R rotated to the positive reals.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::matrix::{inner, Mat, MatrixOverField, Scalar};
use super::quaternion::Quaternion;
use crate::algebra::FieldTag;

/// Q factor of `z` with positive-real R diagonal.
pub fn qr_q_positive<T: Scalar>(z: &Mat<T>) -> Mat<T> {
    let n = z.rows();
    assert_eq!(n, z.cols(), "square input expected");
    let mut a = z.clone();
    let mut q = Mat::<T>::identity(n);
    let mut v = vec![T::zero(); n];
    for k in 0..n {
        let len = n - k;
        let xnorm = (k..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let alpha = a[(k, k)].phase();
        for i in 0..len {
            v[i] = a[(k + i, k)];
        }
        v[0] += alpha.scale(xnorm);
        let vv: f64 = v[..len].iter().map(|x| x.norm_sqr()).sum();
        let c = 2.0 / vv;
        // A ← (I − c v v†) A on the trailing block
        for j in k..n {
            let mut s = T::zero();
            for i in 0..len {
                s += v[i].conj() * a[(k + i, j)];
            }
            let s = s.scale(c);
            for i in 0..len {
                let upd = v[i] * s;
                a[(k + i, j)] -= upd;
            }
        }
        // Q ← Q (I − c v v†)
        for r in 0..n {
            let mut s = T::zero();
            for i in 0..len {
                s += q[(r, k + i)] * v[i];
            }
            let s = s.scale(c);
            for i in 0..len {
                let upd = s * v[i].conj();
                q[(r, k + i)] -= upd;
            }
        }
    }
    for k in 0..n {
        let ph = a[(k, k)].phase();
        for r in 0..n {
            q[(r, k)] = q[(r, k)] * ph;
        }
    }
    q
}

pub fn haar_generic<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat<T> {
    let z = Mat::<T>::gaussian(n, n, rng);
    let mut q = qr_q_positive(&z);
    if T::FIELD == FieldTag::Real && n > 0 {
        let d = DMatrix::from_fn(n, n, |r, c| q[(r, c)].re()).determinant();
        if d < 0.0 {
            for r in 0..n {
                q[(r, 0)] = -q[(r, 0)];
            }
        }
    }
    q
}

/// First `k` columns of a Haar element, as column vectors.
///
/// For `k < n` this is Gram–Schmidt on `k` Gaussian vectors, which has the
/// same law as the leading columns of a full Haar draw and costs `O(n k²)`.
pub fn haar_frame<T: Scalar, R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<Vec<T>> {
    assert!(k <= n, "frame wider than the space");
    if k == n {
        let q = haar_generic::<T, R>(n, rng);
        return (0..n).map(|c| q.column(c)).collect();
    }
    let mut cols: Vec<Vec<T>> = Vec::with_capacity(k);
    while cols.len() < k {
        let mut v: Vec<T> = (0..n).map(|_| T::gaussian(rng)).collect();
        // two passes of classical Gram–Schmidt
        for _ in 0..2 {
            for u in &cols {
                let p = inner(u, &v);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= *ui * p;
                }
            }
        }
        let nv = super::matrix::norm(&v);
        if nv < 1e-12 {
            continue;
        }
        for x in v.iter_mut() {
            *x = x.scale(1.0 / nv);
        }
        cols.push(v);
    }
    cols
}

/// Haar element kept as a product of Householder reflections and a diagonal phase.
///
/// Reflector `k` comes from a fresh Gaussian vector of length `n − k`, which is
/// the law of the trailing column during Householder QR of a Gaussian matrix,
/// so `Q = H_0 ⋯ H_{n−1} D` has the same distribution as [`haar_generic`].
/// Sampling and each application cost `O(n²)`.
#[derive(Clone, Debug)]
pub struct HouseholderHaar<T> {
    n: usize,
    vs: Vec<Vec<T>>,
    cs: Vec<f64>,
    d: Vec<T>,
}

impl<T: Scalar> HouseholderHaar<T> {
    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut vs = Vec::with_capacity(n);
        let mut cs = Vec::with_capacity(n);
        let mut d = Vec::with_capacity(n);
        let mut negative = false;
        for k in 0..n {
            let mut v: Vec<T> = (0..n - k).map(|_| T::gaussian(rng)).collect();
            let xnorm = super::matrix::norm(&v);
            let alpha = v[0].phase();
            v[0] += alpha.scale(xnorm);
            let vv: f64 = v.iter().map(|x| x.norm_sqr()).sum();
            // H x = −α‖x‖e₀, so the R diagonal has phase −α
            d.push(-alpha);
            cs.push(if vv > 0.0 { 2.0 / vv } else { 0.0 });
            if vv > 0.0 {
                negative = !negative;
            }
            vs.push(v);
        }
        if T::FIELD == FieldTag::Real {
            for x in &d {
                if x.re() < 0.0 {
                    negative = !negative;
                }
            }
            if negative && n > 0 {
                d[0] = -d[0];
            }
        }
        HouseholderHaar { n, vs, cs, d }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn reflect(&self, k: usize, x: &mut [T]) {
        let v = &self.vs[k];
        let tail = &mut x[k..];
        let s = inner(v, tail).scale(self.cs[k]);
        for (xi, vi) in tail.iter_mut().zip(v) {
            *xi -= *vi * s;
        }
    }

    /// `x ← Q x`.
    pub fn apply(&self, x: &mut [T]) {
        assert_eq!(x.len(), self.n);
        for (xi, di) in x.iter_mut().zip(&self.d) {
            *xi = *di * *xi;
        }
        for k in (0..self.n).rev() {
            self.reflect(k, x);
        }
    }

    /// `x ← Q† x`.
    pub fn apply_adjoint(&self, x: &mut [T]) {
        assert_eq!(x.len(), self.n);
        for k in 0..self.n {
            self.reflect(k, x);
        }
        for (xi, di) in x.iter_mut().zip(&self.d) {
            *xi = di.conj() * *xi;
        }
    }

    /// `Q e_k`.
    pub fn column(&self, k: usize) -> Vec<T> {
        let mut e = vec![T::zero(); self.n];
        e[k] = T::one();
        self.apply(&mut e);
        e
    }

    pub fn to_dense(&self) -> Mat<T> {
        let mut q = Mat::zeros(self.n, self.n);
        for k in 0..self.n {
            q.set_column(k, &self.column(k));
        }
        q
    }
}

pub fn haar_group<R: Rng + ?Sized>(field: FieldTag, dim: usize, rng: &mut R) -> MatrixOverField {
    match field {
        FieldTag::Real => haar_generic::<f64, R>(dim, rng).into(),
        FieldTag::Complex => haar_generic::<Complex64, R>(dim, rng).into(),
        FieldTag::Quaternion => haar_generic::<Quaternion, R>(dim, rng).into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randmat::RngState;

    #[test]
    fn unitary_for_all_fields() {
        let mut rng = RngState::from_seed(12);
        for field in FieldTag::ALL {
            for n in [1, 2, 5, 17] {
                let u = haar_group(field, n, &mut rng);
                assert!(u.unitarity_defect() < 1e-10, "{field:?} n={n}");
            }
        }
    }

    #[test]
    fn special_orthogonal() {
        let mut rng = RngState::from_seed(13);
        for _ in 0..50 {
            let q = haar_generic::<f64, _>(6, &mut rng);
            let d = DMatrix::from_fn(6, 6, |r, c| q[(r, c)]).determinant();
            assert!((d - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn qr_reproduces_input() {
        let mut rng = RngState::from_seed(14);
        let z = Mat::<Quaternion>::gaussian(5, 5, &mut rng);
        let q = qr_q_positive(&z);
        // R = Q† Z must be upper triangular with positive real diagonal
        let r = q.adjoint().matmul(&z);
        for i in 0..5 {
            assert!(r[(i, i)].w > 0.0);
            assert!((r[(i, i)] - Quaternion::from_real(r[(i, i)].w)).norm() < 1e-10);
            for j in 0..i {
                assert!(r[(i, j)].norm() < 1e-10);
            }
        }
    }

    #[test]
    fn householder_product_is_unitary_with_consistent_adjoint() {
        let mut rng = RngState::from_seed(16);
        let h = HouseholderHaar::<Quaternion>::sample(6, &mut rng);
        let q = h.to_dense();
        assert!(q.unitarity_defect() < 1e-12);
        let x: Vec<Quaternion> = (0..6).map(|_| Quaternion::gaussian(&mut rng)).collect();
        let mut y = x.clone();
        h.apply(&mut y);
        assert!(y.iter().zip(q.mat_vec(&x)).all(|(a, b)| (*a - b).norm() < 1e-12));
        h.apply_adjoint(&mut y);
        assert!(y.iter().zip(&x).all(|(a, b)| (*a - *b).norm() < 1e-12));
    }

    #[test]
    fn householder_real_has_unit_determinant() {
        let mut rng = RngState::from_seed(17);
        for n in 1..7 {
            for _ in 0..20 {
                let q = HouseholderHaar::<f64>::sample(n, &mut rng).to_dense();
                let d = DMatrix::from_fn(n, n, |r, c| q[(r, c)]).determinant();
                assert!((d - 1.0).abs() < 1e-9, "n={n}: {d}");
            }
        }
    }

    #[test]
    fn householder_matches_dense_qr_in_law() {
        // |Q_01|² marginal against the dense sampler
        let mut rng = RngState::from_seed(18);
        let a: Vec<f64> = (0..4000)
            .map(|_| HouseholderHaar::<Complex64>::sample(4, &mut rng).column(1)[0].norm_sqr())
            .collect();
        let b: Vec<f64> = (0..4000)
            .map(|_| haar_generic::<Complex64, _>(4, &mut rng)[(0, 1)].norm_sqr())
            .collect();
        assert!(crate::stats::ks_two_sample(&a, &b).passes(0.001));
        // trace of an SO(3) element: E = 0
        let t: f64 = (0..4000)
            .map(|_| HouseholderHaar::<f64>::sample(3, &mut rng).to_dense().trace())
            .sum::<f64>()
            / 4000.0;
        assert!(t.abs() < 0.06, "{t}");
    }

    #[test]
    fn frame_is_orthonormal() {
        let mut rng = RngState::from_seed(15);
        let f = haar_frame::<Quaternion, _>(7, 3, &mut rng);
        for a in 0..3 {
            for b in 0..3 {
                let ip = inner(&f[a], &f[b]);
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((ip - Quaternion::from_real(want)).norm() < 1e-12);
            }
        }
    }
}
