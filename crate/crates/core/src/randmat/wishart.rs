//! β-Wishart sampling.
//!
//! Scalars from [`Scalar::gaussian`] carry β unit-variance coordinates. Both
//! samplers rescale by `β^{-1/2}` so that an entry has `E|x|² = 1`, giving
//! `E[W] = r·I` and `β·W_ii ∼ χ²(βr)`.

use num_complex::Complex64;
use rand::Rng;

use super::chi::chi_sample;
use super::matrix::{ComplexEmbed, Mat, MatrixOverField, Scalar};
use super::quaternion::Quaternion;
use crate::algebra::FieldTag;

#[derive(Clone, Debug, PartialEq)]
pub struct WishartSample {
    pub field: FieldTag,
    pub dim: usize,
    pub dof: usize,
    pub matrix: MatrixOverField,
}

impl WishartSample {
    /// Numerical rank: singular values above `tol` times the largest.
    pub fn numerical_rank(&self, tol: f64) -> usize {
        let sv = self.matrix.singular_values();
        let top = sv.first().copied().unwrap_or(0.0);
        sv.iter().filter(|&&s| s > tol * top).count()
    }
}

/// Lower-trapezoidal `dim × min(dim, dof)` Bartlett factor.
pub fn bartlett_factor<T: Scalar, R: Rng + ?Sized>(dim: usize, dof: usize, rng: &mut R) -> Mat<T> {
    let beta = T::FIELD.beta() as f64;
    let s = beta.sqrt().recip();
    let m = dim.min(dof);
    let mut l = Mat::<T>::zeros(dim, m);
    for i in 0..dim {
        for j in 0..m.min(i + 1) {
            l[(i, j)] = if i == j {
                T::from_real(s * chi_sample(beta * (dof - i) as f64, rng))
            } else {
                T::gaussian(rng).scale(s)
            };
        }
    }
    l
}

/// `X X†` for `X` a `dim × dof` Gaussian matrix with unit-modulus-variance entries.
pub fn direct_generic<T: Scalar, R: Rng + ?Sized>(dim: usize, dof: usize, rng: &mut R) -> Mat<T> {
    let s = (T::FIELD.beta() as f64).sqrt().recip();
    let x = Mat::<T>::gaussian(dim, dof, rng).scaled(s);
    x.mul_adjoint(&x)
}

pub fn bartlett_generic<T: Scalar, R: Rng + ?Sized>(dim: usize, dof: usize, rng: &mut R) -> Mat<T> {
    let l = bartlett_factor::<T, R>(dim, dof, rng);
    l.mul_adjoint(&l)
}

/// Diagonal of `L L†` for a fresh Bartlett factor, without forming the product.
pub fn bartlett_diagonal<T: Scalar, R: Rng + ?Sized>(dim: usize, dof: usize, rng: &mut R) -> Vec<f64> {
    let l = bartlett_factor::<T, R>(dim, dof, rng);
    (0..dim)
        .map(|i| l.row(i).iter().map(|x| x.norm_sqr()).sum())
        .collect()
}

fn wrap(field: FieldTag, dim: usize, dof: usize, matrix: MatrixOverField) -> WishartSample {
    WishartSample {
        field,
        dim,
        dof,
        matrix,
    }
}

pub fn wishart_bartlett<R: Rng + ?Sized>(field: FieldTag, dim: usize, dof: usize, rng: &mut R) -> WishartSample {
    assert!(dim >= 1 && dof >= 1, "Wishart needs dim, dof >= 1");
    let m = match field {
        FieldTag::Real => bartlett_generic::<f64, R>(dim, dof, rng).into(),
        FieldTag::Complex => bartlett_generic::<Complex64, R>(dim, dof, rng).into(),
        FieldTag::Quaternion => bartlett_generic::<Quaternion, R>(dim, dof, rng).into(),
    };
    wrap(field, dim, dof, m)
}

pub fn wishart_direct<R: Rng + ?Sized>(field: FieldTag, dim: usize, dof: usize, rng: &mut R) -> WishartSample {
    assert!(dim >= 1 && dof >= 1, "Wishart needs dim, dof >= 1");
    let m = match field {
        FieldTag::Real => direct_generic::<f64, R>(dim, dof, rng).into(),
        FieldTag::Complex => direct_generic::<Complex64, R>(dim, dof, rng).into(),
        FieldTag::Quaternion => direct_generic::<Quaternion, R>(dim, dof, rng).into(),
    };
    wrap(field, dim, dof, m)
}

/// Field-dispatched diagonal of a Bartlett draw.
pub fn wishart_diagonal<R: Rng + ?Sized>(field: FieldTag, dim: usize, dof: usize, rng: &mut R) -> Vec<f64> {
    match field {
        FieldTag::Real => bartlett_diagonal::<f64, R>(dim, dof, rng),
        FieldTag::Complex => bartlett_diagonal::<Complex64, R>(dim, dof, rng),
        FieldTag::Quaternion => bartlett_diagonal::<Quaternion, R>(dim, dof, rng),
    }
}

/// Eigenvalues of `W / dof` for a fresh Bartlett draw.
pub fn normalized_spectrum<T: Scalar, R: Rng + ?Sized>(dim: usize, dof: usize, rng: &mut R) -> Vec<f64>
where
    Mat<T>: ComplexEmbed,
{
    let w = bartlett_generic::<T, R>(dim, dof, rng).scaled(1.0 / dof as f64);
    super::matrix::hermitian_eigenvalues(&w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randmat::RngState;

    #[test]
    fn one_by_one_is_chi_squared_scaled() {
        let mut rng = RngState::from_seed(2);
        let n = 50_000;
        for field in FieldTag::ALL {
            let beta = field.beta() as f64;
            let r = 3;
            let xs: Vec<f64> = (0..n)
                .map(|_| beta * wishart_bartlett(field, 1, r, &mut rng).matrix.re_trace())
                .collect();
            let k = beta * r as f64;
            let mean = xs.iter().sum::<f64>() / n as f64;
            assert!((mean - k).abs() < 5.0 * (2.0 * k / n as f64).sqrt(), "{field:?}: {mean}");
        }
    }

    #[test]
    fn rank_deficient_direct() {
        let mut rng = RngState::from_seed(4);
        let w = wishart_direct(FieldTag::Real, 2, 1, &mut rng);
        let m = w.matrix.as_real().unwrap();
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        assert!(det.abs() < 1e-12 * m.frobenius_sqr());
    }

    #[test]
    fn rank_is_min_dim_dof() {
        let mut rng = RngState::from_seed(8);
        for field in FieldTag::ALL {
            for &(n, r) in &[(5, 2), (4, 4), (3, 7)] {
                let b = wishart_bartlett(field, n, r, &mut rng);
                let d = wishart_direct(field, n, r, &mut rng);
                assert_eq!(b.numerical_rank(1e-8), n.min(r));
                assert_eq!(d.numerical_rank(1e-8), n.min(r));
                assert!(b.matrix.is_hermitian(1e-10));
            }
        }
    }

    #[test]
    fn trace_law_of_large_numbers() {
        let mut rng = RngState::from_seed(6);
        let w = wishart_direct(FieldTag::Real, 100, 100, &mut rng);
        let ratio = w.matrix.re_trace() / (100.0 * 100.0);
        assert!((ratio - 1.0).abs() < 0.05);
    }

    #[test]
    fn diagonal_helper_matches_full_product() {
        let mut a = RngState::from_seed(10);
        let mut b = RngState::from_seed(10);
        let diag = bartlett_diagonal::<Quaternion, _>(6, 4, &mut a);
        let full = bartlett_generic::<Quaternion, _>(6, 4, &mut b);
        for (i, d) in diag.iter().enumerate() {
            assert!((d - full[(i, i)].w).abs() < 1e-12);
        }
    }
}
