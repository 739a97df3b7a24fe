//! Dense matrices whose entries live in ℝ, ℂ or ℍ.
//!
//! Everything field-generic is written against [`Scalar`]; [`MatrixOverField`]
//! is the type-erased wrapper used where the field is only known at runtime.
//! Quaternion matrices act on column vectors from the left with scalars
//! multiplying vectors on the right, so `(Mv)_r = Σ_c M_rc v_c` keeps its
//! usual meaning.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::quaternion::Quaternion;
use crate::algebra::FieldTag;

pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + 'static
{
    const FIELD: FieldTag;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    fn re(self) -> f64;
    fn conj(self) -> Self;
    fn norm_sqr(self) -> f64;
    fn scale(self, s: f64) -> Self;
    /// Real coordinate `k < β` (real part first).
    fn component(self, k: usize) -> f64;
    /// β independent standard normal coordinates.
    fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Self;
    /// Imaginary unit number `k < β − 1`.
    fn imag_unit(k: usize) -> Self;

    fn abs(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Unit scalar in the direction of `self`, `1` at zero.
    fn phase(self) -> Self {
        let n = self.abs();
        if n == 0.0 {
            Self::one()
        } else {
            self.scale(1.0 / n)
        }
    }
}

impl Scalar for f64 {
    const FIELD: FieldTag = FieldTag::Real;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn re(self) -> f64 {
        self
    }
    fn conj(self) -> Self {
        self
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn component(self, k: usize) -> f64 {
        assert_eq!(k, 0, "real scalar has one component");
        self
    }
    fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
    fn imag_unit(_: usize) -> Self {
        panic!("the reals have no imaginary unit")
    }
}

impl Scalar for Complex64 {
    const FIELD: FieldTag = FieldTag::Complex;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn component(self, k: usize) -> f64 {
        match k {
            0 => self.re,
            1 => self.im,
            _ => panic!("complex scalar has two components"),
        }
    }
    fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    }
    fn imag_unit(k: usize) -> Self {
        assert_eq!(k, 0, "the complex numbers have one imaginary unit");
        Complex64::i()
    }
}

impl Scalar for Quaternion {
    const FIELD: FieldTag = FieldTag::Quaternion;

    fn zero() -> Self {
        Quaternion::ZERO
    }
    fn one() -> Self {
        Quaternion::ONE
    }
    fn from_real(x: f64) -> Self {
        Quaternion::from_real(x)
    }
    fn re(self) -> f64 {
        self.w
    }
    fn conj(self) -> Self {
        Quaternion::conj(self)
    }
    fn norm_sqr(self) -> f64 {
        Quaternion::norm_sqr(self)
    }
    fn scale(self, s: f64) -> Self {
        Quaternion::scale(self, s)
    }
    fn component(self, k: usize) -> f64 {
        match k {
            0 => self.w,
            1 => self.x,
            2 => self.y,
            3 => self.z,
            _ => panic!("quaternion has four components"),
        }
    }
    fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Quaternion::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        )
    }
    fn imag_unit(k: usize) -> Self {
        [Quaternion::I, Quaternion::J, Quaternion::K][k]
    }
}

/// `Σ conj(u_i) v_i`.
#[inline]
pub fn inner<T: Scalar>(u: &[T], v: &[T]) -> T {
    let mut acc = T::zero();
    for (a, b) in u.iter().zip(v) {
        acc += a.conj() * *b;
    }
    acc
}

/// Real part of `Σ conj(u_i) v_i`, without forming the imaginary parts.
#[inline]
pub fn inner_re<T: Scalar>(u: &[T], v: &[T]) -> f64 {
    let mut acc = 0.0;
    for (a, b) in u.iter().zip(v) {
        acc += (a.conj() * *b).re();
    }
    acc
}

pub fn norm<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        Mat { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = T::from_real(d);
        }
        m
    }

    pub fn gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(rows, cols, |_, _| T::gaussian(rng))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn set_column(&mut self, c: usize, v: &[T]) {
        assert_eq!(v.len(), self.rows);
        for (r, &x) in v.iter().enumerate() {
            self[(r, c)] = x;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let orow = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self · other†`.
    pub fn mul_adjoint(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "mul_adjoint shape mismatch");
        Self::from_fn(self.rows, other.rows, |r, c| {
            let mut acc = T::zero();
            for (a, b) in self.row(r).iter().zip(other.row(c)) {
                acc += *a * b.conj();
            }
            acc
        })
    }

    pub fn mat_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = T::zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    acc += *a * *b;
                }
                acc
            })
            .collect()
    }

    /// `self† · v`.
    pub fn adjoint_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for (r, &x) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += a.conj() * x;
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.scale(s)).collect(),
        }
    }

    pub fn trace(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.rows.min(self.cols) {
            acc += self[(i, i)];
        }
        acc
    }

    pub fn frobenius_sqr(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for r in 0..self.rows {
            for c in r..self.cols {
                if (self[(r, c)] - self[(c, r)].conj()).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Largest entry of `|M M† − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        self.mul_adjoint(self)
            .max_abs_diff(&Self::identity(self.rows))
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

/// Complex image of a matrix: identity on ℝ and ℂ, the `2n × 2m` symplectic
/// embedding `A + Bj ↦ [[A, B], [−B̄, Ā]]` on ℍ.
pub trait ComplexEmbed {
    fn to_complex(&self) -> DMatrix<Complex64>;
}

impl ComplexEmbed for Mat<f64> {
    fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| Complex64::new(self[(r, c)], 0.0))
    }
}

impl ComplexEmbed for Mat<Complex64> {
    fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self[(r, c)])
    }
}

impl ComplexEmbed for Mat<Quaternion> {
    fn to_complex(&self) -> DMatrix<Complex64> {
        let (n, m) = (self.rows, self.cols);
        DMatrix::from_fn(2 * n, 2 * m, |r, c| {
            let (a, b) = self[(r % n, c % m)].to_complex_pair();
            match (r < n, c < m) {
                (true, true) => a,
                (true, false) => b,
                (false, true) => -b.conj(),
                (false, false) => a.conj(),
            }
        })
    }
}

/// Eigenvalues of a Hermitian matrix, ascending. Over ℍ each eigenvalue of
/// the complex embedding is doubled; one copy of each pair is returned.
pub fn hermitian_eigenvalues<T: Scalar>(m: &Mat<T>) -> Vec<f64>
where
    Mat<T>: ComplexEmbed,
{
    assert_eq!(m.rows(), m.cols(), "eigenvalues of a non-square matrix");
    let mut ev: Vec<f64> = if T::FIELD == FieldTag::Real {
        let a = DMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)].re());
        a.symmetric_eigenvalues().iter().copied().collect()
    } else {
        m.to_complex()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    };
    ev.sort_by(f64::total_cmp);
    if T::FIELD == FieldTag::Quaternion {
        ev = ev.iter().step_by(2).copied().collect();
    }
    ev
}

/// Singular values in descending order (over ℍ, one of each Kramers pair).
pub fn singular_values<T: Scalar>(m: &Mat<T>) -> Vec<f64>
where
    Mat<T>: ComplexEmbed,
{
    let mut sv: Vec<f64> = m
        .to_complex()
        .singular_values()
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    if T::FIELD == FieldTag::Quaternion {
        sv = sv.iter().step_by(2).copied().collect();
    }
    sv
}

/// Runtime-tagged matrix over one of the three fields.
#[derive(Clone, Debug, PartialEq)]
pub enum MatrixOverField {
    Real(Mat<f64>),
    Complex(Mat<Complex64>),
    Quaternion(Mat<Quaternion>),
}

macro_rules! dispatch {
    ($self:expr, $m:ident => $body:expr) => {
        match $self {
            MatrixOverField::Real($m) => $body,
            MatrixOverField::Complex($m) => $body,
            MatrixOverField::Quaternion($m) => $body,
        }
    };
}

impl MatrixOverField {
    pub fn field(&self) -> FieldTag {
        match self {
            MatrixOverField::Real(_) => FieldTag::Real,
            MatrixOverField::Complex(_) => FieldTag::Complex,
            MatrixOverField::Quaternion(_) => FieldTag::Quaternion,
        }
    }

    pub fn rows(&self) -> usize {
        dispatch!(self, m => m.rows())
    }

    pub fn cols(&self) -> usize {
        dispatch!(self, m => m.cols())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        dispatch!(self, m => m.is_hermitian(tol))
    }

    pub fn unitarity_defect(&self) -> f64 {
        dispatch!(self, m => m.unitarity_defect())
    }

    /// Real coordinate `k` of entry `(r, c)`.
    pub fn component(&self, r: usize, c: usize, k: usize) -> f64 {
        dispatch!(self, m => m[(r, c)].component(k))
    }

    /// Real part of the trace.
    pub fn re_trace(&self) -> f64 {
        dispatch!(self, m => m.trace().re())
    }

    /// `Re Tr(A²)` in this representation.
    pub fn trace_sq(&self) -> f64 {
        dispatch!(self, m => m.matmul(m).trace().re())
    }

    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        dispatch!(self, m => hermitian_eigenvalues(m))
    }

    pub fn singular_values(&self) -> Vec<f64> {
        dispatch!(self, m => singular_values(m))
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        dispatch!(self, m => m.to_complex())
    }

    pub fn as_real(&self) -> Option<&Mat<f64>> {
        match self {
            MatrixOverField::Real(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_complex(&self) -> Option<&Mat<Complex64>> {
        match self {
            MatrixOverField::Complex(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_quaternion(&self) -> Option<&Mat<Quaternion>> {
        match self {
            MatrixOverField::Quaternion(m) => Some(m),
            _ => None,
        }
    }
}

impl From<Mat<f64>> for MatrixOverField {
    fn from(m: Mat<f64>) -> Self {
        MatrixOverField::Real(m)
    }
}

impl From<Mat<Complex64>> for MatrixOverField {
    fn from(m: Mat<Complex64>) -> Self {
        MatrixOverField::Complex(m)
    }
}

impl From<Mat<Quaternion>> for MatrixOverField {
    fn from(m: Mat<Quaternion>) -> Self {
        MatrixOverField::Quaternion(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randmat::RngState;

    #[test]
    fn quaternion_embedding_is_multiplicative() {
        let mut rng = RngState::from_seed(5);
        let a = Mat::<Quaternion>::gaussian(3, 4, &mut rng);
        let b = Mat::<Quaternion>::gaussian(4, 2, &mut rng);
        let lhs = a.matmul(&b).to_complex();
        let rhs = a.to_complex() * b.to_complex();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn quaternion_hermitian_spectrum_is_halved_kramers_pairs() {
        let mut rng = RngState::from_seed(9);
        let g = Mat::<Quaternion>::gaussian(4, 4, &mut rng);
        let h = g.mul_adjoint(&g);
        assert!(h.is_hermitian(1e-12));
        let ev = hermitian_eigenvalues(&h);
        assert_eq!(ev.len(), 4);
        let tr: f64 = ev.iter().sum();
        assert!((tr - h.trace().re()).abs() < 1e-9);
    }

    #[test]
    fn adjoint_vec_matches_explicit_adjoint() {
        let mut rng = RngState::from_seed(1);
        let a = Mat::<Complex64>::gaussian(5, 3, &mut rng);
        let v: Vec<Complex64> = (0..5).map(|_| Complex64::gaussian(&mut rng)).collect();
        let lhs = a.adjoint_vec(&v);
        let rhs = a.adjoint().mat_vec(&v);
        for (x, y) in lhs.iter().zip(&rhs) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}
