//! Simple Jordan sectors and the statistics derived from their spectra.
//!
//! A sector is Hermitian `N × N` matrices over ℝ, ℂ or ℍ. Everything the
//! asymptotic theory needs about a sector is carried by the eigenvalues of
//! the observable and input restricted to it, the index relating ambient and
//! defining-representation traces, and how many generators act on it.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{JawsError, Result};
use crate::randmat::MatrixOverField;

/// Orthonormality tolerance for projection bases.
pub const BASIS_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldTag {
    #[serde(rename = "R")]
    Real,
    #[serde(rename = "C")]
    Complex,
    #[serde(rename = "H")]
    Quaternion,
}

impl FieldTag {
    pub const ALL: [FieldTag; 3] = [FieldTag::Real, FieldTag::Complex, FieldTag::Quaternion];

    pub const fn beta(self) -> u32 {
        match self {
            FieldTag::Real => 1,
            FieldTag::Complex => 2,
            FieldTag::Quaternion => 4,
        }
    }

    pub fn from_beta(beta: u32) -> Result<Self> {
        match beta {
            1 => Ok(FieldTag::Real),
            2 => Ok(FieldTag::Complex),
            4 => Ok(FieldTag::Quaternion),
            b => Err(JawsError::Domain(format!("beta must be 1, 2 or 4, got {b}"))),
        }
    }

    /// Degrees of freedom of the χ factors in the gradient and Hessian laws.
    pub const fn chi_dof(self) -> u32 {
        if self.beta() > 2 {
            self.beta()
        } else {
            2
        }
    }

    pub const fn symbol(self) -> &'static str {
        match self {
            FieldTag::Real => "R",
            FieldTag::Complex => "C",
            FieldTag::Quaternion => "H",
        }
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimpleComponent {
    pub field: FieldTag,
    pub dim: usize,
    pub index: f64,
    pub observable_spectrum: Vec<f64>,
    pub input_spectrum: Vec<f64>,
    pub sector_params: usize,
}

impl SimpleComponent {
    /// Validates the sector; the observable spectrum is sorted ascending.
    pub fn new(
        field: FieldTag,
        dim: usize,
        index: f64,
        mut observable_spectrum: Vec<f64>,
        input_spectrum: Vec<f64>,
        sector_params: usize,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(JawsError::InvalidModel("dim must be positive".into()));
        }
        if !(index > 0.0) || !index.is_finite() {
            return Err(JawsError::InvalidModel(format!("index must be positive, got {index}")));
        }
        if observable_spectrum.len() != dim {
            return Err(JawsError::Shape(format!(
                "observable spectrum has {} entries, dim is {dim}",
                observable_spectrum.len()
            )));
        }
        if input_spectrum.len() != dim {
            return Err(JawsError::Shape(format!(
                "input spectrum has {} entries, dim is {dim}",
                input_spectrum.len()
            )));
        }
        if observable_spectrum.iter().any(|x| !x.is_finite()) {
            return Err(JawsError::InvalidModel("observable spectrum has non-finite entries".into()));
        }
        if let Some(bad) = input_spectrum.iter().find(|&&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(JawsError::InvalidModel(format!(
                "input spectrum entries must be non-negative, found {bad}"
            )));
        }
        observable_spectrum.sort_by(f64::total_cmp);
        Ok(SimpleComponent {
            field,
            dim,
            index,
            observable_spectrum,
            input_spectrum,
            sector_params,
        })
    }

    pub fn beta(&self) -> f64 {
        self.field.beta() as f64
    }

    /// Observable spectrum with its minimum moved to zero.
    pub fn shifted_observable(&self) -> Vec<f64> {
        shift_to_zero(&self.observable_spectrum)
    }

    /// Smallest observable eigenvalue, the floor losses are reported against.
    pub fn observable_floor(&self) -> f64 {
        self.observable_spectrum.first().copied().unwrap_or(0.0)
    }

    /// `Tr_α(ρ^α)`.
    pub fn input_trace(&self) -> f64 {
        self.input_spectrum.iter().sum()
    }

    /// `Tr_α((ρ^α)²)`.
    pub fn input_purity(&self) -> f64 {
        purity(&self.input_spectrum)
    }

    /// `Tr_α((ρ^α)³)`.
    pub fn input_cube_trace(&self) -> f64 {
        self.input_spectrum.iter().map(|x| x * x * x).sum()
    }

    /// Number of input eigenvalues above `tol` times the largest one.
    pub fn input_rank(&self, tol: f64) -> usize {
        let top = self.input_spectrum.iter().copied().fold(0.0, f64::max);
        self.input_spectrum.iter().filter(|&&x| x > tol * top).count()
    }

    pub fn stats(&self) -> Result<SpectralStats> {
        spectral_stats(self)
    }

    pub fn dim_automorphism(&self) -> usize {
        dim_automorphism(self.field, self.dim)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JawsModel {
    pub components: Vec<SimpleComponent>,
    pub total_params: usize,
    pub normalization: f64,
}

impl JawsModel {
    pub fn new(components: Vec<SimpleComponent>, total_params: usize, normalization: f64) -> Result<Self> {
        if total_params == 0 {
            return Err(JawsError::InvalidModel("total_params must be positive".into()));
        }
        if !(normalization > 0.0) || !normalization.is_finite() {
            return Err(JawsError::InvalidModel(format!(
                "normalization must be positive, got {normalization}"
            )));
        }
        if let Some((i, c)) = components
            .iter()
            .enumerate()
            .find(|(_, c)| c.sector_params > total_params)
        {
            return Err(JawsError::InvalidModel(format!(
                "component {i} declares {} sector params, more than total_params {total_params}",
                c.sector_params
            )));
        }
        Ok(JawsModel {
            components,
            total_params,
            normalization,
        })
    }

    /// Single-sector model with `p = p_α` and unit normalization.
    pub fn single(component: SimpleComponent) -> Result<Self> {
        let p = component.sector_params.max(1);
        JawsModel::new(vec![component], p, 1.0)
    }

    /// Every generator acts on exactly one sector, so the sector counts fit in `p`.
    pub fn is_fully_controllable(&self) -> bool {
        self.components.iter().map(|c| c.sector_params).sum::<usize>() <= self.total_params
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralStats {
    pub mean_eig: f64,
    pub std_eig: f64,
    pub trace: f64,
    pub trace_sq: f64,
    pub dof_real: f64,
    pub dof: usize,
}

pub fn shift_to_zero(spectrum: &[f64]) -> Vec<f64> {
    let lo = spectrum.iter().copied().fold(f64::INFINITY, f64::min);
    spectrum.iter().map(|x| x - lo).collect()
}

/// Statistics of a raw spectrum; `shift` moves its minimum to zero first.
pub fn spectrum_stats(spectrum: &[f64], shift: bool) -> Result<SpectralStats> {
    let s: Vec<f64> = if shift {
        shift_to_zero(spectrum)
    } else {
        spectrum.to_vec()
    };
    let n = s.len() as f64;
    let trace: f64 = s.iter().sum();
    let trace_sq: f64 = s.iter().map(|x| x * x).sum();
    if !(trace_sq > 0.0) {
        return Err(JawsError::DegenerateObservable);
    }
    let mean_eig = trace / n;
    let var = s.iter().map(|x| (x - mean_eig).powi(2)).sum::<f64>() / n;
    let dof_real = trace * trace / trace_sq;
    Ok(SpectralStats {
        mean_eig,
        std_eig: var.sqrt(),
        trace,
        trace_sq,
        dof_real,
        dof: (dof_real.round_ties_even() as usize).max(1),
    })
}

pub fn spectral_stats(component: &SimpleComponent) -> Result<SpectralStats> {
    spectrum_stats(&component.observable_spectrum, true)
}

/// Real dimension of the automorphism group's Lie algebra: `so(N)`, `u(N)` or `sp(N)`.
pub fn dim_automorphism(field: FieldTag, dim: usize) -> usize {
    let b = field.beta() as usize;
    (b - 1) * dim + b * dim * (dim - 1) / 2
}

pub fn purity(spectrum: &[f64]) -> f64 {
    spectrum.iter().map(|x| x * x).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub element: DMatrix<Complex64>,
    pub coefficients: Vec<f64>,
}

/// `Re Tr(A B)`.
pub fn frobenius_re(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    // Tr(AB) = Σ_ij A_ij B_ji
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..a.ncols() {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

pub fn validate_orthonormal(basis: &[DMatrix<Complex64>]) -> Result<()> {
    for (i, bi) in basis.iter().enumerate() {
        for (j, bj) in basis.iter().enumerate().skip(i) {
            let want = if i == j { 1.0 } else { 0.0 };
            let dev = (frobenius_re(bi, bj) - want).abs();
            if dev > BASIS_TOL {
                return Err(JawsError::NonOrthonormalBasis { index: j, deviation: dev });
            }
        }
    }
    Ok(())
}

/// `A^α = Σ_i Tr(B_i A) B_i` over an orthonormal Hermitian basis of one sector.
pub fn project_into_component(matrix: &DMatrix<Complex64>, basis: &[DMatrix<Complex64>]) -> Result<Projection> {
    validate_orthonormal(basis)?;
    let (r, c) = matrix.shape();
    if let Some(b) = basis.iter().find(|b| b.shape() != (r, c)) {
        return Err(JawsError::Shape(format!(
            "basis element is {:?}, matrix is {:?}",
            b.shape(),
            (r, c)
        )));
    }
    let coefficients: Vec<f64> = basis.iter().map(|b| frobenius_re(b, matrix)).collect();
    let mut element = DMatrix::<Complex64>::zeros(r, c);
    for (b, &w) in basis.iter().zip(&coefficients) {
        element += b * Complex64::new(w, 0.0);
    }
    Ok(Projection { element, coefficients })
}

/// `I_α = Tr(A²) / Tr_α(A²)` for one element seen in both representations.
pub fn index_constant(ambient: &DMatrix<Complex64>, defining: &MatrixOverField) -> Result<f64> {
    let denom = defining.trace_sq();
    if !(denom.abs() > 0.0) {
        return Err(JawsError::DegenerateElement);
    }
    Ok(frobenius_re(ambient, ambient) / denom)
}

/// Orthonormal basis of all `n × n` complex Hermitian matrices (`n²` elements).
pub fn hermitian_basis(n: usize) -> Vec<DMatrix<Complex64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let mut e = DMatrix::<Complex64>::zeros(n, n);
        e[(i, i)] = Complex64::new(1.0, 0.0);
        out.push(e);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut re = DMatrix::<Complex64>::zeros(n, n);
            re[(i, j)] = Complex64::new(s, 0.0);
            re[(j, i)] = Complex64::new(s, 0.0);
            out.push(re);
            let mut im = DMatrix::<Complex64>::zeros(n, n);
            im[(i, j)] = Complex64::new(0.0, -s);
            im[(j, i)] = Complex64::new(0.0, s);
            out.push(im);
        }
    }
    out
}

/// Spectra of `ρᵀ ⊗ ρ` and `O ⊗ Oᵀ`: all pairwise products, sorted, to be
/// used as a real (β = 1) sector of dimension `N²`.
pub fn spin_factor_reduce(input_spectrum: &[f64], observable_spectrum: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if input_spectrum.len() != observable_spectrum.len() {
        return Err(JawsError::Shape(format!(
            "input has {} eigenvalues, observable has {}",
            input_spectrum.len(),
            observable_spectrum.len()
        )));
    }
    let pairs = |v: &[f64]| {
        let mut out: Vec<f64> = v.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
        out.sort_by(f64::total_cmp);
        out
    };
    Ok((pairs(input_spectrum), pairs(observable_spectrum)))
}
