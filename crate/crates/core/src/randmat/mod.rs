//! Random matrices over ℝ, ℂ and ℍ.

pub mod chi;
pub mod haar;
pub mod matrix;
pub mod mp;
pub mod quaternion;
pub mod rng;
pub mod wishart;

pub use chi::{chi2_sample, chi_sample};
pub use haar::{haar_frame, haar_generic, haar_group, HouseholderHaar};
pub use matrix::{ComplexEmbed, Mat, MatrixOverField, Scalar};
pub use mp::{marchenko_pastur_atom, marchenko_pastur_pdf, marchenko_pastur_support, mp_log_moment};
pub use quaternion::Quaternion;
pub use rng::RngState;
pub use wishart::{wishart_bartlett, wishart_diagonal, wishart_direct, WishartSample};

use rand::Rng;

/// Gaussian matrix over the field of `field`, β unit-variance coordinates per entry.
pub fn gauss_matrix<R: Rng + ?Sized>(
    field: crate::algebra::FieldTag,
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> MatrixOverField {
    use crate::algebra::FieldTag;
    match field {
        FieldTag::Real => Mat::<f64>::gaussian(rows, cols, rng).into(),
        FieldTag::Complex => Mat::<num_complex::Complex64>::gaussian(rows, cols, rng).into(),
        FieldTag::Quaternion => Mat::<Quaternion>::gaussian(rows, cols, rng).into(),
    }
}
