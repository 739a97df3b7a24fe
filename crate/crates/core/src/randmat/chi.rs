use rand::Rng;
use rand_distr::{ChiSquared, Distribution};

/// χ² with `dof` degrees of freedom.
pub fn chi2_sample<R: Rng + ?Sized>(dof: f64, rng: &mut R) -> f64 {
    assert!(dof > 0.0, "chi-squared needs positive degrees of freedom");
    ChiSquared::new(dof)
        .expect("positive dof is a valid chi-squared parameter")
        .sample(rng)
}

/// χ with `dof` degrees of freedom.
pub fn chi_sample<R: Rng + ?Sized>(dof: f64, rng: &mut R) -> f64 {
    chi2_sample(dof, rng).sqrt()
}
