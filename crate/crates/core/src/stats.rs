//! Sample summaries, goodness-of-fit tests and gamma densities.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_lr, ln_gamma};

/// Sorted sample with cached moments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    pub samples: Vec<f64>,
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub min: f64,
    pub max: f64,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Self {
        samples.sort_by(f64::total_cmp);
        let (mean, variance) = mean_var(&samples);
        EmpiricalDistribution {
            count: samples.len(),
            mean,
            variance,
            min: samples.first().copied().unwrap_or(f64::NAN),
            max: samples.last().copied().unwrap_or(f64::NAN),
            samples,
        }
    }

    pub fn std(&self) -> f64 {
        self.variance.sqrt()
    }

    /// Standard error of the mean.
    pub fn sem(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }

    pub fn ks_against(&self, cdf: impl Fn(f64) -> f64) -> KsResult {
        ks_sorted(&self.samples, cdf)
    }

    pub fn ks_two_sample(&self, other: &EmpiricalDistribution) -> KsResult {
        ks_two_sorted(&self.samples, &other.samples)
    }
}

/// Mean and unbiased variance (two-pass).
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (m, 0.0);
    }
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v)
}

pub fn skewness(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
    m3 / m2.powf(1.5)
}

pub fn covariance(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / (n - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Effective sample size entering the asymptotic distribution.
    pub n_eff: f64,
}

impl KsResult {
    /// Not rejected at level `alpha`.
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value > alpha
    }
}

/// `P[K > λ]` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

fn ks_p(d: f64, n_eff: f64) -> f64 {
    let sn = n_eff.sqrt();
    kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d)
}

/// Asymptotic critical value of the KS statistic at level `alpha` (two-sided).
pub fn ks_critical(alpha: f64, n_eff: f64) -> f64 {
    // invert the survival function by bisection
    let (mut lo, mut hi) = (0.2, 4.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_survival(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let sn = n_eff.sqrt();
    0.5 * (lo + hi) / (sn + 0.12 + 0.11 / sn)
}

/// One-sample KS on an already sorted sample.
pub fn ks_sorted(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    KsResult {
        statistic: d,
        p_value: ks_p(d, n),
        n_eff: n,
    }
}

pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    ks_sorted(&s, cdf)
}

fn ks_two_sorted(a: &[f64], b: &[f64]) -> KsResult {
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = a[i].min(b[j]);
        while i < na && a[i] <= x {
            i += 1;
        }
        while j < nb && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let n_eff = (na * nb) as f64 / (na + nb) as f64;
    KsResult {
        statistic: d,
        p_value: ks_p(d, n_eff),
        n_eff,
    }
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    ks_two_sorted(&a, &b)
}

/// Log of the gamma density with shape `k` and scale `theta`.
pub fn gamma_ln_pdf(x: f64, k: f64, theta: f64) -> f64 {
    if x < 0.0 {
        return f64::NEG_INFINITY;
    }
    if x == 0.0 {
        return match k.partial_cmp(&1.0) {
            Some(std::cmp::Ordering::Less) => f64::INFINITY,
            Some(std::cmp::Ordering::Equal) => -theta.ln(),
            _ => f64::NEG_INFINITY,
        };
    }
    (k - 1.0) * x.ln() - x / theta - ln_gamma(k) - k * theta.ln()
}

pub fn gamma_pdf(x: f64, k: f64, theta: f64) -> f64 {
    gamma_ln_pdf(x, k, theta).exp()
}

pub fn gamma_cdf(x: f64, k: f64, theta: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        gamma_lr(k, x / theta)
    }
}

/// Ordinary least squares `y ≈ a + b x`; returns `(a, b)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

/// Weighted least squares through the origin, `y ≈ b x`, weights `w`.
pub fn slope_through_origin(xs: &[f64], ys: &[f64], w: &[f64]) -> f64 {
    let num: f64 = xs.iter().zip(ys).zip(w).map(|((x, y), w)| w * x * y).sum();
    let den: f64 = xs.iter().zip(w).map(|(x, w)| w * x * x).sum();
    num / den
}
