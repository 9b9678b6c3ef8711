//! The two-Gaussian testing scenario and standard normal functions.

use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::evidential::Hypothesis;
use crate::seed::Seed;

/// Standard normal CDF.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

/// Standard normal density.
pub fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Inverse of [`std_normal_cdf`] on (0, 1).
///
/// Acklam's rational approximation followed by two Halley steps against the
/// erfc-based CDF, which brings the result to full double precision.
pub fn std_normal_quantile(p: f64) -> f64 {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let mut x = acklam(p);
    for _ in 0..2 {
        let e = if x < 0.0 {
            std_normal_cdf(x) - p
        } else {
            // work with the upper tail to keep precision for p near 1
            (1.0 - p) - std_normal_cdf(-x)
        };
        let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// `N(mu_h, sigma)` against `N(mu_k, sigma)` with `mu_k >= mu_h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPair {
    mu_h: f64,
    mu_k: f64,
    sigma: f64,
}

impl GaussianPair {
    /// Rejects `sigma <= 0`, non-finite means, and `mu_k < mu_h`.
    pub fn new(mu_h: f64, mu_k: f64, sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::param("sigma", sigma));
        }
        if !mu_h.is_finite() {
            return Err(Error::param("mu_h", mu_h));
        }
        if !mu_k.is_finite() || mu_k < mu_h {
            return Err(Error::param("mu_k (must be >= mu_h)", mu_k));
        }
        Ok(GaussianPair { mu_h, mu_k, sigma })
    }

    pub fn mu_h(&self) -> f64 {
        self.mu_h
    }

    pub fn mu_k(&self) -> f64 {
        self.mu_k
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `eta = mu_k - mu_h`.
    pub fn effect(&self) -> f64 {
        self.mu_k - self.mu_h
    }

    pub fn mean(&self, which: Hypothesis) -> f64 {
        match which {
            Hypothesis::H => self.mu_h,
            Hypothesis::K => self.mu_k,
        }
    }

    /// `ln f_K(x) - ln f_H(x)`.
    pub fn log_density_ratio(&self, x: f64) -> f64 {
        let dh = x - self.mu_h;
        let dk = x - self.mu_k;
        (dh * dh - dk * dk) / (2.0 * self.sigma * self.sigma)
    }

    /// `n` iid draws from the hypothesis `which`.
    pub fn sample(&self, which: Hypothesis, n: usize, seed: Seed) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::param("sample size", n));
        }
        let mu = self.mean(which);
        let mut rng = seed.rng();
        Ok((0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                mu + self.sigma * z
            })
            .collect())
    }
}
