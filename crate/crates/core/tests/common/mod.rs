//! Independent reference computations for the integration tests. Nothing
//! here calls into the library's numerics.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use std::f64::consts::{PI, SQRT_2};
use std::path::PathBuf;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn pow2(e: u32) -> BigInt {
    BigInt::from(1) << e
}

/// `C(n, k)` by the multiplicative formula.
pub fn choose(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    for n in 1..400 {
        term *= -x * x / n as f64;
        sum += term / (2 * n + 1) as f64;
        if term.abs() < 1e-30 {
            break;
        }
    }
    2.0 / PI.sqrt() * sum
}

fn upper_tail_cf(z: f64) -> f64 {
    let mut f = z;
    for k in (1..200).rev() {
        f = z + k as f64 / f;
    }
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt() / f
}

/// Standard normal CDF: Maclaurin series of erf near the centre, Laplace
/// continued fraction in the tails.
pub fn phi(z: f64) -> f64 {
    if z.abs() <= 3.0 {
        0.5 * (1.0 + erf_series(z / SQRT_2))
    } else if z > 0.0 {
        1.0 - upper_tail_cf(z)
    } else {
        upper_tail_cf(-z)
    }
}

/// Inverse of [`phi`] by bisection.
pub fn phi_inv(p: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0, 40.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `sum p ln(p/q)` with `0 ln 0 = 0`.
pub fn kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&a, _)| a > 0.0)
        .map(|(&a, &b)| a * (a / b).ln())
        .sum()
}

pub fn acceptance_suite() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("paper-suite")
}

pub fn scenarios() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}
