//! Decision-theoretic testing in the two-Gaussian setting.
//!
//! With `n` observations from `N(mu, sigma)` the sample mean has standard
//! deviation `sigma / sqrt(n)`, and every rule here is a one-sided cutoff on
//! that mean: decide K iff `mean >= cutoff`.

use crate::error::{Error, Result};
use crate::evidential::{Hypothesis, Priors};
use crate::gaussian::{std_normal_cdf, std_normal_quantile, GaussianPair};

/// Decide K iff the sample mean of `n` observations is at least `cutoff`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionRule {
    pub cutoff: f64,
    pub n: u64,
}

impl DecisionRule {
    pub fn decide(&self, sample_mean: f64) -> Hypothesis {
        if sample_mean >= self.cutoff {
            Hypothesis::K
        } else {
            Hypothesis::H
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRates {
    /// `P_H(decide K)`
    pub alpha_n: f64,
    /// `P_K(decide H)`
    pub beta_n: f64,
    /// `alpha_n + beta_n`
    pub total: f64,
}

impl ErrorRates {
    fn new(alpha_n: f64, beta_n: f64) -> Self {
        ErrorRates {
            alpha_n,
            beta_n,
            total: alpha_n + beta_n,
        }
    }

    /// `pi_H * alpha_n + pi_K * beta_n`.
    pub fn weighted_total(&self, priors: &Priors) -> f64 {
        priors.pi_h() * self.alpha_n + priors.pi_k() * self.beta_n
    }

    pub fn power(&self) -> f64 {
        1.0 - self.beta_n
    }
}

/// Error rates of an arbitrary cutoff rule under the pair `g`.
pub fn error_rates(g: &GaussianPair, rule: &DecisionRule) -> ErrorRates {
    let se = g.sigma() / (rule.n as f64).sqrt();
    let alpha = std_normal_cdf(-(rule.cutoff - g.mu_h()) / se);
    let beta = std_normal_cdf((rule.cutoff - g.mu_k()) / se);
    ErrorRates::new(alpha, beta)
}

/// The symmetric rule with cutoff at the midpoint of the two means.
///
/// Both error rates equal `Phi(-eta sqrt(n) / (2 sigma))`, so the total error
/// falls strictly as `n` grows.
pub fn midpoint_rule(g: &GaussianPair, n: u64) -> Result<(DecisionRule, ErrorRates)> {
    if n == 0 {
        return Err(Error::param("n", n));
    }
    let eta = g.effect();
    if eta <= 0.0 {
        return Err(Error::ZeroEffect);
    }
    let rule = DecisionRule {
        cutoff: 0.5 * (g.mu_h() + g.mu_k()),
        n,
    };
    let e = std_normal_cdf(-eta * (n as f64).sqrt() / (2.0 * g.sigma()));
    Ok((rule, ErrorRates::new(e, e)))
}

/// The most powerful one-sided test at level `alpha`.
pub fn np_test(g: &GaussianPair, n: u64, alpha: f64) -> Result<(DecisionRule, ErrorRates)> {
    if n == 0 {
        return Err(Error::param("n", n));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param("alpha", alpha));
    }
    let root_n = (n as f64).sqrt();
    let z = -std_normal_quantile(alpha);
    let rule = DecisionRule {
        cutoff: g.mu_h() + z * g.sigma() / root_n,
        n,
    };
    let beta = std_normal_cdf(z - g.effect() * root_n / g.sigma());
    Ok((rule, ErrorRates::new(alpha, beta)))
}

/// The quadruple `(alpha, beta, eta, n)` with exactly one coordinate unknown.
///
/// `eta` is the absolute effect `mu_K - mu_H` on the observation scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSpec {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub eta: Option<f64>,
    pub n: Option<u64>,
    pub sigma: f64,
}

impl Default for PowerSpec {
    fn default() -> Self {
        PowerSpec {
            alpha: None,
            beta: None,
            eta: None,
            n: None,
            sigma: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerUnknown {
    Alpha,
    Beta,
    Eta,
    N,
}

impl PowerSpec {
    pub fn unknowns(&self) -> Vec<PowerUnknown> {
        let mut v = Vec::new();
        if self.alpha.is_none() {
            v.push(PowerUnknown::Alpha);
        }
        if self.beta.is_none() {
            v.push(PowerUnknown::Beta);
        }
        if self.eta.is_none() {
            v.push(PowerUnknown::Eta);
        }
        if self.n.is_none() {
            v.push(PowerUnknown::N);
        }
        v
    }

    pub fn is_complete(&self) -> bool {
        self.unknowns().is_empty()
    }

    /// Copy with one coordinate removed.
    pub fn without(&self, which: PowerUnknown) -> Self {
        let mut s = *self;
        match which {
            PowerUnknown::Alpha => s.alpha = None,
            PowerUnknown::Beta => s.beta = None,
            PowerUnknown::Eta => s.eta = None,
            PowerUnknown::N => s.n = None,
        }
        s
    }

    fn validate_known(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::param("sigma", self.sigma));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if let Some(v) = v {
                if !(v > 0.0 && v <= 0.5) {
                    return Err(Error::param(name, v));
                }
            }
        }
        if let Some(eta) = self.eta {
            if !(eta.is_finite() && eta >= 0.0) {
                return Err(Error::param("eta", eta));
            }
        }
        if self.n == Some(0) {
            return Err(Error::param("n", 0));
        }
        Ok(())
    }
}

/// Fills the single unknown of `spec` from
/// `z_{1-alpha} + z_{1-beta} = eta sqrt(n) / sigma`.
///
/// A solved `n` is rounded up to the next integer. Solved `alpha` and `beta`
/// must land in (0, 0.5] like known ones.
pub fn solve_power(spec: &PowerSpec) -> Result<PowerSpec> {
    let unknowns = spec.unknowns();
    if unknowns.len() != 1 {
        return Err(Error::UnknownCount(unknowns.len()));
    }
    spec.validate_known()?;
    let sigma = spec.sigma;
    let z = |p: f64| -std_normal_quantile(p);
    let mut out = *spec;
    match unknowns[0] {
        PowerUnknown::N => {
            let (a, b, eta) = (spec.alpha.unwrap(), spec.beta.unwrap(), spec.eta.unwrap());
            if eta == 0.0 {
                return Err(Error::NoSolution("a zero effect cannot be detected at any n".into()));
            }
            let exact_n = ((z(a) + z(b)) * sigma / eta).powi(2);
            out.n = Some(ceil_tolerant(exact_n).max(1.0) as u64);
        }
        PowerUnknown::Eta => {
            let (a, b, n) = (spec.alpha.unwrap(), spec.beta.unwrap(), spec.n.unwrap());
            out.eta = Some((z(a) + z(b)) * sigma / (n as f64).sqrt());
        }
        PowerUnknown::Alpha => {
            let (b, eta, n) = (spec.beta.unwrap(), spec.eta.unwrap(), spec.n.unwrap());
            let alpha = std_normal_cdf(z(b) - eta * (n as f64).sqrt() / sigma);
            out.alpha = Some(check_solved("alpha", alpha)?);
        }
        PowerUnknown::Beta => {
            let (a, eta, n) = (spec.alpha.unwrap(), spec.eta.unwrap(), spec.n.unwrap());
            let beta = std_normal_cdf(z(a) - eta * (n as f64).sqrt() / sigma);
            out.beta = Some(check_solved("beta", beta)?);
        }
    }
    Ok(out)
}

fn check_solved(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v <= 0.5 {
        Ok(v)
    } else {
        Err(Error::NoSolution(format!(
            "{name} would be {v}, outside (0, 0.5]"
        )))
    }
}

/// Ceiling that ignores float noise just above an integer.
fn ceil_tolerant(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.max(1.0) {
        r
    } else {
        x.ceil()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AdjustScheme {
    Bonferroni,
    Sidak,
}

impl std::str::FromStr for AdjustScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bonferroni" => Ok(AdjustScheme::Bonferroni),
            "sidak" | "šidák" => Ok(AdjustScheme::Sidak),
            other => Err(Error::param("adjustment scheme", other)),
        }
    }
}

/// Per-test level that keeps the family-wise error at `family_alpha`.
pub fn adjust_alpha(family_alpha: f64, tests: u64, scheme: AdjustScheme) -> Result<f64> {
    if !(family_alpha > 0.0 && family_alpha < 1.0) {
        return Err(Error::param("family alpha", family_alpha));
    }
    if tests == 0 {
        return Err(Error::param("number of tests", tests));
    }
    let m = tests as f64;
    Ok(match scheme {
        AdjustScheme::Bonferroni => family_alpha / m,
        AdjustScheme::Sidak => -((-family_alpha).ln_1p() / m).exp_m1(),
    })
}
