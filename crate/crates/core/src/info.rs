//! Divergence-based view of testing: KL divergence, the identity linking the
//! log-likelihood ratio to divergences from the empirical distribution, MAP
//! decisions, and the universal test.
//!
//! For a sample with empirical distribution `P̂` of size `n`,
//!
//! ```text
//! sum_i ln(P_K(x_i) / P_H(x_i)) = n * (D(P̂ || P_H) - D(P̂ || P_K))
//! ```
//!
//! so every likelihood-ratio rule has a divergence form. Both forms are
//! computed here in floating point; when either lands within rounding of its
//! decision boundary the decision is taken from the exact rational ratio,
//! which both forms share.

use num_rational::BigRational;
use num_traits::One;
use std::cmp::Ordering;
use std::fmt;

use crate::dist::{EmpiricalDistribution, FiniteDistribution, Masses, Symbol};
use crate::error::{Error, Result};
use crate::evidential::{exact_threshold, Hypothesis, LogEvidence, LogRatioTable, Priors, Verdict};
use crate::exact;
use crate::mc::{self, Estimate};
use crate::seed::Seed;

/// A KL divergence in nats; `+inf` when the support condition fails.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Divergence(pub f64);

impl Divergence {
    pub fn nats(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} nats", self.0)
    }
}

/// `D(p || q) = sum p(x) ln(p(x) / q(x))`, with `0 ln 0 = 0`.
pub fn kl(p: &impl Masses, q: &FiniteDistribution) -> Result<Divergence> {
    Ok(Divergence(kl_with_scale(p, q)?.0))
}

/// The divergence and `sum p(x) |ln(p(x)/q(x))|`, the magnitude that bounds
/// its rounding error.
fn kl_with_scale(p: &impl Masses, q: &FiniteDistribution) -> Result<(f64, f64)> {
    if !p.alphabet_ref().same_as(q.alphabet_handle()) {
        return Err(Error::AlphabetMismatch);
    }
    let mut sum = 0.0;
    let mut scale = 0.0;
    for i in 0..p.size() {
        let pi = p.mass(i);
        if pi == 0.0 {
            continue;
        }
        let qi = q.probs()[i];
        if qi == 0.0 {
            return Ok((f64::INFINITY, f64::INFINITY));
        }
        let term = pi * (pi / qi).ln();
        sum += term;
        scale += term.abs();
    }
    // Rounding can leave a tiny negative value when p and q nearly coincide.
    Ok((sum.max(0.0), scale))
}

/// Both sides of the log-likelihood-ratio/divergence identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    /// `sum_i ln(P_K(x_i) / P_H(x_i))`, accumulated observation by observation.
    pub lhs: f64,
    /// `n * (D(P̂ || P_H) - D(P̂ || P_K))`.
    pub rhs: f64,
}

impl IdentityCheck {
    pub fn residual(&self) -> f64 {
        if self.lhs == self.rhs {
            0.0
        } else {
            (self.lhs - self.rhs).abs()
        }
    }

    /// `|lhs - rhs| <= rel * max(1, |lhs|)`.
    pub fn holds(&self, rel: f64) -> bool {
        self.residual() <= rel * self.lhs.abs().max(1.0)
    }
}

pub fn loglr_kl_identity_check(
    h: &FiniteDistribution,
    k: &FiniteDistribution,
    xs: &[Symbol],
) -> Result<IdentityCheck> {
    let ev = LogEvidence::new().update_all(h, k, xs)?;
    if ev.falsified().is_some() {
        // Outside the common support both sides are the same infinity.
        return Ok(IdentityCheck {
            lhs: ev.log_lr(),
            rhs: ev.log_lr(),
        });
    }
    let emp = EmpiricalDistribution::from_sample(xs, h)?;
    let dh = kl(&emp, h)?.nats();
    let dk = kl(&emp, k)?.nats();
    let n = xs.len() as f64;
    let rhs = if xs.is_empty() { 0.0 } else { n * (dh - dk) };
    Ok(IdentityCheck {
        lhs: ev.log_lr(),
        rhs,
    })
}

fn observed_counts(h: &FiniteDistribution, k: &FiniteDistribution, xs: &[Symbol]) -> Result<EmpiricalDistribution> {
    h.check_same_alphabet(k)?;
    let emp = EmpiricalDistribution::from_sample(xs, h)?;
    for (i, &c) in emp.counts().iter().enumerate() {
        if c > 0 && h.probs()[i] == 0.0 && k.probs()[i] == 0.0 {
            return Err(Error::ImpossibleObservation(h.alphabet()[i].to_string()));
        }
    }
    Ok(emp)
}

/// Exact `prod_x (P_K(x)/P_H(x))^{c_x}` over observed symbols. Requires
/// `P_H(x) > 0` on every observed symbol.
fn exact_ratio(h: &FiniteDistribution, k: &FiniteDistribution, counts: &[u64]) -> BigRational {
    let mut acc = BigRational::one();
    for (i, &c) in counts.iter().enumerate() {
        if c > 0 {
            acc *= exact::pow(&(k.rational(i) / h.rational(i)), c);
        }
    }
    acc
}

/// A MAP decision with both of its equivalent margins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapDecision {
    pub decision: Hypothesis,
    /// `ln(pi_K / pi_H) + sum_i ln(P_K(x_i) / P_H(x_i))`
    pub log_posterior_margin: f64,
    /// `[ln(1/pi_H) + n D(P̂||P_H)] - [ln(1/pi_K) + n D(P̂||P_K)]`
    pub divergence_margin: f64,
}

/// Chooses the hypothesis with the larger posterior probability; an exact tie
/// goes to H.
pub fn map_decide(
    h: &FiniteDistribution,
    k: &FiniteDistribution,
    priors: &Priors,
    xs: &[Symbol],
) -> Result<MapDecision> {
    let emp = observed_counts(h, k, xs)?;
    map_decide_counts(h, k, priors, &emp)
}

/// [`map_decide`] for a sample already reduced to counts. The sum of
/// log-likelihood ratios is accumulated in alphabet order.
pub fn map_decide_counts(
    h: &FiniteDistribution,
    k: &FiniteDistribution,
    priors: &Priors,
    emp: &EmpiricalDistribution,
) -> Result<MapDecision> {
    emp.matches(h)?;
    h.check_same_alphabet(k)?;
    let mut ev = LogEvidence::new();
    for (i, &c) in emp.counts().iter().enumerate() {
        for _ in 0..c {
            ev.push(i, h.log_prob_at(i), k.log_prob_at(i))
                .map_err(|_| Error::ImpossibleObservation(h.alphabet()[i].to_string()))?;
        }
    }
    let a = ev.log_posterior_odds(priors);

    let n = emp.n() as f64;
    let (dh, sh) = kl_with_scale(emp, h)?;
    let (dk, sk) = kl_with_scale(emp, k)?;
    let side_h = (1.0 / priors.pi_h()).ln() + if emp.n() == 0 { 0.0 } else { n * dh };
    let side_k = (1.0 / priors.pi_k()).ln() + if emp.n() == 0 { 0.0 } else { n * dk };
    let b = if side_h == side_k { 0.0 } else { side_h - side_k };

    let decision = if a.is_infinite() || b.is_infinite() {
        if a.signum() != b.signum() {
            return Err(Error::Numerical(format!("MAP margins disagree: {a} vs {b}")));
        }
        if a > 0.0 { Hypothesis::K } else { Hypothesis::H }
    } else {
        let prior_scale = priors.log_prior_odds().abs() + 1.0;
        let tol = 1e-10 * (prior_scale + n * (sh + sk));
        if a.abs() <= tol || b.abs() <= tol {
            // pi_K prod P_K(x_i)  vs  pi_H prod P_H(x_i)
            let lhs = exact::from_f64(priors.pi_k()).unwrap() * exact_ratio(h, k, emp.counts());
            let rhs = exact::from_f64(priors.pi_h()).unwrap();
            if lhs.cmp(&rhs) == Ordering::Greater {
                Hypothesis::K
            } else {
                Hypothesis::H
            }
        } else if (a > 0.0) != (b > 0.0) {
            return Err(Error::Numerical(format!("MAP margins disagree: {a} vs {b}")));
        } else if a > 0.0 {
            Hypothesis::K
        } else {
            Hypothesis::H
        }
    };
    Ok(MapDecision {
        decision,
        log_posterior_margin: a,
        divergence_margin: b,
    })
}

/// The likelihood-ratio threshold rule written with divergences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginVerdict {
    pub verdict: Verdict,
    /// `ln(s) / n`
    pub margin: f64,
    /// `D(P̂ || P_H)`
    pub divergence_h: f64,
    /// `D(P̂ || P_K)`
    pub divergence_k: f64,
}

/// Accept K iff `D(P̂||P_H) - ln(s)/n >= D(P̂||P_K)`, accept H iff
/// `D(P̂||P_K) - ln(s)/n >= D(P̂||P_H)`, otherwise continue. Agrees exactly
/// with [`LogEvidence::threshold_verdict`].
pub fn lr_threshold_as_kl_margin(
    h: &FiniteDistribution,
    k: &FiniteDistribution,
    xs: &[Symbol],
    s: f64,
) -> Result<MarginVerdict> {
    if !(s.is_finite() && s >= 1.0) {
        return Err(Error::param("threshold s", s));
    }
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    let emp = observed_counts(h, k, xs)?;
    let (dh, sh) = kl_with_scale(&emp, h)?;
    let (dk, sk) = kl_with_scale(&emp, k)?;
    let n = xs.len() as f64;
    let ln_s = s.ln();
    let margin = ln_s / n;

    let verdict = match (dh.is_infinite(), dk.is_infinite()) {
        (true, true) => {
            return Err(Error::ImpossibleObservation("data exclude both hypotheses".into()))
        }
        (true, false) => Verdict::AcceptK,
        (false, true) => Verdict::AcceptH,
        (false, false) => {
            let diff = n * (dh - dk);
            let tol = 1e-10 * (1.0 + n * (sh + sk) + ln_s);
            if (diff - ln_s).abs() <= tol || (diff + ln_s).abs() <= tol {
                exact_threshold(&exact_ratio(h, k, emp.counts()), s)
            } else if dh - margin >= dk {
                Verdict::AcceptK
            } else if dk - margin >= dh {
                Verdict::AcceptH
            } else {
                Verdict::Continue
            }
        }
    };
    Ok(MarginVerdict {
        verdict,
        margin,
        divergence_h: dh,
        divergence_k: dk,
    })
}

/// Mean of `(1/n) ln r_n` over replications with data drawn from `truth`.
///
/// Under K this tends to `D(P_K || P_H)`; under H to `-D(P_H || P_K)`.
pub fn log_lr_rate(
    h: &FiniteDistribution,
    k: &FiniteDistribution,
    truth: Hypothesis,
    n: u64,
    reps: u64,
    seed: Seed,
) -> Result<Estimate> {
    if n == 0 {
        return Err(Error::param("n", n));
    }
    if reps == 0 {
        return Err(Error::param("replications", reps));
    }
    let (data, other) = match truth {
        Hypothesis::K => (k, h),
        Hypothesis::H => (h, k),
    };
    if !kl(data, other)?.is_finite() {
        return Err(Error::InfiniteDivergence);
    }
    let table = LogRatioTable::new(h, k)?;
    let rates = mc::replicate(reps, seed, |_, stream| {
        let mut rng = stream.rng();
        let mut sum = 0.0;
        for _ in 0..n {
            sum += table.term(data.draw_index(&mut rng));
        }
        sum / n as f64
    });
    Ok(Estimate::mean(&rates))
}

/// [`log_lr_rate`] with data from K.
pub fn evidence_rate(
    h: &FiniteDistribution,
    k: &FiniteDistribution,
    n: u64,
    reps: u64,
    seed: Seed,
) -> Result<Estimate> {
    log_lr_rate(h, k, Hypothesis::K, n, reps, seed)
}

/// Radius `c_n` of the acceptance region `{P̂ : D(P̂ || P_H) <= c_n}`.
#[derive(Debug, Clone, Copy)]
pub enum RadiusRule {
    /// `c_n = ((k - 1) ln(n + 1) + ln(1/delta)) / n`. There are at most
    /// `(n+1)^(k-1)` types and each type class has probability at most
    /// `exp(-n D)`, so the type-I error is at most `delta` for every `n`.
    MethodOfTypes,
    /// `(n, alphabet size, delta) -> c_n`.
    Custom(fn(u64, usize, f64) -> f64),
}

#[derive(Debug, Clone, Copy)]
pub struct UniversalTestConfig {
    pub delta: f64,
    pub radius_rule: RadiusRule,
}

impl UniversalTestConfig {
    pub fn new(delta: f64) -> Result<Self> {
        Self::with_rule(delta, RadiusRule::MethodOfTypes)
    }

    pub fn with_rule(delta: f64, radius_rule: RadiusRule) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::param("delta", delta));
        }
        Ok(UniversalTestConfig { delta, radius_rule })
    }

    pub fn radius(&self, n: u64, alphabet_size: usize) -> f64 {
        match self.radius_rule {
            RadiusRule::MethodOfTypes => {
                let k = alphabet_size as f64;
                ((k - 1.0) * (n as f64 + 1.0).ln() + (1.0 / self.delta).ln()) / n as f64
            }
            RadiusRule::Custom(f) => f(n, alphabet_size, self.delta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UniversalVerdict {
    AcceptH,
    RejectH,
}

impl fmt::Display for UniversalVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UniversalVerdict::AcceptH => "accept-H",
            UniversalVerdict::RejectH => "reject-H",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoeffdingOutcome {
    pub verdict: UniversalVerdict,
    /// `D(P̂ || P_H)`
    pub statistic: f64,
    /// `c_n`
    pub radius: f64,
}

/// Accept H iff the empirical distribution lies within divergence `c_n` of `h`.
pub fn hoeffding_test(h: &FiniteDistribution, xs: &[Symbol], cfg: &UniversalTestConfig) -> Result<HoeffdingOutcome> {
    let emp = EmpiricalDistribution::from_sample(xs, h)?;
    hoeffding_test_counts(h, &emp, cfg)
}

pub fn hoeffding_test_counts(
    h: &FiniteDistribution,
    emp: &EmpiricalDistribution,
    cfg: &UniversalTestConfig,
) -> Result<HoeffdingOutcome> {
    if emp.n() == 0 {
        return Err(Error::EmptySample);
    }
    let statistic = kl(emp, h)?.nats();
    let radius = cfg.radius(emp.n(), h.len());
    let verdict = if statistic <= radius {
        UniversalVerdict::AcceptH
    } else {
        UniversalVerdict::RejectH
    };
    Ok(HoeffdingOutcome {
        verdict,
        statistic,
        radius,
    })
}

/// `D(P_H || P̂)`: the data-centred statistic. Reported only; no radius rule
/// comes with it.
pub fn reverse_statistic(h: &FiniteDistribution, xs: &[Symbol]) -> Result<Divergence> {
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    let emp = EmpiricalDistribution::from_sample(xs, h)?;
    let freq = emp.frequencies().expect("nonempty sample");
    kl(h, &freq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bern(p: f64) -> FiniteDistribution {
        FiniteDistribution::from_pairs(&[("a", p), ("b", 1.0 - p)]).unwrap()
    }

    fn syms(s: &str) -> Vec<Symbol> {
        s.chars().map(|c| Symbol::new(&c.to_string())).collect()
    }

    #[test]
    fn kl_values_and_asymmetry() {
        let p = bern(0.5);
        let q = bern(0.25);
        assert_eq!(kl(&p, &p).unwrap().nats(), 0.0);
        // 0.5 ln 2 + 0.5 ln(2/3)
        let forward = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
        assert!((kl(&p, &q).unwrap().nats() - forward).abs() < 1e-15);
        assert!((forward - 0.143_841_036_225_890_1).abs() < 1e-12);
        // 0.25 ln(1/2) + 0.75 ln(3/2)
        let backward = 0.25 * 0.5f64.ln() + 0.75 * 1.5f64.ln();
        assert!((kl(&q, &p).unwrap().nats() - backward).abs() < 1e-15);
        assert!((backward - 0.130_812_035_941_137_5).abs() < 1e-12);
        assert!(forward != backward);
    }

    #[test]
    fn kl_support_and_alphabet() {
        let h = FiniteDistribution::from_pairs(&[("a", 1.0), ("b", 0.0)]).unwrap();
        let k = bern(0.5);
        assert_eq!(kl(&k, &h).unwrap().nats(), f64::INFINITY);
        assert!(kl(&h, &k).unwrap().is_finite());
        let other = FiniteDistribution::from_pairs(&[("x", 0.5), ("y", 0.5)]).unwrap();
        assert!(matches!(kl(&k, &other), Err(Error::AlphabetMismatch)));
    }

    #[test]
    fn identity_small_cases() {
        let h = bern(0.5);
        let k = bern(0.25);
        let empty = loglr_kl_identity_check(&h, &k, &[]).unwrap();
        assert_eq!((empty.lhs, empty.rhs), (0.0, 0.0));
        let same = loglr_kl_identity_check(&h, &h, &syms("abba")).unwrap();
        assert_eq!((same.lhs, same.rhs), (0.0, 0.0));
        let c = loglr_kl_identity_check(&h, &k, &syms("aab")).unwrap();
        assert!((c.lhs - 0.375f64.ln()).abs() < 1e-14);
        assert!((c.rhs - 0.375f64.ln()).abs() < 1e-14);
        assert!(c.holds(1e-9));
    }

    #[test]
    fn map_examples() {
        let h = bern(0.5);
        let k = bern(0.25);
        let d = map_decide(&h, &k, &Priors::equal(), &syms("bbb")).unwrap();
        assert_eq!(d.decision, Hypothesis::K);
        let d = map_decide(&h, &k, &Priors::new(0.1).unwrap(), &[]).unwrap();
        assert_eq!(d.decision, Hypothesis::K);
        let d = map_decide(&h, &k, &Priors::new(0.9).unwrap(), &[]).unwrap();
        assert_eq!(d.decision, Hypothesis::H);
        // exact tie goes to H
        let d = map_decide(&h, &h, &Priors::equal(), &syms("ab")).unwrap();
        assert_eq!(d.decision, Hypothesis::H);
    }

    #[test]
    fn map_tie_is_resolved_exactly() {
        // ratio (3/2)^2 (1/2)^1 = 9/8 against prior odds pi_K/pi_H = 8/9
        let h = bern(0.5);
        let k = bern(0.25);
        let priors = Priors::new(9.0 / 17.0).unwrap();
        let d = map_decide(&h, &k, &priors, &syms("bba")).unwrap();
        // pi_K * 9/8 vs pi_H in the dyadic values of the float priors
        let lhs = exact::from_f64(priors.pi_k()).unwrap() * BigRational::new(9.into(), 8.into());
        let rhs = exact::from_f64(priors.pi_h()).unwrap();
        let expect = if lhs > rhs { Hypothesis::K } else { Hypothesis::H };
        assert_eq!(d.decision, expect);
    }

    #[test]
    fn margin_examples() {
        let h = bern(0.5);
        let k = bern(0.25);
        let v = lr_threshold_as_kl_margin(&h, &k, &syms("bbbb"), 2.0).unwrap();
        assert_eq!(v.verdict, Verdict::AcceptK);
        assert!((v.margin - 2f64.ln() / 4.0).abs() < 1e-16);
        // exact boundary r_4 = 81/16
        let v = lr_threshold_as_kl_margin(&h, &k, &syms("bbbb"), 5.0625).unwrap();
        assert_eq!(v.verdict, Verdict::AcceptK);
        let s1 = lr_threshold_as_kl_margin(&h, &k, &syms("ab"), 1.0).unwrap();
        assert_eq!(s1.margin, 0.0);
        // (1/2)(3/2) = 3/4 < 1: the empirical distribution is closer to H
        assert_eq!(s1.verdict, Verdict::AcceptH);
        assert!(matches!(lr_threshold_as_kl_margin(&h, &k, &[], 2.0), Err(Error::EmptySample)));
    }

    #[test]
    fn margin_support_exclusion() {
        let h = FiniteDistribution::from_pairs(&[("a", 1.0), ("b", 0.0)]).unwrap();
        let k = bern(0.5);
        let v = lr_threshold_as_kl_margin(&h, &k, &syms("ab"), 100.0).unwrap();
        assert_eq!(v.verdict, Verdict::AcceptK);
        assert_eq!(v.divergence_h, f64::INFINITY);
    }

    #[test]
    fn evidence_rate_identical_is_zero() {
        let h = bern(0.3);
        let e = evidence_rate(&h, &h, 100, 10, Seed::new(1)).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.se, 0.0);
    }

    #[test]
    fn evidence_rate_support_error() {
        let h = FiniteDistribution::from_pairs(&[("a", 1.0), ("b", 0.0)]).unwrap();
        let k = bern(0.5);
        assert!(matches!(evidence_rate(&h, &k, 10, 10, Seed::new(1)), Err(Error::InfiniteDivergence)));
    }

    #[test]
    fn hoeffding_examples() {
        let u = FiniteDistribution::uniform(["a", "b"]).unwrap();
        let cfg = UniversalTestConfig::new(0.05).unwrap();
        let balanced = hoeffding_test(&u, &syms("abab"), &cfg).unwrap();
        assert_eq!(balanced.statistic, 0.0);
        assert_eq!(balanced.verdict, UniversalVerdict::AcceptH);

        let all_a = vec![Symbol::new("a"); 100];
        let r = hoeffding_test(&u, &all_a, &cfg).unwrap();
        assert!((r.statistic - 2f64.ln()).abs() < 1e-15);
        assert!((r.radius - (101f64.ln() + 20f64.ln()) / 100.0).abs() < 1e-15);
        assert!((r.radius - 0.0761).abs() < 1e-4);
        assert_eq!(r.verdict, UniversalVerdict::RejectH);

        let one = hoeffding_test(&u, &syms("b"), &cfg).unwrap();
        assert!((one.statistic - 2f64.ln()).abs() < 1e-15);
        assert_eq!(one.radius, 2f64.ln() + 20f64.ln());
        assert_eq!(one.verdict, UniversalVerdict::AcceptH);

        assert!(matches!(hoeffding_test(&u, &[], &cfg), Err(Error::EmptySample)));
    }

    #[test]
    fn hoeffding_zero_mass_rejects() {
        let h = FiniteDistribution::from_pairs(&[("a", 1.0), ("b", 0.0)]).unwrap();
        let cfg = UniversalTestConfig::new(0.05).unwrap();
        let r = hoeffding_test(&h, &syms("aaaab"), &cfg).unwrap();
        assert_eq!(r.verdict, UniversalVerdict::RejectH);
        assert_eq!(r.statistic, f64::INFINITY);
    }

    #[test]
    fn radius_rule_shape() {
        let cfg = UniversalTestConfig::new(0.05).unwrap();
        let mut prev = 0.0;
        for n in 1..5000u64 {
            let c = cfg.radius(n, 4);
            assert!(c > 0.0);
            assert!(n as f64 * c >= prev);
            prev = n as f64 * c;
        }
        assert!(cfg.radius(1_000_000, 4) < 1e-4);
        let custom = UniversalTestConfig::with_rule(0.05, RadiusRule::Custom(|n, _, _| 1.0 / n as f64)).unwrap();
        assert_eq!(custom.radius(4, 2), 0.25);
    }

    #[test]
    fn reverse_statistic_is_reported() {
        let u = FiniteDistribution::uniform(["a", "b"]).unwrap();
        let d = reverse_statistic(&u, &syms("aaab")).unwrap();
        let expect = 0.5 * (0.5f64 / 0.75).ln() + 0.5 * (0.5f64 / 0.25).ln();
        assert!((d.nats() - expect).abs() < 1e-15);
        assert_eq!(reverse_statistic(&u, &syms("aaa")).unwrap().nats(), f64::INFINITY);
    }
}
