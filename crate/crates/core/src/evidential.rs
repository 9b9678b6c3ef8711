//! Two-hypothesis evidence: likelihood ratios, evidence grades, threshold
//! decisions and posterior odds.

use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;
use std::sync::Arc;

use crate::dist::{FiniteDistribution, Symbol};
use crate::error::{Error, Result};
use crate::exact;
use crate::gaussian::GaussianPair;
use crate::mc::{self, Estimate};
use crate::seed::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    H,
    K,
}

impl Hypothesis {
    pub fn other(self) -> Self {
        match self {
            Hypothesis::H => Hypothesis::K,
            Hypothesis::K => Hypothesis::H,
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::H => "H",
            Hypothesis::K => "K",
        })
    }
}

impl std::str::FromStr for Hypothesis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "H" | "h" => Ok(Hypothesis::H),
            "K" | "k" => Ok(Hypothesis::K),
            other => Err(Error::param("hypothesis", other)),
        }
    }
}

/// Outcome of comparing a likelihood ratio against a threshold pair `s`, `1/s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    AcceptK,
    AcceptH,
    Continue,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::AcceptK => "accept-K",
            Verdict::AcceptH => "accept-H",
            Verdict::Continue => "continue",
        })
    }
}

/// Prior probabilities of the two hypotheses, both strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Priors {
    pi_h: f64,
    pi_k: f64,
}

impl Priors {
    pub fn new(pi_h: f64) -> Result<Self> {
        if !(pi_h > 0.0 && pi_h < 1.0) {
            return Err(Error::param("prior of H", pi_h));
        }
        Ok(Priors {
            pi_h,
            pi_k: 1.0 - pi_h,
        })
    }

    pub fn equal() -> Self {
        Priors { pi_h: 0.5, pi_k: 0.5 }
    }

    pub fn pi_h(&self) -> f64 {
        self.pi_h
    }

    pub fn pi_k(&self) -> f64 {
        self.pi_k
    }

    /// `ln(pi_K / pi_H)`; exactly zero for equal priors.
    pub fn log_prior_odds(&self) -> f64 {
        (self.pi_k / self.pi_h).ln()
    }
}

/// Running log-likelihood ratio `ln r_n` of K against H.
///
/// Observations outside the support of one hypothesis falsify it and pin the
/// log ratio at `+inf` (H falsified) or `-inf` (K falsified). In exact mode
/// the per-symbol counts are kept as well, so the ratio can be reconstructed
/// exactly and threshold comparisons at the boundary are settled in rational
/// arithmetic.
#[derive(Debug, Clone)]
pub struct LogEvidence {
    log_lr: f64,
    n: u64,
    falsified: Option<Hypothesis>,
    abs_sum: f64,
    tally: Option<Tally>,
}

#[derive(Debug, Clone)]
struct Tally {
    /// `P_K(x) / P_H(x)` per symbol; `None` where `P_H(x) = 0`.
    ratios: Arc<[Option<BigRational>]>,
    counts: Vec<u64>,
}

impl Default for LogEvidence {
    fn default() -> Self {
        Self::new()
    }
}

impl LogEvidence {
    /// Float-mode evidence with no observations.
    pub fn new() -> Self {
        LogEvidence {
            log_lr: 0.0,
            n: 0,
            falsified: None,
            abs_sum: 0.0,
            tally: None,
        }
    }

    /// Exact-mode evidence for the pair `(h, k)`.
    pub fn exact(h: &FiniteDistribution, k: &FiniteDistribution) -> Result<Self> {
        h.check_same_alphabet(k)?;
        let ratios: Vec<Option<BigRational>> = (0..h.len())
            .map(|i| {
                let ph = h.rational(i);
                (!ph.is_zero()).then(|| k.rational(i) / ph)
            })
            .collect();
        Ok(LogEvidence {
            tally: Some(Tally {
                ratios: ratios.into(),
                counts: vec![0; h.len()],
            }),
            ..Self::new()
        })
    }

    pub fn log_lr(&self) -> f64 {
        self.log_lr
    }

    /// `r_n = exp(ln r_n)`.
    pub fn ratio(&self) -> f64 {
        self.log_lr.exp()
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// The hypothesis ruled out by an observation outside its support.
    pub fn falsified(&self) -> Option<Hypothesis> {
        self.falsified
    }

    pub fn is_exact(&self) -> bool {
        self.tally.is_some()
    }

    /// Per-symbol counts, in exact mode.
    pub fn counts(&self) -> Option<&[u64]> {
        self.tally.as_ref().map(|t| t.counts.as_slice())
    }

    /// The exact ratio `r_n`, in exact mode and while finite.
    pub fn exact_ratio(&self) -> Option<BigRational> {
        let t = self.tally.as_ref()?;
        match self.falsified {
            Some(Hypothesis::H) => return None,
            Some(Hypothesis::K) => return Some(BigRational::zero()),
            None => {}
        }
        let mut acc = BigRational::one();
        for (r, &c) in t.ratios.iter().zip(&t.counts) {
            if c > 0 {
                acc *= exact::pow(r.as_ref()?, c);
            }
        }
        Some(acc)
    }

    /// Adds the observation `x`.
    pub fn update(&self, h: &FiniteDistribution, k: &FiniteDistribution, x: &Symbol) -> Result<Self> {
        h.check_same_alphabet(k)?;
        let i = h.index_of(x)?;
        let mut next = self.clone();
        next.push(i, h.log_prob_at(i), k.log_prob_at(i))
            .map_err(|_| Error::ImpossibleObservation(x.to_string()))?;
        Ok(next)
    }

    /// Adds a batch of observations.
    pub fn update_all(&self, h: &FiniteDistribution, k: &FiniteDistribution, xs: &[Symbol]) -> Result<Self> {
        h.check_same_alphabet(k)?;
        let mut next = self.clone();
        for x in xs {
            let i = h.index_of(x)?;
            next.push(i, h.log_prob_at(i), k.log_prob_at(i))
                .map_err(|_| Error::ImpossibleObservation(x.to_string()))?;
        }
        Ok(next)
    }

    /// Adds a real-valued observation under the two-Gaussian pair, using the
    /// log-density difference in place of point probabilities.
    pub fn update_gaussian(&self, g: &GaussianPair, x: f64) -> Result<Self> {
        if self.tally.is_some() {
            return Err(Error::param("evidence mode", "exact evidence cannot take densities"));
        }
        if !x.is_finite() {
            return Err(Error::param("observation", x));
        }
        let mut next = self.clone();
        next.add_finite(g.log_density_ratio(x));
        next.n += 1;
        Ok(next)
    }

    /// In-place update by symbol index with precomputed log probabilities.
    pub(crate) fn push(&mut self, i: usize, log_ph: f64, log_pk: f64) -> Result<()> {
        let h_zero = log_ph == f64::NEG_INFINITY;
        let k_zero = log_pk == f64::NEG_INFINITY;
        match (h_zero, k_zero) {
            (true, true) => return Err(Error::ImpossibleObservation(format!("#{i}"))),
            (true, false) => self.falsify(Hypothesis::H)?,
            (false, true) => self.falsify(Hypothesis::K)?,
            (false, false) => self.add_finite(log_pk - log_ph),
        }
        self.n += 1;
        if let Some(t) = &mut self.tally {
            t.counts[i] += 1;
        }
        Ok(())
    }

    fn add_finite(&mut self, term: f64) {
        if self.falsified.is_none() {
            self.log_lr += term;
            self.abs_sum += term.abs();
        }
    }

    fn falsify(&mut self, which: Hypothesis) -> Result<()> {
        match self.falsified {
            Some(prev) if prev != which => {
                Err(Error::ImpossibleObservation("data exclude both hypotheses".into()))
            }
            _ => {
                self.falsified = Some(which);
                self.log_lr = match which {
                    Hypothesis::H => f64::INFINITY,
                    Hypothesis::K => f64::NEG_INFINITY,
                };
                Ok(())
            }
        }
    }

    /// Accept K when `r_n >= s`, accept H when `r_n <= 1/s`, otherwise continue.
    pub fn threshold_verdict(&self, s: f64) -> Result<Verdict> {
        if !(s.is_finite() && s >= 1.0) {
            return Err(Error::param("threshold s", s));
        }
        match self.falsified {
            Some(Hypothesis::H) => return Ok(Verdict::AcceptK),
            Some(Hypothesis::K) => return Ok(Verdict::AcceptH),
            None => {}
        }
        let ln_s = s.ln();
        if self.tally.is_some() {
            let tol = 1e-10 * (1.0 + self.abs_sum + ln_s);
            if (self.log_lr - ln_s).abs() <= tol || (self.log_lr + ln_s).abs() <= tol {
                let r = self.exact_ratio().expect("finite in exact mode");
                return Ok(exact_threshold(&r, s));
            }
        }
        Ok(if self.log_lr >= ln_s {
            Verdict::AcceptK
        } else if self.log_lr <= -ln_s {
            Verdict::AcceptH
        } else {
            Verdict::Continue
        })
    }

    /// `ln` of the posterior odds `pi(K|x) / pi(H|x)`.
    pub fn log_posterior_odds(&self, priors: &Priors) -> f64 {
        self.log_lr + priors.log_prior_odds()
    }

    /// Posterior odds `r_n * pi_K / pi_H`.
    pub fn posterior_odds(&self, priors: &Priors) -> f64 {
        self.log_posterior_odds(priors).exp()
    }

    /// Posterior probability of K.
    pub fn posterior_k(&self, priors: &Priors) -> f64 {
        let lo = self.log_posterior_odds(priors);
        if lo == f64::INFINITY {
            1.0
        } else if lo == f64::NEG_INFINITY {
            0.0
        } else if lo >= 0.0 {
            1.0 / (1.0 + (-lo).exp())
        } else {
            let e = lo.exp();
            e / (1.0 + e)
        }
    }
}

/// Threshold verdict for an exactly known ratio.
pub(crate) fn exact_threshold(r: &BigRational, s: f64) -> Verdict {
    let s_q = exact::from_f64(s).expect("finite threshold");
    if *r >= s_q {
        Verdict::AcceptK
    } else if r * &s_q <= BigRational::one() {
        Verdict::AcceptH
    } else {
        Verdict::Continue
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strength {
    BareComment,
    Substantial,
    Strong,
    VeryStrong,
    Decisive,
}

impl fmt::Display for Strength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strength::BareComment => "bare comment",
            Strength::Substantial => "substantial",
            Strength::Strong => "strong",
            Strength::VeryStrong => "very strong",
            Strength::Decisive => "decisive",
        })
    }
}

/// Jeffreys-style evidence grade. `favours` is `None` only at `r_n = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EvidenceGrade {
    pub strength: Strength,
    pub favours: Option<Hypothesis>,
}

impl EvidenceGrade {
    pub fn mirrored(self) -> Self {
        EvidenceGrade {
            strength: self.strength,
            favours: self.favours.map(Hypothesis::other),
        }
    }
}

impl fmt::Display for EvidenceGrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.favours {
            Some(h) => write!(f, "{} for {h}", self.strength),
            None => write!(f, "neutral"),
        }
    }
}

/// Cutpoints on `r_n` for evidence in favour of H; reciprocals apply to K.
/// Each cutpoint belongs to the stronger grade.
pub const JEFFREYS_CUTPOINTS: [(f64, Strength); 4] = [
    (0.01, Strength::Decisive),
    (0.03, Strength::VeryStrong),
    (0.1, Strength::Strong),
    (0.3, Strength::Substantial),
];

/// Grades a likelihood ratio `r_n >= 0` (`+inf` allowed).
pub fn grade(r: f64) -> Result<EvidenceGrade> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::param("likelihood ratio", r));
    }
    grade_log(r.ln())
}

/// Grades `ln r_n`. `grade_log(-l)` is always the mirror of `grade_log(l)`.
pub fn grade_log(log_r: f64) -> Result<EvidenceGrade> {
    if log_r.is_nan() {
        return Err(Error::param("log likelihood ratio", log_r));
    }
    if log_r == 0.0 {
        return Ok(EvidenceGrade {
            strength: Strength::BareComment,
            favours: None,
        });
    }
    // Fold onto the H side: `m = ln` of the ratio in favour of the favoured
    // hypothesis, expressed as a value below zero.
    let (m, favours) = if log_r < 0.0 {
        (log_r, Hypothesis::H)
    } else {
        (-log_r, Hypothesis::K)
    };
    let strength = JEFFREYS_CUTPOINTS
        .iter()
        .find(|(cut, _)| m <= cut.ln())
        .map(|&(_, s)| s)
        .unwrap_or(Strength::BareComment);
    Ok(EvidenceGrade {
        strength,
        favours: Some(favours),
    })
}

/// Per-symbol `ln P_K(x) - ln P_H(x)` for a hypothesis pair; infinite where a
/// support excludes the symbol.
#[derive(Debug, Clone)]
pub struct LogRatioTable {
    log_h: Vec<f64>,
    log_k: Vec<f64>,
    terms: Vec<f64>,
}

impl LogRatioTable {
    pub fn new(h: &FiniteDistribution, k: &FiniteDistribution) -> Result<Self> {
        h.check_same_alphabet(k)?;
        let log_h: Vec<f64> = (0..h.len()).map(|i| h.log_prob_at(i)).collect();
        let log_k: Vec<f64> = (0..k.len()).map(|i| k.log_prob_at(i)).collect();
        let terms = log_h
            .iter()
            .zip(&log_k)
            .map(|(&a, &b)| if a == b { 0.0 } else { b - a })
            .collect();
        Ok(LogRatioTable { log_h, log_k, terms })
    }

    #[inline]
    pub fn term(&self, i: usize) -> f64 {
        self.terms[i]
    }

    pub fn push(&self, ev: &mut LogEvidence, i: usize) -> Result<()> {
        ev.push(i, self.log_h[i], self.log_k[i])
    }

    /// Evidence from a sequence of symbol indices.
    pub fn evidence(&self, indices: &[usize]) -> Result<LogEvidence> {
        let mut ev = LogEvidence::new();
        for &i in indices {
            self.push(&mut ev, i)?;
        }
        Ok(ev)
    }
}

/// Monte Carlo estimate of `P_H(r_n >= s for some n <= horizon)`, with data
/// drawn from `h`. The universal bound says this never exceeds `1/s`.
pub fn robbins_violation_probability(
    h: &FiniteDistribution,
    k: &FiniteDistribution,
    s: f64,
    horizon: u64,
    reps: u64,
    seed: Seed,
) -> Result<Estimate> {
    if !(s.is_finite() && s > 1.0) {
        return Err(Error::param("threshold s", s));
    }
    if horizon == 0 {
        return Err(Error::param("horizon", horizon));
    }
    if reps == 0 {
        return Err(Error::param("replications", reps));
    }
    let table = LogRatioTable::new(h, k)?;
    let ln_s = s.ln();
    let crossed = mc::replicate(reps, seed, |_, stream| {
        let mut rng = stream.rng();
        let mut log_lr = 0.0;
        for _ in 0..horizon {
            log_lr += table.term(h.draw_index(&mut rng));
            if log_lr >= ln_s {
                return true;
            }
            if log_lr == f64::NEG_INFINITY {
                return false;
            }
        }
        false
    });
    let hits = crossed.iter().filter(|&&c| c).count() as u64;
    Ok(Estimate::proportion(hits, reps))
}
