//! Single-hypothesis significance testing.
//!
//! A p-value is the probability, under the hypothesis, of the observed value
//! together with every value at least as extreme in a declared direction.
//! Discrete tails always include the observed point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dist::{FiniteDistribution, Probability, Symbol};
use crate::error::{Error, Result};

/// Conventional significance levels.
pub mod levels {
    /// "Once in twenty trials."
    pub const CONVENTIONAL: f64 = 0.05;
    pub const STRICT: f64 = 0.01;
    pub const VERY_STRICT: f64 = 0.001;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TailDirection {
    /// `P(X >= x)`
    GreaterEqual,
    /// `P(X <= x)`
    LessEqual,
    /// `P(|X| >= |x|)`; requires signed numeric labels.
    TwoSidedAbs,
}

impl std::str::FromStr for TailDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "greater-equal" | "ge" | "upper" | ">=" => Ok(TailDirection::GreaterEqual),
            "less-equal" | "le" | "lower" | "<=" => Ok(TailDirection::LessEqual),
            "two-sided-abs" | "two-sided" | "abs" => Ok(TailDirection::TwoSidedAbs),
            _ => Err(Error::param("tail direction", s)),
        }
    }
}

impl std::fmt::Display for TailDirection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TailDirection::GreaterEqual => "greater-equal",
            TailDirection::LessEqual => "less-equal",
            TailDirection::TwoSidedAbs => "two-sided-abs",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PValueReport {
    pub p: Probability,
    pub direction: TailDirection,
    /// Probability of the observed value itself.
    pub point_prob: Probability,
    /// Number of outcomes included in the tail.
    pub n_extreme: usize,
}

/// Numeric values of the alphabet labels, which define the order.
fn label_values(d: &FiniteDistribution) -> Result<Vec<f64>> {
    let values = d
        .alphabet()
        .iter()
        .map(|s| {
            s.as_str()
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::UnorderedAlphabet(format!("label `{s}` is not a number")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::UnorderedAlphabet("two labels have the same value".into()));
    }
    Ok(values)
}

fn in_tail(y: f64, x: f64, dir: TailDirection) -> bool {
    match dir {
        TailDirection::GreaterEqual => y >= x,
        TailDirection::LessEqual => y <= x,
        TailDirection::TwoSidedAbs => y.abs() >= x.abs(),
    }
}

/// Tail probability of the observed symbol `x` under `d`.
///
/// The alphabet is ordered by the numeric value of its labels; the result is
/// exact when `d` is exact.
pub fn p_value(d: &FiniteDistribution, x: &Symbol, dir: TailDirection) -> Result<PValueReport> {
    let values = label_values(d)?;
    let xi = d.index_of(x)?;
    let xv = values[xi];
    let tail: Vec<usize> = (0..d.len()).filter(|&i| in_tail(values[i], xv, dir)).collect();
    let p = match d.exact_probs() {
        Some(e) => Probability::Exact(tail.iter().map(|&i| &e[i]).sum()),
        None => Probability::Float(tail.iter().map(|&i| d.probs()[i]).sum::<f64>().min(1.0)),
    };
    Ok(PValueReport {
        p,
        direction: dir,
        point_prob: d.probability(xi),
        n_extreme: tail.len(),
    })
}

/// All p-values of `d` in one pass: entry `i` is the p-value of symbol `i`.
pub fn p_values(d: &FiniteDistribution, dir: TailDirection) -> Result<Vec<Probability>> {
    d.alphabet()
        .iter()
        .map(|x| p_value(d, x, dir).map(|r| r.p))
        .collect()
}

/// Exact tail of Binomial(n, theta) at the observed count `k`.
pub fn binomial_tail(n: u64, k: u64, theta: &BigRational, dir: TailDirection) -> Result<PValueReport> {
    if n == 0 {
        return Err(Error::param("n", n));
    }
    if k > n {
        return Err(Error::param("k (must be <= n)", k));
    }
    if *theta < BigRational::zero() || *theta > BigRational::one() {
        return Err(Error::param("theta", theta));
    }
    let pmf = binomial_pmf(n, theta);
    // Support is 0..=n, all nonnegative, so |X| >= |k| is X >= k.
    let range = match dir {
        TailDirection::GreaterEqual | TailDirection::TwoSidedAbs => k as usize..=n as usize,
        TailDirection::LessEqual => 0..=k as usize,
    };
    let n_extreme = range.clone().count();
    let p: BigRational = pmf[range].iter().sum();
    Ok(PValueReport {
        p: Probability::Exact(p),
        direction: dir,
        point_prob: Probability::Exact(pmf[k as usize].clone()),
        n_extreme,
    })
}

/// Exact probability mass function of Binomial(n, theta) on 0..=n.
pub fn binomial_pmf(n: u64, theta: &BigRational) -> Vec<BigRational> {
    let one = BigRational::one();
    let q = &one - theta;
    let mut coeff = BigInt::one();
    let mut out = Vec::with_capacity(n as usize + 1);
    for j in 0..=n {
        if j > 0 {
            coeff = coeff * BigInt::from(n - j + 1) / BigInt::from(j);
        }
        let term = BigRational::from_integer(coeff.clone())
            * crate::exact::pow(theta, j)
            * crate::exact::pow(&q, n - j);
        out.push(term);
    }
    out
}

/// Binomial(n, theta) as an exact distribution over the labels `"0"..="n"`.
pub fn binomial_distribution(n: u64, theta: &BigRational) -> Result<FiniteDistribution> {
    FiniteDistribution::from_rationals(
        (0..=n).map(|j| Symbol::new(&j.to_string())),
        binomial_pmf(n, theta),
    )
}

/// `true` iff `p <= level`. The boundary counts as significant.
pub fn significance_verdict(p: f64, level: f64) -> Result<bool> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::param("significance level", level));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p-value", p));
    }
    Ok(p <= level)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn two_pow(e: u32) -> BigRational {
        BigRational::from_integer(BigInt::from(2).pow(e))
    }

    /// Two four-point hypotheses that agree on the observed value `0` but
    /// differ in the mass of the values below it.
    fn counterexample() -> (FiniteDistribution, FiniteDistribution) {
        let labels = ["-2", "-1", "0", "1"];
        let h = FiniteDistribution::from_rationals(labels, vec![q(1, 200), q(1, 200), q(2, 100), q(97, 100)]).unwrap();
        let k = FiniteDistribution::from_rationals(labels, vec![q(2, 10), q(2, 10), q(2, 100), q(58, 100)]).unwrap();
        (h, k)
    }

    #[test]
    fn unobserved_values_change_the_verdict() {
        let (h, k) = counterexample();
        let x = Symbol::new("0");
        let ph = p_value(&h, &x, TailDirection::LessEqual).unwrap();
        let pk = p_value(&k, &x, TailDirection::LessEqual).unwrap();
        assert_eq!(ph.p, Probability::Exact(q(3, 100)));
        assert_eq!(pk.p, Probability::Exact(q(42, 100)));
        assert_eq!(ph.point_prob, pk.point_prob);
        assert_eq!(ph.point_prob, Probability::Exact(q(2, 100)));
        assert!(significance_verdict(ph.p.to_f64(), levels::CONVENTIONAL).unwrap());
        assert!(!significance_verdict(pk.p.to_f64(), levels::CONVENTIONAL).unwrap());
    }

    #[test]
    fn point_mass_upper_tail_is_one() {
        let d = FiniteDistribution::point_mass(["1", "2", "3"], &"2".into()).unwrap();
        let r = p_value(&d, &"2".into(), TailDirection::GreaterEqual).unwrap();
        assert_eq!(r.p, Probability::Exact(q(1, 1)));
        assert_eq!(r.n_extreme, 2);
    }

    #[test]
    fn arbuthnot_tail() {
        let r = binomial_tail(82, 80, &q(1, 2), TailDirection::GreaterEqual).unwrap();
        assert_eq!(r.p, Probability::Exact(q(3404, 1) / two_pow(82)));
        assert_eq!(r.n_extreme, 3);
        let all_boys = binomial_tail(82, 82, &q(1, 2), TailDirection::GreaterEqual).unwrap();
        assert_eq!(all_boys.p, Probability::Exact(q(1, 1) / two_pow(82)));
    }

    #[test]
    fn two_coin_flips() {
        // outcomes HH, HT, TH, TT; at least one head in 3 of 4
        let r = binomial_tail(2, 1, &q(1, 2), TailDirection::GreaterEqual).unwrap();
        assert_eq!(r.p, Probability::Exact(q(3, 4)));
        assert_eq!(r.point_prob, Probability::Exact(q(1, 2)));
    }

    #[test]
    fn binomial_tail_range_checks() {
        assert!(binomial_tail(0, 0, &q(1, 2), TailDirection::GreaterEqual).is_err());
        assert!(binomial_tail(5, 6, &q(1, 2), TailDirection::GreaterEqual).is_err());
        assert!(binomial_tail(5, 2, &q(3, 2), TailDirection::GreaterEqual).is_err());
    }

    #[test]
    fn binomial_tails_complement_exactly() {
        for n in 1..15u64 {
            for k in 1..=n {
                let theta = q(k as i64, (n + 3) as i64);
                let ge = binomial_tail(n, k, &theta, TailDirection::GreaterEqual).unwrap();
                let le = binomial_tail(n, k - 1, &theta, TailDirection::LessEqual).unwrap();
                let sum = ge.p.as_exact().unwrap() + le.p.as_exact().unwrap();
                assert_eq!(sum, q(1, 1));
            }
        }
    }

    #[test]
    fn two_sided_uses_magnitudes() {
        let d = FiniteDistribution::from_rationals(
            ["-2", "-1", "0", "1", "2"],
            vec![q(1, 10), q(2, 10), q(4, 10), q(2, 10), q(1, 10)],
        )
        .unwrap();
        let r = p_value(&d, &"-1".into(), TailDirection::TwoSidedAbs).unwrap();
        assert_eq!(r.p, Probability::Exact(q(6, 10)));
        assert_eq!(r.n_extreme, 4);
    }

    #[test]
    fn unordered_alphabets_are_rejected() {
        let d = FiniteDistribution::uniform(["a", "b"]).unwrap();
        assert!(matches!(
            p_value(&d, &"a".into(), TailDirection::LessEqual),
            Err(Error::UnorderedAlphabet(_))
        ));
        let d = FiniteDistribution::uniform(["1", "1.0"]).unwrap();
        assert!(matches!(
            p_value(&d, &"1".into(), TailDirection::LessEqual),
            Err(Error::UnorderedAlphabet(_))
        ));
        let d = FiniteDistribution::uniform(["1", "2"]).unwrap();
        assert!(matches!(
            p_value(&d, &"3".into(), TailDirection::LessEqual),
            Err(Error::UnknownSymbol(_))
        ));
    }

    #[test]
    fn verdict_boundaries() {
        assert!(significance_verdict(0.03, 0.05).unwrap());
        assert!(!significance_verdict(0.06, 0.05).unwrap());
        assert!(significance_verdict(0.05, 0.05).unwrap());
        assert!(significance_verdict(0.5, 0.0).is_err());
        assert!(significance_verdict(0.5, 1.0).is_err());
    }

    #[test]
    fn float_distributions_give_float_p_values() {
        let d = FiniteDistribution::from_floats(["0", "1", "2"], vec![0.2, 0.3, 0.5]).unwrap();
        let r = p_value(&d, &"1".into(), TailDirection::GreaterEqual).unwrap();
        assert!(matches!(r.p, Probability::Float(p) if (p - 0.8).abs() < 1e-15));
    }
}
