//! Randomized and exhaustive audits of the exact identities and optimality
//! claims, shared by the scenario runner and the acceptance tests.
//!
//! Random cases use integer weights so every distribution is exact; some
//! cases are planted with power-of-two likelihood ratios so that threshold
//! and posterior ties really occur.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dist::{EmpiricalDistribution, FiniteDistribution, Symbol};
use crate::error::Result;
use crate::evidential::{LogEvidence, Priors};
use crate::exact;
use crate::fisher::{p_values, TailDirection};
use crate::evidential::Hypothesis;
use crate::info::{loglr_kl_identity_check, lr_threshold_as_kl_margin, map_decide_counts};
use crate::mc;
use crate::seed::Seed;

fn labels(k: usize) -> Vec<String> {
    (0..k).map(|i| i.to_string()).collect()
}

/// Exact distribution on the labels `0..k` from nonnegative integer weights.
pub fn from_weights(weights: &[u64]) -> Result<FiniteDistribution> {
    let total: u64 = weights.iter().sum();
    let probs = weights
        .iter()
        .map(|&w| BigRational::new(BigInt::from(w), BigInt::from(total)))
        .collect();
    FiniteDistribution::from_rationals(labels(weights.len()).iter().map(|s| s.as_str()), probs)
}

/// A random exact distribution on `k` symbols. With `full_support` every
/// weight is positive; otherwise about one weight in five is zero.
pub fn random_distribution(rng: &mut ChaCha8Rng, k: usize, full_support: bool) -> FiniteDistribution {
    loop {
        let weights: Vec<u64> = (0..k)
            .map(|_| {
                if !full_support && rng.random_bool(0.2) {
                    0
                } else {
                    rng.random_range(1..=12)
                }
            })
            .collect();
        if weights.iter().any(|&w| w > 0) {
            return from_weights(&weights).expect("positive total");
        }
    }
}

/// A pair whose per-symbol likelihood ratios are all powers of two.
pub fn dyadic_pair(rng: &mut ChaCha8Rng, k: usize) -> (FiniteDistribution, FiniteDistribution) {
    // h(i) ∝ 2^a_i, k(i) ∝ 2^b_i with a common normaliser gives ratios 2^(b_i - a_i)
    // times a constant; pick b as a permutation of a so the normalisers agree.
    let a: Vec<u32> = (0..k).map(|_| rng.random_range(0..4)).collect();
    let mut b = a.clone();
    for i in (1..k).rev() {
        b.swap(i, rng.random_range(0..=i));
    }
    let h = from_weights(&a.iter().map(|&e| 1u64 << e).collect::<Vec<_>>()).unwrap();
    let kk = from_weights(&b.iter().map(|&e| 1u64 << e).collect::<Vec<_>>()).unwrap();
    (h, kk)
}

fn draw(rng: &mut ChaCha8Rng, d: &FiniteDistribution, n: usize) -> Vec<Symbol> {
    (0..n).map(|_| d.alphabet()[d.draw_index(rng)].clone()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityAudit {
    pub cases: u64,
    pub failures: u64,
    /// Largest `|lhs - rhs| / max(1, |lhs|)` seen.
    pub max_relative_residual: f64,
}

/// Checks `ln r_n = n [D(P̂||P_H) - D(P̂||P_K)]` on random full-support cases.
pub fn kl_identity_audit(cases: u64, max_n: u64, max_alphabet: usize, tolerance: f64, seed: Seed) -> Result<IdentityAudit> {
    let results = mc::replicate(cases, seed, |_, stream| -> Result<f64> {
        let mut rng = stream.rng();
        let k = rng.random_range(2..=max_alphabet);
        let h = random_distribution(&mut rng, k, true);
        let kk = random_distribution(&mut rng, k, true);
        let n = rng.random_range(1..=max_n) as usize;
        let source = match rng.random_range(0..3) {
            0 => h.clone(),
            1 => kk.clone(),
            _ => random_distribution(&mut rng, k, false),
        };
        let xs = draw(&mut rng, &source, n);
        let check = loglr_kl_identity_check(&h, &kk, &xs)?;
        Ok(check.residual() / check.lhs.abs().max(1.0))
    });
    let mut audit = IdentityAudit {
        cases,
        failures: 0,
        max_relative_residual: 0.0,
    };
    for r in results {
        let r = r?;
        audit.max_relative_residual = audit.max_relative_residual.max(r);
        if r.is_nan() || r > tolerance {
            audit.failures += 1;
        }
    }
    Ok(audit)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginAudit {
    pub cases: u64,
    pub disagreements: u64,
    /// Cases whose ratio sat exactly on a threshold boundary.
    pub boundary_cases: u64,
}

/// Compares the likelihood-ratio threshold verdict with its divergence
/// margin form on random cases.
pub fn kl_margin_audit(cases: u64, max_n: u64, max_alphabet: usize, seed: Seed) -> Result<MarginAudit> {
    let results = mc::replicate(cases, seed, |_, stream| -> Result<(bool, bool)> {
        let mut rng = stream.rng();
        let k = rng.random_range(2..=max_alphabet);
        let planted = rng.random_bool(0.3);
        let (h, kk) = if planted {
            dyadic_pair(&mut rng, k)
        } else {
            let full = rng.random_bool(0.7);
            (random_distribution(&mut rng, k, full), random_distribution(&mut rng, k, full))
        };
        let n = rng.random_range(1..=max_n) as usize;
        let source = if rng.random_bool(0.5) { &h } else { &kk };
        let xs = draw(&mut rng, source, n);
        let ev = LogEvidence::exact(&h, &kk)?.update_all(&h, &kk, &xs)?;
        let s = match ev.exact_ratio() {
            Some(r) if planted && !r.is_zero() && rng.random_bool(0.5) => {
                // put s exactly on the boundary r or 1/r
                let big = if r >= BigRational::from_integer(1.into()) { r } else { r.recip() };
                exact::to_f64(&big)
            }
            _ => match rng.random_range(0..3) {
                0 => 1.0,
                1 => f64::from(rng.random_range(1..=64u32)),
                _ => rng.random_range(1.0..100.0),
            },
        };
        let on_boundary = ev
            .exact_ratio()
            .filter(|r| !r.is_zero())
            .and_then(|r| exact::from_f64(s).map(|sq| r == sq || r.recip() == sq))
            .unwrap_or(false);
        let lr = ev.threshold_verdict(s)?;
        let margin = lr_threshold_as_kl_margin(&h, &kk, &xs, s)?.verdict;
        Ok((lr == margin, on_boundary))
    });
    let mut audit = MarginAudit {
        cases,
        disagreements: 0,
        boundary_cases: 0,
    };
    for r in results {
        let (agree, boundary) = r?;
        audit.disagreements += u64::from(!agree);
        audit.boundary_cases += u64::from(boundary);
    }
    Ok(audit)
}

/// Every `(alphabet size, sample length)` with `k^n <= max_outcomes`, `k >= 2`.
pub fn small_designs(max_outcomes: usize) -> Vec<(usize, u32)> {
    let mut v = Vec::new();
    for k in 2..=max_outcomes {
        let mut n = 1u32;
        while k.pow(n) <= max_outcomes {
            v.push((k, n));
            n += 1;
        }
    }
    v
}

/// All `k^n` sequences, as symbol-index vectors in lexicographic order.
pub fn sequences(k: usize, n: u32) -> Vec<Vec<usize>> {
    let total = k.pow(n);
    (0..total)
        .map(|mut code| {
            let mut seq = vec![0; n as usize];
            for slot in seq.iter_mut().rev() {
                *slot = code % k;
                code /= k;
            }
            seq
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapAudit {
    /// `(h, k, priors, design)` combinations examined.
    pub combinations: u64,
    pub rules_enumerated: u64,
    /// Rules found with Bayes risk strictly below the MAP rule, exactly.
    pub violations: u64,
}

/// Exact Bayes risk `sum_x [d(x) = K] pi_H P_H(x) + [d(x) = H] pi_K P_K(x)`.
fn exact_risk(decide_k: impl Fn(usize) -> bool, wh: &[BigRational], wk: &[BigRational]) -> BigRational {
    let mut risk = BigRational::zero();
    for i in 0..wh.len() {
        risk += if decide_k(i) { &wh[i] } else { &wk[i] };
    }
    risk
}

/// For every small design and `cases` random hypothesis pairs per design and
/// prior, enumerates all `2^(k^n)` deterministic rules and looks for one that
/// beats the MAP rule.
pub fn map_optimality_audit(cases: u64, priors: &[f64], seed: Seed) -> Result<MapAudit> {
    let designs = small_designs(16);
    let jobs: Vec<(usize, u32, f64)> = designs
        .iter()
        .flat_map(|&(k, n)| priors.iter().map(move |&p| (k, n, p)))
        .collect();
    let per_job = mc::replicate(jobs.len() as u64 * cases, seed, |i, stream| -> Result<(u64, u64)> {
        let (k, n, pi_h) = jobs[(i / cases) as usize];
        let mut rng = stream.rng();
        let (h, kk) = match rng.random_range(0..3) {
            0 => dyadic_pair(&mut rng, k),
            1 => (random_distribution(&mut rng, k, false), random_distribution(&mut rng, k, false)),
            _ => (random_distribution(&mut rng, k, true), random_distribution(&mut rng, k, true)),
        };
        let priors = Priors::new(pi_h)?;
        let qh = exact::from_f64(priors.pi_h()).unwrap();
        let qk = exact::from_f64(priors.pi_k()).unwrap();

        let seqs = sequences(k, n);
        let mut wh = Vec::with_capacity(seqs.len());
        let mut wk = Vec::with_capacity(seqs.len());
        let mut map_k = Vec::with_capacity(seqs.len());
        for seq in &seqs {
            let mut ph = qh.clone();
            let mut pk = qk.clone();
            let mut counts = vec![0u64; k];
            for &x in seq {
                ph *= h.rational(x);
                pk *= kk.rational(x);
                counts[x] += 1;
            }
            let decide_k = if ph.is_zero() && pk.is_zero() {
                false
            } else {
                let emp = EmpiricalDistribution::from_counts(&h, counts)?;
                map_decide_counts(&h, &kk, &priors, &emp)?.decision == Hypothesis::K
            };
            wh.push(ph);
            wk.push(pk);
            map_k.push(decide_k);
        }
        let map_risk = exact_risk(|i| map_k[i], &wh, &wk);

        let fh: Vec<f64> = wh.iter().map(exact::to_f64).collect();
        let fk: Vec<f64> = wk.iter().map(exact::to_f64).collect();
        let map_risk_f = exact::to_f64(&map_risk);
        let slack = 1e-12 * (1.0 + map_risk_f);
        let m = seqs.len();
        let mut violations = 0;
        for rule in 0u64..(1u64 << m) {
            let risk: f64 = (0..m)
                .map(|i| if rule >> i & 1 == 1 { fh[i] } else { fk[i] })
                .sum();
            if risk < map_risk_f + slack
                && exact_risk(|i| rule >> i & 1 == 1, &wh, &wk) < map_risk
            {
                violations += 1;
            }
        }
        Ok((1u64 << m, violations))
    });
    let mut audit = MapAudit {
        combinations: per_job.len() as u64,
        rules_enumerated: 0,
        violations: 0,
    };
    for r in per_job {
        let (rules, v) = r?;
        audit.rules_enumerated += rules;
        audit.violations += v;
    }
    Ok(audit)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperUniformityAudit {
    pub distributions: u64,
    /// `(distribution, direction, attained level)` triples checked.
    pub levels_checked: u64,
    /// Levels `t` with `P_H(p(X) <= t) > t`, exactly.
    pub violations: u64,
}

/// For random exact distributions on at most `max_alphabet` numeric labels,
/// sums `P_H(p(X) <= t)` over the whole alphabet at every attained level `t`
/// and every tail direction. Between attained levels the left side is
/// constant, so these levels cover every `t` in `[0, 1]`.
pub fn super_uniformity_audit(cases: u64, max_alphabet: usize, seed: Seed) -> Result<SuperUniformityAudit> {
    let results = mc::replicate(cases, seed, |_, stream| -> Result<(u64, u64)> {
        let mut rng = stream.rng();
        let k = rng.random_range(2..=max_alphabet);
        let offset = rng.random_range(0..=k) as i64;
        let weights: Vec<u64> = (0..k)
            .map(|_| if rng.random_bool(0.15) { 0 } else { rng.random_range(1..=20) })
            .collect();
        let weights = if weights.iter().all(|&w| w == 0) { vec![1; k] } else { weights };
        let total: u64 = weights.iter().sum();
        let probs: Vec<BigRational> = weights
            .iter()
            .map(|&w| BigRational::new(BigInt::from(w), BigInt::from(total)))
            .collect();
        let labels: Vec<String> = (0..k as i64).map(|i| (i - offset).to_string()).collect();
        let d = FiniteDistribution::from_rationals(labels.iter().map(|s| s.as_str()), probs)?;
        let mut checked = 0;
        let mut violations = 0;
        for dir in [TailDirection::GreaterEqual, TailDirection::LessEqual, TailDirection::TwoSidedAbs] {
            let ps: Vec<BigRational> = p_values(&d, dir)?
                .into_iter()
                .map(|p| p.as_exact().cloned().expect("exact distribution"))
                .collect();
            for t in &ps {
                let mass: BigRational = (0..k).filter(|&j| &ps[j] <= t).map(|j| d.rational(j)).sum();
                checked += 1;
                if &mass > t {
                    violations += 1;
                }
            }
        }
        Ok((checked, violations))
    });
    let mut audit = SuperUniformityAudit {
        distributions: cases,
        levels_checked: 0,
        violations: 0,
    };
    for r in results {
        let (c, v) = r?;
        audit.levels_checked += c;
        audit.violations += v;
    }
    Ok(audit)
}
