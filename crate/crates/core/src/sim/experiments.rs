use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::evidential::Hypothesis;
use crate::gaussian::GaussianPair;
use crate::mc::{self, Estimate};
use crate::neyman_pearson::{adjust_alpha, np_test, AdjustScheme};
use crate::seed::Seed;

/// Repeated significance testing on null data, look by look.
#[derive(Debug, Clone, PartialEq)]
pub struct OptionalStopping {
    pub looks: Vec<u64>,
    /// `P_H(some z-test at looks[..=j] rejects)` for each look `j`.
    pub cumulative_rejection: Vec<Estimate>,
    /// `P_H(r_m >= s for some m <= looks[j])` with the ratio checked after
    /// every observation.
    pub lr_crossing: Vec<Estimate>,
    pub s: f64,
}

/// Data are drawn from `N(mu_H, sigma)`. At each look the one-sided level
/// `alpha` test of `mu_H` against larger means is applied to all data so
/// far; the likelihood ratio of `mu_K` against `mu_H` is monitored alongside
/// on the same paths. With `mu_K == mu_H` the monitor never moves.
pub fn optional_stopping_alpha(
    g: &GaussianPair,
    alpha: f64,
    looks: &[u64],
    s: f64,
    reps: u64,
    seed: Seed,
) -> Result<OptionalStopping> {
    if looks.is_empty() || looks[0] == 0 || looks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("looks", format!("{looks:?}")));
    }
    if !(s.is_finite() && s > 1.0) {
        return Err(Error::param("threshold s", s));
    }
    if reps == 0 {
        return Err(Error::param("replications", reps));
    }
    let cutoffs = looks
        .iter()
        .map(|&n| np_test(g, n, alpha).map(|(rule, _)| rule.cutoff))
        .collect::<Result<Vec<_>>>()?;
    let ln_s = s.ln();
    let horizon = *looks.last().unwrap();

    // per path: first look index that rejects, first look index whose window
    // contains an LR crossing (looks.len() if never)
    let firsts = mc::replicate(reps, seed, |_, stream| {
        let mut rng = stream.rng();
        let mut sum = 0.0;
        let mut log_lr = 0.0;
        let mut reject_at = looks.len();
        let mut cross_at = looks.len();
        let mut look = 0;
        for m in 1..=horizon {
            let z: f64 = StandardNormal.sample(&mut rng);
            let x = g.mu_h() + g.sigma() * z;
            sum += x;
            log_lr += g.log_density_ratio(x);
            if cross_at == looks.len() && log_lr >= ln_s {
                cross_at = look;
            }
            if m == looks[look] {
                if reject_at == looks.len() && sum / m as f64 >= cutoffs[look] {
                    reject_at = look;
                }
                look += 1;
            }
        }
        (reject_at, cross_at)
    });

    let mut rejected = vec![0u64; looks.len()];
    let mut crossed = vec![0u64; looks.len()];
    for &(r, c) in &firsts {
        for slot in &mut rejected[r..] {
            *slot += 1;
        }
        for slot in &mut crossed[c..] {
            *slot += 1;
        }
    }
    Ok(OptionalStopping {
        looks: looks.to_vec(),
        cumulative_rejection: rejected.iter().map(|&h| Estimate::proportion(h, reps)).collect(),
        lr_crossing: crossed.iter().map(|&h| Estimate::proportion(h, reps)).collect(),
        s,
    })
}

/// Multiple one-sided tests with a family-wise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyWiseError {
    pub tests: u64,
    pub per_test_alpha: f64,
    /// `P(at least one rejection)` with every null true.
    pub fwer: Estimate,
    /// Fraction of tests rejecting when every alternative is true.
    pub power: Estimate,
    pub analytic_power: f64,
}

/// Runs `tests` independent level-adjusted tests, each on `n` observations
/// from the pair `g`. Sample means are drawn directly from their exact
/// `N(mu, sigma / sqrt(n))` law.
pub fn family_wise_error(
    g: &GaussianPair,
    tests: u64,
    n: u64,
    family_alpha: f64,
    scheme: AdjustScheme,
    reps: u64,
    seed: Seed,
) -> Result<FamilyWiseError> {
    if reps == 0 {
        return Err(Error::param("replications", reps));
    }
    let per_test_alpha = adjust_alpha(family_alpha, tests, scheme)?;
    let (rule, rates) = np_test(g, n, per_test_alpha)?;
    let se = g.sigma() / (n as f64).sqrt();
    let draw_rejections = |which: Hypothesis, stream: Seed| -> u64 {
        let mut rng = stream.rng();
        let mu = g.mean(which);
        (0..tests)
            .filter(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                rule.decide(mu + se * z) == Hypothesis::K
            })
            .count() as u64
    };
    let null = mc::replicate(reps, seed.substream(0), |_, s| draw_rejections(Hypothesis::H, s));
    let alt = mc::replicate(reps, seed.substream(1), |_, s| draw_rejections(Hypothesis::K, s));
    let any = null.iter().filter(|&&r| r > 0).count() as u64;
    let hits: u64 = alt.iter().sum();
    Ok(FamilyWiseError {
        tests,
        per_test_alpha,
        fwer: Estimate::proportion(any, reps),
        power: Estimate::proportion(hits, reps * tests),
        analytic_power: rates.power(),
    })
}
