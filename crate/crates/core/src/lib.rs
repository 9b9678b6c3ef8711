//! Hypothesis-testing workbench.
//!
//! Five ways of weighing data against hypotheses, side by side:
//!
//! * [`fisher`]: single-hypothesis tail probabilities (p-values), exact when the
//!   hypothesis is given in rationals.
//! * [`evidential`]: sequential likelihood ratios, evidence grades, threshold
//!   rules, posterior odds and the universal bound on ever reaching a threshold.
//! * [`neyman_pearson`]: two-Gaussian decision rules, error rates, the
//!   four-way power relation and alpha adjustment for families of tests.
//! * [`info`]: Kullback-Leibler divergence, the log-likelihood-ratio/divergence
//!   identity, MAP decisions and the universal (Hoeffding) test.
//! * [`sim`]: seeded, worker-count independent Monte Carlo scenarios that check
//!   the bounds above empirically.
//!
//! All logarithms are natural logarithms.

pub mod dist;
pub mod error;
pub mod evidential;
pub mod exact;
pub mod fisher;
pub mod gaussian;
pub mod info;
pub mod mc;
pub mod neyman_pearson;
pub mod seed;
pub mod sim;

pub use dist::{EmpiricalDistribution, FiniteDistribution, Probability, Symbol};
pub use error::{Error, Result};
pub use evidential::{EvidenceGrade, Hypothesis, LogEvidence, Priors, Verdict};
pub use gaussian::GaussianPair;
pub use seed::Seed;
