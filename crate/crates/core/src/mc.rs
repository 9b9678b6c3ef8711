//! Monte Carlo building blocks shared by the modules and the scenario runner.

use rayon::prelude::*;

use crate::seed::Seed;

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
    pub reps: u64,
}

impl Estimate {
    /// Proportion `hits / reps` with binomial SE `sqrt(p(1-p)/reps)`.
    pub fn proportion(hits: u64, reps: u64) -> Self {
        assert!(reps > 0, "proportion over zero replications");
        let p = hits as f64 / reps as f64;
        Estimate {
            value: p,
            se: (p * (1.0 - p) / reps as f64).sqrt(),
            reps,
        }
    }

    /// Sample mean with SE `s / sqrt(reps)`.
    pub fn mean(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "mean of no replications");
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Estimate {
            value: mean,
            se: (var / n).sqrt(),
            reps: values.len() as u64,
        }
    }

    /// `value <= bound + z * se`.
    pub fn at_most(&self, bound: f64, z: f64) -> bool {
        self.value <= bound + z * self.se
    }

    /// `|value - target| <= z * se`.
    pub fn within(&self, target: f64, z: f64) -> bool {
        (self.value - target).abs() <= z * self.se
    }
}

/// Runs `reps` independent replications; replication `i` receives
/// `seed.substream(i)`. Results come back in replication order, so any
/// sequential fold over them is independent of the worker count.
pub fn replicate<T, F>(reps: u64, seed: Seed, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, Seed) -> T + Sync + Send,
{
    (0..reps)
        .into_par_iter()
        .map(|i| f(i, seed.substream(i)))
        .collect()
}

/// Empirical quantile by the nearest-rank rule on a sorted copy.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    if v.is_empty() {
        return f64::NAN;
    }
    let rank = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[rank - 1]
}
