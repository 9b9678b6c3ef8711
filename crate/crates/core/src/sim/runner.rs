use std::time::Instant;

use rand_distr::{Distribution, StandardNormal};

use super::audit;
use super::experiments::{family_wise_error, optional_stopping_alpha};
use super::report::{RowKind, SimulationReport};
use super::scenario::{NpRule, Paradigm, Scenario};
use crate::dist::{EmpiricalDistribution, FiniteDistribution};
use crate::error::{Error, Result};
use crate::evidential::{robbins_violation_probability, Hypothesis, LogEvidence, LogRatioTable, Priors, Verdict};
use crate::fisher::{binomial_tail, p_value};
use crate::gaussian::GaussianPair;
use crate::info::{hoeffding_test_counts, kl, log_lr_rate, map_decide_counts, UniversalVerdict};
use crate::mc::{self, Estimate};
use crate::neyman_pearson::{midpoint_rule, np_test, solve_power, PowerUnknown};
use crate::seed::Seed;

const QUANTILES: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

/// Executes a validated scenario on the current rayon pool.
pub fn run(scenario: &Scenario) -> Result<SimulationReport> {
    let start = Instant::now();
    let mut report = SimulationReport::new(&scenario.name, scenario.paradigm.name(), scenario.seed, scenario.reps);
    execute(scenario, &mut report).map_err(|e| Error::Scenario {
        scenario: scenario.name.clone(),
        source: Box::new(e),
    })?;
    report.wall_clock = start.elapsed();
    Ok(report)
}

/// [`run`] on a dedicated pool with `threads` workers.
pub fn run_with_threads(scenario: &Scenario, threads: usize) -> Result<SimulationReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Numerical(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run(scenario))
}

/// Data source for one replication: either finite symbols or Gaussian draws.
enum Pair<'a> {
    Finite(&'a FiniteDistribution, &'a FiniteDistribution),
    Gaussian(&'a GaussianPair),
}

fn pair(s: &Scenario) -> Result<Pair<'_>> {
    match (&s.h, &s.k, &s.gaussian) {
        (Some(h), Some(k), _) => Ok(Pair::Finite(h, k)),
        (_, _, Some(g)) => Ok(Pair::Gaussian(g)),
        _ => Err(Error::ScenarioFormat("no hypothesis pair".into())),
    }
}

/// Evidence along one path of length `n` drawn from `truth`, with the log
/// ratio recorded at each checkpoint.
fn evidence_path(p: &Pair, truth: Hypothesis, n: u64, checkpoints: &[u64], stream: Seed) -> Result<(LogEvidence, Vec<f64>)> {
    let mut rng = stream.rng();
    let mut trail = Vec::with_capacity(checkpoints.len());
    let mut next = 0;
    let mut ev;
    match p {
        Pair::Finite(h, k) => {
            let table = LogRatioTable::new(h, k)?;
            ev = if h.is_exact() && k.is_exact() { LogEvidence::exact(h, k)? } else { LogEvidence::new() };
            let data = if truth == Hypothesis::H { *h } else { *k };
            for m in 1..=n {
                table.push(&mut ev, data.draw_index(&mut rng))?;
                if next < checkpoints.len() && checkpoints[next] == m {
                    trail.push(ev.log_lr());
                    next += 1;
                }
            }
        }
        Pair::Gaussian(g) => {
            ev = LogEvidence::new();
            let mu = g.mean(truth);
            for m in 1..=n {
                let z: f64 = StandardNormal.sample(&mut rng);
                ev = ev.update_gaussian(g, mu + g.sigma() * z)?;
                if next < checkpoints.len() && checkpoints[next] == m {
                    trail.push(ev.log_lr());
                    next += 1;
                }
            }
        }
    }
    Ok((ev, trail))
}

fn collect<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}

fn rate(hits: usize, reps: u64) -> Estimate {
    Estimate::proportion(hits as u64, reps)
}

fn label(h: Hypothesis) -> &'static str {
    match h {
        Hypothesis::H => "H",
        Hypothesis::K => "K",
    }
}

fn execute(s: &Scenario, report: &mut SimulationReport) -> Result<()> {
    let root = Seed::new(s.seed);
    let reps = s.reps;
    match &s.paradigm {
        Paradigm::FisherBinomial { trials, observed, theta, direction } => {
            let r = binomial_tail(*trials, *observed, theta, *direction)?;
            let exact = r.p.as_exact().expect("binomial tails are exact");
            report.push("p_value", Some(*trials), RowKind::Exact, r.p.to_f64(), exact.to_string());
            report.push("point_probability", Some(*trials), RowKind::Exact, r.point_prob.to_f64(), r.point_prob.as_exact().map(ToString::to_string).unwrap_or_default());
            report.push("outcomes_in_tail", Some(*trials), RowKind::Count, r.n_extreme as f64, direction.to_string());
        }
        Paradigm::FisherFinite { observed, direction } => {
            for (name, d) in [("H", &s.h), ("K", &s.k)] {
                let Some(d) = d else { continue };
                let r = p_value(d, observed, *direction)?;
                let exact = r.p.as_exact().map(ToString::to_string).unwrap_or_default();
                report.push("p_value", None, RowKind::Exact, r.p.to_f64(), format!("{name} {exact}").trim().to_string());
                report.push("point_probability", None, RowKind::Exact, r.point_prob.to_f64(), name);
            }
        }
        Paradigm::Lr { n, thresholds, checkpoints } => {
            let p = pair(s)?;
            let truth = s.truth.expect("validated");
            let paths = collect(mc::replicate(reps, root, |_, stream| evidence_path(&p, truth, *n, checkpoints, stream)))?;
            for &t in thresholds {
                let verdicts = paths.iter().map(|(ev, _)| ev.threshold_verdict(t)).collect::<Result<Vec<_>>>()?;
                for (v, name) in [(Verdict::AcceptK, "accept_k"), (Verdict::AcceptH, "accept_h"), (Verdict::Continue, "continue")] {
                    let hits = verdicts.iter().filter(|&&x| x == v).count();
                    report.push_estimate(&format!("{name}_rate"), Some(*n), RowKind::Rate, &rate(hits, reps), format!("s={t}"));
                }
            }
            for (j, &m) in checkpoints.iter().enumerate() {
                let logs: Vec<f64> = paths.iter().map(|(_, trail)| trail[j]).collect();
                for q in QUANTILES {
                    report.push("log_lr_quantile", Some(m), RowKind::Quantile, mc::quantile(&logs, q), format!("q={q}"));
                }
                if logs.iter().all(|x| x.is_finite()) {
                    report.push_estimate("log_lr_mean", Some(m), RowKind::Mean, &Estimate::mean(&logs), "");
                }
            }
        }
        Paradigm::Bayes { n, priors } => {
            let p = pair(s)?;
            let truth = s.truth.expect("validated");
            let paths = collect(mc::replicate(reps, root, |_, stream| evidence_path(&p, truth, *n, &[], stream)))?;
            let post: Vec<f64> = paths.iter().map(|(ev, _)| ev.posterior_k(priors)).collect();
            report.push_estimate("posterior_k_mean", Some(*n), RowKind::Mean, &Estimate::mean(&post), format!("pi_H={}", priors.pi_h()));
            for q in QUANTILES {
                report.push("posterior_k_quantile", Some(*n), RowKind::Quantile, mc::quantile(&post, q), format!("q={q}"));
            }
            let correct = post
                .iter()
                .filter(|&&pk| if truth == Hypothesis::K { pk > 0.5 } else { pk <= 0.5 })
                .count();
            report.push_estimate("correct_decision_rate", Some(*n), RowKind::Rate, &rate(correct, reps), format!("truth={}", label(truth)));
        }
        Paradigm::Map { ns, priors } => run_map(s, ns, priors, root, report)?,
        Paradigm::Np { rule, ns } => {
            let g = s.gaussian.as_ref().expect("validated");
            for (j, &n) in ns.iter().enumerate() {
                let (dr, rates) = match rule {
                    NpRule::Midpoint => midpoint_rule(g, n)?,
                    NpRule::FixedAlpha(a) => np_test(g, n, *a)?,
                };
                report.push("cutoff", Some(n), RowKind::Exact, dr.cutoff, "");
                report.push("alpha_analytic", Some(n), RowKind::Exact, rates.alpha_n, "");
                report.push("beta_analytic", Some(n), RowKind::Exact, rates.beta_n, "");
                report.push("total_error_analytic", Some(n), RowKind::Exact, rates.total, "");
                let base = root.substream(j as u64);
                for (which, name, seed) in [(Hypothesis::H, "alpha_empirical", base.substream(0)), (Hypothesis::K, "beta_empirical", base.substream(1))] {
                    let wrong = mc::replicate(reps, seed, |_, stream| -> Result<bool> {
                        let xs = g.sample(which, n as usize, stream)?;
                        let mean = xs.iter().sum::<f64>() / n as f64;
                        Ok(dr.decide(mean) != which)
                    });
                    let hits = collect(wrong)?.iter().filter(|&&w| w).count();
                    report.push_estimate(name, Some(n), RowKind::Rate, &rate(hits, reps), "");
                }
            }
        }
        Paradigm::Power { spec } => {
            let solved = solve_power(spec)?;
            let unknown = spec.unknowns()[0];
            report.push("alpha", None, RowKind::Exact, solved.alpha.unwrap(), if unknown == PowerUnknown::Alpha { "solved" } else { "given" });
            report.push("beta", None, RowKind::Exact, solved.beta.unwrap(), if unknown == PowerUnknown::Beta { "solved" } else { "given" });
            report.push("eta", None, RowKind::Exact, solved.eta.unwrap(), if unknown == PowerUnknown::Eta { "solved" } else { "given" });
            report.push("n", None, RowKind::Count, solved.n.unwrap() as f64, if unknown == PowerUnknown::N { "solved" } else { "given" });
            report.push("sigma", None, RowKind::Exact, solved.sigma, "given");
            for which in [PowerUnknown::Alpha, PowerUnknown::Beta, PowerUnknown::Eta, PowerUnknown::N] {
                let back = solve_power(&solved.without(which))?;
                let (name, a, b) = match which {
                    PowerUnknown::Alpha => ("roundtrip_alpha", back.alpha.unwrap(), solved.alpha.unwrap()),
                    PowerUnknown::Beta => ("roundtrip_beta", back.beta.unwrap(), solved.beta.unwrap()),
                    PowerUnknown::Eta => ("roundtrip_eta", back.eta.unwrap(), solved.eta.unwrap()),
                    PowerUnknown::N => ("roundtrip_n", back.n.unwrap() as f64, solved.n.unwrap() as f64),
                };
                report.push(name, None, RowKind::Exact, a, format!("from={}", crate::sim::format_float(b)));
            }
        }
        Paradigm::Hoeffding { ns, config } => {
            let h = s.h.as_ref().expect("validated");
            let sources: Vec<(Hypothesis, &FiniteDistribution)> = match (s.truth, &s.k) {
                (Some(Hypothesis::H), _) | (None, None) => vec![(Hypothesis::H, h)],
                (Some(Hypothesis::K), Some(k)) => vec![(Hypothesis::K, k)],
                (None, Some(k)) => vec![(Hypothesis::H, h), (Hypothesis::K, k)],
                (Some(Hypothesis::K), None) => unreachable!("validated"),
            };
            if let Some(k) = &s.k {
                report.push("divergence_k_h", None, RowKind::Exact, kl(k, h)?.nats(), "");
            }
            for (j, &n) in ns.iter().enumerate() {
                report.push("radius", Some(n), RowKind::Exact, config.radius(n, h.len()), format!("delta={}", config.delta));
                for &(which, data) in &sources {
                    let seed = root.substream(j as u64).substream(which as u64);
                    let rejects = mc::replicate(reps, seed, |_, stream| -> Result<bool> {
                        let idx = data.sample_indices(n as usize, stream);
                        let emp = EmpiricalDistribution::from_indices(&idx, h);
                        Ok(hoeffding_test_counts(h, &emp, config)?.verdict == UniversalVerdict::RejectH)
                    });
                    let hits = collect(rejects)?.iter().filter(|&&r| r).count();
                    let name = if which == Hypothesis::H { "type_i_error" } else { "power" };
                    report.push_estimate(name, Some(n), RowKind::Rate, &rate(hits, reps), format!("delta={}", config.delta));
                }
            }
        }
        Paradigm::OptionalStopping { alpha, looks, monitor_s } => {
            let g = s.gaussian.as_ref().expect("validated");
            let os = optional_stopping_alpha(g, *alpha, looks, *monitor_s, reps, root)?;
            for (j, &n) in os.looks.iter().enumerate() {
                report.push_estimate("cumulative_rejection", Some(n), RowKind::Rate, &os.cumulative_rejection[j], format!("alpha={alpha}"));
                report.push_estimate("lr_crossing", Some(n), RowKind::Rate, &os.lr_crossing[j], format!("s={monitor_s}"));
            }
        }
        Paradigm::Robbins { thresholds, horizon } => {
            let (h, k) = (s.h.as_ref().unwrap(), s.k.as_ref().unwrap());
            for (j, &t) in thresholds.iter().enumerate() {
                let e = robbins_violation_probability(h, k, t, *horizon, reps, root.substream(j as u64))?;
                report.push_estimate("violation_rate", Some(*horizon), RowKind::Rate, &e, format!("s={t}"));
                report.push("violation_bound", Some(*horizon), RowKind::Exact, 1.0 / t, format!("s={t}"));
            }
        }
        Paradigm::EvidenceRate { n } => {
            let (h, k) = (s.h.as_ref().unwrap(), s.k.as_ref().unwrap());
            let truths = match s.truth {
                Some(t) => vec![t],
                None => vec![Hypothesis::K, Hypothesis::H],
            };
            for t in truths {
                let (target, name) = match t {
                    Hypothesis::K => (kl(k, h)?.nats(), "divergence_k_h"),
                    Hypothesis::H => (-kl(h, k)?.nats(), "neg_divergence_h_k"),
                };
                let e = log_lr_rate(h, k, t, *n, reps, root.substream(t as u64))?;
                report.push_estimate("log_lr_rate", Some(*n), RowKind::Mean, &e, format!("truth={}", label(t)));
                report.push(name, None, RowKind::Exact, target, "");
            }
        }
        Paradigm::Fwer { family_alpha, scheme, tests, n } => {
            let g = s.gaussian.as_ref().expect("validated");
            for (j, &m) in tests.iter().enumerate() {
                let f = family_wise_error(g, m, *n, *family_alpha, *scheme, reps, root.substream(j as u64))?;
                let detail = format!("m={m}");
                report.push("per_test_alpha", Some(*n), RowKind::Exact, f.per_test_alpha, detail.clone());
                report.push_estimate("fwer", Some(*n), RowKind::Rate, &f.fwer, detail.clone());
                report.push_estimate("power", Some(*n), RowKind::Rate, &f.power, detail.clone());
                report.push("power_analytic", Some(*n), RowKind::Exact, f.analytic_power, detail);
            }
        }
        Paradigm::KlIdentity { cases, max_n, max_alphabet } => {
            let a = audit::kl_identity_audit(*cases, *max_n, *max_alphabet, 1e-9, root)?;
            report.push("cases", None, RowKind::Count, a.cases as f64, "");
            report.push("failures", None, RowKind::Count, a.failures as f64, "tolerance=1e-9");
            report.push("max_relative_residual", None, RowKind::Exact, a.max_relative_residual, "");
        }
        Paradigm::KlMargin { cases, max_n, max_alphabet } => {
            let a = audit::kl_margin_audit(*cases, *max_n, *max_alphabet, root)?;
            report.push("cases", None, RowKind::Count, a.cases as f64, "");
            report.push("boundary_cases", None, RowKind::Count, a.boundary_cases as f64, "");
            report.push("disagreements", None, RowKind::Count, a.disagreements as f64, "");
        }
        Paradigm::MapOptimality { cases, priors } => {
            let a = audit::map_optimality_audit(*cases, priors, root)?;
            report.push("combinations", None, RowKind::Count, a.combinations as f64, "");
            report.push("rules_enumerated", None, RowKind::Count, a.rules_enumerated as f64, "");
            report.push("violations", None, RowKind::Count, a.violations as f64, "");
        }
        Paradigm::SuperUniformity { cases, max_alphabet } => {
            let a = audit::super_uniformity_audit(*cases, *max_alphabet, root)?;
            report.push("distributions", None, RowKind::Count, a.distributions as f64, "");
            report.push("levels_checked", None, RowKind::Count, a.levels_checked as f64, "");
            report.push("violations", None, RowKind::Count, a.violations as f64, "");
        }
    }
    Ok(())
}

fn run_map(s: &Scenario, ns: &[u64], priors: &Priors, root: Seed, report: &mut SimulationReport) -> Result<()> {
    let p = pair(s)?;
    let truths = match s.truth {
        Some(t) => vec![t],
        None => vec![Hypothesis::H, Hypothesis::K],
    };
    for (j, &n) in ns.iter().enumerate() {
        let mut errors = [None, None];
        for &t in &truths {
            let seed = root.substream(j as u64).substream(t as u64);
            let wrong = mc::replicate(s.reps, seed, |_, stream| -> Result<bool> {
                let decision = match &p {
                    Pair::Finite(h, k) => {
                        let data = if t == Hypothesis::H { *h } else { *k };
                        let idx = data.sample_indices(n as usize, stream);
                        let emp = EmpiricalDistribution::from_indices(&idx, h);
                        map_decide_counts(h, k, priors, &emp)?.decision
                    }
                    Pair::Gaussian(_) => {
                        let (ev, _) = evidence_path(&p, t, n, &[], stream)?;
                        if ev.log_posterior_odds(priors) > 0.0 { Hypothesis::K } else { Hypothesis::H }
                    }
                };
                Ok(decision != t)
            });
            let hits = collect(wrong)?.iter().filter(|&&w| w).count();
            let e = rate(hits, s.reps);
            let name = if t == Hypothesis::H { "alpha_empirical" } else { "beta_empirical" };
            report.push_estimate(name, Some(n), RowKind::Rate, &e, format!("pi_H={}", priors.pi_h()));
            errors[t as usize] = Some(e.value);
        }
        if let [Some(a), Some(b)] = errors {
            report.push("bayes_risk_empirical", Some(n), RowKind::Exact, priors.pi_h() * a + priors.pi_k() * b, format!("pi_H={}", priors.pi_h()));
        }
    }
    Ok(())
}
