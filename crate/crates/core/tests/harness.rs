mod common;

use std::path::Path;

use common::phi;
use testlab::dist::EmpiricalDistribution;
use testlab::evidential::{LogEvidence, Priors, Verdict};
use testlab::info::{kl, map_decide_counts};
use testlab::sim::{run, run_with_threads, RowKind, Scenario, SimulationReport};
use testlab::{Error, Hypothesis, Seed};

fn scenario(dir: &Path, file: &str) -> Scenario {
    Scenario::load(dir.join(file)).unwrap()
}

fn demo(file: &str) -> SimulationReport {
    run(&scenario(&common::scenarios(), file)).unwrap()
}

fn without_wall_clock(csv: &str) -> String {
    csv.lines()
        .filter(|l| !l.contains(",wall_clock_seconds,"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let dir = common::scenarios();
    for file in ["lr-trajectory.toml", "map-bernoulli.toml", "np-fixed-alpha.toml", "fwer-bonferroni.toml", "bayes-gaussian.toml"] {
        let s = scenario(&dir, file);
        let one = run_with_threads(&s, 1).unwrap().to_csv();
        let three = run_with_threads(&s, 3).unwrap().to_csv();
        let again = run_with_threads(&s, 1).unwrap().to_csv();
        assert_eq!(without_wall_clock(&one), without_wall_clock(&three), "{file}");
        assert_eq!(without_wall_clock(&one), without_wall_clock(&again), "{file}");
    }
    let suite = common::acceptance_suite();
    for file in ["c06-kl-identity.toml", "c12-optional-stopping.toml", "c13-super-uniformity.toml"] {
        let s = scenario(&suite, file);
        let a = run_with_threads(&s, 1).unwrap().to_csv();
        let b = run_with_threads(&s, 4).unwrap().to_csv();
        assert_eq!(without_wall_clock(&a), without_wall_clock(&b), "{file}");
    }
}

#[test]
fn seed_root_changes_monte_carlo_output() {
    let mut s = scenario(&common::scenarios(), "map-bernoulli.toml");
    let a = run(&s).unwrap();
    s.seed += 1;
    let b = run(&s).unwrap();
    assert_ne!(without_wall_clock(&a.to_csv()), without_wall_clock(&b.to_csv()));
}

#[test]
fn every_rate_is_a_probability_with_finite_se() {
    let dir = common::scenarios();
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.file_name().unwrap() == "robbins-strict.toml" {
            continue;
        }
        let report = run(&Scenario::load(&path).unwrap()).unwrap();
        for r in report.rows.iter().filter(|r| r.kind == RowKind::Rate) {
            assert!((0.0..=1.0).contains(&r.value), "{}: {} = {}", report.scenario, r.metric, r.value);
            let se = r.se.expect("rates carry an SE");
            assert!(se.is_finite());
            let expected = (r.value * (1.0 - r.value) / report.reps as f64).sqrt();
            if r.metric != "power" || !r.detail.starts_with("m=") {
                assert_eq!(se, expected, "{}: {}", report.scenario, r.metric);
            }
        }
    }
}

#[test]
fn csv_layout() {
    let csv = demo("lr-identical.toml").to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), SimulationReport::CSV_HEADER);
    for line in lines {
        assert_eq!(line.split(',').count(), 10, "{line}");
    }
}

#[test]
fn identical_hypotheses_never_accept_k() {
    let r = demo("lr-identical.toml");
    for s in ["s=2", "s=8", "s=16"] {
        assert_eq!(r.find("accept_k_rate", Some(50), s).unwrap().value, 0.0);
        assert_eq!(r.find("continue_rate", Some(50), s).unwrap().value, 1.0);
    }
    for row in r.series("log_lr_quantile") {
        assert_eq!(row.value, 0.0);
    }
}

#[test]
fn log_ratio_drifts_up_under_k() {
    let r = demo("lr-trajectory.toml");
    let medians: Vec<f64> = r
        .series("log_lr_quantile")
        .into_iter()
        .filter(|row| row.detail == "q=0.5")
        .map(|row| row.value)
        .collect();
    assert_eq!(medians.len(), 5);
    assert!(medians.windows(2).all(|w| w[0] < w[1]), "{medians:?}");
    let d = common::kl(&[0.25, 0.75], &[0.5, 0.5]);
    let mean = r.find("log_lr_mean", Some(400), "").unwrap();
    assert!((mean.value - 400.0 * d).abs() <= 4.0 * mean.se.unwrap());
}

#[test]
fn midpoint_alpha_at_sixteen() {
    let r = demo("midpoint-n16.toml");
    let e = r.find("alpha_empirical", Some(16), "").unwrap();
    assert!((e.value - phi(-2.0)).abs() <= 3.0 * e.se.unwrap(), "{e:?}");
    assert!((r.find("alpha_analytic", Some(16), "").unwrap().value - 0.022_750_131_948_179).abs() < 1e-12);
}

#[test]
fn fixed_alpha_rule_holds_its_level() {
    let r = demo("np-fixed-alpha.toml");
    for n in [4, 16] {
        let a = r.find("alpha_empirical", Some(n), "").unwrap();
        assert!((a.value - 0.05).abs() <= 3.0 * a.se.unwrap());
        let b = r.find("beta_empirical", Some(n), "").unwrap();
        let analytic = phi(phi_inv_95() - (n as f64).sqrt());
        assert!((b.value - analytic).abs() <= 3.0 * b.se.unwrap());
    }
}

fn phi_inv_95() -> f64 {
    common::phi_inv(0.95)
}

#[test]
fn robbins_bound_at_s_100() {
    let r = demo("robbins-strict.toml");
    let v = r.find("violation_rate", Some(10_000), "s=100").unwrap();
    assert!(v.value <= 0.01 + 3.0 * v.se.unwrap(), "{v:?}");
}

#[test]
fn family_wise_error_and_power() {
    let r = demo("fwer-bonferroni.toml");
    let fwer = |m: u64| r.find("fwer", Some(25), &format!("m={m}")).unwrap().clone();
    let power = |m: u64| r.find("power_analytic", Some(25), &format!("m={m}")).unwrap().value;
    let one = fwer(1);
    assert!((one.value - 0.05).abs() <= 3.0 * one.se.unwrap());
    let twenty = fwer(20);
    assert!(twenty.value <= 0.05 + 3.0 * twenty.se.unwrap());
    assert!(power(1) > power(5) && power(5) > power(20));
    let mc: Vec<f64> = [1, 5, 20]
        .iter()
        .map(|m| r.find("power", Some(25), &format!("m={m}")).unwrap().value)
        .collect();
    assert!(mc[0] > mc[1] && mc[1] > mc[2], "{mc:?}");
    // independent oracle for the unadjusted power: Phi(eta sqrt(n) - z_0.95)
    assert!((power(1) - phi(2.5 - phi_inv_95())).abs() < 1e-9);
}

#[test]
fn one_look_is_the_nominal_level() {
    let r = demo("optional-stopping-one-look.toml");
    let e = r.find("cumulative_rejection", Some(50), "alpha=0.05").unwrap();
    assert!((e.value - 0.05).abs() <= 3.0 * e.se.unwrap(), "{e:?}");
}

#[test]
fn rate_under_h_is_minus_the_reverse_divergence() {
    let r = demo("evidence-rate-h.toml");
    let e = r.find("log_lr_rate", Some(10_000), "truth=H").unwrap();
    let target = -common::kl(&[0.5, 0.5], &[0.25, 0.75]);
    assert!((target + 0.143_841_036_225_890).abs() < 1e-12);
    assert!((e.value - target).abs() <= 4.0 * e.se.unwrap());
}

#[test]
fn hoeffding_type_one_error_up_to_ten_thousand() {
    let r = demo("hoeffding-large-n.toml");
    for n in [100, 1000, 10_000] {
        let e = r.find("type_i_error", Some(n), "delta=0.05").unwrap();
        assert!(e.value <= 0.05 + 3.0 * e.se.unwrap());
    }
}

#[test]
fn bayes_posterior_favours_the_truth() {
    let r = demo("bayes-gaussian.toml");
    let correct = r.find("correct_decision_rate", Some(25), "truth=K").unwrap();
    assert!(correct.value > 0.5);
    let mean = r.series("posterior_k_mean")[0];
    assert!(mean.value > 0.2 && mean.value < 1.0);
}

#[test]
fn map_errors_fall_with_n() {
    let r = demo("map-bernoulli.toml");
    let risk: Vec<f64> = r.series("bayes_risk_empirical").iter().map(|row| row.value).collect();
    assert_eq!(risk.len(), 3);
    assert!(risk[0] > risk[1] && risk[1] > risk[2], "{risk:?}");
}

#[test]
fn errors_carry_the_scenario_name() {
    let text = "name = \"broken\"\nparadigm = \"lr\"\nseed = 1\nreps = 10\ntruth = \"H\"\n\
                [hypotheses]\nalphabet = [\"a\", \"b\"]\nh = [\"0.5\", \"0.6\"]\nk = [\"0.5\", \"0.5\"]\n\
                [params]\nn = 5\ns = [2.0]\n";
    let err = Scenario::parse(text).unwrap_err();
    assert!(matches!(err, Error::Scenario { ref scenario, .. } if scenario == "broken"));
    assert!(err.to_string().contains("broken"));
    assert!(err.is_input_error());
}

#[test]
fn incomplete_scenarios_fail_before_running() {
    for (text, what) in [
        ("name = \"x\"\nparadigm = \"np\"\nseed = 1\nreps = 5\n[params]\nns = [1]\n", "no gaussian section"),
        ("name = \"x\"\nparadigm = \"optional-stopping\"\nseed = 1\nreps = 5\n[gaussian]\nmu_h = 0.0\nmu_k = 1.0\n[params]\nalpha = 0.05\nlooks = [20, 10]\ns = [20.0]\n", "looks out of order"),
        ("name = \"x\"\nparadigm = \"hoeffding\"\nseed = 1\nreps = 5\n[hypotheses]\nalphabet = [\"a\", \"b\"]\nh = [\"1\", \"0\"]\n[params]\nns = [10]\ndelta = 0.05\n", "hypothesis without full support"),
        ("name = \"x\"\nparadigm = \"lr\"\nseed = 1\ntruth = \"H\"\n[gaussian]\nmu_h = 0.0\nmu_k = 1.0\n[params]\nn = 5\ns = [2.0]\n", "missing reps"),
    ] {
        assert!(Scenario::parse(text).is_err(), "{what}");
    }
}

/// MAP with equal priors, the LR rule at s = 1 and the nearest-hypothesis
/// rule in divergence agree path by path when no sample can make `r_n = 1`.
#[test]
fn paradigms_agree_on_a_tie_free_pair() {
    let s = scenario(&common::scenarios(), "map-bernoulli.toml");
    let (h, k) = (s.h.as_ref().unwrap(), s.k.as_ref().unwrap());
    let root = Seed::new(s.seed);
    for (i, truth) in [Hypothesis::H, Hypothesis::K].into_iter().enumerate() {
        let data = if truth == Hypothesis::H { h } else { k };
        for rep in 0..2000u64 {
            let n = 1 + (rep % 30) as usize;
            let idx = data.sample_indices(n, root.substream(i as u64).substream(rep));
            let emp = EmpiricalDistribution::from_indices(&idx, h);
            let map = map_decide_counts(h, k, &Priors::equal(), &emp).unwrap().decision;
            let xs: Vec<_> = idx.iter().map(|&j| h.alphabet()[j].clone()).collect();
            let lr = match LogEvidence::exact(h, k).unwrap().update_all(h, k, &xs).unwrap().threshold_verdict(1.0).unwrap() {
                Verdict::AcceptK => Hypothesis::K,
                Verdict::AcceptH => Hypothesis::H,
                Verdict::Continue => unreachable!("s = 1 always decides"),
            };
            let nearest = if kl(&emp, k).unwrap().nats() < kl(&emp, h).unwrap().nats() {
                Hypothesis::K
            } else {
                Hypothesis::H
            };
            assert_eq!(map, lr, "rep {rep}");
            assert_eq!(map, nearest, "rep {rep}");
        }
    }
}
