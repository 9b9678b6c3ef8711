//! The acceptance suite: every criterion is run from the bundled paper-suite
//! scenarios and reported on its own PASS/FAIL line.

mod common;

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;

use common::{choose, phi, phi_inv, pow2, q};
use testlab::exact::parse_rational;
use testlab::neyman_pearson::{solve_power, PowerSpec};
use testlab::sim::{run, Row, Scenario, SimulationReport};

type Check = std::result::Result<String, String>;
type Criterion = fn() -> Check;

fn load(file: &str) -> (SimulationReport, Duration) {
    let path = common::acceptance_suite().join(file);
    let scenario = Scenario::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let start = Instant::now();
    let report = run(&scenario).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    (report, start.elapsed())
}

fn row<'a>(r: &'a SimulationReport, metric: &str, n: Option<u64>, detail: &str) -> Result<&'a Row, String> {
    r.find(metric, n, detail)
        .ok_or_else(|| format!("report {} has no row {metric} n={n:?} [{detail}]", r.scenario))
}

fn first<'a>(r: &'a SimulationReport, metric: &str) -> Result<&'a Row, String> {
    r.series(metric)
        .first()
        .copied()
        .ok_or_else(|| format!("report {} has no {metric} row", r.scenario))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn within_time(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn exact_detail(row: &Row) -> Result<BigRational, String> {
    let text = row.detail.split_whitespace().last().unwrap_or_default();
    parse_rational(text).map_err(|e| e.to_string())
}

fn c1() -> Check {
    let (r, t) = load("c01-arbuthnot.toml");
    let p = first(&r, "p_value")?;
    let got = exact_detail(p)?;
    let oracle = BigRational::new(choose(82, 80) + choose(82, 81) + choose(82, 82), pow2(82));
    ensure(oracle == BigRational::new(3404.into(), pow2(82)), || "oracle sum is not 3404".into())?;
    ensure(got == oracle, || format!("p = {got}, expected 3404/2^82"))?;
    let rendered = format!("{:.0e}", p.value);
    ensure(rendered == "7e-22", || format!("float renders as {rendered}"))?;
    within_time(t, Duration::from_secs(1))?;
    Ok(format!("p = {got} = 3404/2^82 ≈ {rendered} in {t:.2?}"))
}

fn c2() -> Check {
    let (r, _) = load("c02-all-boys.toml");
    let p = first(&r, "p_value")?;
    let got = exact_detail(p)?;
    ensure(got == BigRational::new(1.into(), pow2(82)), || format!("p = {got}"))?;
    Ok(format!("p = {got} = 2^-82"))
}

fn c3() -> Check {
    let (r, _) = load("c03-counterexample.toml");
    let ps = r.series("p_value");
    let pp = r.series("point_probability");
    ensure(ps.len() == 2 && pp.len() == 2, || "expected two hypotheses".into())?;
    let (ph, pk) = (exact_detail(ps[0])?, exact_detail(ps[1])?);
    ensure(ph == q(3, 100), || format!("P_H tail = {ph}"))?;
    ensure(pk == q(42, 100), || format!("P_K tail = {pk}"))?;
    ensure(pp[0].value == 0.02 && pp[1].value == 0.02, || "point probabilities differ from 0.02".into())?;
    Ok(format!("P_H(X <= x) = {ph}, P_K(X <= x) = {pk}, both with point mass 1/50"))
}

fn c4() -> Check {
    let (r, t) = load("c04-robbins.toml");
    let mut parts = Vec::new();
    for s in [8.0, 16.0] {
        let v = row(&r, "violation_rate", Some(10_000), &format!("s={s}"))?;
        let se = v.se.unwrap();
        ensure(v.value <= 1.0 / s + 3.0 * se, || format!("s={s}: rate {} > {} + 3·{se}", v.value, 1.0 / s))?;
        parts.push(format!("s={s}: {:.4} <= {:.4} + 3·{se:.4}", v.value, 1.0 / s));
    }
    ensure(r.reps == 10_000, || "reps must be 10^4".into())?;
    within_time(t, Duration::from_secs(60))?;
    Ok(format!("{} in {t:.2?}", parts.join(", ")))
}

fn c5() -> Check {
    let (r, t) = load("c05-evidence-rate.toml");
    let mean = row(&r, "log_lr_rate", Some(10_000), "truth=K")?;
    let d = row(&r, "divergence_k_h", None, "")?.value;
    let oracle = common::kl(&[0.75, 0.25], &[0.5, 0.5]);
    ensure((d - oracle).abs() < 1e-14, || format!("kl {d} vs oracle {oracle}"))?;
    let se = mean.se.unwrap();
    ensure((mean.value - d).abs() <= 4.0 * se, || format!("mean {} vs D {d} (SE {se})", mean.value))?;
    within_time(t, Duration::from_secs(60))?;
    Ok(format!("mean (1/n) ln r_n = {:.5} ± {se:.5}, D(K||H) = {d:.5}, in {t:.2?}", mean.value))
}

fn count(r: &SimulationReport, metric: &str) -> Result<u64, String> {
    Ok(first(r, metric)?.value as u64)
}

fn c6() -> Check {
    let (r, _) = load("c06-kl-identity.toml");
    let cases = count(&r, "cases")?;
    let failures = count(&r, "failures")?;
    let worst = first(&r, "max_relative_residual")?.value;
    ensure(cases == 1000 && failures == 0, || format!("{failures} failures in {cases} cases"))?;
    Ok(format!("{cases} cases, worst relative residual {worst:.2e}"))
}

fn c7() -> Check {
    let (r, t) = load("c07-map-optimality.toml");
    let combos = count(&r, "combinations")?;
    let rules = count(&r, "rules_enumerated")?;
    let violations = count(&r, "violations")?;
    ensure(violations == 0, || format!("{violations} rules beat MAP"))?;
    within_time(t, Duration::from_secs(300))?;
    Ok(format!("{combos} (h, k, prior, design) combinations, {rules} rules enumerated, none beats MAP, in {t:.2?}"))
}

fn c8() -> Check {
    let (r, _) = load("c08-kl-margin.toml");
    let cases = count(&r, "cases")?;
    let boundary = count(&r, "boundary_cases")?;
    let dis = count(&r, "disagreements")?;
    ensure(cases == 100_000 && dis == 0, || format!("{dis} disagreements in {cases}"))?;
    Ok(format!("{cases} cases ({boundary} exactly on a threshold), 0 disagreements"))
}

fn c9() -> Check {
    let (r, _) = load("c09-midpoint.toml");
    let totals = r.series("total_error_analytic");
    ensure(totals.len() == 100, || format!("{} sample sizes, expected 100", totals.len()))?;
    for (i, w) in totals.windows(2).enumerate() {
        ensure(w[1].value < w[0].value, || format!("total error not decreasing at n = {}", i + 2))?;
    }
    let eta = 0.5;
    let mut parts = Vec::new();
    for n in [1u64, 16] {
        let analytic = phi(-eta * (n as f64).sqrt() / 2.0);
        for metric in ["alpha_empirical", "beta_empirical"] {
            let e = row(&r, metric, Some(n), "")?;
            let se = e.se.unwrap();
            ensure((e.value - analytic).abs() <= 3.0 * se, || {
                format!("{metric} n={n}: {} vs {analytic} (SE {se})", e.value)
            })?;
        }
        let a = row(&r, "alpha_analytic", Some(n), "")?.value;
        ensure((a - analytic).abs() < 1e-12, || format!("analytic alpha {a} vs oracle {analytic}"))?;
        parts.push(format!("n={n}: Phi = {analytic:.5}"));
    }
    Ok(format!("total error strictly decreasing on 1..=100; MC within 3 SE ({})", parts.join(", ")))
}

fn c10() -> Check {
    let (r, _) = load("c10-power.toml");
    let n = row(&r, "n", None, "solved")?.value as u64;
    let z = phi_inv(0.95) + phi_inv(0.8);
    let oracle = ((z / 0.5).powi(2)).ceil() as u64;
    ensure(oracle == 25, || format!("oracle gives {oracle}"))?;
    ensure(n == oracle, || format!("solver gives n = {n}"))?;
    let base = PowerSpec { alpha: Some(0.05), beta: Some(0.2), eta: Some(0.5), n: Some(n), sigma: 1.0 };
    let mut parts = Vec::new();
    for metric in ["roundtrip_alpha", "roundtrip_beta", "roundtrip_eta", "roundtrip_n"] {
        let v = first(&r, metric)?.value;
        // re-solved coordinate, fed back with n unknown, must reproduce n
        let spec = match metric {
            "roundtrip_alpha" => PowerSpec { alpha: Some(v), n: None, ..base },
            "roundtrip_beta" => PowerSpec { beta: Some(v), n: None, ..base },
            "roundtrip_eta" => PowerSpec { eta: Some(v), n: None, ..base },
            _ => {
                ensure(v as u64 == n, || format!("n round trip gives {v}"))?;
                continue;
            }
        };
        let original = match metric {
            "roundtrip_alpha" => 0.05,
            "roundtrip_beta" => 0.2,
            _ => 0.5,
        };
        ensure(v <= original + 1e-12, || format!("{metric}: {v} exceeds {original}"))?;
        let back = solve_power(&spec).map_err(|e| e.to_string())?.n.unwrap();
        ensure(back == n, || format!("{metric}: {v} maps back to n = {back}"))?;
        parts.push(format!("{}={v:.5}", &metric[10..]));
    }
    Ok(format!("n = {n}; round trips at n = {n}: {}", parts.join(", ")))
}

fn c11() -> Check {
    let mut parts = Vec::new();
    let mut total = Duration::ZERO;
    for k in [2, 4, 8] {
        let (r, t) = load(&format!("c11-hoeffding-k{k}.toml"));
        total += t;
        for n in [100, 1000] {
            let e = row(&r, "type_i_error", Some(n), "delta=0.05")?;
            let se = e.se.unwrap();
            ensure(e.value <= 0.05 + 3.0 * se, || format!("k={k} n={n}: type-I {}", e.value))?;
        }
        let d = row(&r, "divergence_k_h", None, "")?.value;
        ensure(d >= 0.1, || format!("k={k}: D(K||H) = {d} < 0.1"))?;
        let power = row(&r, "power", Some(1000), "delta=0.05")?.value;
        ensure(power > 0.99, || format!("k={k}: power {power}"))?;
        parts.push(format!("k={k}: power {power:.4} at D={d:.3}"));
    }
    within_time(total, Duration::from_secs(120))?;
    Ok(format!("type-I <= 0.05 + 3 SE everywhere; {}; in {total:.2?}", parts.join(", ")))
}

fn c12() -> Check {
    let (r, _) = load("c12-optional-stopping.toml");
    let rej = r.series("cumulative_rejection");
    let lr = r.series("lr_crossing");
    ensure(rej.len() == 5 && lr.len() == 5, || "expected five looks".into())?;
    let second = rej[1];
    ensure(second.value > 0.05 + 3.0 * second.se.unwrap(), || format!("look 2 rate {}", second.value))?;
    for w in rej.windows(2) {
        ensure(w[1].value >= w[0].value, || "cumulative rejection decreased".into())?;
    }
    for (j, e) in lr.iter().enumerate() {
        ensure(e.value <= 0.05 + 3.0 * e.se.unwrap(), || format!("LR crossing {} at look {}", e.value, j + 1))?;
    }
    let rates: Vec<String> = rej.iter().map(|e| format!("{:.4}", e.value)).collect();
    Ok(format!(
        "z-test cumulative rejection {} ; LR (s=20) crossing at last look {:.4}",
        rates.join(" "),
        lr[4].value
    ))
}

fn c13() -> Check {
    let (r, _) = load("c13-super-uniformity.toml");
    let dists = count(&r, "distributions")?;
    let levels = count(&r, "levels_checked")?;
    let v = count(&r, "violations")?;
    ensure(dists == 100 && v == 0, || format!("{v} violations over {dists} distributions"))?;
    Ok(format!("{dists} distributions, {levels} attained levels summed exactly, 0 violations"))
}

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [(&str, Criterion); 13] = [
        ("01 exact Arbuthnot tail", c1),
        ("02 all-boys probability", c2),
        ("03 equal point mass, different tails", c3),
        ("04 universal bound on ever reaching s", c4),
        ("05 likelihood ratio growth rate", c5),
        ("06 log-ratio/divergence identity", c6),
        ("07 MAP optimal among all rules", c7),
        ("08 threshold rule equals divergence margin", c8),
        ("09 midpoint rule error decay", c9),
        ("10 power solver", c10),
        ("11 universal (Hoeffding) test", c11),
        ("12 optional stopping", c12),
        ("13 super-uniformity of discrete p-values", c13),
    ];
    assert!(Path::new(&common::acceptance_suite()).is_dir(), "paper-suite directory missing");
    let start = Instant::now();
    let mut failed = 0;
    let mut ran = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        match std::panic::catch_unwind(check) {
            Ok(Ok(msg)) => println!("PASS criterion {name}: {msg}"),
            Ok(Err(msg)) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL criterion {name}: panicked");
            }
        }
    }
    let elapsed = start.elapsed();
    if ran == 13 && elapsed > Duration::from_secs(600) {
        failed += 1;
        println!("FAIL total runtime {elapsed:.2?} exceeds 10 minutes");
    }
    println!("acceptance: {} passed, {failed} failed, {elapsed:.2?}", ran - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
