use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use testlab::dist::{FiniteDistribution, Symbol};
use testlab::evidential::{grade_log, Hypothesis, LogEvidence, Priors};
use testlab::exact::parse_rational;
use testlab::fisher::{binomial_tail, p_value, significance_verdict, TailDirection};
use testlab::gaussian::GaussianPair;
use testlab::info::{hoeffding_test, kl, map_decide, reverse_statistic, UniversalTestConfig};
use testlab::neyman_pearson::{midpoint_rule, np_test, solve_power, PowerSpec};
use testlab::sim::{self, Scenario};
use testlab::{Error, Result};

const THREADS_ENV: &str = "TESTLAB_THREADS";

#[derive(Parser)]
#[command(name = "testlab", version, about = "Hypothesis-testing workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tail probability (p-value) of an observation under one hypothesis
    Fisher(FisherArgs),
    /// Likelihood ratio of K against H, its grade and threshold verdict
    Lr(LrArgs),
    /// Posterior odds and probability of K
    Bayes(BayesArgs),
    /// Two-Gaussian decision rule and its error rates
    Np(NpArgs),
    /// Solve the power relation for the one missing quantity
    Power(PowerArgs),
    /// Kullback-Leibler divergence between two distributions
    Kl(KlArgs),
    /// Maximum a posteriori decision between H and K
    Map(MapArgs),
    /// Universal test of H against all alternatives
    Hoeffding(HoeffdingArgs),
    /// Run a scenario file and write a CSV report
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct FisherArgs {
    /// Number of binomial trials
    #[arg(long, requires_all = ["k", "theta"], conflicts_with = "table")]
    n: Option<String>,
    /// Observed number of successes
    #[arg(long)]
    k: Option<String>,
    /// Success probability under H, as a decimal or fraction
    #[arg(long)]
    theta: Option<String>,
    /// Hypothesis as a table file or an inline list `sym=p,sym=p`
    #[arg(long, requires = "observed")]
    table: Option<String>,
    /// Observed symbol (with --table)
    #[arg(long)]
    observed: Option<String>,
    /// greater-equal, less-equal or two-sided-abs
    #[arg(long, default_value = "greater-equal")]
    direction: TailDirection,
    /// Significance level to compare against
    #[arg(long)]
    level: Option<f64>,
}

#[derive(Args)]
struct PairArgs {
    /// Hypothesis H as a table file or inline `sym=p,...`
    #[arg(long, requires = "k")]
    h: Option<String>,
    /// Hypothesis K as a table file or inline `sym=p,...`
    #[arg(long)]
    k: Option<String>,
    /// Gaussian mean under H
    #[arg(long, requires = "mu_k", conflicts_with = "h")]
    mu_h: Option<f64>,
    /// Gaussian mean under K
    #[arg(long)]
    mu_k: Option<f64>,
    /// Gaussian standard deviation
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Observations separated by commas or whitespace
    #[arg(long, conflicts_with = "data_file")]
    data: Option<String>,
    /// File of whitespace-separated observations
    #[arg(long)]
    data_file: Option<PathBuf>,
}

#[derive(Args)]
struct LrArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Threshold s >= 1: accept K if r >= s, accept H if r <= 1/s
    #[arg(long)]
    s: Option<f64>,
}

#[derive(Args)]
struct BayesArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Prior probability of H
    #[arg(long, default_value_t = 0.5)]
    prior_h: f64,
}

#[derive(Args)]
struct NpArgs {
    #[arg(long)]
    mu_h: f64,
    #[arg(long)]
    mu_k: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Sample size
    #[arg(long)]
    n: u64,
    /// Level of the most powerful test; without it the midpoint rule is used
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Args)]
struct PowerArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Absolute effect mu_K - mu_H
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
}

#[derive(Args)]
struct KlArgs {
    /// First distribution, table file or inline `sym=p,...`
    #[arg(long)]
    p: String,
    /// Second distribution
    #[arg(long)]
    q: String,
}

#[derive(Args)]
struct MapArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long, default_value_t = 0.5)]
    prior_h: f64,
}

#[derive(Args)]
struct HoeffdingArgs {
    /// Hypothesis H, table file or inline `sym=p,...`
    #[arg(long)]
    h: String,
    #[arg(long, conflicts_with = "data_file")]
    data: Option<String>,
    #[arg(long)]
    data_file: Option<PathBuf>,
    /// Target type-I error
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Override the scenario's replication count
    #[arg(long)]
    reps: Option<u64>,
    /// Override the scenario's seed root
    #[arg(long)]
    seed: Option<u64>,
    /// Write the CSV report here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: $TESTLAB_THREADS, else all cores)
    #[arg(long)]
    threads: Option<usize>,
}

fn load_distribution(spec: &str) -> Result<FiniteDistribution> {
    if spec.contains('=') {
        let table: String = spec
            .split(',')
            .map(|item| {
                let (s, p) = item.split_once('=').unwrap_or((item, ""));
                format!("{}\t{}\n", s.trim(), p.trim())
            })
            .collect();
        FiniteDistribution::parse_table(&table)
    } else {
        FiniteDistribution::parse_table(&std::fs::read_to_string(spec)?)
    }
}

fn read_tokens(data: &Option<String>, file: &Option<PathBuf>) -> Result<Vec<String>> {
    let text = match (data, file) {
        (Some(d), _) => d.clone(),
        (None, Some(f)) => std::fs::read_to_string(f)?,
        (None, None) => return Err(Error::EmptySample),
    };
    let tokens: Vec<String> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect();
    if tokens.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(tokens)
}

fn parse_u64(name: &'static str, text: &str) -> Result<u64> {
    text.trim().parse().map_err(|_| Error::InvalidParameter {
        name,
        value: text.to_string(),
    })
}

enum Loaded {
    Finite(FiniteDistribution, FiniteDistribution, Vec<Symbol>),
    Gaussian(GaussianPair, Vec<f64>),
}

impl PairArgs {
    fn load(&self) -> Result<Loaded> {
        let tokens = read_tokens(&self.data, &self.data_file)?;
        match (&self.h, &self.k, self.mu_h, self.mu_k) {
            (Some(h), Some(k), None, None) => {
                let h = load_distribution(h)?;
                let k = load_distribution(k)?;
                let xs = tokens.iter().map(|t| Symbol::new(t)).collect();
                Ok(Loaded::Finite(h, k, xs))
            }
            (None, None, Some(mu_h), Some(mu_k)) => {
                let g = GaussianPair::new(mu_h, mu_k, self.sigma)?;
                let xs = tokens
                    .iter()
                    .map(|t| t.parse::<f64>().map_err(|_| Error::InvalidParameter { name: "observation", value: t.clone() }))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Loaded::Gaussian(g, xs))
            }
            _ => Err(Error::InvalidParameter {
                name: "hypotheses",
                value: "give either --h and --k or --mu-h and --mu-k".into(),
            }),
        }
    }

    fn evidence(&self) -> Result<LogEvidence> {
        match self.load()? {
            Loaded::Finite(h, k, xs) => {
                let start = if h.is_exact() && k.is_exact() { LogEvidence::exact(&h, &k)? } else { LogEvidence::new() };
                start.update_all(&h, &k, &xs)
            }
            Loaded::Gaussian(g, xs) => xs.iter().try_fold(LogEvidence::new(), |ev, &x| ev.update_gaussian(&g, x)),
        }
    }
}

fn fisher(a: &FisherArgs) -> Result<()> {
    let report = match (&a.n, &a.table) {
        (Some(n), None) => {
            let n = parse_u64("n", n)?;
            let k = parse_u64("k", a.k.as_deref().unwrap_or_default())?;
            let theta = parse_rational(a.theta.as_deref().unwrap_or_default())?;
            binomial_tail(n, k, &theta, a.direction)?
        }
        (None, Some(table)) => {
            let d = load_distribution(table)?;
            p_value(&d, &Symbol::new(a.observed.as_deref().unwrap_or_default()), a.direction)?
        }
        _ => {
            return Err(Error::InvalidParameter {
                name: "hypothesis",
                value: "give --n/--k/--theta or --table/--observed".into(),
            })
        }
    };
    let p = report.p.to_f64();
    match report.p.as_exact() {
        Some(q) => println!("p-value ({}): {q} = {p:.6e}", a.direction),
        None => println!("p-value ({}): {p:.6e}", a.direction),
    }
    println!("point probability: {}", report.point_prob);
    println!("outcomes in tail: {}", report.n_extreme);
    if let Some(level) = a.level {
        let sig = significance_verdict(p, level)?;
        println!("significant at {level}: {}", if sig { "yes" } else { "no" });
    }
    Ok(())
}

fn lr(a: &LrArgs) -> Result<()> {
    let ev = a.pair.evidence()?;
    println!("n: {}", ev.n());
    match ev.exact_ratio() {
        Some(r) => println!("likelihood ratio r = {r} = {:.6e}", ev.ratio()),
        None => println!("likelihood ratio r = {:.6e}", ev.ratio()),
    }
    println!("log r: {:.12}", ev.log_lr());
    if let Some(f) = ev.falsified() {
        println!("falsified: {f}");
    }
    println!("grade: {}", grade_log(ev.log_lr())?);
    if let Some(s) = a.s {
        println!("verdict at s = {s}: {}", ev.threshold_verdict(s)?);
    }
    Ok(())
}

fn bayes(a: &BayesArgs) -> Result<()> {
    let priors = Priors::new(a.prior_h)?;
    let ev = a.pair.evidence()?;
    println!("log posterior odds (K:H): {:.12}", ev.log_posterior_odds(&priors));
    println!("posterior odds (K:H): {:.6e}", ev.posterior_odds(&priors));
    println!("P(K | data): {:.12}", ev.posterior_k(&priors));
    println!("P(H | data): {:.12}", 1.0 - ev.posterior_k(&priors));
    Ok(())
}

fn np(a: &NpArgs) -> Result<()> {
    let g = GaussianPair::new(a.mu_h, a.mu_k, a.sigma)?;
    let (rule, rates) = match a.alpha {
        Some(alpha) => np_test(&g, a.n, alpha)?,
        None => midpoint_rule(&g, a.n)?,
    };
    println!("rule: decide K iff mean of {} observations >= {:.10}", rule.n, rule.cutoff);
    println!("alpha_n: {:.10}", rates.alpha_n);
    println!("beta_n: {:.10}", rates.beta_n);
    println!("total error: {:.10}", rates.total);
    println!("power: {:.10}", rates.power());
    Ok(())
}

fn power(a: &PowerArgs) -> Result<()> {
    let spec = PowerSpec {
        alpha: a.alpha,
        beta: a.beta,
        eta: a.eta,
        n: a.n,
        sigma: a.sigma,
    };
    let s = solve_power(&spec)?;
    println!("alpha: {:.10}", s.alpha.unwrap());
    println!("beta: {:.10}", s.beta.unwrap());
    println!("eta: {:.10}", s.eta.unwrap());
    println!("n: {}", s.n.unwrap());
    println!("sigma: {}", s.sigma);
    Ok(())
}

fn kl_cmd(a: &KlArgs) -> Result<()> {
    let p = load_distribution(&a.p)?;
    let q = load_distribution(&a.q)?;
    println!("D(p||q): {}", kl(&p, &q)?);
    println!("D(q||p): {}", kl(&q, &p)?);
    Ok(())
}

fn map(a: &MapArgs) -> Result<()> {
    let priors = Priors::new(a.prior_h)?;
    match a.pair.load()? {
        Loaded::Finite(h, k, xs) => {
            let d = map_decide(&h, &k, &priors, &xs)?;
            println!("decision: {}", d.decision);
            println!("log posterior margin (K - H): {:.12}", d.log_posterior_margin);
            println!("divergence margin (H - K): {:.12}", d.divergence_margin);
        }
        Loaded::Gaussian(g, xs) => {
            let ev = xs.iter().try_fold(LogEvidence::new(), |ev, &x| ev.update_gaussian(&g, x))?;
            let margin = ev.log_posterior_odds(&priors);
            let decision = if margin > 0.0 { Hypothesis::K } else { Hypothesis::H };
            println!("decision: {decision}");
            println!("log posterior margin (K - H): {margin:.12}");
        }
    }
    Ok(())
}

fn hoeffding(a: &HoeffdingArgs) -> Result<()> {
    let h = load_distribution(&a.h)?;
    let xs: Vec<Symbol> = read_tokens(&a.data, &a.data_file)?.iter().map(|t| Symbol::new(t)).collect();
    let cfg = UniversalTestConfig::new(a.delta)?;
    let out = hoeffding_test(&h, &xs, &cfg)?;
    println!("D(empirical||H): {:.12}", out.statistic);
    println!("radius: {:.12}", out.radius);
    println!("verdict: {}", out.verdict);
    println!("D(H||empirical): {}", reverse_statistic(&h, &xs)?);
    Ok(())
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    if let Some(t) = flag {
        return if t == 0 { Err(Error::InvalidParameter { name: "threads", value: "0".into() }) } else { Ok(Some(t)) };
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(Error::InvalidParameter { name: "TESTLAB_THREADS", value: v }),
        },
        Err(_) => Ok(None),
    }
}

fn simulate(a: &SimulateArgs) -> Result<()> {
    let mut scenario = Scenario::load(&a.scenario)?;
    if let Some(seed) = a.seed {
        scenario.seed = seed;
    }
    if let Some(reps) = a.reps {
        if reps == 0 {
            return Err(Error::InvalidParameter { name: "reps", value: "0".into() });
        }
        scenario.reps = reps;
    }
    let report = match thread_count(a.threads)? {
        Some(t) => sim::run_with_threads(&scenario, t)?,
        None => sim::run(&scenario)?,
    };
    match &a.out {
        Some(path) => {
            std::fs::write(path, report.to_csv())?;
            print!("{}", report.to_text());
        }
        None => print!("{}", report.to_csv()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Fisher(a) => fisher(a),
        Command::Lr(a) => lr(a),
        Command::Bayes(a) => bayes(a),
        Command::Np(a) => np(a),
        Command::Power(a) => power(a),
        Command::Kl(a) => kl_cmd(a),
        Command::Map(a) => map(a),
        Command::Hoeffding(a) => hoeffding(a),
        Command::Simulate(a) => simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
