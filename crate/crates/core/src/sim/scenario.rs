use num_rational::BigRational;
use serde::Deserialize;
use std::path::Path;

use crate::dist::{FiniteDistribution, Symbol};
use crate::error::{Error, Result};
use crate::evidential::{Hypothesis, Priors};
use crate::exact::parse_rational;
use crate::fisher::TailDirection;
use crate::gaussian::GaussianPair;
use crate::info::UniversalTestConfig;
use crate::neyman_pearson::{AdjustScheme, PowerSpec};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    paradigm: String,
    seed: u64,
    #[serde(default)]
    reps: Option<u64>,
    #[serde(default)]
    truth: Option<String>,
    #[serde(default)]
    criterion: Option<u32>,
    #[serde(default)]
    hypotheses: Option<HypothesesSection>,
    #[serde(default)]
    gaussian: Option<GaussianSection>,
    #[serde(default)]
    params: Params,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HypothesesSection {
    alphabet: Vec<String>,
    h: Vec<String>,
    #[serde(default)]
    k: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussianSection {
    mu_h: f64,
    mu_k: f64,
    #[serde(default = "one")]
    sigma: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    n: Option<u64>,
    ns: Option<Vec<u64>>,
    s: Option<Vec<f64>>,
    horizon: Option<u64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    eta: Option<f64>,
    prior_h: Option<f64>,
    priors: Option<Vec<f64>>,
    delta: Option<f64>,
    looks: Option<Vec<u64>>,
    tests: Option<Vec<u64>>,
    scheme: Option<String>,
    rule: Option<String>,
    checkpoints: Option<Vec<u64>>,
    trials: Option<u64>,
    observed: Option<u64>,
    observed_symbol: Option<String>,
    theta: Option<String>,
    direction: Option<String>,
    cases: Option<u64>,
    max_n: Option<u64>,
    max_alphabet: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NpRule {
    Midpoint,
    FixedAlpha(f64),
}

/// What a scenario runs, with every parameter it needs.
#[derive(Debug, Clone)]
pub enum Paradigm {
    FisherBinomial {
        trials: u64,
        observed: u64,
        theta: BigRational,
        direction: TailDirection,
    },
    FisherFinite {
        observed: Symbol,
        direction: TailDirection,
    },
    Lr {
        n: u64,
        thresholds: Vec<f64>,
        checkpoints: Vec<u64>,
    },
    Bayes {
        n: u64,
        priors: Priors,
    },
    Map {
        ns: Vec<u64>,
        priors: Priors,
    },
    Np {
        rule: NpRule,
        ns: Vec<u64>,
    },
    Power {
        spec: PowerSpec,
    },
    Hoeffding {
        ns: Vec<u64>,
        config: UniversalTestConfig,
    },
    OptionalStopping {
        alpha: f64,
        looks: Vec<u64>,
        monitor_s: f64,
    },
    Robbins {
        thresholds: Vec<f64>,
        horizon: u64,
    },
    EvidenceRate {
        n: u64,
    },
    Fwer {
        family_alpha: f64,
        scheme: AdjustScheme,
        tests: Vec<u64>,
        n: u64,
    },
    KlIdentity {
        cases: u64,
        max_n: u64,
        max_alphabet: usize,
    },
    KlMargin {
        cases: u64,
        max_n: u64,
        max_alphabet: usize,
    },
    MapOptimality {
        cases: u64,
        priors: Vec<f64>,
    },
    SuperUniformity {
        cases: u64,
        max_alphabet: usize,
    },
}

impl Paradigm {
    pub fn name(&self) -> &'static str {
        match self {
            Paradigm::FisherBinomial { .. } | Paradigm::FisherFinite { .. } => "fisher",
            Paradigm::Lr { .. } => "lr",
            Paradigm::Bayes { .. } => "bayes",
            Paradigm::Map { .. } => "map",
            Paradigm::Np { .. } => "np",
            Paradigm::Power { .. } => "power",
            Paradigm::Hoeffding { .. } => "hoeffding",
            Paradigm::OptionalStopping { .. } => "optional-stopping",
            Paradigm::Robbins { .. } => "robbins",
            Paradigm::EvidenceRate { .. } => "evidence-rate",
            Paradigm::Fwer { .. } => "fwer",
            Paradigm::KlIdentity { .. } => "kl-identity",
            Paradigm::KlMargin { .. } => "kl-margin",
            Paradigm::MapOptimality { .. } => "map-optimality",
            Paradigm::SuperUniformity { .. } => "super-uniformity",
        }
    }

    fn uses_replications(&self) -> bool {
        matches!(
            self,
            Paradigm::Lr { .. }
                | Paradigm::Bayes { .. }
                | Paradigm::Map { .. }
                | Paradigm::Np { .. }
                | Paradigm::Hoeffding { .. }
                | Paradigm::OptionalStopping { .. }
                | Paradigm::Robbins { .. }
                | Paradigm::EvidenceRate { .. }
                | Paradigm::Fwer { .. }
        )
    }
}

/// A validated experiment description.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    /// Acceptance criterion this scenario backs, if any.
    pub criterion: Option<u32>,
    pub seed: u64,
    pub reps: u64,
    pub truth: Option<Hypothesis>,
    pub h: Option<FiniteDistribution>,
    pub k: Option<FiniteDistribution>,
    pub gaussian: Option<GaussianPair>,
    pub paradigm: Paradigm,
}

fn missing(key: &str) -> Error {
    Error::ScenarioFormat(format!("missing parameter `{key}`"))
}

fn ensure_increasing(key: &str, v: &[u64]) -> Result<()> {
    if v.is_empty() || v[0] == 0 || v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::ScenarioFormat(format!(
            "`{key}` must be a nonempty, strictly increasing list of positive integers"
        )));
    }
    Ok(())
}

fn ensure_thresholds(v: &[f64], strictly_above_one: bool) -> Result<()> {
    let ok = !v.is_empty()
        && v.iter().all(|&s| s.is_finite() && if strictly_above_one { s > 1.0 } else { s >= 1.0 });
    if ok {
        Ok(())
    } else {
        Err(Error::ScenarioFormat("thresholds `s` must be finite and above 1".into()))
    }
}

impl Scenario {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| Error::ScenarioFormat(e.to_string()))?;
        let name = file.name.clone();
        Self::validate(file).map_err(|e| match e {
            Error::ScenarioFormat(_) => e,
            other => Error::Scenario {
                scenario: name,
                source: Box::new(other),
            },
        })
    }

    fn validate(file: ScenarioFile) -> Result<Self> {
        let p = file.params;
        let truth = file.truth.as_deref().map(str::parse).transpose()?;

        let (h, k) = match &file.hypotheses {
            Some(sec) => {
                let build = |probs: &[String]| -> Result<FiniteDistribution> {
                    let probs = probs.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
                    FiniteDistribution::from_rationals(sec.alphabet.iter().map(|s| Symbol::new(s)), probs)
                };
                let h = build(&sec.h)?;
                let k = sec.k.as_deref().map(build).transpose()?;
                if let Some(k) = &k {
                    h.check_same_alphabet(k)?;
                }
                (Some(h), k)
            }
            None => (None, None),
        };
        let gaussian = file
            .gaussian
            .as_ref()
            .map(|g| GaussianPair::new(g.mu_h, g.mu_k, g.sigma))
            .transpose()?;

        let need_pair = || -> Result<()> {
            if (h.is_some() && k.is_some()) || gaussian.is_some() {
                Ok(())
            } else {
                Err(Error::ScenarioFormat("needs a [hypotheses] pair (h and k) or a [gaussian] pair".into()))
            }
        };
        let need_finite_pair = || -> Result<()> {
            if h.is_some() && k.is_some() {
                Ok(())
            } else {
                Err(Error::ScenarioFormat("needs a [hypotheses] section with both h and k".into()))
            }
        };
        let need_gaussian = || -> Result<()> {
            gaussian
                .map(|_| ())
                .ok_or_else(|| Error::ScenarioFormat("needs a [gaussian] section".into()))
        };
        let need_truth = || truth.ok_or_else(|| missing("truth"));
        let priors = |v: Option<f64>| v.map(Priors::new).transpose().map(|p| p.unwrap_or_else(Priors::equal));
        let direction = |d: &Option<String>| -> Result<TailDirection> {
            d.as_deref().ok_or_else(|| missing("direction"))?.parse()
        };

        let paradigm = match file.paradigm.as_str() {
            "fisher" => {
                if let Some(trials) = p.trials {
                    Paradigm::FisherBinomial {
                        trials,
                        observed: p.observed.ok_or_else(|| missing("observed"))?,
                        theta: parse_rational(p.theta.as_deref().ok_or_else(|| missing("theta"))?)?,
                        direction: direction(&p.direction)?,
                    }
                } else {
                    let h = h.as_ref().ok_or_else(|| missing("trials or [hypotheses]"))?;
                    let observed = Symbol::new(p.observed_symbol.as_deref().ok_or_else(|| missing("observed_symbol"))?);
                    h.index_of(&observed)?;
                    Paradigm::FisherFinite {
                        observed,
                        direction: direction(&p.direction)?,
                    }
                }
            }
            "lr" => {
                need_pair()?;
                need_truth()?;
                let n = p.n.ok_or_else(|| missing("n"))?;
                let thresholds = p.s.clone().ok_or_else(|| missing("s"))?;
                ensure_thresholds(&thresholds, false)?;
                let checkpoints = p.checkpoints.clone().unwrap_or_else(|| vec![n]);
                ensure_increasing("checkpoints", &checkpoints)?;
                if *checkpoints.last().unwrap() > n {
                    return Err(Error::ScenarioFormat("checkpoints must not exceed n".into()));
                }
                Paradigm::Lr { n, thresholds, checkpoints }
            }
            "bayes" => {
                need_pair()?;
                need_truth()?;
                Paradigm::Bayes {
                    n: p.n.ok_or_else(|| missing("n"))?,
                    priors: priors(p.prior_h)?,
                }
            }
            "map" => {
                need_pair()?;
                let ns = p.ns.clone().ok_or_else(|| missing("ns"))?;
                ensure_increasing("ns", &ns)?;
                Paradigm::Map { ns, priors: priors(p.prior_h)? }
            }
            "np" => {
                need_gaussian()?;
                let ns = p.ns.clone().ok_or_else(|| missing("ns"))?;
                ensure_increasing("ns", &ns)?;
                let rule = match p.rule.as_deref().unwrap_or("midpoint") {
                    "midpoint" => {
                        if gaussian.unwrap().effect() <= 0.0 {
                            return Err(Error::ZeroEffect);
                        }
                        NpRule::Midpoint
                    }
                    "fixed-alpha" => {
                        let a = p.alpha.ok_or_else(|| missing("alpha"))?;
                        if !(a > 0.0 && a < 1.0) {
                            return Err(Error::param("alpha", a));
                        }
                        NpRule::FixedAlpha(a)
                    }
                    other => return Err(Error::param("np rule", other)),
                };
                Paradigm::Np { rule, ns }
            }
            "power" => {
                let spec = PowerSpec {
                    alpha: p.alpha,
                    beta: p.beta,
                    eta: p.eta,
                    n: p.n,
                    sigma: gaussian.map(|g| g.sigma()).unwrap_or(1.0),
                };
                // fail early on an unsolvable specification
                crate::neyman_pearson::solve_power(&spec)?;
                Paradigm::Power { spec }
            }
            "hoeffding" => {
                let hyp = h.as_ref().ok_or_else(|| missing("[hypotheses] h"))?;
                if truth == Some(Hypothesis::K) && k.is_none() {
                    return Err(missing("[hypotheses] k (truth is K)"));
                }
                if hyp.probs().contains(&0.0) {
                    return Err(Error::ScenarioFormat("hoeffding hypothesis needs full support".into()));
                }
                let ns = p.ns.clone().ok_or_else(|| missing("ns"))?;
                ensure_increasing("ns", &ns)?;
                Paradigm::Hoeffding {
                    ns,
                    config: UniversalTestConfig::new(p.delta.ok_or_else(|| missing("delta"))?)?,
                }
            }
            "optional-stopping" => {
                need_gaussian()?;
                let alpha = p.alpha.ok_or_else(|| missing("alpha"))?;
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::param("alpha", alpha));
                }
                let looks = p.looks.clone().ok_or_else(|| missing("looks"))?;
                ensure_increasing("looks", &looks)?;
                let s = p.s.clone().ok_or_else(|| missing("s"))?;
                ensure_thresholds(&s, true)?;
                if truth.is_some_and(|t| t != Hypothesis::H) {
                    return Err(Error::ScenarioFormat("optional stopping runs under H".into()));
                }
                Paradigm::OptionalStopping { alpha, looks, monitor_s: s[0] }
            }
            "robbins" => {
                need_finite_pair()?;
                if truth.is_some_and(|t| t != Hypothesis::H) {
                    return Err(Error::ScenarioFormat("the Robbins check runs under H".into()));
                }
                let thresholds = p.s.clone().ok_or_else(|| missing("s"))?;
                ensure_thresholds(&thresholds, true)?;
                let horizon = p.horizon.ok_or_else(|| missing("horizon"))?;
                if horizon == 0 {
                    return Err(Error::param("horizon", 0));
                }
                Paradigm::Robbins { thresholds, horizon }
            }
            "evidence-rate" => {
                need_finite_pair()?;
                Paradigm::EvidenceRate { n: p.n.ok_or_else(|| missing("n"))? }
            }
            "fwer" => {
                need_gaussian()?;
                let tests = p.tests.clone().ok_or_else(|| missing("tests"))?;
                ensure_increasing("tests", &tests)?;
                let family_alpha = p.alpha.ok_or_else(|| missing("alpha"))?;
                let scheme: AdjustScheme = p.scheme.as_deref().unwrap_or("bonferroni").parse()?;
                crate::neyman_pearson::adjust_alpha(family_alpha, 1, scheme)?;
                Paradigm::Fwer {
                    family_alpha,
                    scheme,
                    tests,
                    n: p.n.ok_or_else(|| missing("n"))?,
                }
            }
            "kl-identity" | "kl-margin" => {
                let cases = p.cases.ok_or_else(|| missing("cases"))?;
                let max_n = p.max_n.unwrap_or(50);
                let max_alphabet = p.max_alphabet.unwrap_or(6);
                if max_alphabet < 2 || max_n == 0 {
                    return Err(Error::ScenarioFormat("max_alphabet >= 2 and max_n >= 1 required".into()));
                }
                if file.paradigm == "kl-identity" {
                    Paradigm::KlIdentity { cases, max_n, max_alphabet }
                } else {
                    Paradigm::KlMargin { cases, max_n, max_alphabet }
                }
            }
            "map-optimality" => {
                let priors = p.priors.clone().unwrap_or_else(|| vec![0.5]);
                for &pi in &priors {
                    Priors::new(pi)?;
                }
                Paradigm::MapOptimality {
                    cases: p.cases.ok_or_else(|| missing("cases"))?,
                    priors,
                }
            }
            "super-uniformity" => {
                let max_alphabet = p.max_alphabet.unwrap_or(20);
                if max_alphabet < 2 {
                    return Err(Error::ScenarioFormat("max_alphabet >= 2 required".into()));
                }
                Paradigm::SuperUniformity {
                    cases: p.cases.ok_or_else(|| missing("cases"))?,
                    max_alphabet,
                }
            }
            other => return Err(Error::ScenarioFormat(format!("unknown paradigm `{other}`"))),
        };

        let reps = match (paradigm.uses_replications(), file.reps) {
            (true, Some(r)) if r > 0 => r,
            (true, _) => return Err(missing("reps")),
            (false, r) => r.unwrap_or(0),
        };

        Ok(Scenario {
            name: file.name,
            criterion: file.criterion,
            seed: file.seed,
            reps,
            truth,
            h,
            k,
            gaussian,
            paradigm,
        })
    }
}
