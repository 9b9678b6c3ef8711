//! Finite distributions, empirical distributions and probabilities that may
//! be exact or floating point.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact;
use crate::seed::Seed;

/// Tolerance on the total mass of a float-valued distribution.
pub const FLOAT_MASS_TOLERANCE: f64 = 1e-12;

/// A label in a finite alphabet. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(label: &str) -> Self {
        Symbol(Arc::from(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// A probability carried either as an exact rational or as a float.
#[derive(Debug, Clone, PartialEq)]
pub enum Probability {
    Exact(BigRational),
    Float(f64),
}

impl Probability {
    pub fn to_f64(&self) -> f64 {
        match self {
            Probability::Exact(q) => exact::to_f64(q),
            Probability::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Probability::Exact(q) => Some(q),
            Probability::Float(_) => None,
        }
    }

    /// Natural log, usable even when the value underflows `f64`.
    pub fn ln(&self) -> f64 {
        match self {
            Probability::Exact(q) if q.is_zero() => f64::NEG_INFINITY,
            Probability::Exact(q) => exact::ln_abs(q),
            Probability::Float(x) => x.ln(),
        }
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Probability::Exact(q) => write!(f, "{q}"),
            Probability::Float(x) => write!(f, "{x}"),
        }
    }
}

/// An ordered alphabet shared between distributions. Opaque outside the crate.
#[derive(Clone)]
pub struct Alphabet {
    symbols: Arc<[Symbol]>,
    index: Arc<HashMap<Symbol, usize>>,
}

impl Alphabet {
    pub(crate) fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::DuplicateSymbol(s.to_string()));
            }
        }
        Ok(Alphabet {
            symbols: symbols.into(),
            index: Arc::new(index),
        })
    }

    pub(crate) fn same_as(&self, other: &Alphabet) -> bool {
        Arc::ptr_eq(&self.symbols, &other.symbols) || self.symbols == other.symbols
    }

    fn index_of(&self, x: &Symbol) -> Result<usize> {
        self.index
            .get(x)
            .copied()
            .ok_or_else(|| Error::UnknownSymbol(x.to_string()))
    }
}

/// A probability vector over a finite, ordered alphabet.
#[derive(Clone)]
pub struct FiniteDistribution {
    alphabet: Alphabet,
    probs: Vec<f64>,
    exact: Option<Vec<BigRational>>,
    cumulative: Vec<f64>,
}

impl fmt::Debug for FiniteDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (s, p) in self.alphabet.symbols.iter().zip(&self.probs) {
            m.entry(s, p);
        }
        m.finish()
    }
}

impl FiniteDistribution {
    /// Builds an exact distribution. The probabilities must sum to one exactly.
    pub fn from_rationals<S: Into<Symbol>>(
        labels: impl IntoIterator<Item = S>,
        probs: Vec<BigRational>,
    ) -> Result<Self> {
        let alphabet = Alphabet::new(labels.into_iter().map(Into::into).collect())?;
        if probs.len() != alphabet.symbols.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} symbols but {} probabilities",
                alphabet.symbols.len(),
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| p.is_negative()) {
            return Err(Error::InvalidDistribution(format!("negative probability {p}")));
        }
        let total: BigRational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let floats = probs.iter().map(exact::to_f64).collect();
        Ok(Self::assemble(alphabet, floats, Some(probs)))
    }

    /// Builds a float distribution. The mass must be within
    /// [`FLOAT_MASS_TOLERANCE`] of one.
    pub fn from_floats<S: Into<Symbol>>(
        labels: impl IntoIterator<Item = S>,
        probs: Vec<f64>,
    ) -> Result<Self> {
        let alphabet = Alphabet::new(labels.into_iter().map(Into::into).collect())?;
        Self::from_floats_on(alphabet, probs)
    }

    fn from_floats_on(alphabet: Alphabet, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != alphabet.symbols.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} symbols but {} probabilities",
                alphabet.symbols.len(),
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("invalid probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > FLOAT_MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self::assemble(alphabet, probs, None))
    }

    /// Convenience constructor from `(label, probability)` pairs.
    pub fn from_pairs(pairs: &[(&str, f64)]) -> Result<Self> {
        Self::from_floats(
            pairs.iter().map(|(s, _)| *s),
            pairs.iter().map(|(_, p)| *p).collect(),
        )
    }

    /// Exact uniform distribution.
    pub fn uniform<S: Into<Symbol>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<Symbol> = labels.into_iter().map(Into::into).collect();
        let k = labels.len().max(1);
        let p = BigRational::new(1.into(), k.into());
        Self::from_rationals(labels, vec![p; k])
    }

    /// Exact point mass on `at`.
    pub fn point_mass<S: Into<Symbol>>(
        labels: impl IntoIterator<Item = S>,
        at: &Symbol,
    ) -> Result<Self> {
        let alphabet = Alphabet::new(labels.into_iter().map(Into::into).collect())?;
        let i = alphabet.index_of(at)?;
        let mut probs = vec![BigRational::zero(); alphabet.symbols.len()];
        probs[i] = BigRational::one();
        let floats = probs.iter().map(exact::to_f64).collect();
        Ok(Self::assemble(alphabet, floats, Some(probs)))
    }

    /// Parses one `symbol<TAB>probability` pair per line. Blank lines and
    /// lines starting with `#` are skipped. Probabilities may be decimals or
    /// fractions; they are read exactly.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut labels = Vec::new();
        let mut probs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (sym, p) = line.split_once('\t').ok_or_else(|| Error::Parse {
                line: lineno + 1,
                message: "expected `symbol<TAB>probability`".into(),
            })?;
            let sym = sym.trim();
            if sym.is_empty() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: "empty symbol".into(),
                });
            }
            let p = exact::parse_rational(p).map_err(|e| Error::Parse {
                line: lineno + 1,
                message: e.to_string(),
            })?;
            labels.push(Symbol::new(sym));
            probs.push(p);
        }
        Self::from_rationals(labels, probs)
    }

    fn assemble(alphabet: Alphabet, probs: Vec<f64>, exact: Option<Vec<BigRational>>) -> Self {
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        // Pin the tail of the cumulative table to exactly 1 so that every
        // uniform draw in [0, 1) lands on a symbol with positive mass.
        if let Some(last) = probs.iter().rposition(|&p| p > 0.0) {
            for c in &mut cumulative[last..] {
                *c = 1.0;
            }
        }
        FiniteDistribution {
            alphabet,
            probs,
            exact,
            cumulative,
        }
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet.symbols
    }

    pub(crate) fn alphabet_handle(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Exact probabilities, when the distribution was built from rationals.
    pub fn exact_probs(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// The probability at index `i` as an exact rational: the declared value
    /// for exact distributions, the dyadic value of the float otherwise.
    pub fn rational(&self, i: usize) -> BigRational {
        match &self.exact {
            Some(e) => e[i].clone(),
            None => exact::from_f64(self.probs[i]).expect("finite probability"),
        }
    }

    pub fn probability(&self, i: usize) -> Probability {
        match &self.exact {
            Some(e) => Probability::Exact(e[i].clone()),
            None => Probability::Float(self.probs[i]),
        }
    }

    pub fn index_of(&self, x: &Symbol) -> Result<usize> {
        self.alphabet.index_of(x)
    }

    pub fn prob(&self, x: &Symbol) -> Result<f64> {
        Ok(self.probs[self.index_of(x)?])
    }

    /// `ln P(x)`; `-inf` exactly when `P(x) = 0`.
    pub fn log_prob(&self, x: &Symbol) -> Result<f64> {
        Ok(self.log_prob_at(self.index_of(x)?))
    }

    pub fn log_prob_at(&self, i: usize) -> f64 {
        let p = self.probs[i];
        if p == 0.0 {
            f64::NEG_INFINITY
        } else {
            p.ln()
        }
    }

    pub fn same_alphabet(&self, other: &FiniteDistribution) -> bool {
        self.alphabet.same_as(&other.alphabet)
    }

    pub(crate) fn check_same_alphabet(&self, other: &FiniteDistribution) -> Result<()> {
        if self.same_alphabet(other) {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch)
        }
    }

    /// Indices of `xs` in this alphabet.
    pub fn indices(&self, xs: &[Symbol]) -> Result<Vec<usize>> {
        xs.iter().map(|x| self.index_of(x)).collect()
    }

    /// Draws one symbol index.
    #[inline]
    pub fn draw_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.cumulative.len() - 1)
    }

    /// `n` iid symbol indices, deterministic in `seed`.
    pub fn sample_indices(&self, n: usize, seed: Seed) -> Vec<usize> {
        let mut rng = seed.rng();
        (0..n).map(|_| self.draw_index(&mut rng)).collect()
    }

    /// `n` iid symbols, deterministic in `seed`.
    pub fn sample(&self, n: usize, seed: Seed) -> Result<Vec<Symbol>> {
        if n == 0 {
            return Err(Error::param("sample size", n));
        }
        Ok(self
            .sample_indices(n, seed)
            .into_iter()
            .map(|i| self.alphabet.symbols[i].clone())
            .collect())
    }

    /// Total-variation distance to another distribution on the same alphabet.
    pub fn total_variation(&self, other: &impl Masses) -> Result<f64> {
        if !self.alphabet.same_as(other.alphabet_ref()) {
            return Err(Error::AlphabetMismatch);
        }
        Ok(0.5
            * (0..self.len())
                .map(|i| (self.probs[i] - other.mass(i)).abs())
                .sum::<f64>())
    }
}

/// Counts of an observed sample over a fixed alphabet.
#[derive(Clone)]
pub struct EmpiricalDistribution {
    alphabet: Alphabet,
    counts: Vec<u64>,
    n: u64,
}

impl fmt::Debug for EmpiricalDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (s, c) in self.alphabet.symbols.iter().zip(&self.counts) {
            m.entry(s, c);
        }
        m.finish()
    }
}

impl EmpiricalDistribution {
    /// Counts `xs` over the alphabet of `reference`.
    pub fn from_sample(xs: &[Symbol], reference: &FiniteDistribution) -> Result<Self> {
        let mut counts = vec![0u64; reference.len()];
        for x in xs {
            counts[reference.index_of(x)?] += 1;
        }
        Ok(EmpiricalDistribution {
            alphabet: reference.alphabet.clone(),
            counts,
            n: xs.len() as u64,
        })
    }

    /// Counts `xs` over an explicit alphabet.
    pub fn from_symbols<S: Into<Symbol>>(
        xs: &[Symbol],
        alphabet: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let alphabet = Alphabet::new(alphabet.into_iter().map(Into::into).collect())?;
        let mut counts = vec![0u64; alphabet.symbols.len()];
        for x in xs {
            counts[alphabet.index_of(x)?] += 1;
        }
        Ok(EmpiricalDistribution {
            alphabet,
            counts,
            n: xs.len() as u64,
        })
    }

    /// Counts symbol indices drawn from `reference`'s alphabet.
    pub fn from_indices(indices: &[usize], reference: &FiniteDistribution) -> Self {
        let mut counts = vec![0u64; reference.len()];
        for &i in indices {
            counts[i] += 1;
        }
        EmpiricalDistribution {
            alphabet: reference.alphabet.clone(),
            counts,
            n: indices.len() as u64,
        }
    }

    pub fn from_counts(reference: &FiniteDistribution, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != reference.len() {
            return Err(Error::AlphabetMismatch);
        }
        let n = counts.iter().sum();
        Ok(EmpiricalDistribution {
            alphabet: reference.alphabet.clone(),
            counts,
            n,
        })
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet.symbols
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn count(&self, x: &Symbol) -> Result<u64> {
        Ok(self.counts[self.alphabet.index_of(x)?])
    }

    pub fn frequency_at(&self, i: usize) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.counts[i] as f64 / self.n as f64
        }
    }

    /// Relative frequencies as an exact distribution; `None` for an empty sample.
    pub fn frequencies(&self) -> Option<FiniteDistribution> {
        if self.n == 0 {
            return None;
        }
        let n = BigRational::from_integer(self.n.into());
        let probs = self
            .counts
            .iter()
            .map(|&c| BigRational::from_integer(c.into()) / &n)
            .collect::<Vec<_>>();
        let floats = probs.iter().map(exact::to_f64).collect();
        Some(FiniteDistribution::assemble(
            self.alphabet.clone(),
            floats,
            Some(probs),
        ))
    }

    pub(crate) fn matches(&self, d: &FiniteDistribution) -> Result<()> {
        if self.alphabet.same_as(&d.alphabet) {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch)
        }
    }
}

/// Anything that assigns a mass to each index of an alphabet.
pub trait Masses {
    fn alphabet_ref(&self) -> &Alphabet;
    fn mass(&self, i: usize) -> f64;
    fn size(&self) -> usize;
}

impl Masses for FiniteDistribution {
    fn alphabet_ref(&self) -> &Alphabet {
        &self.alphabet
    }
    fn mass(&self, i: usize) -> f64 {
        self.probs[i]
    }
    fn size(&self) -> usize {
        self.probs.len()
    }
}

impl Masses for EmpiricalDistribution {
    fn alphabet_ref(&self) -> &Alphabet {
        &self.alphabet
    }
    fn mass(&self, i: usize) -> f64 {
        self.frequency_at(i)
    }
    fn size(&self) -> usize {
        self.counts.len()
    }
}
