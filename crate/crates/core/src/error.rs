use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("duplicate symbol `{0}` in alphabet")]
    DuplicateSymbol(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("distributions are defined over different alphabets")]
    AlphabetMismatch,

    #[error("alphabet has no usable order: {0}")]
    UnorderedAlphabet(String),

    #[error("invalid {name}: {value}")]
    InvalidParameter { name: &'static str, value: String },

    #[error("observation `{0}` is impossible under both hypotheses")]
    ImpossibleObservation(String),

    #[error("effect size is zero; the decision rule is degenerate")]
    ZeroEffect,

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("power specification must leave exactly one unknown, found {0}")]
    UnknownCount(usize),

    #[error("divergence is infinite: hypotheses have different supports")]
    InfiniteDivergence,

    #[error("sample is empty")]
    EmptySample,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("numerical inconsistency: {0}")]
    Numerical(String),

    #[error("scenario `{scenario}`: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },

    #[error("scenario file: {0}")]
    ScenarioFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: impl ToString) -> Self {
        Error::InvalidParameter {
            name,
            value: value.to_string(),
        }
    }

    /// True for errors caused by user input rather than by the library.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Numerical(_) => false,
            Error::Scenario { source, .. } => source.is_input_error(),
            _ => true,
        }
    }
}
