use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands come from different coefficient fields ({0} vs {1})")]
    ConfigMismatch(String, String),
    #[error("exact division failed: divisor does not divide dividend")]
    NotDivisible,
    #[error("inadmissible multi-index {0:?}: every decomposition chain hits a binomial factor that vanishes mod p")]
    InadmissibleMultiIndex(Vec<u32>),
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0} has no such root over the coefficient field")]
    NoRoot(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("map lies in hypersurface {0}")]
    MapInHypersurface(String),
    #[error("weights infeasible: {0}")]
    WeightsInfeasible(String),
    #[error("subset selection failed: no independent subset of {0:?} dominates the weighted product")]
    SubsetSelection(Vec<usize>),
    #[error("completion not found after {0} attempts")]
    CompletionNotFound(usize),
    #[error("Wronskian bound violated: rank {reached} of {target} reached with |gamma| <= {kappa0}")]
    WronskianBound {
        reached: usize,
        target: usize,
        kappa0: u64,
    },
    #[error("operation requires positive characteristic")]
    NeedsPositiveCharacteristic,
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
