use thiserror::Error;

/// Every failure the toolkit can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("adjacency must be a non-empty square 0/1 matrix: {0}")]
    MalformedAdjacency(String),
    #[error("symbol {symbol} has no {side}; the shift space is not well defined")]
    EmptyRowOrColumn { symbol: usize, side: &'static str },
    #[error("enumeration would visit more than {cap} words")]
    CapExceeded { cap: usize },
    #[error("word of length {got} is too short, need {need}")]
    WordTooShort { got: usize, need: usize },
    #[error("word {0:?} is not admissible")]
    InadmissibleWord(Vec<usize>),
    #[error("cycle {0:?} is not an admissible primitive cycle")]
    InadmissibleCycle(Vec<usize>),
    #[error("permutation is not a bijection on the alphabet")]
    NotABijection,
    #[error("potential table does not match the shift: {0}")]
    InvalidPotential(String),
    #[error("range mismatch: {0}")]
    RangeMismatch(String),
    #[error("the shift (or transition support) is not irreducible")]
    NotIrreducible,
    #[error("transition support is reducible; stationary vector is not unique")]
    ReducibleSupport,
    #[error("invalid transition matrix: {0}")]
    InvalidTransition(String),
    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },
    #[error("scaling potential must satisfy psi > 0 (minimum found {min})")]
    NonPositiveScaling { min: f64 },
    #[error("root bracket [{lo}, {hi}] does not change sign")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("objective returned a non-finite value")]
    NonFiniteObjective,
    #[error("functional is not convex; pass heuristic mode to proceed")]
    NonConvexWithoutAcknowledgement,
    #[error("functional is not convex")]
    NonConvexF,
    #[error("subgraph of maximizing cycles is empty")]
    EmptySubgraph,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
