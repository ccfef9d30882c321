use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("engine unsupported: {0}")]
    EngineUnsupported(String),
    #[error("too many players: {players} exceeds the limit of {limit}")]
    TooManyPlayers { players: usize, limit: usize },
    #[error("not an imputation: {0}")]
    NotAnImputation(String),
    #[error("bad coalition: {0}")]
    BadCoalition(String),
    #[error("payoff vector has {got} entries, game has {expected} players")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("the linear system is feasible")]
    NotInfeasible,
    #[error("invalid linear system: {0}")]
    InvalidSystem(String),
    #[error("graph too large for exact treewidth: {0} vertices (max 12)")]
    TooLargeForExact(usize),
    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("malformed CNF: {0}")]
    MalformedCnf(String),
    #[error("malformed QBF: {0}")]
    MalformedQbf(String),
    #[error("not a 2QBF with a forall-exists prefix: {0}")]
    Not2Qbf(String),
}
