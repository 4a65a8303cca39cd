use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({u}, {v}) references a vertex outside 0..{n}")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Format(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("unknown LP variable {0}")]
    UnknownVariable(usize),
    #[error("point is not integral at edge {0}")]
    NotIntegral(usize),
    #[error("point violates the degree bound at vertex {0}")]
    DegreeViolated(usize),
    #[error("vertex set does not separate {0} from {1}")]
    NotASeparator(usize, usize),
    #[error("vertices {0} and {1} are adjacent")]
    AdjacentPair(usize, usize),
    #[error("instance too large for enumeration: {0}")]
    TooLarge(String),
    #[error("LP engine failure: {0}")]
    Lp(String),
    #[error("i/o error on {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("internal solver error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
