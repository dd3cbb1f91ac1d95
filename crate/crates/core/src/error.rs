use thiserror::Error;

/// Errors raised by model construction and by the operations on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("stem has no vertices")]
    EmptyStem,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("self-loop at `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge {0} {1}")]
    DuplicateEdge(String, String),
    #[error("stem has a cycle (edge {0} {1} closes it)")]
    Cycle(String, String),
    #[error("stem is not connected")]
    Disconnected,
    #[error("bunch is a path graph")]
    PathGraph,
    #[error("not a twig: {0}")]
    NotATwig(String),
    #[error("not a path in the stem: {0}")]
    NotAPath(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("size guard exceeded: {0}")]
    Guard(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable code for the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyStem => "empty-stem",
            Error::UnknownVertex(_) => "unknown-vertex",
            Error::SelfLoop(_) => "self-loop",
            Error::DuplicateEdge(..) => "duplicate-edge",
            Error::Cycle(..) => "cycle",
            Error::Disconnected => "disconnected",
            Error::PathGraph => "path-graph",
            Error::NotATwig(_) => "not-a-twig",
            Error::NotAPath(_) => "not-a-path",
            Error::Precondition(_) => "precondition",
            Error::Guard(_) => "guard",
            Error::InvalidArgument(_) => "invalid-argument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
