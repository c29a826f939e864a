use thiserror::Error;

/// Failures while reading or validating an arithmetical graph.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("ambiguous vertex reference `{0}`: matches a name and a different index")]
    AmbiguousVertex(String),
    #[error("self-loop at `{0}`: diagonal entries are derived, never supplied")]
    SelfLoop(String),
    #[error("multiplicity of `{0}` must be positive")]
    NonPositiveMultiplicity(String),
    #[error("edge count between `{0}` and `{1}` must be positive")]
    NonPositiveEdgeCount(String, String),
    #[error("graph has no vertices")]
    Empty,
    #[error("graph is not connected (`{0}` unreachable from `{1}`)")]
    Disconnected(String, String),
    #[error("MR != 0 at vertex `{vertex}`: {multiplicity} does not divide {neighbor_sum}")]
    NotBalanced {
        vertex: String,
        multiplicity: String,
        neighbor_sum: String,
    },
    #[error("gcd of multiplicities is {0}, expected 1")]
    NotPrimitive(String),
    #[error("unsatisfiable family descriptor: {0}")]
    Family(String),
}

/// Errors returned by the analysis layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    /// The hypotheses of a structural result do not hold for the given input.
    #[error("{hypothesis} (required by {theorem})")]
    Precondition {
        hypothesis: String,
        theorem: &'static str,
    },
    #[error("class is not torsion: a free coordinate is nonzero")]
    NotTorsion,
    #[error("trivial pair: both vertices are `{0}`")]
    TrivialPair(String),
    #[error("vector is not in Ker(tR)")]
    NotInKernel,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn precondition(hypothesis: impl Into<String>, theorem: &'static str) -> Self {
        Error::Precondition {
            hypothesis: hypothesis.into(),
            theorem,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
