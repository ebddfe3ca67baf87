use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("duplicate edge {{{0},{1}}}")]
    DuplicateEdge(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for a host with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge index {edge} out of range for a host with {m} edges")]
    EdgeOutOfRange { edge: usize, m: usize },
    #[error("host mismatch: {left} edges vs {right} edges")]
    HostMismatch { left: usize, right: usize },
    #[error("edge {0} is assigned both signs")]
    ConflictingSigns(usize),
    #[error("edit does not act on every edge and is not a chamber")]
    NotAChamber,
    #[error("support closure exceeds the cap of {cap} flats")]
    ClosureTooLarge { cap: usize },
    #[error("{0} is not a flat of the lattice")]
    NotAFlat(String),
    #[error("flats {0} and {1} are not comparable")]
    NotComparable(String, String),
    #[error("representative for flat {flat} has support {support}")]
    BadRepresentative { flat: String, support: String },
    #[error("negative multiplicity {value} at flat {flat}")]
    NegativeMultiplicity { flat: String, value: i64 },
    #[error("probability {value} for edge {edge} is outside (0, 1)")]
    ProbabilityOutOfRange { edge: usize, value: f64 },
    #[error("host graph has no edges")]
    EmptyEdgeSet,
    #[error("{what}: {needed} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, needed: u128, cap: u128 },
    #[error("bad distribution: {0}")]
    BadDistribution(String),
    #[error("generator supports do not cover the host edge set")]
    SupportNotCovering,
    #[error("spectral gap is zero (lambda* = 1)")]
    DegenerateGap,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("chain is not irreducible on the given states")]
    NotIrreducible,
    #[error("chain is not reversible (detailed-balance residual {0:e})")]
    NotReversible(f64),
    #[error("state {0} is not in the state space")]
    UnknownState(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
