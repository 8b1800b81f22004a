use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid tensor shape: {0}")]
    BadShape(String),
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },
    #[error("matrix is not Hermitian (max |M - M^dagger| = {max_deviation:e})")]
    HermiticityViolation { max_deviation: f64 },
    #[error("trace {trace} deviates from {expected}")]
    TraceViolation { trace: f64, expected: f64 },
    #[error("negative eigenvalue {min_eig:e}")]
    NegativeEigenvalue { min_eig: f64 },
    #[error("state vector norm {norm} is not 1")]
    NotNormalized { norm: f64 },
    #[error("bad subsystem subset {0:?}: must be a nonempty proper subset")]
    BadSubset(Vec<usize>),
    #[error("operation requires a bipartite state (K = 2), got K = {0}")]
    NotBipartite(usize),
    #[error("operation requires qubits (N = 2), got N = {0}")]
    NotQubits(usize),
    #[error("operation requires a two-qubit state, got K = {k}, N = {n}")]
    NotTwoQubits { k: usize, n: usize },
    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("invalid Gram matrix: {0}")]
    BadGram(String),
    #[error("negative radicand {0:e}")]
    NegativeRadicand(f64),
    #[error("normalized purity xi = {xi} outside [{min}, 1]")]
    XiOutOfRange { xi: f64, min: f64 },
    #[error("invalid bound query: {0}")]
    BadQuery(String),
    #[error("unsupported shape K = {k}, N = {n}: bound only known for K = 2 or N = 2")]
    Unsupported { k: usize, n: usize },
    #[error("no root in the bracket: {0}")]
    NoRoot(String),
    #[error("invalid Schmidt vector: {0}")]
    BadLambda(String),
    #[error("invalid parameter: {0}")]
    BadParams(String),
    #[error("axes are not orthogonal (n . n' = {dot:e})")]
    AxesNotComplementary { dot: f64 },
    #[error("conditional state for outcome {0} is undefined (zero probability)")]
    DegenerateBranch(char),
    #[error("insufficient counts: {0}")]
    InsufficientCounts(String),
    #[error("invalid optimizer configuration: {0}")]
    BadConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable variant name, used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::BadShape(_) => "BadShape",
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::HermiticityViolation { .. } => "HermiticityViolation",
            Error::TraceViolation { .. } => "TraceViolation",
            Error::NegativeEigenvalue { .. } => "NegativeEigenvalue",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::BadSubset(_) => "BadSubset",
            Error::NotBipartite(_) => "NotBipartite",
            Error::NotQubits(_) => "NotQubits",
            Error::NotTwoQubits { .. } => "NotTwoQubits",
            Error::NotUnitary { .. } => "NotUnitary",
            Error::BadGram(_) => "BadGram",
            Error::NegativeRadicand(_) => "NegativeRadicand",
            Error::XiOutOfRange { .. } => "XiOutOfRange",
            Error::BadQuery(_) => "BadQuery",
            Error::Unsupported { .. } => "Unsupported",
            Error::NoRoot(_) => "NoRoot",
            Error::BadLambda(_) => "BadLambda",
            Error::BadParams(_) => "BadParams",
            Error::AxesNotComplementary { .. } => "AxesNotComplementary",
            Error::DegenerateBranch(_) => "DegenerateBranch",
            Error::InsufficientCounts(_) => "InsufficientCounts",
            Error::BadConfig(_) => "BadConfig",
            Error::Parse(_) => "Parse",
            Error::Io(_) => "Io",
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoRoot(_) | Error::NegativeRadicand(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
