use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{function}: argument must be positive, got {x}")]
    Domain { function: &'static str, x: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("geometry: {0}")]
    Geometry(String),

    #[error("coincident points in {operator} at entry ({row}, {col})")]
    CoincidentPoints {
        operator: &'static str,
        row: usize,
        col: usize,
    },

    #[error("observation point ({x}, {y}) is within clearance {clearance:.3e} of boundary node {node} (distance {distance:.3e})")]
    Clearance {
        x: f64,
        y: f64,
        node: usize,
        distance: f64,
        clearance: f64,
    },

    #[error("density kind mismatch: expected {expected}, got {found}")]
    DensityKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("singular matrix: zero pivot column at elimination step {step}{hint}")]
    Singular { step: usize, hint: String },

    #[error("configuration: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("at N = {n}: {source}")]
    AtLadder {
        n: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures of the numerical pipeline (singular systems, coincident
    /// nodes) as opposed to bad input or I/O.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Singular { .. } | Error::CoincidentPoints { .. } | Error::Domain { .. } => true,
            Error::AtLadder { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::AtLadder { source, .. } => source.is_io(),
            _ => false,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
