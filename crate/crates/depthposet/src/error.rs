use thiserror::Error;

/// Errors for complex construction, filters, reductions, and the homotopy
/// engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate cell id `{0}`")]
    DuplicateId(String),
    #[error("unknown cell id `{0}`")]
    UnknownId(String),
    #[error("cell `{facet}` (dim {facet_dim}) cannot be a facet of `{cofacet}` (dim {cofacet_dim})")]
    DimensionMismatch {
        facet: String,
        facet_dim: i32,
        cofacet: String,
        cofacet_dim: i32,
    },
    #[error("mod-2 double boundary of `{0}` is nonzero")]
    BoundaryNotSquaredZero(String),
    #[error("filter is not injective: `{0}` and `{1}` share a value")]
    NotInjective(String, String),
    #[error("filter is not monotone: facet `{facet}` does not precede `{cofacet}`")]
    NotMonotone { facet: String, cofacet: String },
    #[error("filter misses a value for cell `{0}`")]
    MissingValue(String),
    #[error("cells `{0}` and `{1}` are not incident")]
    NotIncident(String, String),
    #[error("pair (`{0}`, `{1}`) is not shallow")]
    NotShallow(String, String),
    #[error("torus subdivision needs n >= 2, got {0}")]
    NTooSmall(usize),
    #[error("torus dimension must be 1, 2, or 3, got {0}")]
    UnsupportedDimension(usize),
    #[error("relation has a directed cycle")]
    CyclicInput,
    #[error("instance too large for the brute-force oracle: {pairs} pairs (guard {guard})")]
    TooLarge { pairs: usize, guard: usize },
    #[error("pair ({0}, {1}) is not a birth-death pair of this reduction")]
    UnknownPair(String, String),
    #[error("cells at positions {0} and {1} are incident; transposing them is not defined")]
    IncidentCells(usize, usize),
    #[error("position {0} out of range for {1} cells")]
    OutOfRange(usize, usize),
    #[error("event has no governing update equations")]
    NotApplicable,
    #[error("oracle mismatch: {0}")]
    MismatchFound(String),
    #[error("malformed {kind} file, line {line}: {msg}")]
    Parse {
        kind: &'static str,
        line: usize,
        msg: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
