use thiserror::Error;

/// Errors surfaced by the spectral computations.
#[derive(Debug, Error)]
pub enum SpectraError {
    /// A constructor or operation received a parameter outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Sign counts and root isolation are undefined for the zero polynomial.
    #[error("indeterminate sign count: zero polynomial")]
    ZeroPolynomial,
    /// Evaluation requested at a point where the formula is singular.
    #[error("singular point: {0}")]
    Singular(String),
    /// A vertex id outside 1..=n was passed to a graph operation.
    #[error("unknown vertex {vertex} (graph has {order} vertices)")]
    UnknownVertex { vertex: usize, order: usize },
    /// Simple-cycle enumeration exceeded the hard cap.
    #[error("cycle enumeration exceeded the cap of {0} cycles")]
    CycleCap(usize),
    /// A band edge of the discriminant had multiplicity above two.
    #[error("degenerate band edge at lambda = {0}")]
    DegenerateBandEdge(f64),
    /// The finite-section oracle refuses truncations above its size cap.
    #[error("oracle size cap: N = {0} exceeds 10000")]
    OracleCap(usize),
    /// Malformed input file or inline JSON.
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, SpectraError>;
