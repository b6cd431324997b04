use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("argument {x} must be positive")]
    NonPositiveArgument { x: f64 },

    #[error("order {n} outside supported range 0..={max}")]
    OrderOutOfRange { n: u32, max: u32 },

    #[error("geometry: {0}")]
    Geometry(String),

    #[error("parameter {t} outside segment range [{lo}, {hi}]")]
    ParameterOutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("mesh refinement failed near ({x:.4}, {y:.4}): {reason}")]
    Refinement { x: f64, y: f64, reason: String },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("Mathieu branch tracking failed (order {n}, q = {q}): {reason}")]
    BranchTracking { n: u32, q: f64, reason: String },

    #[error("series did not converge: {0}")]
    SeriesNonConvergence(String),

    #[error("no bracket for mode ({m}, {n}, {parity}) with k in [{k_lo}, {k_hi}]")]
    BracketNotFound {
        m: u32,
        n: u32,
        parity: char,
        k_lo: f64,
        k_hi: f64,
    },

    #[error("mode identification ambiguous: {0}")]
    AmbiguousMode(String),

    #[error("single-layer matrix numerically singular at k = {k} (rcond {rcond:.3e})")]
    SingularSingleLayer { k: f64, rcond: f64 },

    #[error("matrix numerically singular{}: {detail}", at_k(.k))]
    Singular { k: Option<f64>, detail: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("eigensolver did not converge: {converged} of {requested} pairs after {iterations} restarts")]
    NoConvergence {
        converged: usize,
        requested: usize,
        iterations: usize,
    },

    #[error("point outside domain: ({x}, {y})")]
    OutsideDomain { x: f64, y: f64 },
}

fn at_k(k: &Option<f64>) -> String {
    match k {
        Some(k) => alloc::format!(" at k = {k}"),
        None => String::new(),
    }
}
