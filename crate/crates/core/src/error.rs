use thiserror::Error;

/// Errors produced by the computations in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),

    #[error("frame is not Lagrangian: isotropy defect {defect:e} exceeds {tolerance:e}")]
    NotLagrangian { defect: f64, tolerance: f64 },

    #[error("subspaces are not transverse (intersection dimension {0})")]
    NotTransverse(usize),

    #[error(
        "irregular crossing at t = {time}: {detail}; perturb the path (e.g. a small generic symmetric term) and retry"
    )]
    IrregularCrossing { time: f64, detail: String },

    #[error("loop endpoints span different subspaces (intersection dimension {found} of {expected})")]
    NotALoop { found: usize, expected: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not a chord level: a*Cz/2 = {value} is not in pi*Z")]
    NotAChordLevel { value: f64 },

    #[error("integration failure: {0}")]
    Integration(String),

    #[error("profile evaluated at a kink r = {0} without choosing a side")]
    AtKink(f64),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("incoherent directed system: {0}")]
    Incoherent(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
