use crate::flow::FlowFailure;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unsupported dimension {0}; only n = 2 and axisymmetric n = 3 are available")]
    UnsupportedDimension(usize),

    #[error("grid too small for the derivative stencil: {nodes} nodes, need at least {min}")]
    GridTooSmall { nodes: usize, min: usize },

    #[error("field has {got} samples but the grid has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },

    #[error("fields are sampled on different grids")]
    GridMismatch,

    #[error("support function is not positive at node {node} (h = {value:e})")]
    NonPositive { node: usize, value: f64 },

    #[error("convexity lost at node {node}: smallest curvature radius {margin:e}")]
    ConvexityLoss { node: usize, margin: f64 },

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("no interior solver for k = {k}, n = {dim} on this body ({hint})")]
    Capability { dim: usize, k: usize, hint: String },

    #[error(
        "collocation system is ill-conditioned (effective condition {condition:e}); \
         increase the regularization or use fewer charges"
    )]
    IllConditioned { condition: f64 },

    #[error("interior solve failed: {0}")]
    SolveFailed(String),

    #[error("sample point ({:.6}, {:.6}, {:.6}) is not strictly inside the domain", .0[0], .0[1], .0[2])]
    OutsideDomain([f64; 3]),

    #[error("sign violation: {0}")]
    Sign(String),

    #[error("flow step size underflow: {0}")]
    Stiffness(Box<FlowFailure>),

    #[error("config error{}: {message}", .line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    #[error("snapshot error: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::Config { line: None, message: message.into() }
    }
}
