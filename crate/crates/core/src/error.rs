use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid needs at least {min} nodes, got {0}", min = crate::grid::MIN_NODES)]
    TooFewNodes(usize),
    #[error("only n = 1 and n = 2 are supported, got n = {0}")]
    UnsupportedDimension(usize),
}

/// Loss of the convexity / star-shapedness invariants of a body.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("convexity lost at node {node} (theta = {theta:.6}): {what} = {value:e}")]
    ConvexityLost {
        node: usize,
        theta: f64,
        what: &'static str,
        value: f64,
    },
    #[error("support function has {got} values, grid has {expected} nodes")]
    SizeMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("step collapsed at t = {t:e} after {halvings} step-size halvings")]
    StepCollapse { t: f64, halvings: u32 },
    #[error("invalid flow configuration: {0}")]
    Config(String),
}
