use std::fmt;

/// Pipeline stage attached to errors raised inside [`crate::solve`] and
/// [`crate::kansa_solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Homogenization,
    KernelConstruction,
    Grid,
    Assembly,
    LinearSolve,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Homogenization => "homogenization",
            Stage::KernelConstruction => "kernel construction",
            Stage::Grid => "grid construction",
            Stage::Assembly => "assembly",
            Stage::LinearSolve => "linear solve",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(
        "singular matrix: pivot {index} has magnitude {magnitude:e} \
         (threshold {threshold:e}); try a larger shape parameter, fewer nodes or more digits"
    )]
    SingularMatrix { index: usize, magnitude: f64, threshold: f64 },

    #[error("matrix is not symmetric: max |A_ij - A_ji| = {asymmetry:e}")]
    NotSymmetric { asymmetry: f64 },

    #[error("unsupported derivative order {requested} (maximum {max})")]
    UnsupportedOrder { requested: usize, max: usize },

    #[error("invalid boundary functional: {0}")]
    InvalidFunctional(String),

    #[error("degenerate constraint at functional #{index}: gamma = {gamma:e}")]
    DegenerateConstraint { index: usize, gamma: f64 },

    #[error("no polynomial homogenizer of degree <= 3 for axis {axis}: {functionals}")]
    NoHomogenizer { axis: usize, functionals: String },

    #[error("grid node {node} on axis {axis} coincides with a boundary functional location")]
    NodeCollision { axis: usize, node: f64 },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("{stage}: {source}")]
    InStage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn in_stage(self, stage: Stage) -> Error {
        match self {
            e @ Error::InStage { .. } => e,
            e => Error::InStage { stage, source: Box::new(e) },
        }
    }

    /// Innermost error, without stage context.
    pub fn root(&self) -> &Error {
        match self {
            Error::InStage { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::InStage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
