use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("adaptive construction did not converge within {max_points} points")]
    NonConvergent { max_points: usize },

    #[error("collocation matrix is ill-conditioned (condition estimate {cond:.3e}) at z = {z}")]
    IllConditioned { cond: f64, z: num_complex::Complex64 },

    #[error("functions live on different domains: [{a1}, {b1}] vs [{a2}, {b2}]")]
    DomainMismatch { a1: f64, b1: f64, a2: f64, b2: f64 },

    #[error("quasi-matrix has zero largest singular value")]
    ZeroMatrix,

    #[error("function has zero norm")]
    ZeroFunction,

    #[error("dense {0} did not converge")]
    NoConvergence(&'static str),

    #[error("matrix pencil is singular to working precision")]
    SingularPencil,

    #[error("projected subspace collapsed: {0}")]
    RankCollapse(&'static str),

    #[error("evaluation point {lambda} coincides with a quadrature node")]
    PoleHit { lambda: num_complex::Complex64 },

    #[error("need more than {needed} eigenvalue estimates, got {got}")]
    NotEnoughEigenvalues { needed: usize, got: usize },

    #[error("solve failed at column {column}, quadrature point {point}: {source}")]
    PointSolve {
        column: usize,
        point: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid problem definition: {0}")]
    InvalidProblem(String),

    #[error("expression error: {0}")]
    Expression(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures that come from the numerical solve itself rather than
    /// from malformed input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::PointSolve { source, .. } => source.is_numerical(),
            Error::InvalidProblem(_)
            | Error::Expression(_)
            | Error::InvalidArgument(_)
            | Error::Json(_)
            | Error::Io(_)
            | Error::DomainMismatch { .. } => false,
            _ => true,
        }
    }
}
