use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid degree {0}: must be at least 1")]
    InvalidDegree(usize),
    #[error("unsupported knot vector: {0}")]
    UnsupportedKnotVector(String),
    #[error("invalid weight {weight} at control point {index}")]
    InvalidWeight { index: usize, weight: f64 },
    #[error("degenerate parametrization: |a1 x a2| = {0:e}")]
    DegenerateParametrization(f64),
    #[error("degenerate metric: det = {0:e}")]
    DegenerateMetric(f64),
    #[error("degenerate intermediate metric: det = {0:e}")]
    DegenerateIntermediateMetric(f64),
    #[error("inverted element {element}: J = {j:e}")]
    ElementInversion { element: usize, j: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate viscosity in an active Maxwell branch: {0}")]
    DegenerateViscosity(String),
    #[error("singular local Jacobian")]
    LocalSingularity,
    #[error("local evolution solver did not converge after {iterations} iterations (|g| = {residual:e})")]
    LocalNonConvergence { iterations: usize, residual: f64 },
    #[error("singular tangent sensitivity system")]
    TangentSingularity,
    #[error("projection failed: {0}")]
    Projection(String),
    #[error("singular global tangent: {0}")]
    SingularTangent(String),
    #[error("Newton iteration diverged at step {step} (|r| = {residual:e})")]
    Divergence { step: usize, residual: f64 },
    #[error("Newton iteration did not converge at step {step} after {iterations} iterations (|r| = {residual:e})")]
    NewtonNonConvergence { step: usize, iterations: usize, residual: f64 },
    #[error("step {step}: {source}")]
    Step { step: usize, source: Box<Error> },
    #[error("scalar equilibrium solve failed: bracket [{lo}, {hi}]")]
    ScalarNonConvergence { lo: f64, hi: f64 },
    #[error("undefined error metric: reference value is zero")]
    UndefinedError,
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("mesh file error at line {line}: {message}")]
    MeshFormat { line: usize, message: String },
    #[error("unsupported study: {0}")]
    UnsupportedStudy(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Coarse category used for process exit codes and the C interface.
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            Config { .. } | InvalidParameter(_) | InvalidDegree(_) | UnsupportedKnotVector(_)
            | InvalidWeight { .. } | MeshFormat { .. } | UnsupportedStudy(_) | DegenerateViscosity(_) => {
                ErrorCategory::Input
            }
            Io(_) => ErrorCategory::Io,
            DegenerateParametrization(_) | DegenerateMetric(_) | DegenerateIntermediateMetric(_)
            | ElementInversion { .. } => ErrorCategory::Geometry,
            Step { source, .. } => source.category(),
            _ => ErrorCategory::Solver,
        }
    }

    pub(crate) fn at_step(self, step: usize) -> Error {
        match self {
            e @ Error::Step { .. } => e,
            e => Error::Step { step, source: Box::new(e) },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Input,
    Io,
    Geometry,
    Solver,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Input => 2,
            ErrorCategory::Io => 3,
            ErrorCategory::Geometry => 4,
            ErrorCategory::Solver => 5,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
