use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid rational map: {0}")]
    InvalidMap(String),
    #[error("numerator and denominator share a root near {0}")]
    CommonRoot(Complex64),
    #[error("0/0 indeterminacy at {0}; numerator and denominator vanish together")]
    Indeterminate(Complex64),
    #[error("derivative undefined at pole {0}")]
    Pole(Complex64),
    #[error("derivative at infinity requires a chart change, which is not supported")]
    AtInfinity,
    #[error("root finder did not converge after {restarts} restarts (worst relative residual {worst_residual:e})")]
    RootFinding { worst_residual: f64, restarts: usize },
    #[error("point {0} is not a fixed point of the map")]
    NotFixed(String),
    #[error("points of the normalizing triple coincide")]
    CoincidentPoints,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("|lambda| = {0} is not inside the unit disk")]
    LambdaOutsideDisk(f64),
    #[error("invalid Norlund weights: {0}")]
    InvalidWeights(String),
    #[error("sequence has {available} terms but {needed} are required")]
    LengthMismatch { needed: usize, available: usize },
    #[error("convolution series routes disagree: discrepancy {discrepancy:e} at scale {scale:e}")]
    ConvolutionMismatch { discrepancy: f64, scale: f64 },
    #[error("orbit approached infinity at step {0}")]
    OrbitEscaped(usize),
    #[error("orbit hit a critical point at step {0}")]
    OrbitCritical(usize),
    #[error("kernel pole: {0} lies inside an exclusion disk")]
    KernelPole(Complex64),
    #[error("evaluation point {z} is within {distance:e} of an atom")]
    NearAtom { z: Complex64, distance: f64 },
    #[error("projective class undefined: measure is identically zero")]
    ProjectiveUndefined,
    #[error("branch collision at {z} (depth {depth}): preimages coincide at a critical value")]
    BranchCollision { z: Complex64, depth: usize },
    #[error("preimage at infinity is not supported in transfer sums (point {0})")]
    PreimageAtInfinity(Complex64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("quadrature did not converge: relative change {0:e} between refinement levels")]
    Quadrature(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
