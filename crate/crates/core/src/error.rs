use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("derivative order {0} is not supported (max 2)")]
    InvalidOrder(u8),
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("integrand is not finite at x = {x}")]
    NonFiniteSample { x: f64 },
    #[error("quadrature did not converge within {panels} panels (last change {delta:e})")]
    NotConverged { panels: usize, delta: f64 },
    #[error("radius {0} is outside [0, 0.5]")]
    InvalidRadius(f64),
    #[error("radius {r} exceeds the limit {max} for this operation")]
    RadiusTooLarge { r: f64, max: f64 },
    #[error("sample positions must be sorted ascending and lie in [0, 1)")]
    NotSorted,
    #[error("n = {n} exceeds the limit {max}")]
    TooLarge { n: usize, max: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("centering constant undefined: zero 2-path probability at r = {0}")]
    ZeroDenominator(f64),
    #[error("intermediate-regime standardization needs a sigma_2n estimate")]
    MissingSigma2n,
    #[error("dense-regime standardization needs sigma_1^2 > 0 (got {0})")]
    DegenerateSigma1(f64),
    #[error("regime refused: {0}")]
    RegimeRefused(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
