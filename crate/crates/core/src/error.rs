use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cell {index} ([{left}, {right}]) has a divergent average")]
    NonIntegrableCell { index: usize, left: f64, right: f64 },
    #[error("quadrature did not converge on [{left}, {right}]")]
    QuadratureFailed { left: f64, right: f64 },
    #[error("grids do not share domain and depth")]
    DepthMismatch,
    #[error("weight is not strictly positive at cell {index}")]
    NonPositiveWeight { index: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no exponent on the ladder passed")]
    NoExponentFound,
    #[error("delta must lie in (0, 1), got {0}")]
    DeltaOutOfRange(f64),
    #[error("function is not in L^{p} at the tested scales")]
    NotInLp { p: f64 },
    #[error("series tail did not fall below tolerance by K = {k_max}")]
    TailNotSmall { k_max: usize },
    #[error("observed operator ratio {observed} exceeds B = {bound}")]
    BTooSmall { observed: f64, bound: f64 },
    #[error("reverse Hölder precondition failed: {0}")]
    RHFailed(String),
    #[error("majorant chain broken at cell {cell}: {link}")]
    ChainBroken { cell: usize, link: String },
    #[error("weight is not in the Szegő class at this resolution")]
    SzegoFailed,
    #[error("circle sample {index} is not positive")]
    NonPositiveSample { index: usize },
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
