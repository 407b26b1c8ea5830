use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid gas model: {0}")]
    InvalidModel(&'static str),
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("array length {got} does not match the grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-positive density {value:e} at cell {index}")]
    NonPositiveDensity { index: usize, value: f64 },
    #[error("Riemann invariants out of order at cell {index} (S < R)")]
    InvalidInvariantOrder { index: usize },
    #[error("pressure amplitude is zero; density cannot be recovered from the invariants")]
    DegeneratePressure,
    #[error("total charge {0:e} exceeds the configured maximum")]
    UnboundedCharge(f64),
    #[error("{routine} called with gamma = {gamma}")]
    WrongGamma { routine: &'static str, gamma: f64 },
    #[error("vacuum formed at t = {t}: density {min_rho:e} below the floor")]
    VacuumFormed { t: f64, min_rho: f64 },
    #[error("time step underflow at t = {t} (dt = {dt:e})")]
    CflViolation { t: f64, dt: f64 },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("characteristic seed x0 = {x0} lies outside the domain")]
    PathLeftDomain { x0: f64 },
    #[error("snapshots {index} and {next} are too far apart: features move {cells:.1} cells between them")]
    SnapshotsTooSparse {
        index: usize,
        next: usize,
        cells: f64,
    },
    #[error("seed value {value} is not below -sqrt(2k) = {threshold}")]
    NotSupercritical { value: f64, threshold: f64 },
}
