use thiserror::Error;

use crate::vec2::Vec2;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("perimeter needs at least 3 distinct points, got {0}")]
    TooFewPoints(usize),
    #[error("perimeter points are collinear")]
    Collinear,
    #[error("point ({}, {}) is not strictly outside the perimeter", .0.x, .0.y)]
    NotExterior(Vec2),
    #[error("arc position {s} lies outside the visible segment [{from}, {to}]")]
    NotVisible { s: f64, from: f64, to: f64 },
    #[error("speed ratio must lie in (0,1], got {0}")]
    SpeedRatio(f64),
    #[error("defenders of a pair coincide at s = {0}")]
    DegeneratePair(f64),
    #[error("state is intruder-winning (V = {0}); distance to barrier is undefined")]
    IntruderWinning(f64),
    #[error("independent-set instance has {nodes} nodes, exact solver cap is {cap}")]
    MisCapacity { nodes: usize, cap: usize },
    #[error("LGR analysis requires homogeneous defender speeds")]
    HeterogeneousSpeeds,
    #[error("defender {index} control {omega} exceeds the unit speed bound")]
    DefenderControl { index: usize, omega: f64 },
    #[error("intruder {index} speed {speed} exceeds nu = {nu}")]
    IntruderControl { index: usize, speed: f64, nu: f64 },
    #[error("invalid configuration: {field}: {reason}")]
    Config { field: String, reason: String },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

/// Validates the intruder/defender speed ratio.
pub fn check_nu(nu: f64) -> Result<()> {
    if nu > 0.0 && nu <= 1.0 {
        Ok(())
    } else {
        Err(Error::SpeedRatio(nu))
    }
}
