//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("chart domain violation: {0}")]
    Domain(String),
    #[error("degenerate surface: {0}")]
    DegenerateSurface(String),
    #[error("mean curvature is not positive (min H = {min_h:e})")]
    NonPositiveMeanCurvature { min_h: f64 },
    #[error("surface is not star-shaped (margin = {margin:e})")]
    NonStarShaped { margin: f64 },
    #[error("flow trace is incomplete: {0}")]
    IncompleteTrace(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
