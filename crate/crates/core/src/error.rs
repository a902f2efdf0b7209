use thiserror::Error;

/// Errors raised by the simulator library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid medium: {0}")]
    InvalidMedium(String),
    #[error("trace undefined on discontinuity line")]
    TraceOnGrid,
    #[error("interval endpoints out of order")]
    EmptyInterval,
    #[error("invalid polyrectangle: {0}")]
    InvalidPolygon(String),
    #[error("edge {0} lies on a discontinuity line")]
    EdgeOnGrid(usize),
    #[error("edge {0} does not lie on a discontinuity line")]
    EdgeOffGrid(usize),
    #[error("edge {0} has zero length")]
    DegenerateEdge(usize),
    #[error("edge has convexity factor {0}, expected {1}")]
    WrongCurvature(i8, &'static str),
    #[error("negative-curvature edge {0} is outside the supported dynamics")]
    NegativeCurvature(usize),
    #[error("threshold hypothesis not met: {0}")]
    ThresholdHypothesis(String),
    #[error("non-calibrable off-grid edge {0} present; re-crack first")]
    NotCalibrable(usize),
    #[error("t_max {t_max} precedes current time {time}")]
    TimeReversed { time: f64, t_max: f64 },
    #[error("step size collapsed below {dt_min} at t = {time}")]
    StepCollapse { time: f64, dt_min: f64 },
    #[error("topology failure at t = {time}: {reason}")]
    Topology { time: f64, reason: String },
    #[error("invalid effective-motion input: {0}")]
    InvalidEffective(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
