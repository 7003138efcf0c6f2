use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("unknown group `{0}`")]
    UnknownGroup(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("point {point:?} lies outside the chart domain of `{chart}`")]
    Domain { chart: String, point: Vec<f64> },
    #[error("state left the chart domain at t = {time}")]
    DomainExit { time: f64 },
    #[error("step size underflow at t = {time} (stiff or singular field)")]
    Stiffness { time: f64 },
    #[error("quadrature did not converge: estimate {estimate}, error {error}")]
    Quadrature { estimate: f64, error: f64 },
    #[error("non-regular element: {0}")]
    Regularity(String),
    #[error("inversion failed: {0}")]
    Inversion(String),
    #[error("turning point inside requested range at q' = {location}")]
    Branch { location: f64 },
    #[error("scope: {0}")]
    Scope(String),
    #[error("chart defect: {0}")]
    ChartDefect(String),
    #[error("coverage: {0}")]
    Coverage(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
