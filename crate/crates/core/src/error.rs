use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("L >= 1 required: configuration has no branches")]
    NoBranches,
    #[error("branch {branch}: rho = {value} is outside [0, 1]")]
    RhoOutOfRange { branch: usize, value: f64 },
    #[error("branch {branch}: gamma = {value} is negative")]
    NegativeGamma { branch: usize, value: f64 },
    #[error("branch {branch}: {field} is not finite")]
    NonFinite { branch: usize, field: &'static str },
    #[error("branch {branch}: rho * gamma = 0 makes the optimum-detector partial fractions degenerate")]
    DegenerateBranch { branch: usize },
    #[error("power fraction eta = {0} must lie strictly inside (0, 1)")]
    EtaOutOfRange(f64),
    #[error("argument {0} is outside the function domain")]
    Domain(f64),
    #[error("invalid Doppler spectrum: {0}")]
    InvalidDoppler(String),
    #[error("quadrature order {0} is below the minimum of 2")]
    QuadratureOrder(usize),
    #[error("no convergence: last iterate {last}, previous iterate {previous}")]
    NoConvergence { last: f64, previous: f64 },
    #[error("{0}")]
    InvalidArgument(String),
}
