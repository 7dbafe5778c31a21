use thiserror::Error;

/// Errors raised by model construction, discretization and the checks built
/// on top of them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point z = {z} lies outside the domain [{a}, {b}]")]
    Domain { z: f64, a: f64, b: f64 },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid coefficient profile: {0}")]
    Profile(String),

    #[error("coercivity violated: smallest eigenvalue {min_eigenvalue} at z = {z}")]
    Coercivity { min_eigenvalue: f64, z: f64 },

    #[error("invalid interface path: {0}")]
    Path(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("trace inconsistency (co-energy channel 2 must be continuous at the interface): jump {jump} exceeds {tol}")]
    Trace { jump: f64, tol: f64 },

    #[error("constraint rows are rank deficient (condition {condition:e})")]
    RankDeficient { condition: f64 },

    #[error("lambda = {lambda} is not in the resolvent set of the discrete generator")]
    Singular { lambda: f64 },

    #[error("stability certificate refused: {0}; see the counterexample module for what goes wrong without the ratio assumption")]
    CertificateRefused(String),

    #[error("unresolved integrand: {0}")]
    Resolution(String),

    #[error("regrid rejected: interface moved {shift} but at most {limit} per step is allowed; reduce dt")]
    Regrid { shift: f64, limit: f64 },

    #[error("time step failed at t = {t}: {reason}")]
    Step { t: f64, reason: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
