use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("determinant cb - ad = {det} deviates from 1 by more than 1e-12")]
    Determinant { det: Complex64 },

    #[error("k must be nonzero")]
    ZeroK,

    #[error("omega must be nonzero")]
    ZeroOmega,

    #[error("singular time: |{what}| = {modulus:e} is below 1e-14")]
    SingularTime { what: &'static str, modulus: f64 },

    #[error("branch cut: {0}")]
    Branch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not of the Galilean form [[1, lambda], [0, 1]]")]
    Shape,

    #[error("exponent real part {0} exceeds the representable range")]
    Range(f64),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("theta series tail bound {0:e} exceeds 1e-12")]
    Convergence(f64),

    #[error("quadrature tail estimate {0:e} exceeds 1e-8")]
    Quadrature(f64),

    #[error("no sign change of the boundary value in [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },

    #[error("operator families differ")]
    FamilyMismatch,

    #[error(
        "operator of order {needed} needs partials the function does not provide (max {available})"
    )]
    Order { needed: usize, available: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),
}
