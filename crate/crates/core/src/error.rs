use std::path::PathBuf;

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("divisor constant term {0} is below the division tolerance")]
    DivisorVanishesAtOrigin(Complex64),

    #[error("|z| = {modulus} exceeds the evaluation radius {r_max}")]
    OutsideEvaluationDisk { modulus: f64, r_max: f64 },

    #[error("substitution scale |c| = {0} exceeds 1")]
    ScaleExceedsUnit(f64),

    #[error("series coefficients must be finite and non-empty")]
    NonFiniteCoefficients,

    #[error("closed form hits a pole at z = {0}")]
    PoleHit(Complex64),

    #[error("|z| = {0} is not inside the open unit disk")]
    OutsideDisk(f64),

    #[error("p(0) = {0}, expected 1 for a Herglotz function")]
    NotNormalizedP(Complex64),

    #[error("parameter {name} = {value} is outside {range}")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("phi must satisfy phi(0) = 0 and phi'(0) = 1, got ({c0}, {c1})")]
    PhiNotNormalized { c0: Complex64, c1: Complex64 },

    #[error("|omega(0)| = {0} is not below 1")]
    DilatationNotSubunit(f64),

    #[error("harmonic map violates h(0) = g(0) = 0 or h'(0) != 0")]
    MapNotNormalized,

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("convolution denominator vanishes at z = {0}")]
    DegenerateDenominator(Complex64),

    #[error("cannot infer which theorem applies: {0}")]
    SpecAmbiguous(String),

    #[error("closed curve has {0} points, need at least 16")]
    TooFewPoints(usize),

    #[error("failed to write {path}: {source}")]
    WriteFailed {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Shorthand for range checks on real parameters.
pub(crate) fn check_range(name: &'static str, value: f64, ok: bool, range: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange { name, value, range })
    }
}
