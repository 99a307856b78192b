use crate::graded::GradedMap;
use crate::scalar::Field;

/// Errors raised by structural problems in the input data.
///
/// Mathematical failures (an identity that does not hold) are reported
/// through check reports instead, except where an operation cannot produce
/// a meaningful value at all (e.g. `perturb` with a non Maurer-Cartan term).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(Field, Field),
    #[error("invalid scalar {text:?}: {reason}")]
    Scalar { text: String, reason: String },
    #[error("not a complex: d∘d is nonzero on source degree {0}")]
    NotAComplex(i64),
    #[error("perturbation fails the Maurer-Cartan equation")]
    NotMaurerCartan { residual: Box<GradedMap> },
    #[error("window [{lo}, {hi}] is not stable: {reason}")]
    Unstable { lo: i64, hi: i64, reason: String },
    #[error("support: {0}")]
    Support(String),
    #[error("internal consistency: {0}")]
    Inconsistent(String),
    #[error("not one-sided: {0}")]
    NotOneSided(String),
    #[error("retract identity gf = id + dh fails")]
    Retract { residual: Box<GradedMap> },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
