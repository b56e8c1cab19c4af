use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by an identically zero expression")]
    ZeroDenominator,
    #[error("expression has a pole at y = 0")]
    PoleAtOrigin,
    #[error("no binding for atom `{0}`")]
    UnboundAtom(String),
    #[error("denominator {value:e} below threshold {eps:e}")]
    DivisionNearZero { value: f64, eps: f64 },
    #[error("Laurent functions (depth {0}) have no eight-component form")]
    LaurentNotSupported(i64),
    #[error("z-power {k} outside the window [{lo}, {hi}]")]
    OutOfWindow { k: i64, lo: i64, hi: i64 },
    #[error("composite transform left the canonical family: {0}")]
    NotInCanonicalForm(String),
    #[error("the fermionic block D is singular")]
    SingularD,
    #[error("truncation order {have} too shallow, need {need}")]
    TruncationTooShallow { have: i64, need: i64 },
    #[error("component `{slot}` is not negligible on the domain boundary (relative {relative:e})")]
    SupportViolation { slot: String, relative: f64 },
    #[error("non-finite integrand value at ({0}, {1})")]
    NonFiniteValue(f64, f64),
    #[error("no valid transform after {0} attempts")]
    ResampleExhausted(usize),
    #[error("total-derivative decomposition does not reproduce the obstruction")]
    DecompositionMismatch,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
