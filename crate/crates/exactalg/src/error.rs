use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgError {
    #[error("division is not exact")]
    NotDivisible,
    #[error("zero input")]
    ZeroInput,
    #[error("degree {0} is too low for a discriminant")]
    DegreeTooLow(usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("element is not invertible")]
    NotInvertible,
}
