use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid number field: {0}")]
    InvalidField(String),
    #[error("elements belong to different number fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not a sublattice basis: columns are linearly dependent")]
    NotSublatticeBasis,
    #[error("tau not in upper half plane")]
    TauNotInUpperHalfPlane,
    #[error("inconsistent complex structure: J*J != -I")]
    InconsistentComplexStructure,
    #[error("not a complex subtorus: {0}")]
    NotComplexSubtorus(String),
    #[error("H^4 trivial in dimension one")]
    TrivialTopCohomology,
    #[error("degree overflow: {0}")]
    DegreeOverflow(String),
    #[error("not a Hodge class: form is not compatible with the complex structure")]
    NotHodgeClass,
    #[error("not an antisymmetric matrix")]
    NotAlternating,
    #[error("class is not effective")]
    NotEffective,
    #[error("impossible case: {0}")]
    ImpossibleCase(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema { path: path.into(), message: message.into() }
    }

    /// True for errors caused by malformed or contradictory user input.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::InconsistentComplexStructure | Error::ImpossibleCase(_))
    }
}
