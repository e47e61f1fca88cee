use thiserror::Error;

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("division by zero")]
    DivisionByZero,

    #[error("transfer needs at least one capacity limit")]
    EmptyCaps,

    #[error("capacity limit {0} is below 1 bit")]
    CapBelowOne(u128),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("parameter `{param}` does not apply to {accelerator}")]
    NotApplicable { param: String, accelerator: String },

    #[error("model violation: {0}")]
    ModelViolation(String),

    #[error("arithmetic overflow while evaluating `{0}`")]
    Overflow(String),

    #[error("{0}")]
    Config(String),

    #[error("{0}")]
    Io(String),
}

impl ModelError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ModelError::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
