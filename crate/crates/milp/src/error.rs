use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("variable {var} ({name}) has invalid bounds [{lower}, {upper}]")]
    BadBounds {
        var: usize,
        name: String,
        lower: f64,
        upper: f64,
    },
    #[error("non-finite {what}")]
    NonFinite { what: String },
    #[error("row {row} references unknown variable {var}")]
    UnknownVariable { row: usize, var: usize },
    #[error("solver limits must be positive: {0}")]
    BadLimits(&'static str),
}
