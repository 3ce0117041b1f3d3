use thiserror::Error;

use super::validate::ValidationReport;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("{n_movers} movers do not fit on {tiles} tile centers")]
    TooManyMovers { n_movers: usize, tiles: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("scene failed validation:\n{0}")]
    Validation(ValidationReport),
}
