use thiserror::Error;

use crate::ast::AstError;
use crate::model::ModelError;
use crate::smtlib::ParseError;

/// Top-level error of the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Ast(#[from] AstError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
