use thiserror::Error;

use crate::answer::{AnswerError, ProgramError};
use crate::chart::{ChartError, ColorError};
use crate::document::{AnnotationError, DocumentError, SchemaError};
use crate::eval::EvalError;
use crate::hierarchy::HierarchyError;
use crate::pipeline::PipelineError;
use crate::question::{QuestionError, RegistryError};
use crate::render::RenderError;
use crate::table::TableError;

/// Any error raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Color(#[from] ColorError),
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error(transparent)]
    Answer(#[from] AnswerError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Question(#[from] QuestionError),
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Annotation(#[from] AnnotationError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
