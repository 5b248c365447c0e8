//! Deterministic generator and evaluator for a document-level chart
//! question-answering dataset.
//!
//! The pipeline runs taxonomy → table → chart → SVG → templated questions →
//! programmatic answers → yes/no balancing → annotated page. Every random
//! choice flows from one master seed through [`rng::derive_seed`], so a
//! config and seed fully determine the output bytes.

pub mod answer;
pub mod bundled;
pub mod chart;
pub mod debias;
pub mod document;
mod error;
pub mod eval;
pub mod hierarchy;
pub mod pipeline;
pub mod question;
pub mod render;
pub mod rng;
pub mod table;

pub use answer::{solve, AtomicOp, OpName, SolutionProgram, Value};
pub use chart::{build_chart, ChartFamily, ChartInfo, ChartSpec, ChartSubtype, ColorCatalog};
pub use debias::{debias, BiasReport};
pub use document::{compose_page, Annotation, BBox, DocElement, DocumentRecord, ElementKind, ImagePool, LayoutConfig, Schema};
pub use error::{Error, Result};
pub use eval::{evaluate, judge, EvalReport, Prediction};
pub use hierarchy::{build_hierarchy, EntityHierarchy};
pub use pipeline::{assign_split, generate, stats, DatasetManifest, GenConfig, StatsReport};
pub use question::{AnswerType, Difficulty, QuestionInfo, QuestionTemplate, QuestionType, Split};
pub use render::{render, SvgDoc};
pub use table::DataTable;
