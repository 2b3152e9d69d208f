//! Decision procedures for stratified set and class sentences via
//! Boolean-algebra quantifier elimination, with computable models.

pub mod cli;
pub mod corpus;
pub mod decide;
pub mod formula;
pub mod models;
pub mod random;
pub mod stratification;
pub mod translate;

use thiserror::Error;

/// Any failure surfaced by the library or the command line.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Formula(#[from] formula::FormulaError),
    #[error(transparent)]
    Stratification(#[from] stratification::StratificationError),
    #[error(transparent)]
    Translate(#[from] translate::TranslateError),
    #[error(transparent)]
    Decide(#[from] decide::DecideError),
    #[error(transparent)]
    Model(#[from] models::ModelError),
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error("{0}")]
    Usage(String),
}
