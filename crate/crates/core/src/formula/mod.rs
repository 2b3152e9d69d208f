//! Formulas over the set, class, order and order-with-ideal signatures.

mod ast;
mod normal;
mod parse;
mod render;

pub use ast::{alpha_equivalent, Atom, Formula, Signature, Term};
pub use normal::{miniscope, nnf, to_prenex_nnf};
pub use parse::parse_formula;
pub use render::{render, render_term};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("symbol `{symbol}` is not available in signature {signature}")]
    Signature { symbol: String, signature: Signature },
}

#[cfg(test)]
mod tests;
