//! Computable structures for the order theories, the membership models built
//! from them by coding, and a bounded-depth evaluator.

mod element;
mod epsilon;
mod eval;
mod sample;

#[cfg(test)]
mod tests;

use serde::Serialize;
use thiserror::Error;

pub use element::{
    atom_count_at_least, is_ideal, lattice_op, parse_element, EvPeriodic, LatticeElement, LatticeOp,
    StructureKind, MAX_LEVEL,
};
pub use epsilon::{build_bac_plus_model, build_bas_model, code, decode, epsilon_membership, EpsilonModel};
pub use eval::{bounded_eval, bounded_eval_with};
pub use sample::{axiom_check_sample, random_element, subset_agreement, SampleReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("the finite-set lattice has no top element or complement")]
    NoTop,
    #[error("the finite-set lattice has no ideal predicate")]
    NoIdeal,
    #[error("operands come from different structures")]
    KindMismatch,
    #[error("`{element}` is not an element of the {structure} structure")]
    NotInStructure { element: String, structure: &'static str },
    #[error("`{0}` is not a set, so it has no code")]
    NotIdeal(String),
    #[error("invalid element literal: {0}")]
    Literal(String),
    #[error("quantifier depth {depth} exceeds budget {budget}")]
    Budget { depth: u32, budget: u32 },
    #[error("unbound variable `{0}`")]
    FreeVariable(String),
    #[error("symbol `{0}` cannot be evaluated here")]
    Signature(String),
}

/// A computable structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructureHandle {
    pub kind: StructureKind,
}

impl StructureHandle {
    pub fn new(kind: StructureKind) -> Self {
        StructureHandle { kind }
    }

    /// Parses an element literal in this structure.
    pub fn element(&self, text: &str) -> Result<LatticeElement, ModelError> {
        parse_element(text, self.kind)
    }
}

/// Finite and cofinite subsets of the naturals, with the finite sets as the
/// ideal.
pub fn build_fincofin_completion() -> StructureHandle {
    StructureHandle::new(StructureKind::FinCofin)
}
