//! Membership structures obtained from a lattice by coding each ideal element
//! as an atom: `x ∈* y` iff the singleton `{code(x)}` lies below `y`, with
//! `code(S) = Σ_{n ∈ S} 2^n`.

use std::collections::BTreeSet;

use serde::Serialize;

use super::element::{LatticeElement, StructureKind};
use super::{ModelError, StructureHandle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EpsilonModel {
    pub base: StructureHandle,
}

impl EpsilonModel {
    /// Whether `x` is in the coder's domain (a set of the model).
    pub fn is_set(&self, x: &LatticeElement) -> bool {
        x.is_finite()
    }

    /// The element coded by `n`.
    pub fn decode(&self, n: u64) -> LatticeElement {
        LatticeElement::finite(self.base.kind, decode(n))
    }
}

/// Binary code of a finite set, when it fits in 64 bits.
pub fn code(x: &LatticeElement) -> Result<Option<u64>, ModelError> {
    let members = x.finite_members().ok_or_else(|| ModelError::NotIdeal(x.to_string()))?;
    Ok(code_of(&members))
}

fn code_of(members: &BTreeSet<u64>) -> Option<u64> {
    members
        .iter()
        .try_fold(0u64, |acc, &n| (n < 64).then(|| acc | 1 << n))
}

/// The finite set with binary code `n`.
pub fn decode(n: u64) -> BTreeSet<u64> {
    (0..64).filter(|i| n >> i & 1 == 1).collect()
}

/// `x ∈* y`: the atom coding `x` lies below `y`. Codes beyond 64 bits are
/// handled exactly: they exceed every listed exception, so membership is
/// decided by their residue in the periodic part.
pub fn epsilon_membership(m: &EpsilonModel, x: &LatticeElement, y: &LatticeElement) -> Result<bool, ModelError> {
    if x.kind() != m.base.kind || y.kind() != m.base.kind {
        return Err(ModelError::KindMismatch);
    }
    let members = x.finite_members().ok_or_else(|| ModelError::NotIdeal(x.to_string()))?;
    Ok(match code_of(&members) {
        Some(c) => y.contains(c),
        None => {
            let p = y.to_periodic();
            !p.is_finite() && p.contains_huge(|i| members.contains(&u64::from(i)))
        }
    })
}

/// The membership structure on the finite-set lattice: a model of BAS.
pub fn build_bas_model() -> EpsilonModel {
    EpsilonModel {
        base: StructureHandle::new(StructureKind::FinSet),
    }
}

/// The membership structure on eventually periodic sets with the finite
/// sets as the sets: a model of BAC+.
pub fn build_bac_plus_model() -> EpsilonModel {
    EpsilonModel {
        base: StructureHandle::new(StructureKind::EvPeriodic),
    }
}
