//! Bounded-depth evaluation of order sentences in a computable structure.
//!
//! Each quantifier ranges over a finite candidate set built from the cell
//! decomposition of the values of the quantified formula's free variables.
//! Vacuous quantifiers are evaluated once. Within a cell every atom is
//! interchangeable (a finite permutation of the naturals preserving the cells
//! is an automorphism of all three structures), so a candidate is determined
//! by how much of each cell it takes: up to `cap` explicitly peeled least
//! elements, the cell minus up to `cap` least elements, and for infinite
//! cells of the eventually periodic structure one canonical half.

use std::collections::BTreeMap;

use crate::formula::{Atom, Formula, Term};

use super::element::{EvPeriodic, LatticeElement, StructureKind};
use super::{ModelError, StructureHandle};

/// Evaluates a closed order sentence with quantifier depth at most `budget`.
pub fn bounded_eval(s: &StructureHandle, f: &Formula, budget: u32) -> Result<bool, ModelError> {
    bounded_eval_with(s, f, budget, &BTreeMap::new())
}

/// [`bounded_eval`] with values for the free variables.
pub fn bounded_eval_with(
    s: &StructureHandle,
    f: &Formula,
    budget: u32,
    env: &BTreeMap<String, LatticeElement>,
) -> Result<bool, ModelError> {
    let depth = f.quantifier_depth() as u32;
    if depth > budget {
        return Err(ModelError::Budget { depth, budget });
    }
    if let Some(v) = f.free_variables().into_iter().find(|v| !env.contains_key(v)) {
        return Err(ModelError::FreeVariable(v));
    }
    let mut bound = Vec::new();
    for (name, value) in env {
        if value.kind() != s.kind {
            return Err(ModelError::KindMismatch);
        }
        bound.push((name.clone(), value.to_periodic()));
    }
    let ev = Evaluator {
        kind: s.kind,
        t0: f.max_count_constant().max(2),
    };
    ev.eval(f, &mut bound)
}

struct Evaluator {
    kind: StructureKind,
    /// Cell-part size from which the atoms no longer tell parts apart; the
    /// threshold doubles with each remaining quantifier round.
    t0: u32,
}

type Env = Vec<(String, EvPeriodic)>;

impl Evaluator {
    fn term(&self, t: &Term, env: &Env) -> Result<EvPeriodic, ModelError> {
        Ok(match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, e)| e.clone())
                .ok_or_else(|| ModelError::FreeVariable(v.clone()))?,
            Term::Zero => EvPeriodic::empty(),
            Term::One => {
                self.need_top()?;
                EvPeriodic::full()
            }
            Term::Join(a, b) => self.term(a, env)?.combine(&self.term(b, env)?, |x, y| x || y),
            Term::Meet(a, b) => self.term(a, env)?.combine(&self.term(b, env)?, |x, y| x && y),
            Term::Diff(a, b) => self.term(a, env)?.combine(&self.term(b, env)?, |x, y| x && !y),
            Term::Comp(a) => {
                self.need_top()?;
                self.term(a, env)?.complement()
            }
        })
    }

    fn need_top(&self) -> Result<(), ModelError> {
        if self.kind.has_top() {
            Ok(())
        } else {
            Err(ModelError::NoTop)
        }
    }

    fn atom(&self, a: &Atom, env: &Env) -> Result<bool, ModelError> {
        let at_least = |e: &EvPeriodic, k: u32| e.finite_len().is_none_or(|n| n >= k as usize);
        Ok(match a {
            Atom::Eq(x, y) => self.term(x, env)? == self.term(y, env)?,
            Atom::Leq(x, y) => {
                self.term(x, env)?.combine(&self.term(y, env)?, |p, q| p && !q) == EvPeriodic::empty()
            }
            Atom::Count(k, t) => at_least(&self.term(t, env)?, *k),
            Atom::Atm(t) => {
                let e = self.term(t, env)?;
                at_least(&e, 1) && !at_least(&e, 2)
            }
            Atom::Ideal(t) => {
                if self.kind == StructureKind::FinSet {
                    return Err(ModelError::NoIdeal);
                }
                self.term(t, env)?.is_finite()
            }
            Atom::Mem(..) | Atom::Set(_) => return Err(ModelError::Signature(a.symbol().into())),
        })
    }

    fn eval(&self, f: &Formula, env: &mut Env) -> Result<bool, ModelError> {
        match f {
            Formula::Atom(a) => self.atom(a, env),
            Formula::Not(a) => Ok(!self.eval(a, env)?),
            Formula::And(a, b) => Ok(self.eval(a, env)? && self.eval(b, env)?),
            Formula::Or(a, b) => Ok(self.eval(a, env)? || self.eval(b, env)?),
            Formula::Implies(a, b) => Ok(!self.eval(a, env)? || self.eval(b, env)?),
            Formula::Iff(a, b) => Ok(self.eval(a, env)? == self.eval(b, env)?),
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                let exists = matches!(f, Formula::Exists(..));
                if !body.free_variables().contains(v) {
                    return self.eval(body, env);
                }
                let free = f.free_variables();
                let mut relevant: Env = Vec::new();
                for (name, e) in env.iter().rev() {
                    if free.contains(name) && !relevant.iter().any(|(n, _)| n == name) {
                        relevant.push((name.clone(), e.clone()));
                    }
                }
                let rounds = f.quantifier_depth() as u32;
                let cap = (self.t0 as usize) << (rounds - 1);
                let options = self.cell_options(&relevant, cap);
                let mut idx = vec![0usize; options.len()];
                loop {
                    let candidate = idx
                        .iter()
                        .zip(&options)
                        .fold(EvPeriodic::empty(), |acc, (&i, opts)| acc.combine(&opts[i], |x, y| x || y));
                    env.push((v.clone(), candidate));
                    let value = self.eval(body, env);
                    env.pop();
                    if value? == exists {
                        return Ok(exists);
                    }
                    let mut c = 0;
                    while c < idx.len() {
                        idx[c] += 1;
                        if idx[c] < options[c].len() {
                            break;
                        }
                        idx[c] = 0;
                        c += 1;
                    }
                    if c == idx.len() {
                        return Ok(!exists);
                    }
                }
            }
        }
    }

    /// Per nonempty cell of the given elements, the parts a new element may
    /// take from it.
    fn cell_options(&self, env: &Env, cap: usize) -> Vec<Vec<EvPeriodic>> {
        let mut elems: Vec<&EvPeriodic> = Vec::new();
        for (_, e) in env {
            if !elems.contains(&e) {
                elems.push(e);
            }
        }
        let mut out = Vec::new();
        for c in 0..1usize << elems.len() {
            let cell = elems.iter().enumerate().fold(EvPeriodic::full(), |acc, (i, e)| {
                if c >> i & 1 == 1 {
                    acc.combine(e, |x, y| x && y)
                } else {
                    acc.combine(e, |x, y| x && !y)
                }
            });
            if cell == EvPeriodic::empty() {
                continue;
            }
            out.push(self.parts(&cell, cap));
        }
        out
    }

    fn parts(&self, cell: &EvPeriodic, cap: usize) -> Vec<EvPeriodic> {
        let mut parts = Vec::new();
        let size = cell.finite_len();
        let small = size.is_some_and(|n| n <= 2 * cap + 1);
        let peel = if small { size.unwrap_or(0) } else { cap };
        let least = cell.first(peel);
        for a in 0..=peel {
            parts.push(EvPeriodic::finite(least[..a.min(least.len())].iter().copied()));
        }
        // The outside of the finite-set lattice is not an element: only
        // finite parts of it are available.
        let outside = self.kind == StructureKind::FinSet && size.is_none();
        if !small && !outside {
            for j in 0..=cap {
                parts.push(cell.combine(&EvPeriodic::finite(least[..j].iter().copied()), |x, y| x && !y));
            }
        }
        if self.kind == StructureKind::EvPeriodic {
            if let Some(h) = cell.half() {
                parts.push(h);
            }
        }
        parts
    }
}
