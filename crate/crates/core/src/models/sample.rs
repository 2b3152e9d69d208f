//! Sampled verification of set- and class-theoretic axioms in membership
//! models.
//!
//! Outer universal quantifiers are instantiated with seeded random elements.
//! Existentials are witnessed from a pool of elements constructed from the
//! bound ones with the operations used in the model-construction proofs
//! (joins, meets, differences, complements, adjoining a coded element,
//! halving a non-set); inner universals are checked on the pool plus a fixed
//! bank of random elements. Universal instances are limited to elements whose
//! code fits in 64 bits, since adjoining a larger code is not representable.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::formula::{nnf, Atom, Formula, Term};

use super::element::{lattice_op, EvPeriodic, LatticeElement, LatticeOp, StructureKind};
use super::epsilon::{code, decode, epsilon_membership, EpsilonModel};
use super::ModelError;

/// Naturals used as members of sampled elements; their decodes are subsets
/// of `{0, .., 4}`.
const MEMBER_BOUND: u64 = 24;
/// Random elements tried, besides the pool, for each inner universal.
const INNER_SAMPLES: usize = 50;
/// Counterexamples kept in a report.
const MAX_REPORTED: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleReport {
    pub samples: usize,
    pub seed: u64,
    /// Number of failing instances.
    pub failures: usize,
    /// Up to ten failing instantiations of the outer universals.
    pub counterexamples: Vec<String>,
}

/// A random element of the given structure.
pub fn random_element(kind: StructureKind, rng: &mut impl Rng) -> LatticeElement {
    let finite = |rng: &mut dyn rand::RngCore| -> BTreeSet<u64> {
        let n = rng.gen_range(0..=6);
        (0..n).map(|_| rng.gen_range(0..MEMBER_BOUND)).collect()
    };
    let roll = rng.gen_range(0..10);
    let e = match kind {
        StructureKind::FinSet => EvPeriodic::finite(finite(rng)),
        _ if roll < 4 => EvPeriodic::finite(finite(rng)),
        _ if roll < 6 || kind == StructureKind::FinCofin => EvPeriodic::cofinite(finite(rng)),
        _ => {
            let level = rng.gen_range(1..=3u32);
            let mask: Vec<bool> = (0..1usize << level).map(|_| rng.gen_bool(0.5)).collect();
            let periodic = EvPeriodic::from_parts(level, mask, BTreeSet::new(), BTreeSet::new());
            let add = EvPeriodic::finite(finite(rng));
            let remove = EvPeriodic::finite(finite(rng));
            periodic.combine(&add, |a, b| a || b).combine(&remove, |a, b| a && !b)
        }
    };
    LatticeElement::from_periodic(kind, e).expect("sampled element fits its structure")
}

/// Checks `axiom` on `samples` random instantiations of its outer universal
/// quantifiers.
pub fn axiom_check_sample(m: &EpsilonModel, axiom: &Formula, samples: usize, seed: u64) -> Result<SampleReport, ModelError> {
    let mut body = nnf(axiom);
    let mut outer = Vec::new();
    while let Formula::Forall(v, b) = body {
        outer.push(v);
        body = *b;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checker = Checker {
        m,
        extra: (0..INNER_SAMPLES).map(|_| random_element(m.base.kind, &mut rng)).collect(),
    };
    let mut report = SampleReport {
        samples,
        seed,
        failures: 0,
        counterexamples: Vec::new(),
    };
    for _ in 0..samples {
        let mut env: Vec<(String, LatticeElement)> = outer
            .iter()
            .map(|v| (v.clone(), random_element(m.base.kind, &mut rng)))
            .collect();
        if !checker.eval(&body, &mut env)? {
            report.failures += 1;
            if report.counterexamples.len() < MAX_REPORTED {
                let shown: Vec<String> = env.iter().map(|(v, e)| format!("{v} = {e}")).collect();
                report.counterexamples.push(shown.join(", "));
            }
        }
    }
    Ok(report)
}

/// Whether `w` is a non-set or a set with a 64-bit code.
fn codable(w: &LatticeElement) -> bool {
    !matches!(code(w), Ok(None))
}

struct Checker<'a> {
    m: &'a EpsilonModel,
    extra: Vec<LatticeElement>,
}

type Env = Vec<(String, LatticeElement)>;

impl Checker<'_> {
    fn kind(&self) -> StructureKind {
        self.m.base.kind
    }

    fn lookup<'e>(&self, t: &Term, env: &'e Env) -> Result<&'e LatticeElement, ModelError> {
        let v = t.as_var().ok_or_else(|| ModelError::Signature(t.to_string()))?;
        env.iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|(_, e)| e)
            .ok_or_else(|| ModelError::FreeVariable(v.to_string()))
    }

    fn atom(&self, a: &Atom, env: &Env) -> Result<bool, ModelError> {
        Ok(match a {
            Atom::Mem(x, y) => {
                let x = self.lookup(x, env)?;
                self.m.is_set(x) && epsilon_membership(self.m, x, self.lookup(y, env)?)?
            }
            Atom::Eq(x, y) => self.lookup(x, env)?.to_periodic() == self.lookup(y, env)?.to_periodic(),
            Atom::Set(x) => self.m.is_set(self.lookup(x, env)?),
            other => return Err(ModelError::Signature(other.symbol().into())),
        })
    }

    fn eval(&self, f: &Formula, env: &mut Env) -> Result<bool, ModelError> {
        match f {
            Formula::Atom(a) => self.atom(a, env),
            Formula::Not(a) => Ok(!self.eval(a, env)?),
            Formula::And(a, b) | Formula::Or(a, b) => {
                let conj = matches!(f, Formula::And(..));
                let (first, second) = if a.quantifier_count() <= b.quantifier_count() { (a, b) } else { (b, a) };
                if self.eval(first, env)? != conj {
                    return Ok(!conj);
                }
                self.eval(second, env)
            }
            Formula::Implies(a, b) => Ok(!self.eval(a, env)? || self.eval(b, env)?),
            Formula::Iff(a, b) => Ok(self.eval(a, env)? == self.eval(b, env)?),
            Formula::Exists(v, body) => {
                let mut candidates = self.constructed(env);
                for p in self.probes(env) {
                    if !candidates.contains(&p) {
                        candidates.push(p);
                    }
                }
                for w in candidates {
                    env.push((v.clone(), w));
                    let value = self.eval(body, env);
                    env.pop();
                    if value? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Forall(v, body) => {
                let probes: Vec<LatticeElement> = self.probes(env).into_iter().filter(codable).collect();
                for w in &probes {
                    if !self.holds_at(v, w, body, env)? {
                        return Ok(false);
                    }
                }
                for w in self.constructed(env).iter().chain(&self.extra) {
                    if codable(w) && !probes.contains(w) && !self.holds_at(v, w, body, env)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    fn bound(env: &Env) -> Vec<&LatticeElement> {
        let mut bound: Vec<&LatticeElement> = Vec::new();
        for (_, e) in env {
            if !bound.contains(&e) {
                bound.push(e);
            }
        }
        bound
    }

    fn holds_at(&self, v: &str, w: &LatticeElement, body: &Formula, env: &mut Env) -> Result<bool, ModelError> {
        env.push((v.to_string(), w.clone()));
        let value = self.eval(body, env);
        env.pop();
        value
    }

    /// Sets that tell bound elements apart: decodes of their least members,
    /// of the least members of their differences and of their least
    /// non-members, and the atoms coding them.
    fn probes(&self, env: &Env) -> Vec<LatticeElement> {
        let kind = self.kind();
        let bound = Self::bound(env);
        let mut out = Vec::new();
        let mut add = |e: LatticeElement| {
            if !out.contains(&e) {
                out.push(e);
            }
        };
        for a in &bound {
            let p = a.to_periodic();
            for n in p.first(3) {
                add(self.m.decode(n));
            }
            if let Some(n) = p.least_non_member() {
                add(self.m.decode(n));
            }
            for b in &bound {
                for n in p.combine(&b.to_periodic(), |x, y| x && !y).first(2) {
                    add(self.m.decode(n));
                }
            }
            if let Ok(Some(c)) = code(a) {
                add(LatticeElement::finite(kind, [c]));
            }
        }
        out
    }

    /// Witness candidates built with the lattice operations.
    fn constructed(&self, env: &Env) -> Vec<LatticeElement> {
        let kind = self.kind();
        let bound = Self::bound(env);
        let mut out: Vec<LatticeElement> = Vec::new();
        let mut add = |e: Result<LatticeElement, ModelError>| {
            if let Ok(e) = e {
                if !out.contains(&e) {
                    out.push(e);
                }
            }
        };
        add(Ok(LatticeElement::empty(kind)));
        for a in &bound {
            if let Some(h) = a.to_periodic().half() {
                add(LatticeElement::from_periodic(kind, a.to_periodic().combine(&h, |x, y| x && !y)));
                add(LatticeElement::from_periodic(kind, h));
            }
            add(lattice_op(LatticeOp::Comp, a, None));
        }
        for a in &bound {
            for b in &bound {
                add(lattice_op(LatticeOp::Diff, a, Some(b)));
                add(lattice_op(LatticeOp::Join, a, Some(b)));
                add(lattice_op(LatticeOp::Meet, a, Some(b)));
                if let Ok(Some(c)) = code(b) {
                    add(lattice_op(LatticeOp::Join, a, Some(&LatticeElement::finite(kind, [c]))));
                }
            }
        }
        for a in bound {
            add(Ok(a.clone()));
        }
        out
    }
}

/// Compares the lattice order with the subset relation induced by
/// membership on `pairs` sampled pairs; returns the number of disagreements.
/// Membership-derived inclusion is checked on every coded set whose code is
/// at most one full period beyond all exceptions of either element, which
/// decides it for eventually periodic sets.
pub fn subset_agreement(m: &EpsilonModel, pairs: usize, seed: u64) -> Result<usize, ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0;
    for _ in 0..pairs {
        let a = random_element(m.base.kind, &mut rng);
        let b = if rng.gen_bool(0.3) {
            lattice_op(LatticeOp::Meet, &a, Some(&random_element(m.base.kind, &mut rng)))?
        } else {
            random_element(m.base.kind, &mut rng)
        };
        let (pa, pb) = (a.to_periodic(), b.to_periodic());
        let horizon = pa.max_exception().max(pb.max_exception()).map_or(0, |n| n + 1)
            + (1u64 << pa.level().max(pb.level()));
        let mut induced = true;
        for n in 0..horizon {
            let z = LatticeElement::finite(m.base.kind, decode(n));
            if epsilon_membership(m, &z, &a)? && !epsilon_membership(m, &z, &b)? {
                induced = false;
                break;
            }
        }
        if induced != a.is_subset(&b) {
            mismatches += 1;
        }
    }
    Ok(mismatches)
}
