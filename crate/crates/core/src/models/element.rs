//! Elements of the three computable structures: finite sets, finite and
//! cofinite sets, and eventually periodic sets of naturals.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Largest period exponent an eventually periodic set may use.
pub const MAX_LEVEL: u32 = 20;

/// An eventually periodic subset of the naturals in canonical form:
/// `(P ∪ add) − remove` where `P = {n : mask[n mod 2^level]}`, `add` is
/// disjoint from `P`, `remove` is inside `P`, and `level` is minimal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EvPeriodic {
    level: u32,
    mask: Vec<bool>,
    add: BTreeSet<u64>,
    remove: BTreeSet<u64>,
}

impl EvPeriodic {
    pub fn empty() -> Self {
        EvPeriodic {
            level: 0,
            mask: vec![false],
            add: BTreeSet::new(),
            remove: BTreeSet::new(),
        }
    }

    pub fn full() -> Self {
        EvPeriodic::empty().complement()
    }

    pub fn finite(set: impl IntoIterator<Item = u64>) -> Self {
        EvPeriodic {
            add: set.into_iter().collect(),
            ..EvPeriodic::empty()
        }
    }

    pub fn cofinite(missing: impl IntoIterator<Item = u64>) -> Self {
        EvPeriodic {
            remove: missing.into_iter().collect(),
            ..EvPeriodic::full()
        }
    }

    /// `{n : n ≡ residue (mod 2^level)}`.
    pub fn residue_class(level: u32, residue: u64) -> Result<Self, ModelError> {
        if level > MAX_LEVEL {
            return Err(ModelError::Literal(format!("period 2^{level} is too large")));
        }
        let size = 1usize << level;
        let mut mask = vec![false; size];
        mask[(residue % size as u64) as usize] = true;
        Ok(EvPeriodic::from_parts(level, mask, BTreeSet::new(), BTreeSet::new()))
    }

    /// Builds the canonical form of `(P ∪ add) − remove`.
    pub fn from_parts(level: u32, mask: Vec<bool>, add: BTreeSet<u64>, remove: BTreeSet<u64>) -> Self {
        debug_assert_eq!(mask.len(), 1usize << level);
        let mut e = EvPeriodic {
            level,
            mask,
            add: BTreeSet::new(),
            remove: BTreeSet::new(),
        };
        for &n in add.union(&remove) {
            let actual = !remove.contains(&n) && (add.contains(&n) || e.periodic(n));
            e.set_exception(n, actual);
        }
        e.reduce();
        e
    }

    fn set_exception(&mut self, n: u64, actual: bool) {
        if actual != self.periodic(n) {
            if actual {
                self.add.insert(n);
            } else {
                self.remove.insert(n);
            }
        }
    }

    fn reduce(&mut self) {
        while self.level > 0 {
            let half = self.mask.len() / 2;
            if self.mask[..half] != self.mask[half..] {
                break;
            }
            self.mask.truncate(half);
            self.level -= 1;
        }
    }

    fn periodic(&self, n: u64) -> bool {
        self.mask[(n % self.mask.len() as u64) as usize]
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn additions(&self) -> &BTreeSet<u64> {
        &self.add
    }

    pub fn removals(&self) -> &BTreeSet<u64> {
        &self.remove
    }

    pub fn contains(&self, n: u64) -> bool {
        self.add.contains(&n) || (!self.remove.contains(&n) && self.periodic(n))
    }

    pub fn is_finite(&self) -> bool {
        self.mask.iter().all(|b| !b)
    }

    /// Membership of a natural too large for `u64`, given its residue modulo
    /// `2^level`: such a number lies beyond every exception.
    pub fn contains_huge(&self, residue_bits: impl Fn(u32) -> bool) -> bool {
        let r = (0..self.level).fold(0usize, |acc, i| acc | usize::from(residue_bits(i)) << i);
        self.mask[r]
    }

    /// Number of elements when finite.
    pub fn finite_len(&self) -> Option<usize> {
        self.is_finite().then_some(self.add.len())
    }

    /// Largest exception, if any.
    pub fn max_exception(&self) -> Option<u64> {
        self.add.iter().chain(&self.remove).max().copied()
    }

    fn mask_at(&self, level: u32) -> Vec<bool> {
        (0..1usize << level).map(|r| self.mask[r % self.mask.len()]).collect()
    }

    /// Pointwise Boolean combination.
    pub fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        let level = self.level.max(other.level);
        let mask: Vec<bool> = self
            .mask_at(level)
            .into_iter()
            .zip(other.mask_at(level))
            .map(|(a, b)| op(a, b))
            .collect();
        let mut e = EvPeriodic {
            level,
            mask,
            add: BTreeSet::new(),
            remove: BTreeSet::new(),
        };
        let points: BTreeSet<u64> = self
            .add
            .iter()
            .chain(&self.remove)
            .chain(&other.add)
            .chain(&other.remove)
            .copied()
            .collect();
        for n in points {
            e.set_exception(n, op(self.contains(n), other.contains(n)));
        }
        e.reduce();
        e
    }

    pub fn complement(&self) -> Self {
        EvPeriodic {
            level: self.level,
            mask: self.mask.iter().map(|b| !b).collect(),
            add: self.remove.clone(),
            remove: self.add.clone(),
        }
    }

    /// The least `k` elements (fewer if the set is smaller).
    pub fn first(&self, k: usize) -> Vec<u64> {
        if self.is_finite() {
            return self.add.iter().take(k).copied().collect();
        }
        (0u64..).filter(|&n| self.contains(n)).take(k).collect()
    }

    /// The least natural outside the set, if any.
    pub fn least_non_member(&self) -> Option<u64> {
        if self.mask.iter().all(|&b| b) && self.remove.is_empty() {
            return None;
        }
        (0u64..).find(|&n| !self.contains(n))
    }

    /// Elements `n` of an infinite set whose bit `level` is 0: an infinite
    /// subset with infinite complement inside the set.
    pub fn half(&self) -> Option<Self> {
        if self.is_finite() || self.level >= MAX_LEVEL {
            return None;
        }
        let level = self.level + 1;
        let size = 1usize << self.level;
        let lower = EvPeriodic::from_parts(
            level,
            (0..2 * size).map(|r| r < size).collect(),
            BTreeSet::new(),
            BTreeSet::new(),
        );
        Some(self.combine(&lower, |a, b| a && b))
    }

    /// Canonical antichain of binary words (least significant bit first)
    /// whose residue classes make up the periodic part.
    pub fn words(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_words(0, 0, &mut out);
        out
    }

    fn collect_words(&self, len: u32, value: usize, out: &mut Vec<String>) {
        let covered: Vec<bool> = (0..self.mask.len())
            .filter(|r| r % (1 << len) == value)
            .map(|r| self.mask[r])
            .collect();
        if covered.iter().all(|&b| b) {
            out.push((0..len).map(|i| if value >> i & 1 == 1 { '1' } else { '0' }).collect());
        } else if covered.iter().any(|&b| b) {
            self.collect_words(len + 1, value, out);
            self.collect_words(len + 1, value | 1 << len, out);
        }
    }
}

fn write_set(f: &mut fmt::Formatter<'_>, s: &BTreeSet<u64>) -> fmt::Result {
    let items: Vec<String> = s.iter().map(u64::to_string).collect();
    write!(f, "{{{}}}", items.join(","))
}

impl fmt::Display for EvPeriodic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_finite() {
            return write_set(f, &self.add);
        }
        if self.level == 0 && !self.remove.is_empty() {
            write!(f, "cofinite")?;
            return write_set(f, &self.remove);
        }
        let classes: Vec<String> = self
            .words()
            .iter()
            .map(|w| {
                let value = w.chars().rev().fold(0u64, |acc, c| acc * 2 + u64::from(c == '1'));
                format!("mod({},{})", 1u64 << w.len(), value)
            })
            .collect();
        write!(f, "{}", classes.join("|"))?;
        if !self.add.is_empty() {
            write!(f, "+")?;
            write_set(f, &self.add)?;
        }
        if !self.remove.is_empty() {
            write!(f, "-")?;
            write_set(f, &self.remove)?;
        }
        Ok(())
    }
}

/// The kind of computable structure an element belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StructureKind {
    /// Finite subsets of the naturals: a model of mereology.
    #[serde(rename = "FINSET_LATTICE")]
    FinSet,
    /// Finite and cofinite sets with the finite ideal.
    #[serde(rename = "FINCOFIN")]
    FinCofin,
    /// Eventually periodic sets with the finite ideal.
    #[serde(rename = "EVPERIODIC")]
    EvPeriodic,
}

impl StructureKind {
    pub fn name(self) -> &'static str {
        match self {
            StructureKind::FinSet => "finset",
            StructureKind::FinCofin => "fincofin",
            StructureKind::EvPeriodic => "evperiodic",
        }
    }

    pub fn has_top(self) -> bool {
        self != StructureKind::FinSet
    }
}

impl std::str::FromStr for StructureKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "finset" | "finset_lattice" => Ok(StructureKind::FinSet),
            "fincofin" => Ok(StructureKind::FinCofin),
            "evperiodic" => Ok(StructureKind::EvPeriodic),
            _ => Err(ModelError::Literal(format!("unknown structure `{s}`"))),
        }
    }
}

/// An element of one of the computable structures.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LatticeElement {
    FinSet(BTreeSet<u64>),
    /// `set` itself, or its complement when `cofinite`.
    FinCofin { set: BTreeSet<u64>, cofinite: bool },
    EvPeriodic(EvPeriodic),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeOp {
    Join,
    Meet,
    Diff,
    Comp,
}

impl LatticeElement {
    pub fn kind(&self) -> StructureKind {
        match self {
            LatticeElement::FinSet(_) => StructureKind::FinSet,
            LatticeElement::FinCofin { .. } => StructureKind::FinCofin,
            LatticeElement::EvPeriodic(_) => StructureKind::EvPeriodic,
        }
    }

    /// The same set as an eventually periodic set.
    pub fn to_periodic(&self) -> EvPeriodic {
        match self {
            LatticeElement::FinSet(s) => EvPeriodic::finite(s.iter().copied()),
            LatticeElement::FinCofin { set, cofinite: false } => EvPeriodic::finite(set.iter().copied()),
            LatticeElement::FinCofin { set, cofinite: true } => EvPeriodic::cofinite(set.iter().copied()),
            LatticeElement::EvPeriodic(e) => e.clone(),
        }
    }

    /// Re-expresses an eventually periodic set in the given structure.
    pub fn from_periodic(kind: StructureKind, e: EvPeriodic) -> Result<Self, ModelError> {
        match kind {
            StructureKind::EvPeriodic => Ok(LatticeElement::EvPeriodic(e)),
            StructureKind::FinSet if e.is_finite() => Ok(LatticeElement::FinSet(e.add)),
            StructureKind::FinCofin if e.is_finite() => Ok(LatticeElement::FinCofin {
                set: e.add,
                cofinite: false,
            }),
            StructureKind::FinCofin if e.level == 0 => Ok(LatticeElement::FinCofin {
                set: e.remove,
                cofinite: true,
            }),
            _ => Err(ModelError::NotInStructure {
                element: e.to_string(),
                structure: kind.name(),
            }),
        }
    }

    pub fn empty(kind: StructureKind) -> Self {
        LatticeElement::from_periodic(kind, EvPeriodic::empty()).expect("every structure has 0")
    }

    pub fn finite(kind: StructureKind, set: impl IntoIterator<Item = u64>) -> Self {
        LatticeElement::from_periodic(kind, EvPeriodic::finite(set)).expect("every structure has finite sets")
    }

    pub fn top(kind: StructureKind) -> Result<Self, ModelError> {
        if !kind.has_top() {
            return Err(ModelError::NoTop);
        }
        LatticeElement::from_periodic(kind, EvPeriodic::full())
    }

    pub fn contains(&self, n: u64) -> bool {
        match self {
            LatticeElement::FinSet(s) => s.contains(&n),
            LatticeElement::FinCofin { set, cofinite } => set.contains(&n) != *cofinite,
            LatticeElement::EvPeriodic(e) => e.contains(n),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            LatticeElement::FinSet(_) => true,
            LatticeElement::FinCofin { cofinite, .. } => !cofinite,
            LatticeElement::EvPeriodic(e) => e.is_finite(),
        }
    }

    /// The elements of a finite set.
    pub fn finite_members(&self) -> Option<BTreeSet<u64>> {
        match self {
            LatticeElement::FinSet(s) | LatticeElement::FinCofin { set: s, cofinite: false } => Some(s.clone()),
            LatticeElement::EvPeriodic(e) if e.is_finite() => Some(e.add.clone()),
            _ => None,
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.to_periodic()
            .combine(&other.to_periodic(), |a, b| a && !b)
            == EvPeriodic::empty()
    }
}

impl fmt::Display for LatticeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeElement::FinSet(s) => write_set(f, s),
            LatticeElement::FinCofin { set, cofinite } => {
                if *cofinite {
                    write!(f, "cofinite")?;
                }
                write_set(f, set)
            }
            LatticeElement::EvPeriodic(e) => e.fmt(f),
        }
    }
}

/// Applies a lattice operation; `b` is ignored for complement.
pub fn lattice_op(op: LatticeOp, a: &LatticeElement, b: Option<&LatticeElement>) -> Result<LatticeElement, ModelError> {
    let kind = a.kind();
    let pa = a.to_periodic();
    let result = if op == LatticeOp::Comp {
        if !kind.has_top() {
            return Err(ModelError::NoTop);
        }
        pa.complement()
    } else {
        let b = b.ok_or_else(|| ModelError::Literal("missing second operand".into()))?;
        if b.kind() != kind {
            return Err(ModelError::KindMismatch);
        }
        let pb = b.to_periodic();
        match op {
            LatticeOp::Join => pa.combine(&pb, |x, y| x || y),
            LatticeOp::Meet => pa.combine(&pb, |x, y| x && y),
            _ => pa.combine(&pb, |x, y| x && !y),
        }
    };
    LatticeElement::from_periodic(kind, result)
}

/// Whether the element has at least `k` atoms (singletons) below it.
pub fn atom_count_at_least(a: &LatticeElement, k: u64) -> bool {
    match a.finite_members() {
        Some(s) => s.len() as u64 >= k,
        None => true,
    }
}

/// Membership in the finite-set ideal.
pub fn is_ideal(a: &LatticeElement) -> Result<bool, ModelError> {
    if a.kind() == StructureKind::FinSet {
        return Err(ModelError::NoIdeal);
    }
    Ok(a.is_finite())
}

/// Parses `{1,2}`, `cofinite{1,2}` or `mod(4,0)|mod(8,3)+{7}-{0}` into an
/// element of `kind`.
pub fn parse_element(text: &str, kind: StructureKind) -> Result<LatticeElement, ModelError> {
    let e = LiteralParser { s: text.trim().as_bytes(), pos: 0 }.element()?;
    LatticeElement::from_periodic(kind, e)
}

struct LiteralParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl LiteralParser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T, ModelError> {
        Err(ModelError::Literal(format!(
            "{msg} at offset {} in `{}`",
            self.pos,
            String::from_utf8_lossy(self.s)
        )))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, lit: &str) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<(), ModelError> {
        if self.eat(lit) {
            Ok(())
        } else {
            self.err(&format!("expected `{lit}`"))
        }
    }

    fn number(&mut self) -> Result<u64, ModelError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        match std::str::from_utf8(&self.s[start..self.pos]).ok().and_then(|t| t.parse().ok()) {
            Some(n) => Ok(n),
            None => self.err("expected a natural number"),
        }
    }

    fn set(&mut self) -> Result<BTreeSet<u64>, ModelError> {
        self.expect("{")?;
        let mut out = BTreeSet::new();
        if self.eat("}") {
            return Ok(out);
        }
        loop {
            out.insert(self.number()?);
            if self.eat("}") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn class(&mut self) -> Result<EvPeriodic, ModelError> {
        self.expect("(")?;
        let modulus = self.number()?;
        self.expect(",")?;
        let residue = self.number()?;
        self.expect(")")?;
        if !modulus.is_power_of_two() {
            return self.err("modulus must be a power of two");
        }
        EvPeriodic::residue_class(modulus.trailing_zeros(), residue)
    }

    fn element(&mut self) -> Result<EvPeriodic, ModelError> {
        let mut e = if self.eat("cofinite") {
            EvPeriodic::cofinite(self.set()?)
        } else if self.eat("mod") {
            let mut e = self.class()?;
            while self.eat("|") {
                self.expect("mod")?;
                e = e.combine(&self.class()?, |a, b| a || b);
            }
            e
        } else {
            EvPeriodic::finite(self.set()?)
        };
        if self.eat("+") {
            e = e.combine(&EvPeriodic::finite(self.set()?), |a, b| a || b);
        }
        if self.eat("-") {
            e = e.combine(&EvPeriodic::finite(self.set()?), |a, b| a && !b);
        }
        self.skip_ws();
        if self.pos != self.s.len() {
            return self.err("unexpected trailing input");
        }
        Ok(e)
    }
}
