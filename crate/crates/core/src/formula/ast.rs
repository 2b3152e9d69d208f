use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// The four first-order languages formulas are written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Signature {
    /// Membership and equality.
    #[serde(rename = "SET")]
    Set,
    /// `SET` plus the unary sethood predicate `S`.
    #[serde(rename = "CLASS")]
    Class,
    /// Partial order `sub`, equality, lattice terms and the counting predicates.
    #[serde(rename = "ORDER")]
    Order,
    /// `ORDER` plus the unary ideal predicate `I`.
    #[serde(rename = "ORDER_IDEAL")]
    OrderIdeal,
}

impl Signature {
    pub const ALL: [Signature; 4] = [
        Signature::Set,
        Signature::Class,
        Signature::Order,
        Signature::OrderIdeal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Signature::Set => "SET",
            Signature::Class => "CLASS",
            Signature::Order => "ORDER",
            Signature::OrderIdeal => "ORDER_IDEAL",
        }
    }

    /// Primitive predicate symbols with their arities. `Atm` and `C[k]` are
    /// listed for the order signatures even though they are definable.
    pub fn predicates(self) -> &'static [(&'static str, usize)] {
        match self {
            Signature::Set => &[("in", 2), ("=", 2)],
            Signature::Class => &[("in", 2), ("=", 2), ("S", 1)],
            Signature::Order => &[("sub", 2), ("=", 2), ("Atm", 1), ("C", 1)],
            Signature::OrderIdeal => &[("sub", 2), ("=", 2), ("Atm", 1), ("C", 1), ("I", 1)],
        }
    }

    pub fn allows_terms(self) -> bool {
        matches!(self, Signature::Order | Signature::OrderIdeal)
    }

    pub fn is_membership(self) -> bool {
        matches!(self, Signature::Set | Signature::Class)
    }

    fn allows_predicate(self, symbol: &str) -> bool {
        self.predicates().iter().any(|(s, _)| *s == symbol)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Signature {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "SET" => Ok(Signature::Set),
            "CLASS" => Ok(Signature::Class),
            "ORDER" => Ok(Signature::Order),
            "ORDER_IDEAL" => Ok(Signature::OrderIdeal),
            other => Err(format!("unknown signature `{other}`")),
        }
    }
}

/// Lattice terms. Only bare variables are legal outside the order signatures.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Zero,
    One,
    Join(Box<Term>, Box<Term>),
    Meet(Box<Term>, Box<Term>),
    Diff(Box<Term>, Box<Term>),
    Comp(Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn join(a: Term, b: Term) -> Term {
        Term::Join(Box::new(a), Box::new(b))
    }

    pub fn meet(a: Term, b: Term) -> Term {
        Term::Meet(Box::new(a), Box::new(b))
    }

    pub fn diff(a: Term, b: Term) -> Term {
        Term::Diff(Box::new(a), Box::new(b))
    }

    pub fn comp(a: Term) -> Term {
        Term::Comp(Box::new(a))
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_compound(&self) -> bool {
        matches!(self, Term::Join(..) | Term::Meet(..) | Term::Diff(..) | Term::Comp(_))
    }

    /// True when the term mentions the top element, either as `1` or through `~`.
    pub fn mentions_top(&self) -> bool {
        match self {
            Term::One | Term::Comp(_) => true,
            Term::Var(_) | Term::Zero => false,
            Term::Join(a, b) | Term::Meet(a, b) | Term::Diff(a, b) => {
                a.mentions_top() || b.mentions_top()
            }
        }
    }

    pub fn variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Zero | Term::One => {}
            Term::Join(a, b) | Term::Meet(a, b) | Term::Diff(a, b) => {
                a.variables(out);
                b.variables(out);
            }
            Term::Comp(a) => a.variables(out),
        }
    }

    fn rename(&self, map: &BTreeMap<String, String>) -> Term {
        match self {
            Term::Var(v) => Term::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
            Term::Zero => Term::Zero,
            Term::One => Term::One,
            Term::Join(a, b) => Term::join(a.rename(map), b.rename(map)),
            Term::Meet(a, b) => Term::meet(a.rename(map), b.rename(map)),
            Term::Diff(a, b) => Term::diff(a.rename(map), b.rename(map)),
            Term::Comp(a) => Term::comp(a.rename(map)),
        }
    }
}

/// Atomic formulas.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    /// `t in t`
    Mem(Term, Term),
    /// `t = t`
    Eq(Term, Term),
    /// `t sub t`
    Leq(Term, Term),
    /// `S(v)`
    Set(Term),
    /// `I(t)`
    Ideal(Term),
    /// `Atm(t)`
    Atm(Term),
    /// `C[k](t)`: at least `k` atoms below `t`.
    Count(u32, Term),
}

impl Atom {
    pub fn symbol(&self) -> &'static str {
        match self {
            Atom::Mem(..) => "in",
            Atom::Eq(..) => "=",
            Atom::Leq(..) => "sub",
            Atom::Set(_) => "S",
            Atom::Ideal(_) => "I",
            Atom::Atm(_) => "Atm",
            Atom::Count(..) => "C",
        }
    }

    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Mem(a, b) | Atom::Eq(a, b) | Atom::Leq(a, b) => vec![a, b],
            Atom::Set(a) | Atom::Ideal(a) | Atom::Atm(a) | Atom::Count(_, a) => vec![a],
        }
    }

    fn map_terms(&self, f: &impl Fn(&Term) -> Term) -> Atom {
        match self {
            Atom::Mem(a, b) => Atom::Mem(f(a), f(b)),
            Atom::Eq(a, b) => Atom::Eq(f(a), f(b)),
            Atom::Leq(a, b) => Atom::Leq(f(a), f(b)),
            Atom::Set(a) => Atom::Set(f(a)),
            Atom::Ideal(a) => Atom::Ideal(f(a)),
            Atom::Atm(a) => Atom::Atm(f(a)),
            Atom::Count(k, a) => Atom::Count(*k, f(a)),
        }
    }
}

/// First-order formulas over one of the four signatures.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Formula {
        Formula::Atom(a)
    }

    pub fn mem(a: &str, b: &str) -> Formula {
        Formula::Atom(Atom::Mem(Term::var(a), Term::var(b)))
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Atom(Atom::Eq(a, b))
    }

    pub fn leq(a: Term, b: Term) -> Formula {
        Formula::Atom(Atom::Leq(a, b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(v: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(body))
    }

    pub fn exists(v: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(body))
    }

    pub fn is_quantifier(&self) -> bool {
        matches!(self, Formula::Forall(..) | Formula::Exists(..))
    }

    pub fn is_binary(&self) -> bool {
        matches!(
            self,
            Formula::And(..) | Formula::Or(..) | Formula::Implies(..) | Formula::Iff(..)
        )
    }

    /// Maximum nesting of quantifiers.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(a) => a.quantifier_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
            Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.quantifier_depth(),
        }
    }

    /// Number of binders (not nesting) in the formula.
    pub fn quantifier_count(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(a) => a.quantifier_count(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.quantifier_count() + b.quantifier_count()
            }
            Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.quantifier_count(),
        }
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) => {
                let mut vars = BTreeSet::new();
                for t in a.terms() {
                    t.variables(&mut vars);
                }
                out.extend(vars.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                bound.push(v.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Every variable name occurring in the formula, free or bound.
    pub fn all_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| {
            for t in a.terms() {
                t.variables(&mut out);
            }
        });
        self.visit_binders(&mut |v| {
            out.insert(v.to_string());
        });
        out
    }

    pub fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a Atom)) {
        match self {
            Formula::Atom(a) => f(a),
            Formula::Not(a) => a.visit_atoms(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
            Formula::Forall(_, a) | Formula::Exists(_, a) => a.visit_atoms(f),
        }
    }

    pub fn visit_binders<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            Formula::Atom(_) => {}
            Formula::Not(a) => a.visit_binders(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit_binders(f);
                b.visit_binders(f);
            }
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                f(v);
                a.visit_binders(f);
            }
        }
    }

    /// Largest `k` of any `C[k]` atom, counting `Atm` as `C[2]`.
    pub fn max_count_constant(&self) -> u32 {
        let mut max = 0;
        self.visit_atoms(&mut |a| match a {
            Atom::Atm(_) => max = max.max(2),
            Atom::Count(k, _) => max = max.max(*k),
            _ => {}
        });
        max
    }

    /// Checks that every atom belongs to `sig` and that terms are used only
    /// where the signature has them.
    pub fn check_signature(&self, sig: Signature) -> Result<(), super::FormulaError> {
        let mut result = Ok(());
        self.visit_atoms(&mut |a| {
            if result.is_err() {
                return;
            }
            if !sig.allows_predicate(a.symbol()) {
                result = Err(super::FormulaError::Signature {
                    symbol: a.symbol().to_string(),
                    signature: sig,
                });
                return;
            }
            if let Atom::Count(0, _) = a {
                result = Err(super::FormulaError::Signature {
                    symbol: "C[0]".to_string(),
                    signature: sig,
                });
                return;
            }
            for t in a.terms() {
                if let Some(sym) = foreign_term_symbol(t, sig) {
                    result = Err(super::FormulaError::Signature {
                        symbol: sym.to_string(),
                        signature: sig,
                    });
                    return;
                }
            }
        });
        result
    }

    /// Renames free occurrences of variables according to `map`.
    pub fn rename_free(&self, map: &BTreeMap<String, String>) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(a.map_terms(&|t| t.rename(map))),
            Formula::Not(a) => Formula::not(a.rename_free(map)),
            Formula::And(a, b) => Formula::and(a.rename_free(map), b.rename_free(map)),
            Formula::Or(a, b) => Formula::or(a.rename_free(map), b.rename_free(map)),
            Formula::Implies(a, b) => Formula::implies(a.rename_free(map), b.rename_free(map)),
            Formula::Iff(a, b) => Formula::iff(a.rename_free(map), b.rename_free(map)),
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                let mut inner = map.clone();
                inner.remove(v);
                let body = Box::new(a.rename_free(&inner));
                match self {
                    Formula::Forall(..) => Formula::Forall(v.clone(), body),
                    _ => Formula::Exists(v.clone(), body),
                }
            }
        }
    }

    /// Renames binders so that no name is bound twice and no bound name
    /// coincides with a free one. Names that are already unique are kept.
    pub fn uniquify_binders(&self) -> Formula {
        let mut used: BTreeSet<String> = self.free_variables();
        let mut taken = used.clone();
        self.visit_binders(&mut |v| {
            taken.insert(v.to_string());
        });
        self.uniquify_rec(&BTreeMap::new(), &mut used, &taken)
    }

    fn uniquify_rec(
        &self,
        env: &BTreeMap<String, String>,
        used: &mut BTreeSet<String>,
        taken: &BTreeSet<String>,
    ) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(a.map_terms(&|t| t.rename(env))),
            Formula::Not(a) => Formula::not(a.uniquify_rec(env, used, taken)),
            Formula::And(a, b) => {
                let a = a.uniquify_rec(env, used, taken);
                Formula::and(a, b.uniquify_rec(env, used, taken))
            }
            Formula::Or(a, b) => {
                let a = a.uniquify_rec(env, used, taken);
                Formula::or(a, b.uniquify_rec(env, used, taken))
            }
            Formula::Implies(a, b) => {
                let a = a.uniquify_rec(env, used, taken);
                Formula::implies(a, b.uniquify_rec(env, used, taken))
            }
            Formula::Iff(a, b) => {
                let a = a.uniquify_rec(env, used, taken);
                Formula::iff(a, b.uniquify_rec(env, used, taken))
            }
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                let fresh = if used.contains(v) {
                    fresh_name(v, |n| used.contains(n) || taken.contains(n))
                } else {
                    v.clone()
                };
                used.insert(fresh.clone());
                let mut inner = env.clone();
                inner.insert(v.clone(), fresh.clone());
                let body = Box::new(a.uniquify_rec(&inner, used, taken));
                match self {
                    Formula::Forall(..) => Formula::Forall(fresh, body),
                    _ => Formula::Exists(fresh, body),
                }
            }
        }
    }

    /// True when the binders of the formula are pairwise distinct and disjoint
    /// from its free variables.
    pub fn has_unique_binders(&self) -> bool {
        let free = self.free_variables();
        let mut seen = BTreeSet::new();
        let mut ok = true;
        self.visit_binders(&mut |v| {
            if free.contains(v) || !seen.insert(v.to_string()) {
                ok = false;
            }
        });
        ok
    }
}

fn foreign_term_symbol(t: &Term, sig: Signature) -> Option<&'static str> {
    if sig.allows_terms() {
        return None;
    }
    match t {
        Term::Var(_) => None,
        Term::Zero => Some("0"),
        Term::One => Some("1"),
        Term::Join(..) => Some("\\/"),
        Term::Meet(..) => Some("/\\"),
        Term::Diff(..) => Some("-"),
        Term::Comp(_) => Some("~"),
    }
}

/// `base_1`, `base_2`, ... until `clash` says the name is free.
pub(crate) fn fresh_name(base: &str, clash: impl Fn(&str) -> bool) -> String {
    let stem = match base.rfind('_') {
        Some(i) if base[i + 1..].chars().all(|c| c.is_ascii_digit()) && i + 1 < base.len() => {
            &base[..i]
        }
        _ => base,
    };
    (1..)
        .map(|k| format!("{stem}_{k}"))
        .find(|n| !clash(n))
        .expect("unbounded name supply")
}

/// Alpha-equivalence: equal up to a consistent renaming of bound variables.
pub fn alpha_equivalent(a: &Formula, b: &Formula) -> bool {
    fn terms(a: &Term, b: &Term, env: &[(String, String)]) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                let bx = env.iter().rposition(|(l, _)| l == x);
                let by = env.iter().rposition(|(_, r)| r == y);
                match (bx, by) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Term::Zero, Term::Zero) | (Term::One, Term::One) => true,
            (Term::Join(a1, a2), Term::Join(b1, b2))
            | (Term::Meet(a1, a2), Term::Meet(b1, b2))
            | (Term::Diff(a1, a2), Term::Diff(b1, b2)) => terms(a1, b1, env) && terms(a2, b2, env),
            (Term::Comp(x), Term::Comp(y)) => terms(x, y, env),
            _ => false,
        }
    }

    fn atoms(a: &Atom, b: &Atom, env: &[(String, String)]) -> bool {
        if std::mem::discriminant(a) != std::mem::discriminant(b) {
            return false;
        }
        if let (Atom::Count(k, _), Atom::Count(l, _)) = (a, b) {
            if k != l {
                return false;
            }
        }
        a.terms()
            .iter()
            .zip(b.terms())
            .all(|(x, y)| terms(x, y, env))
    }

    fn go(a: &Formula, b: &Formula, env: &mut Vec<(String, String)>) -> bool {
        match (a, b) {
            (Formula::Atom(x), Formula::Atom(y)) => atoms(x, y, env),
            (Formula::Not(x), Formula::Not(y)) => go(x, y, env),
            (Formula::And(a1, a2), Formula::And(b1, b2))
            | (Formula::Or(a1, a2), Formula::Or(b1, b2))
            | (Formula::Implies(a1, a2), Formula::Implies(b1, b2))
            | (Formula::Iff(a1, a2), Formula::Iff(b1, b2)) => go(a1, b1, env) && go(a2, b2, env),
            (Formula::Forall(x, a), Formula::Forall(y, b))
            | (Formula::Exists(x, a), Formula::Exists(y, b)) => {
                env.push((x.clone(), y.clone()));
                let r = go(a, b, env);
                env.pop();
                r
            }
            _ => false,
        }
    }

    go(a, b, &mut Vec::new())
}
