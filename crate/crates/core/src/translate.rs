//! Formula translations: `tau` (SET to ORDER), `chi` (CLASS to ORDER_IDEAL),
//! subset expansion (ORDER to SET) and relativization to the ideal.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::formula::{Atom, Formula, Signature, Term};
use crate::stratification::{infer_stratification, LevelAssignment, StratificationError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("formula is not 2-stratified by the given assignment: {0}")]
    NotTwoStratified(String),
    #[error("symbol `{0}` is not allowed here")]
    Signature(String),
    #[error("expected a variable, found term `{0}`")]
    NonVariable(String),
    #[error(transparent)]
    Stratification(#[from] StratificationError),
}

/// A 2-valued level assignment plus a supply of fresh names.
#[derive(Debug, Clone)]
pub struct TranslationContext {
    pub levels: LevelAssignment,
    next_fresh: usize,
}

impl TranslationContext {
    pub fn new(levels: LevelAssignment) -> Self {
        TranslationContext {
            levels,
            next_fresh: 0,
        }
    }

    /// Next name of the form `w<k>` not in `avoid`.
    pub fn fresh(&mut self, avoid: &BTreeSet<String>) -> String {
        loop {
            let name = format!("w{}", self.next_fresh);
            self.next_fresh += 1;
            if !avoid.contains(&name) {
                return name;
            }
        }
    }
}

fn check_two_stratified(f: &Formula, levels: &LevelAssignment) -> Result<(), TranslateError> {
    for v in f.all_variables() {
        match levels.level(&v) {
            None => return Err(TranslateError::NotTwoStratified(format!("no level for `{v}`"))),
            Some(l) if l > 1 => {
                return Err(TranslateError::NotTwoStratified(format!(
                    "`{v}` has level {l}"
                )))
            }
            _ => {}
        }
    }
    if !crate::stratification::satisfies(f, &levels.levels)? {
        return Err(TranslateError::NotTwoStratified(
            "a membership or equality constraint is violated".into(),
        ));
    }
    Ok(())
}

/// `tau` of a SET formula under the 2-stratification `levels`.
pub fn tau(f: &Formula, levels: &LevelAssignment) -> Result<Formula, TranslateError> {
    let mut bad = None;
    f.visit_atoms(&mut |a| {
        if matches!(a, Atom::Set(_)) {
            bad = Some("S");
        }
    });
    if let Some(sym) = bad {
        return Err(TranslateError::Signature(sym.into()));
    }
    check_two_stratified(f, levels)?;
    translate(f, levels)
}

/// `chi` of a CLASS formula: `tau` extended with `S(u)` to `I(u)`.
pub fn chi(f: &Formula, levels: &LevelAssignment) -> Result<Formula, TranslateError> {
    check_two_stratified(f, levels)?;
    translate(f, levels)
}

fn var_of(t: &Term) -> Result<&str, TranslateError> {
    t.as_var()
        .ok_or_else(|| TranslateError::NonVariable(t.to_string()))
}

fn translate(f: &Formula, levels: &LevelAssignment) -> Result<Formula, TranslateError> {
    let rec = |g: &Formula| translate(g, levels);
    Ok(match f {
        Formula::Atom(a) => match a {
            Atom::Mem(u, v) => {
                let (u, v) = (var_of(u)?, var_of(v)?);
                Formula::and(
                    Formula::Atom(Atom::Atm(Term::var(u))),
                    Formula::leq(Term::var(u), Term::var(v)),
                )
            }
            Atom::Eq(u, v) => Formula::eq(Term::var(var_of(u)?), Term::var(var_of(v)?)),
            Atom::Set(u) => Formula::Atom(Atom::Ideal(Term::var(var_of(u)?))),
            other => return Err(TranslateError::Signature(other.symbol().into())),
        },
        Formula::Not(a) => Formula::not(rec(a)?),
        Formula::And(a, b) => Formula::and(rec(a)?, rec(b)?),
        Formula::Or(a, b) => Formula::or(rec(a)?, rec(b)?),
        Formula::Implies(a, b) => Formula::implies(rec(a)?, rec(b)?),
        Formula::Iff(a, b) => Formula::iff(rec(a)?, rec(b)?),
        Formula::Exists(v, a) => {
            let body = rec(a)?;
            if levels.level(v) == Some(0) {
                Formula::exists(v.clone(), Formula::and(atm(v), body))
            } else {
                Formula::exists(v.clone(), body)
            }
        }
        Formula::Forall(v, a) => {
            let body = rec(a)?;
            if levels.level(v) == Some(0) {
                Formula::forall(v.clone(), Formula::implies(atm(v), body))
            } else {
                Formula::forall(v.clone(), body)
            }
        }
    })
}

fn atm(v: &str) -> Formula {
    Formula::Atom(Atom::Atm(Term::var(v)))
}

/// Replaces every `u sub v` by `forall w. (w in u -> w in v)` with a fresh
/// `w` from the reserved `w0, w1, ...` namespace.
pub fn subset_expansion(f: &Formula) -> Result<Formula, TranslateError> {
    let avoid = f.all_variables();
    let mut ctx = TranslationContext::new(LevelAssignment {
        levels: BTreeMap::new(),
        component_count: 0,
        components: Vec::new(),
    });
    expand(f, &avoid, &mut ctx)
}

fn expand(
    f: &Formula,
    avoid: &BTreeSet<String>,
    ctx: &mut TranslationContext,
) -> Result<Formula, TranslateError> {
    Ok(match f {
        Formula::Atom(a) => match a {
            Atom::Leq(u, v) => {
                let (u, v) = (var_of(u)?, var_of(v)?);
                let w = ctx.fresh(avoid);
                Formula::forall(
                    w.clone(),
                    Formula::implies(Formula::mem(&w, u), Formula::mem(&w, v)),
                )
            }
            Atom::Eq(u, v) => Formula::eq(Term::var(var_of(u)?), Term::var(var_of(v)?)),
            other => return Err(TranslateError::Signature(other.symbol().into())),
        },
        Formula::Not(a) => Formula::not(expand(a, avoid, ctx)?),
        Formula::And(a, b) => Formula::and(expand(a, avoid, ctx)?, expand(b, avoid, ctx)?),
        Formula::Or(a, b) => Formula::or(expand(a, avoid, ctx)?, expand(b, avoid, ctx)?),
        Formula::Implies(a, b) => {
            Formula::implies(expand(a, avoid, ctx)?, expand(b, avoid, ctx)?)
        }
        Formula::Iff(a, b) => Formula::iff(expand(a, avoid, ctx)?, expand(b, avoid, ctx)?),
        Formula::Forall(v, a) => Formula::forall(v.clone(), expand(a, avoid, ctx)?),
        Formula::Exists(v, a) => Formula::exists(v.clone(), expand(a, avoid, ctx)?),
    })
}

/// The 2-stratification of a subset expansion: original variables at level 1,
/// the introduced `w` variables at level 0.
pub fn expansion_levels(original: &Formula, expanded: &Formula) -> LevelAssignment {
    let originals = original.all_variables();
    let levels: BTreeMap<String, u32> = expanded
        .all_variables()
        .into_iter()
        .map(|v| {
            let l = u32::from(originals.contains(&v));
            (v, l)
        })
        .collect();
    LevelAssignment {
        component_count: levels.len(),
        components: levels.keys().map(|v| vec![v.clone()]).collect(),
        levels,
    }
}

/// Restricts every quantifier to the ideal.
pub fn relativize_to_ideal(f: &Formula) -> Result<Formula, TranslateError> {
    let mut bad = None;
    f.visit_atoms(&mut |a| {
        if let Atom::Ideal(_) = a {
            bad.get_or_insert("I");
        }
        for t in a.terms() {
            if t.mentions_top() {
                bad.get_or_insert(if contains_comp(t) { "~" } else { "1" });
            }
        }
    });
    if let Some(sym) = bad {
        return Err(TranslateError::Signature(sym.into()));
    }
    Ok(relativize(f))
}

fn contains_comp(t: &Term) -> bool {
    match t {
        Term::Comp(_) => true,
        Term::Join(a, b) | Term::Meet(a, b) | Term::Diff(a, b) => contains_comp(a) || contains_comp(b),
        _ => false,
    }
}

fn relativize(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) => f.clone(),
        Formula::Not(a) => Formula::not(relativize(a)),
        Formula::And(a, b) => Formula::and(relativize(a), relativize(b)),
        Formula::Or(a, b) => Formula::or(relativize(a), relativize(b)),
        Formula::Implies(a, b) => Formula::implies(relativize(a), relativize(b)),
        Formula::Iff(a, b) => Formula::iff(relativize(a), relativize(b)),
        Formula::Forall(v, a) => Formula::forall(
            v.clone(),
            Formula::implies(ideal(v), relativize(a)),
        ),
        Formula::Exists(v, a) => {
            Formula::exists(v.clone(), Formula::and(ideal(v), relativize(a)))
        }
    }
}

fn ideal(v: &str) -> Formula {
    Formula::Atom(Atom::Ideal(Term::var(v)))
}

/// Level assignment used by the SET and CLASS decision pipelines: the
/// canonical stratification with every membership-free component lifted to
/// level 1, so that such variables range over arbitrary elements. `None`
/// when the formula is not 2-stratified.
pub fn pipeline_levels(f: &Formula) -> Result<Option<LevelAssignment>, TranslateError> {
    let report = infer_stratification(f)?;
    let Some(base) = report.assignment() else {
        return Ok(None);
    };
    let mut assignment = base.clone();
    for comp in &base.components {
        if comp.iter().all(|v| base.level(v) == Some(0)) {
            for v in comp {
                assignment.levels.insert(v.clone(), 1);
            }
        }
    }
    if assignment.levels.values().any(|&l| l > 1) {
        return Ok(None);
    }
    Ok(Some(assignment))
}

/// Signature of the image of each translation.
pub fn target_signature(mode: &str) -> Option<Signature> {
    match mode {
        "tau" => Some(Signature::Order),
        "chi" | "relativize" => Some(Signature::OrderIdeal),
        "expand" => Some(Signature::Set),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{alpha_equivalent, parse_formula, render};
    use crate::stratification::is_n_stratified;

    fn parse(text: &str, sig: Signature) -> Formula {
        parse_formula(text, sig).unwrap()
    }

    fn levels(pairs: &[(&str, u32)]) -> LevelAssignment {
        LevelAssignment {
            levels: pairs.iter().map(|(v, l)| (v.to_string(), *l)).collect(),
            component_count: 1,
            components: Vec::new(),
        }
    }

    #[test]
    fn tau_of_membership() {
        let f = parse("x in y", Signature::Set);
        let g = tau(&f, &levels(&[("x", 0), ("y", 1)])).unwrap();
        assert_eq!(render(&g), "Atm(x) & x sub y");
    }

    #[test]
    fn tau_guards_level_zero_quantifiers() {
        let f = parse("exists v. v in y", Signature::Set);
        let g = tau(&f, &levels(&[("v", 0), ("y", 1)])).unwrap();
        assert_eq!(render(&g), "exists v. (Atm(v) & (Atm(v) & v sub y))");
        let h = parse("forall y. y = y", Signature::Set);
        let k = tau(&h, &levels(&[("y", 1)])).unwrap();
        assert_eq!(render(&k), "forall y. y = y");
        let u = parse("forall v. v in y", Signature::Set);
        let w = tau(&u, &levels(&[("v", 0), ("y", 1)])).unwrap();
        assert_eq!(render(&w), "forall v. (Atm(v) -> (Atm(v) & v sub y))");
    }

    #[test]
    fn tau_rejects_bad_levels() {
        let f = parse("x in y", Signature::Set);
        assert!(matches!(
            tau(&f, &levels(&[("x", 1), ("y", 1)])),
            Err(TranslateError::NotTwoStratified(_))
        ));
        assert!(matches!(
            tau(&f, &levels(&[("x", 1), ("y", 2)])),
            Err(TranslateError::NotTwoStratified(_))
        ));
        let g = parse("S(x)", Signature::Class);
        assert!(tau(&g, &levels(&[("x", 1)])).is_err());
    }

    #[test]
    fn chi_examples() {
        let s = parse("S(x)", Signature::Class);
        assert_eq!(render(&chi(&s, &levels(&[("x", 1)])).unwrap()), "I(x)");
        let m = parse("x in y", Signature::Class);
        assert_eq!(
            render(&chi(&m, &levels(&[("x", 0), ("y", 1)])).unwrap()),
            "Atm(x) & x sub y"
        );
        let phi = parse(crate::corpus::INDEPENDENCE_SENTENCE, Signature::Class);
        let sigma = pipeline_levels(&phi).unwrap().unwrap();
        let image = chi(&phi, &sigma).unwrap();
        let literal = parse(
            "forall x. exists y. ((forall z. (Atm(z) -> (Atm(z) & z sub y <-> !(Atm(z) & z sub x)))) & (I(x) | I(y)))",
            Signature::OrderIdeal,
        );
        assert!(alpha_equivalent(&image, &literal), "{}", render(&image));
    }

    #[test]
    fn chi_agrees_with_tau_without_set_atoms() {
        let f = parse(
            "forall x. exists y. forall z. (z in y <-> !(z in x))",
            Signature::Class,
        );
        let sigma = pipeline_levels(&f).unwrap().unwrap();
        assert_eq!(chi(&f, &sigma).unwrap(), tau(&f, &sigma).unwrap());
    }

    #[test]
    fn subset_expansion_examples() {
        let f = parse("x sub y", Signature::Order);
        let g = subset_expansion(&f).unwrap();
        assert_eq!(render(&g), "forall w0. (w0 in x -> w0 in y)");
        assert!(is_n_stratified(&g, 2).unwrap());
        let e = parse("x = y", Signature::Order);
        assert_eq!(render(&subset_expansion(&e).unwrap()), "x = y");
        let t = parse("x \\/ y sub z", Signature::Order);
        assert!(matches!(subset_expansion(&t), Err(TranslateError::NonVariable(_))));
        let a = parse("Atm(x)", Signature::Order);
        assert!(subset_expansion(&a).is_err());
    }

    #[test]
    fn expansion_of_unbounded_is_two_stratified() {
        let f = parse("forall x. exists y. (x sub y & !(x = y))", Signature::Order);
        let g = subset_expansion(&f).unwrap();
        assert_eq!(
            render(&g),
            "forall x. exists y. ((forall w0. (w0 in x -> w0 in y)) & !(x = y))"
        );
        let r = infer_stratification(&g).unwrap();
        assert_eq!(r.min_levels(), Some(2));
        let a = r.assignment().unwrap();
        assert_eq!(a.level("x"), Some(1));
        assert_eq!(a.level("y"), Some(1));
        assert_eq!(a.level("w0"), Some(0));
        let induced = expansion_levels(&f, &g);
        assert!(crate::stratification::satisfies(&g, &induced.levels).unwrap());
    }

    #[test]
    fn fresh_names_avoid_existing_variables() {
        let f = parse("forall w0. w0 sub x", Signature::Order);
        let g = subset_expansion(&f).unwrap();
        assert_eq!(render(&g), "forall w0. forall w1. (w1 in w0 -> w1 in x)");
    }

    #[test]
    fn relativization_examples() {
        let f = parse("forall x. exists y. (x sub y & !(x = y))", Signature::Order);
        assert_eq!(
            render(&relativize_to_ideal(&f).unwrap()),
            "forall x. (I(x) -> exists y. (I(y) & (x sub y & !(x = y))))"
        );
        let g = parse("x = x", Signature::Order);
        assert_eq!(render(&relativize_to_ideal(&g).unwrap()), "x = x");
        let top = parse("forall x. x sub 1", Signature::Order);
        assert_eq!(
            relativize_to_ideal(&top),
            Err(TranslateError::Signature("1".into()))
        );
        let comp = parse("forall x. ~x = x", Signature::Order);
        assert_eq!(
            relativize_to_ideal(&comp),
            Err(TranslateError::Signature("~".into()))
        );
    }

    #[test]
    fn pipeline_lifts_membership_free_components() {
        let f = parse("exists x. forall y. !(y in x)", Signature::Set);
        let a = pipeline_levels(&f).unwrap().unwrap();
        assert_eq!((a.level("y"), a.level("x")), (Some(0), Some(1)));
        let g = parse("exists x. !S(x)", Signature::Class);
        assert_eq!(pipeline_levels(&g).unwrap().unwrap().level("x"), Some(1));
        let h = parse("exists x. x in x", Signature::Set);
        assert_eq!(pipeline_levels(&h).unwrap(), None);
        let ac = parse(crate::corpus::CHOICE_SENTENCE, Signature::Set);
        assert_eq!(pipeline_levels(&ac).unwrap(), None);
    }
}
