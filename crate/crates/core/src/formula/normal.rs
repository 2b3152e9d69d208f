//! Negation normal form, prenex form and miniscoping.

use super::ast::Formula;

/// Negation normal form: only `&`, `|`, quantifiers and possibly negated
/// atoms remain.
pub fn nnf(f: &Formula) -> Formula {
    polar(f, true)
}

fn polar(f: &Formula, positive: bool) -> Formula {
    match f {
        Formula::Atom(_) => {
            if positive {
                f.clone()
            } else {
                Formula::not(f.clone())
            }
        }
        Formula::Not(a) => polar(a, !positive),
        Formula::And(a, b) if positive => Formula::and(polar(a, true), polar(b, true)),
        Formula::And(a, b) => Formula::or(polar(a, false), polar(b, false)),
        Formula::Or(a, b) if positive => Formula::or(polar(a, true), polar(b, true)),
        Formula::Or(a, b) => Formula::and(polar(a, false), polar(b, false)),
        Formula::Implies(a, b) if positive => Formula::or(polar(a, false), polar(b, true)),
        Formula::Implies(a, b) => Formula::and(polar(a, true), polar(b, false)),
        Formula::Iff(a, b) if positive => Formula::and(
            Formula::or(polar(a, false), polar(b, true)),
            Formula::or(polar(a, true), polar(b, false)),
        ),
        Formula::Iff(a, b) => Formula::or(
            Formula::and(polar(a, true), polar(b, false)),
            Formula::and(polar(a, false), polar(b, true)),
        ),
        Formula::Forall(v, a) | Formula::Exists(v, a) => {
            let universal = matches!(f, Formula::Forall(..)) == positive;
            let body = polar(a, positive);
            if universal {
                Formula::forall(v.clone(), body)
            } else {
                Formula::exists(v.clone(), body)
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Q {
    All,
    Ex,
}

/// Prenex form with an NNF matrix. Binders are renamed apart first, so
/// pulling quantifiers outward never captures a variable.
pub fn to_prenex_nnf(f: &Formula) -> Formula {
    let g = nnf(f).uniquify_binders();
    let (prefix, matrix) = pull(&g);
    prefix
        .into_iter()
        .rev()
        .fold(matrix, |acc, (q, v)| match q {
            Q::All => Formula::forall(v, acc),
            Q::Ex => Formula::exists(v, acc),
        })
}

fn pull(f: &Formula) -> (Vec<(Q, String)>, Formula) {
    match f {
        Formula::Forall(v, a) | Formula::Exists(v, a) => {
            let q = if matches!(f, Formula::Forall(..)) {
                Q::All
            } else {
                Q::Ex
            };
            let (mut rest, m) = pull(a);
            rest.insert(0, (q, v.clone()));
            (rest, m)
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            let (mut pa, ma) = pull(a);
            let (pb, mb) = pull(b);
            pa.extend(pb);
            let m = if matches!(f, Formula::And(..)) {
                Formula::and(ma, mb)
            } else {
                Formula::or(ma, mb)
            };
            (pa, m)
        }
        _ => (Vec::new(), f.clone()),
    }
}

/// Pushes quantifiers inward as far as possible on an NNF formula: drops
/// vacuous binders, distributes `exists` over `|` and `forall` over `&`, and
/// moves conjuncts (resp. disjuncts) not mentioning the bound variable out of
/// its scope. Binders are renamed apart afterwards.
pub fn miniscope(f: &Formula) -> Formula {
    mini(&nnf(f)).uniquify_binders()
}

fn mini(f: &Formula) -> Formula {
    match f {
        Formula::And(a, b) => Formula::and(mini(a), mini(b)),
        Formula::Or(a, b) => Formula::or(mini(a), mini(b)),
        Formula::Forall(v, a) => push(Q::All, v, mini(a)),
        Formula::Exists(v, a) => push(Q::Ex, v, mini(a)),
        _ => f.clone(),
    }
}

fn flatten<'a>(f: &'a Formula, conj: bool, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::And(a, b) if conj => {
            flatten(a, conj, out);
            flatten(b, conj, out);
        }
        Formula::Or(a, b) if !conj => {
            flatten(a, conj, out);
            flatten(b, conj, out);
        }
        _ => out.push(f),
    }
}

fn join(parts: Vec<Formula>, conj: bool) -> Formula {
    let mut it = parts.into_iter().rev();
    let last = it.next().expect("nonempty junction");
    it.fold(last, |acc, p| {
        if conj {
            Formula::and(p, acc)
        } else {
            Formula::or(p, acc)
        }
    })
}

fn wrap(q: Q, v: &str, body: Formula) -> Formula {
    match q {
        Q::All => Formula::forall(v, body),
        Q::Ex => Formula::exists(v, body),
    }
}

fn push(q: Q, v: &str, body: Formula) -> Formula {
    if !body.free_variables().contains(v) {
        return body;
    }
    // `exists` distributes over `|`, `forall` over `&`; the other junction
    // only lets independent parts escape.
    let distributes_over_conj = q == Q::All;
    let mut parts = Vec::new();
    flatten(&body, distributes_over_conj, &mut parts);
    if parts.len() > 1 {
        let pushed = parts.into_iter().map(|p| push(q, v, p.clone())).collect();
        return join(pushed, distributes_over_conj);
    }
    let mut parts = Vec::new();
    flatten(&body, !distributes_over_conj, &mut parts);
    if parts.len() > 1 {
        let (with, without): (Vec<&Formula>, Vec<&Formula>) = parts
            .into_iter()
            .partition(|p| p.free_variables().contains(v));
        if !without.is_empty() {
            let inner = push(q, v, join(with.into_iter().cloned().collect(), !distributes_over_conj));
            let mut all: Vec<Formula> = without.into_iter().cloned().collect();
            all.push(inner);
            return join(all, !distributes_over_conj);
        }
    }
    wrap(q, v, body)
}
