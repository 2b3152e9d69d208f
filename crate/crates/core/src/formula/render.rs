use std::fmt;

use super::ast::{Atom, Formula, Term};

/// Renders a formula in the ASCII surface syntax.
pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f, false);
    out
}

/// Renders a term.
pub fn render_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, t);
    out
}

fn write_term(out: &mut String, t: &Term) {
    match t {
        Term::Var(v) => out.push_str(v),
        Term::Zero => out.push('0'),
        Term::One => out.push('1'),
        Term::Join(a, b) => binary_term(out, t, a, " \\/ ", b),
        Term::Meet(a, b) => binary_term(out, t, a, " /\\ ", b),
        Term::Diff(a, b) => binary_term(out, t, a, " - ", b),
        Term::Comp(a) => {
            out.push('~');
            sub_term(out, a, a.is_compound() && !matches!(**a, Term::Comp(_)));
        }
    }
}

/// Binding strength of a term's outermost operator.
fn level(t: &Term) -> u8 {
    match t {
        Term::Join(..) | Term::Diff(..) => 1,
        Term::Meet(..) => 2,
        _ => 3,
    }
}

/// Binary operands are parenthesised, except a left operand at the same
/// level (the operators are left-associative).
fn binary_term(out: &mut String, parent: &Term, a: &Term, op: &str, b: &Term) {
    sub_term(out, a, level(a) < 3 && level(a) != level(parent));
    out.push_str(op);
    sub_term(out, b, level(b) < 3);
}

fn sub_term(out: &mut String, t: &Term, wrap: bool) {
    if wrap {
        out.push('(');
    }
    write_term(out, t);
    if wrap {
        out.push(')');
    }
}

fn write_atom(out: &mut String, a: &Atom) {
    match a {
        Atom::Mem(x, y) => relation(out, x, " in ", y),
        Atom::Eq(x, y) => relation(out, x, " = ", y),
        Atom::Leq(x, y) => relation(out, x, " sub ", y),
        Atom::Set(t) => call(out, "S", t),
        Atom::Ideal(t) => call(out, "I", t),
        Atom::Atm(t) => call(out, "Atm", t),
        Atom::Count(k, t) => call(out, &format!("C[{k}]"), t),
    }
}

fn relation(out: &mut String, a: &Term, op: &str, b: &Term) {
    write_term(out, a);
    out.push_str(op);
    write_term(out, b);
}

fn call(out: &mut String, name: &str, t: &Term) {
    out.push_str(name);
    out.push('(');
    write_term(out, t);
    out.push(')');
}

fn is_call_atom(f: &Formula) -> bool {
    matches!(
        f,
        Formula::Atom(Atom::Set(_) | Atom::Ideal(_) | Atom::Atm(_) | Atom::Count(..))
    )
}

/// `nested` is true when a binary node must be wrapped: inside another binary
/// node or a quantifier body.
fn write_formula(out: &mut String, f: &Formula, nested: bool) {
    match f {
        Formula::Atom(a) => write_atom(out, a),
        Formula::Not(a) => {
            out.push('!');
            if is_call_atom(a) || matches!(**a, Formula::Not(_)) {
                write_formula(out, a, true);
            } else {
                out.push('(');
                write_formula(out, a, false);
                out.push(')');
            }
        }
        Formula::Forall(v, body) | Formula::Exists(v, body) => {
            out.push_str(if matches!(f, Formula::Forall(..)) {
                "forall "
            } else {
                "exists "
            });
            out.push_str(v);
            out.push_str(". ");
            write_formula(out, body, true);
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            let op = match f {
                Formula::And(..) => " & ",
                Formula::Or(..) => " | ",
                Formula::Implies(..) => " -> ",
                _ => " <-> ",
            };
            if nested {
                out.push('(');
            }
            if a.is_quantifier() {
                out.push('(');
                write_formula(out, a, false);
                out.push(')');
            } else {
                write_formula(out, a, true);
            }
            out.push_str(op);
            write_formula(out, b, true);
            if nested {
                out.push(')');
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_term(self))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_atom(&mut out, self);
        f.write_str(&out)
    }
}
