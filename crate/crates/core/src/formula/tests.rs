use super::*;
use proptest::prelude::*;

const UNBOUNDED: &str = "forall x. exists y. (x sub y & !(x = y))";

fn p(text: &str, sig: Signature) -> Formula {
    parse_formula(text, sig).unwrap_or_else(|e| panic!("{text}: {e}"))
}

#[test]
fn parses_unbounded_axiom() {
    let f = p(UNBOUNDED, Signature::Order);
    let expected = Formula::forall(
        "x",
        Formula::exists(
            "y",
            Formula::and(
                Formula::leq(Term::var("x"), Term::var("y")),
                Formula::not(Formula::eq(Term::var("x"), Term::var("y"))),
            ),
        ),
    );
    assert_eq!(f, expected);
    assert_eq!(render(&f), UNBOUNDED);
    assert_eq!(f.quantifier_depth(), 2);
    assert!(f.free_variables().is_empty());
}

#[test]
fn identity_atom() {
    let f = p("x = x", Signature::Order);
    assert_eq!(f, Formula::eq(Term::var("x"), Term::var("x")));
    assert_eq!(render(&f), "x = x");
    assert_eq!(f.quantifier_depth(), 0);
}

#[test]
fn signature_errors_name_the_symbol() {
    match parse_formula("S(x) -> I(x)", Signature::Set) {
        Err(FormulaError::Signature { symbol, .. }) => assert_eq!(symbol, "S"),
        other => panic!("unexpected {other:?}"),
    }
    match parse_formula("x \\/ y sub z", Signature::Set) {
        Err(FormulaError::Signature { symbol, .. }) => assert_eq!(symbol, "sub"),
        other => panic!("unexpected {other:?}"),
    }
    match parse_formula("x \\/ y = z", Signature::Class) {
        Err(FormulaError::Signature { symbol, .. }) => assert_eq!(symbol, "\\/"),
        other => panic!("unexpected {other:?}"),
    }
    assert!(parse_formula("I(x)", Signature::Order).is_err());
    assert!(parse_formula("I(x)", Signature::OrderIdeal).is_ok());
}

#[test]
fn syntax_errors_carry_position() {
    match parse_formula("forall x.\n  (x sub & y)", Signature::Order) {
        Err(FormulaError::Syntax { line, column, .. }) => {
            assert_eq!(line, 2);
            assert_eq!(column, 10);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(parse_formula("", Signature::Order).is_err());
    assert!(parse_formula("x = y )", Signature::Order).is_err());
    assert!(parse_formula("C[0](x)", Signature::Order).is_err());
    assert!(parse_formula("x $ y", Signature::Order).is_err());
}

#[test]
fn free_variables_examples() {
    let f = p("x sub y", Signature::Order);
    assert_eq!(
        f.free_variables().into_iter().collect::<Vec<_>>(),
        vec!["x".to_string(), "y".to_string()]
    );
    let g = p("exists y. x in y", Signature::Set);
    assert_eq!(g.free_variables().into_iter().collect::<Vec<_>>(), vec!["x".to_string()]);
}

#[test]
fn precedence_and_associativity() {
    let f = p("a = a & b = b | c = c -> d = d -> e = e <-> f = f", Signature::Order);
    let a = |v: &str| Formula::eq(Term::var(v), Term::var(v));
    let expected = Formula::iff(
        Formula::implies(
            Formula::or(Formula::and(a("a"), a("b")), a("c")),
            Formula::implies(a("d"), a("e")),
        ),
        a("f"),
    );
    assert_eq!(f, expected);
    let t = p("x \\/ y /\\ ~z - w = 0", Signature::Order);
    let expected = Formula::eq(
        Term::diff(
            Term::join(Term::var("x"), Term::meet(Term::var("y"), Term::comp(Term::var("z")))),
            Term::var("w"),
        ),
        Term::Zero,
    );
    assert_eq!(t, expected);
}

#[test]
fn quantifier_bodies_extend_right() {
    let f = p("forall x. x = x & y = y", Signature::Order);
    assert!(matches!(f, Formula::Forall(..)));
    let g = p("(forall x. x = x) & y = y", Signature::Order);
    assert!(matches!(g, Formula::And(..)));
    assert_eq!(render(&g), "(forall x. x = x) & y = y");
}

#[test]
fn parenthesised_terms_and_formulas() {
    let f = p("(x \\/ y) sub z & ((x = y))", Signature::Order);
    assert_eq!(render(&f), "x \\/ y sub z & x = y");
    let g = p("!(x /\\ y = 0)", Signature::Order);
    assert_eq!(render(&g), "!(x /\\ y = 0)");
    let h = p("C[3](x - (y \\/ z)) & Atm(~x)", Signature::Order);
    assert_eq!(render(&h), "C[3](x - (y \\/ z)) & Atm(~x)");
}

#[test]
fn unicode_aliases() {
    let f = p("∀x. ∃y. (x ⊑ y ∧ ¬(x = y))", Signature::Order);
    assert_eq!(render(&f), UNBOUNDED);
    let g = p("x ∧\u{307} y ∨\u{307} z ∸ w = 0", Signature::Order);
    assert_eq!(render(&g), "(x /\\ y) \\/ z - w = 0");
    match parse_formula("x = 0 → x ∈ y", Signature::OrderIdeal) {
        Err(FormulaError::Signature { symbol, .. }) => assert_eq!(symbol, "in"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn comments_are_ignored() {
    let f = p("x = x # trailing remark", Signature::Order);
    assert_eq!(render(&f), "x = x");
}

#[test]
fn binders_are_renamed_apart() {
    let f = p("(exists x. x = x) & (exists x. x sub y) & x = x", Signature::Order);
    assert!(f.has_unique_binders());
    assert!(f.free_variables().contains("x"));
    let rendered = render(&f);
    assert!(rendered.contains("exists x_1."), "{rendered}");
    assert!(rendered.contains("exists x_2."), "{rendered}");
}

#[test]
fn alpha_equivalence() {
    let a = p("forall x. exists y. x sub y", Signature::Order);
    let b = p("forall u. exists v. u sub v", Signature::Order);
    let c = p("forall u. exists v. v sub u", Signature::Order);
    assert!(alpha_equivalent(&a, &b));
    assert!(!alpha_equivalent(&a, &c));
    let d = p("forall x. forall x. x sub x", Signature::Order);
    let e = p("forall y. forall x. x sub x", Signature::Order);
    let g = p("forall x. forall y. x sub x", Signature::Order);
    assert!(alpha_equivalent(&d, &e));
    assert!(!alpha_equivalent(&d, &g));
}

#[test]
fn prenex_examples() {
    let f = p("!(exists y. y sub x)", Signature::Order);
    assert_eq!(render(&to_prenex_nnf(&f)), "forall y. !(y sub x)");
    let g = p("x = x", Signature::Order);
    assert_eq!(render(&to_prenex_nnf(&g)), "x = x");
    let main = p(
        "forall x. (!I(x) -> exists y. (y sub x & !I(y) & !I(x /\\ ~y)))",
        Signature::OrderIdeal,
    );
    let pr = to_prenex_nnf(&main);
    assert_eq!(
        render(&pr),
        "forall x. exists y. (I(x) | ((y sub x & !I(y)) & !I(x /\\ ~y)))"
    );
    assert_eq!(pr.quantifier_depth(), 2);
}

#[test]
fn miniscoping_moves_independent_parts() {
    let f = p("forall x. exists y. (x = x & y = y)", Signature::Order);
    assert_eq!(render(&miniscope(&f)), "(forall x. x = x) & exists y. y = y");
    let g = p("exists y. (y sub x | y = 0)", Signature::Order);
    assert_eq!(render(&miniscope(&g)), "(exists y. y sub x) | exists y_1. y_1 = 0");
    let h = p("exists x. y = y", Signature::Order);
    assert_eq!(render(&miniscope(&h)), "y = y");
}

#[test]
fn depth_of_choice_sentence() {
    let ac = p(crate::corpus::CHOICE_SENTENCE, Signature::Set);
    assert_eq!(ac.quantifier_depth(), 5);
    assert!(ac.is_closed());
}

fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::var("x")),
        Just(Term::var("y")),
        Just(Term::var("z")),
        Just(Term::Zero),
        Just(Term::One),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::join(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::meet(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::diff(a, b)),
            inner.prop_map(Term::comp),
        ]
    })
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    let atom = prop_oneof![
        (arb_term(), arb_term()).prop_map(|(a, b)| Formula::eq(a, b)),
        (arb_term(), arb_term()).prop_map(|(a, b)| Formula::leq(a, b)),
        arb_term().prop_map(|t| Formula::Atom(Atom::Ideal(t))),
        arb_term().prop_map(|t| Formula::Atom(Atom::Atm(t))),
        (1u32..4, arb_term()).prop_map(|(k, t)| Formula::Atom(Atom::Count(k, t))),
    ];
    atom.prop_recursive(4, 24, 2, |inner| {
        let var = prop_oneof![Just("x"), Just("y"), Just("z")];
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
            (var.clone(), inner.clone()).prop_map(|(v, b)| Formula::forall(v, b)),
            (var, inner).prop_map(|(v, b)| Formula::exists(v, b)),
        ]
    })
}

proptest! {
    #[test]
    fn render_parse_round_trip(f in arb_formula()) {
        let text = render(&f);
        let back = parse_formula(&text, Signature::OrderIdeal).unwrap();
        prop_assert!(alpha_equivalent(&back, &f.uniquify_binders()), "{}", text);
        prop_assert!(alpha_equivalent(&back, &f), "{}", text);
    }

    #[test]
    fn prenex_is_prenex_and_keeps_free_variables(f in arb_formula()) {
        let g = to_prenex_nnf(&f);
        let mut m = &g;
        while let Formula::Forall(_, b) | Formula::Exists(_, b) = m {
            m = b;
        }
        prop_assert_eq!(m.quantifier_count(), 0);
        prop_assert_eq!(g.free_variables(), f.free_variables());
        let mut ok = true;
        fn no_arrows(f: &Formula, ok: &mut bool) {
            match f {
                Formula::Implies(..) | Formula::Iff(..) => *ok = false,
                Formula::Not(a) => if !matches!(**a, Formula::Atom(_)) { *ok = false },
                Formula::And(a, b) | Formula::Or(a, b) => { no_arrows(a, ok); no_arrows(b, ok) }
                Formula::Forall(_, a) | Formula::Exists(_, a) => no_arrows(a, ok),
                Formula::Atom(_) => {}
            }
        }
        no_arrows(&g, &mut ok);
        prop_assert!(ok);
    }

    #[test]
    fn miniscope_never_deepens(f in arb_formula()) {
        let g = miniscope(&f);
        prop_assert!(g.quantifier_depth() <= f.quantifier_depth());
        prop_assert_eq!(g.free_variables(), f.free_variables());
        prop_assert!(g.has_unique_binders());
    }
}
