use proptest::prelude::*;

use super::*;
use crate::formula::{parse_formula, Formula, Signature};
use crate::translate::{chi, pipeline_levels};

fn ev(text: &str) -> LatticeElement {
    parse_element(text, StructureKind::EvPeriodic).unwrap()
}

fn fc(text: &str) -> LatticeElement {
    parse_element(text, StructureKind::FinCofin).unwrap()
}

fn fin(text: &str) -> LatticeElement {
    parse_element(text, StructureKind::FinSet).unwrap()
}

#[test]
fn lattice_op_examples() {
    let m = lattice_op(LatticeOp::Meet, &fin("{1,2}"), Some(&fin("{2,3}"))).unwrap();
    assert_eq!(m, fin("{2}"));
    let odd = lattice_op(LatticeOp::Comp, &ev("mod(2,0)"), None).unwrap();
    assert_eq!(odd, ev("mod(2,1)"));
    let d = lattice_op(LatticeOp::Diff, &fc("cofinite{0}"), Some(&fc("{1}"))).unwrap();
    assert_eq!(d, fc("cofinite{0,1}"));
    assert_eq!(lattice_op(LatticeOp::Comp, &fin("{1}"), None), Err(ModelError::NoTop));
}

#[test]
fn counting_and_ideal_examples() {
    assert!(atom_count_at_least(&ev("mod(2,0)"), 1_000_000));
    assert!(!atom_count_at_least(&fin("{1,2}"), 3));
    assert!(atom_count_at_least(&fc("cofinite{5}"), 3));
    assert!(is_ideal(&ev("{3,7}")).unwrap());
    assert!(!is_ideal(&ev("mod(2,0)")).unwrap());
    assert!(!is_ideal(&lattice_op(LatticeOp::Comp, &fc("{1}"), None).unwrap()).unwrap());
    assert_eq!(is_ideal(&fin("{1}")), Err(ModelError::NoIdeal));
}

#[test]
fn literals_and_canonical_forms() {
    let e = ev("mod(4,0)|mod(8,3)+{7}-{0}");
    assert!(e.contains(4) && e.contains(3) && e.contains(7) && e.contains(11));
    assert!(!e.contains(0) && !e.contains(1) && !e.contains(5));
    assert_eq!(ev("mod(4,0)|mod(4,2)"), ev("mod(2,0)"));
    assert_eq!(ev("mod(2,0)|mod(2,1)"), ev("cofinite{}"));
    assert_eq!(ev("mod(1,0)-{2}").to_string(), "cofinite{2}");
    assert_eq!(ev("mod(2,0)+{1}").to_string(), "mod(2,0)+{1}");
    assert!(parse_element("mod(3,0)", StructureKind::EvPeriodic).is_err());
    assert!(parse_element("mod(2,0)", StructureKind::FinCofin).is_err());
    assert!(parse_element("cofinite{1}", StructureKind::FinSet).is_err());
    let LatticeElement::EvPeriodic(p) = ev("mod(4,0)|mod(8,3)") else { unreachable!() };
    assert_eq!(p.words(), vec!["00".to_string(), "110".to_string()]);
}

#[test]
fn halves_are_infinite_and_coinfinite() {
    for text in ["mod(1,0)", "mod(2,1)", "mod(4,0)|mod(8,3)+{7}-{0}", "cofinite{1,2}"] {
        let LatticeElement::EvPeriodic(p) = ev(text) else { unreachable!() };
        let h = p.half().unwrap();
        assert!(!h.is_finite());
        assert!(!p.combine(&h, |a, b| a && !b).is_finite());
        assert_eq!(h.combine(&p, |a, b| a && !b), EvPeriodic::empty());
    }
}

#[test]
fn epsilon_membership_examples() {
    let m = build_bas_model();
    let y = fin("{0,2}");
    assert!(epsilon_membership(&m, &fin("{}"), &y).unwrap());
    assert!(epsilon_membership(&m, &fin("{1}"), &y).unwrap());
    assert!(!epsilon_membership(&m, &fin("{0}"), &y).unwrap());
    let bac = build_bac_plus_model();
    assert!(matches!(
        epsilon_membership(&bac, &ev("mod(2,0)"), &ev("{1}")),
        Err(ModelError::NotIdeal(_))
    ));
    // A code beyond 64 bits is decided by its residue: code({0, 70}) is odd.
    let big = ev("{0,70}");
    assert!(epsilon_membership(&bac, &big, &ev("mod(2,1)")).unwrap());
    assert!(!epsilon_membership(&bac, &big, &ev("mod(2,0)")).unwrap());
    assert!(!epsilon_membership(&bac, &big, &ev("{1,2,3}")).unwrap());
}

#[test]
fn code_and_decode_are_inverse() {
    for n in [0u64, 1, 2, 5, 1 << 40, u64::MAX] {
        let s = decode(n);
        assert_eq!(code(&LatticeElement::FinSet(s)).unwrap(), Some(n));
    }
    assert_eq!(code(&ev("{64}")).unwrap(), None);
}

fn order_ideal(text: &str) -> Formula {
    parse_formula(text, Signature::OrderIdeal).unwrap()
}

const MAIN_AXIOM: &str = "forall x. (!I(x) -> exists y. (y sub x & !I(y) & !I(x /\\ ~y)))";

#[test]
fn main_axiom_separates_the_structures() {
    let f = order_ideal(MAIN_AXIOM);
    let evp = StructureHandle::new(StructureKind::EvPeriodic);
    assert!(bounded_eval(&evp, &f, 3).unwrap());
    assert!(!bounded_eval(&build_fincofin_completion(), &f, 3).unwrap());
}

#[test]
fn independence_sentence_separates_the_structures() {
    let phi = parse_formula(crate::corpus::INDEPENDENCE_SENTENCE, Signature::Class).unwrap();
    let image = chi(&phi, &pipeline_levels(&phi).unwrap().unwrap()).unwrap();
    assert!(bounded_eval(&build_fincofin_completion(), &image, 3).unwrap());
    assert!(!bounded_eval(&StructureHandle::new(StructureKind::EvPeriodic), &image, 3).unwrap());
}

#[test]
fn fincofin_completion_examples() {
    let s = build_fincofin_completion();
    let join_closed = order_ideal("forall x. forall y. ((I(x) & I(y)) -> I(x \\/ y))");
    assert!(bounded_eval(&s, &join_closed, 2).unwrap());
    let comp = order_ideal("forall x. x \\/ ~x = 1");
    assert!(bounded_eval(&s, &comp, 1).unwrap());
    let disjoint = order_ideal("exists x. exists y. (!I(x) & !I(y) & x /\\ y = 0)");
    assert!(!bounded_eval(&s, &disjoint, 2).unwrap());
}

#[test]
fn finset_lattice_is_unbounded_without_top() {
    let s = StructureHandle::new(StructureKind::FinSet);
    let unbounded = parse_formula("forall x. exists y. (x sub y & !(x = y))", Signature::Order).unwrap();
    assert!(bounded_eval(&s, &unbounded, 2).unwrap());
    let top = parse_formula("exists x. forall y. y sub x", Signature::Order).unwrap();
    assert!(!bounded_eval(&s, &top, 2).unwrap());
    assert_eq!(
        bounded_eval(&s, &order_ideal("exists x. I(x)"), 1),
        Err(ModelError::NoIdeal)
    );
}

#[test]
fn budget_is_enforced() {
    let f = order_ideal(MAIN_AXIOM);
    assert_eq!(
        bounded_eval(&build_fincofin_completion(), &f, 1),
        Err(ModelError::Budget { depth: 2, budget: 1 })
    );
}

#[test]
fn bas_model_examples() {
    let m = build_bas_model();
    let empty = fin("{}");
    for n in 0..1000 {
        assert!(!epsilon_membership(&m, &m.decode(n), &empty).unwrap());
    }
    let set = |t: &str| parse_formula(t, Signature::Set).unwrap();
    for axiom in [
        "forall x. forall y. exists z. forall u. (u in z <-> (u in x | u = y))",
        "forall x. exists y. !(y in x)",
        "forall x. forall y. exists z. forall u. (u in z <-> (u in x | u in y))",
        "forall x. forall y. exists z. forall u. (u in z <-> (u in x & !(u in y)))",
    ] {
        let r = axiom_check_sample(&m, &set(axiom), 100, 42).unwrap();
        assert_eq!(r.failures, 0, "{axiom}: {:?}", r.counterexamples);
    }
}

#[test]
fn bac_plus_model_examples() {
    let m = build_bac_plus_model();
    let x = ev("mod(2,0)");
    let y = ev("mod(4,0)");
    let rest = lattice_op(LatticeOp::Diff, &x, Some(&y)).unwrap();
    assert!(y.is_subset(&x) && !is_ideal(&y).unwrap() && !is_ideal(&rest).unwrap());
    let class = |t: &str| parse_formula(t, Signature::Class).unwrap();
    let sep = class("forall X. (!S(X) -> exists Y. ((forall w. (S(w) -> (w in Y -> w in X))) & !S(Y) & exists Z. ((forall v. (S(v) -> (v in Z <-> (v in X & !(v in Y))))) & !S(Z))))");
    let mem = class("forall X. forall Y. (X in Y -> exists x. (S(x) & x = X))");
    let ccomp = class("forall X. exists Y. forall x. (S(x) -> (x in Y <-> !(x in X)))");
    let false_claim = class("forall X. S(X)");
    for f in [&sep, &mem, &ccomp] {
        assert_eq!(axiom_check_sample(&m, f, 100, 42).unwrap().failures, 0, "{f}");
    }
    assert!(axiom_check_sample(&m, &false_claim, 100, 42).unwrap().failures > 0);
}

#[test]
fn subset_agreement_holds() {
    assert_eq!(subset_agreement(&build_bas_model(), 300, 7).unwrap(), 0);
    assert_eq!(subset_agreement(&build_bac_plus_model(), 300, 7).unwrap(), 0);
}

fn arb_periodic() -> impl Strategy<Value = EvPeriodic> {
    (0u32..4, any::<u16>(), proptest::collection::btree_set(0u64..40, 0..5), proptest::collection::btree_set(0u64..40, 0..5))
        .prop_map(|(level, bits, add, remove)| {
            let mask = (0..1usize << level).map(|r| bits >> r & 1 == 1).collect();
            EvPeriodic::from_parts(level, mask, add, remove)
        })
}

proptest! {
    #[test]
    fn operations_match_pointwise_semantics(a in arb_periodic(), b in arb_periodic()) {
        let join = a.combine(&b, |x, y| x || y);
        let meet = a.combine(&b, |x, y| x && y);
        let diff = a.combine(&b, |x, y| x && !y);
        let comp = a.complement();
        for n in 0..200u64 {
            prop_assert_eq!(join.contains(n), a.contains(n) || b.contains(n));
            prop_assert_eq!(meet.contains(n), a.contains(n) && b.contains(n));
            prop_assert_eq!(diff.contains(n), a.contains(n) && !b.contains(n));
            prop_assert_eq!(comp.contains(n), !a.contains(n));
        }
    }

    #[test]
    fn canonical_forms_are_unique(a in arb_periodic(), b in arb_periodic()) {
        let same = (0..200u64).all(|n| a.contains(n) == b.contains(n));
        prop_assert_eq!(same, a == b);
        let again = EvPeriodic::from_parts(a.level(), a.mask().to_vec(), a.additions().clone(), a.removals().clone());
        prop_assert_eq!(&again, &a);
    }

    #[test]
    fn literal_round_trip(a in arb_periodic()) {
        let text = a.to_string();
        prop_assert_eq!(ev(&text), LatticeElement::EvPeriodic(a));
    }

    #[test]
    fn finite_sets_round_trip_through_codes(s in proptest::collection::btree_set(0u64..64, 0..8)) {
        let c = code(&LatticeElement::FinSet(s.clone())).unwrap().unwrap();
        prop_assert_eq!(decode(c), s);
    }
}
