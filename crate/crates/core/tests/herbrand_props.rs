use std::collections::BTreeMap;

use opstat_core::herbrand::{expansion, herbrandise, GroundTerms};
use opstat_core::logic::{Formula, Quantifier, Signature, Sort, Term, Var};
use proptest::prelude::*;

fn s() -> Sort {
    Sort::new("u", "u")
}

fn sig() -> Signature {
    let mut sig = Signature::new();
    sig.add_object("u").unwrap();
    sig.add_constant("a", s()).unwrap();
    sig.add_constant("b", s()).unwrap();
    sig
}

fn atom() -> impl Strategy<Value = Formula> {
    let t = prop_oneof![
        prop::sample::select(vec!["a", "b"]).prop_map(|n| Term::constant(n, s())),
        prop::sample::select(vec!["x", "y", "z"]).prop_map(|n| Term::var(n, s())),
    ];
    (t.clone(), t.clone(), t).prop_map(|(p, q, r)| Formula::eq(Term::mul(p, q), r))
}

fn formula() -> impl Strategy<Value = Formula> {
    atom().prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::and(f, g)),
            (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::implies(f, g)),
            (any::<bool>(), prop::sample::select(vec!["x", "y", "z"]), inner).prop_map(|(all, v, f)| {
                let q = if all { Quantifier::Forall } else { Quantifier::Exists };
                Formula::quantified(q, Var::new(v, s()), f)
            }),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn herbrand_form_is_existential_and_well_sorted(f in formula()) {
        let h = herbrandise(&sig(), &f);
        prop_assert!(h.sentence.free_vars().is_empty());
        prop_assert!(h.extended_signature.check_sorts(&h.sentence).is_ok());
        let mut cur = &h.sentence;
        while let Formula::Exists(_, g) = cur {
            cur = g;
        }
        prop_assert!(cur.is_quantifier_free());
        for c in ["a", "b"] {
            prop_assert!(h.extended_signature.constant(c).is_some());
        }
    }

    #[test]
    fn herbrandisation_is_a_fixed_point(f in formula()) {
        let h = herbrandise(&sig(), &f);
        let again = herbrandise(&h.extended_signature, &h.sentence);
        prop_assert_eq!(&again.sentence, &h.sentence);
        prop_assert!(again.introduced.is_empty());
    }

    #[test]
    fn instances_are_ground_and_well_sorted(f in formula()) {
        let h = herbrandise(&sig(), &f);
        let it = expansion(&h.extended_signature, &h.sentence, Vec::new()).unwrap();
        for g in it.take(20) {
            prop_assert!(g.sentence.is_ground());
            prop_assert!(h.extended_signature.check_sorts(&g.sentence).is_ok());
        }
    }
}

#[test]
fn every_small_term_reaches_every_position() {
    let mut sig = sig();
    sig.add_function("f", vec![s()], s()).unwrap();
    let (x, y) = (Var::new("x", s()), Var::new("y", s()));
    let matrix = Formula::eq(Term::mul(x.term(), y.term()), x.term());
    let h = Formula::exists(x, Formula::exists(y, matrix));
    let mut terms = GroundTerms::new(&sig);
    let wanted: Vec<Term> = (1..=3).flat_map(|n| terms.of_size(&s(), n)).collect();
    assert!(wanted.len() > 6);
    let seen: Vec<BTreeMap<String, Term>> = expansion(&sig, &h, Vec::new())
        .unwrap()
        .take(5_000)
        .map(|g| g.bindings)
        .collect();
    for t in &wanted {
        for v in ["x", "y"] {
            assert!(seen.iter().any(|b| &b[v] == t), "{t} never bound to {v}");
        }
    }
}

#[test]
fn hints_come_first_in_order() {
    let (x, y) = (Var::new("x", s()), Var::new("y", s()));
    let h = Formula::exists(x.clone(), Formula::exists(y, Formula::eq(x.term(), x.term())));
    let b = Term::constant("b", s());
    let hint = |t: &Term| BTreeMap::from([("x".to_string(), t.clone()), ("y".to_string(), t.clone())]);
    let first = Term::mul(b.clone(), b.clone());
    let mut it = expansion(&sig(), &h, vec![hint(&first), hint(&b)]).unwrap();
    let g1 = it.next().unwrap();
    let g2 = it.next().unwrap();
    assert!(g1.from_hint && g2.from_hint);
    assert_eq!(g1.bindings["x"], first);
    assert_eq!(g2.bindings["x"], b);
    assert!(!it.next().unwrap().from_hint);
}
