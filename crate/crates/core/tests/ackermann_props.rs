use opstat_core::ackermann::{ackermann_reduce, ackermann_reduce_all, AckermannOptions};
use opstat_core::logic::{Formula, FunSym, Signature, Sort, Term};
use proptest::prelude::*;

fn uu() -> Sort {
    Sort::new("u", "u")
}

fn vv() -> Sort {
    Sort::new("v", "v")
}

struct Setup {
    sig: Signature,
    f_u: FunSym,
    f_v: FunSym,
}

fn setup() -> Setup {
    let mut sig = Signature::new();
    sig.add_object("u").unwrap();
    sig.add_object("v").unwrap();
    sig.add_constant("a", uu()).unwrap();
    sig.add_constant("b", uu()).unwrap();
    sig.add_constant("c", vv()).unwrap();
    let f_u = sig.add_function("f", vec![uu()], uu()).unwrap();
    let f_v = sig.add_function("f", vec![vv()], vv()).unwrap();
    Setup { sig, f_u, f_v }
}

fn term_u() -> impl Strategy<Value = Term> {
    let Setup { f_u, .. } = setup();
    let leaf = prop::sample::select(vec!["a", "b"]).prop_map(|n| Term::constant(n, uu()));
    leaf.prop_recursive(3, 10, 2, move |inner| {
        let f = f_u.clone();
        prop_oneof![
            inner.clone().prop_map(move |t| Term::app(f.clone(), vec![t])),
            (inner.clone(), inner).prop_map(|(x, y)| Term::mul(x, y)),
        ]
    })
}

fn term_v() -> impl Strategy<Value = Term> {
    let Setup { f_v, .. } = setup();
    let leaf = Just(Term::constant("c", vv()));
    leaf.prop_recursive(2, 4, 1, move |inner| {
        let f = f_v.clone();
        inner.prop_map(move |t| Term::app(f.clone(), vec![t]))
    })
}

fn formula() -> impl Strategy<Value = Formula> {
    let atom = prop_oneof![
        (term_u(), term_u()).prop_map(|(x, y)| Formula::eq(x, y)),
        (term_v(), term_v()).prop_map(|(x, y)| Formula::eq(x, y)),
    ];
    atom.prop_recursive(3, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::and(f, g)),
            (inner.clone(), inner).prop_map(|(f, g)| Formula::or(f, g)),
        ]
    })
}

fn distinct_instances(f: &Formula, sym: &FunSym) -> usize {
    let mut seen: Vec<Term> = Vec::new();
    for t in f.terms() {
        collect(t, sym, &mut seen);
    }
    seen.len()
}

fn collect(t: &Term, sym: &FunSym, seen: &mut Vec<Term>) {
    if let Term::App(g, _) = t {
        if g == sym && !seen.contains(t) {
            seen.push(t.clone());
        }
    }
    for c in t.children() {
        collect(c, sym, seen);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reduction_removes_the_symbol_and_counts_constraints(phi in formula(), simplify in any::<bool>()) {
        let s = setup();
        let opts = AckermannOptions { fc_simplify: simplify };
        let r = ackermann_reduce(&s.sig, &phi, &s.f_u, opts).unwrap();
        let m = distinct_instances(&phi, &s.f_u);
        prop_assert_eq!(r.table.len(), m);
        prop_assert_eq!(r.fc.len(), m * m.saturating_sub(1) / 2);
        prop_assert!(!r.result().function_symbols().contains(&s.f_u));
        prop_assert!(r.extended_signature.check_sorts(&r.result()).is_ok());
        prop_assert_eq!(r.result().is_ground(), phi.is_ground());
        for i in &r.table {
            prop_assert_eq!(i.constant.sort.clone(), s.f_u.sort.result.clone());
        }
        let unflat = r.flat.map_terms(&mut |t| r.unflatten(t));
        prop_assert_eq!(unflat, phi);
    }

    #[test]
    fn equal_instances_share_constants(t in term_u()) {
        let s = setup();
        let ft = Term::app(s.f_u.clone(), vec![t]);
        let phi = Formula::and(Formula::eq(ft.clone(), ft.clone()), Formula::eq(ft.clone(), ft.clone()));
        let r = ackermann_reduce(&s.sig, &phi, &s.f_u, AckermannOptions::default()).unwrap();
        let c = r.constant_of(&ft).unwrap().term();
        prop_assert!(r.flat.terms().iter().all(|x| **x == c));
    }

    #[test]
    fn overloads_never_pair_across_sorts(phi in formula()) {
        let s = setup();
        let r = ackermann_reduce_all(&s.sig, &phi, AckermannOptions::default()).unwrap();
        prop_assert!(r.result().function_symbols().is_empty());
        prop_assert!(r.extended_signature.check_sorts(&r.result()).is_ok());
        let mut expected = 0;
        for sym in [&s.f_u, &s.f_v] {
            let m = r.table.iter().filter(|i| &i.symbol == sym).count();
            expected += m * m.saturating_sub(1) / 2;
        }
        prop_assert_eq!(r.fc.len(), expected);
    }
}
