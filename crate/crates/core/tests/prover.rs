use std::collections::BTreeMap;

use opstat_core::idealise::{idealise_sentence, ClauseVerdict, Verdict};
use opstat_core::logic::{Formula, FunSym, Signature, Sort, Term, Var};
use opstat_core::membership::{check_certificate, IdealPresentation};
use opstat_core::prover::{apply_universal_rules, prove, Pattern, ProofOutcome, ProofTrace, ProverConfig, RewriteRule};

fn s() -> Sort {
    Sort::new("u", "u")
}

fn setup() -> (Signature, FunSym, Term) {
    let mut sig = Signature::new();
    sig.add_object("u").unwrap();
    let a = sig.add_constant("a", s()).unwrap().term();
    let f = sig.add_function("f", vec![s()], s()).unwrap();
    (sig, f, a)
}

fn replay(t: &ProofTrace) {
    let sig = &t.herbrand.extended_signature;
    for i in &t.instances {
        assert!(i.sentence.is_ground());
        sig.check_sorts(&i.sentence).unwrap();
    }
    for c in &t.idealisation.clauses {
        let ClauseVerdict::True { certificate, .. } = &c.verdict else {
            panic!("undecided clause in a proof")
        };
        let ideal = IdealPresentation::with_order(c.ideal.generators.clone(), c.ideal.order.clone());
        assert_eq!(check_certificate(certificate, &ideal), Ok(true));
    }
    assert_eq!(
        idealise_sentence(&t.ackermann.result(), 5_000).unwrap().verdict,
        Verdict::True
    );
}

#[test]
fn function_images_are_found_by_enumeration() {
    let (sig, f, _) = setup();
    let (x, y) = (Var::new("x", s()), Var::new("y", s()));
    let phi = Formula::forall(
        x.clone(),
        Formula::exists(y.clone(), Formula::eq(y.term(), Term::app(f, vec![x.term()]))),
    );
    let out = prove(
        &sig,
        &phi,
        &ProverConfig {
            max_rounds: 50,
            ..ProverConfig::default()
        },
    )
    .unwrap();
    let ProofOutcome::Proved(t) = out else {
        panic!("{out:?}")
    };
    assert!(t.instances.len() > 1);
    replay(&t);
}

#[test]
fn hints_short_cut_the_enumeration() {
    let (sig, f, _) = setup();
    let (x, y) = (Var::new("x", s()), Var::new("y", s()));
    let phi = Formula::forall(
        x.clone(),
        Formula::exists(y.clone(), Formula::eq(y.term(), Term::app(f.clone(), vec![x.term()]))),
    );
    let hint = BTreeMap::from([("y".to_string(), Term::app(f, vec![x.term()]))]);
    let cfg = ProverConfig {
        hints: vec![hint],
        ..ProverConfig::default()
    };
    let ProofOutcome::Proved(t) = prove(&sig, &phi, &cfg).unwrap() else {
        panic!()
    };
    assert_eq!(t.rounds, 1);
    assert!(t.instances[0].from_hint);
    replay(&t);
}

#[test]
fn ground_inputs_reduce_once() {
    let (mut sig, f, a) = setup();
    let b = sig.add_constant("b", s()).unwrap().term();
    let fa = Term::app(f.clone(), vec![a.clone()]);
    let fb = Term::app(f, vec![b.clone()]);
    let phi = Formula::implies(Formula::eq(a, b), Formula::eq(fa, fb));
    let ProofOutcome::Proved(t) = prove(&sig, &phi, &ProverConfig::default()).unwrap() else {
        panic!()
    };
    assert_eq!(t.ackermann_reductions, 1);
    assert_eq!(t.ackermann.fc.len(), 1);
    replay(&t);
}

#[test]
fn grants_follow_the_round_schedule() {
    let (sig, _, a) = setup();
    let y = Var::new("y", s());
    // No instance makes y·a = a valid.
    let phi = Formula::exists(y.clone(), Formula::eq(Term::mul(y.term(), a.clone()), a));
    let cfg = ProverConfig {
        max_rounds: 6,
        quantum: 8,
        ..ProverConfig::default()
    };
    let out = prove(&sig, &phi, &cfg).unwrap();
    let ProofOutcome::Timeout(t) = out else {
        panic!("{out:?}")
    };
    assert_eq!(t.rounds, 6);
    assert_eq!(t.granted.len(), 6);
    for (k, g) in t.granted.iter().enumerate() {
        let bound: u64 = ((k + 1)..=6).map(|n| (n * 8) as u64).sum();
        assert!(*g <= bound, "psi {k} got {g} > {bound}");
    }
    assert_eq!(t.granted[5], 48);
}

#[test]
fn rewriting_reaches_a_fixed_point() {
    let mut sig = Signature::new();
    sig.add_object("u").unwrap();
    let a = sig.add_constant("a", s()).unwrap().term();
    let b = sig.add_constant("b", s()).unwrap().term();
    let star = sig.add_function("star", vec![s()], s()).unwrap();
    let v = |n: &str| Pattern::Var(n.into());
    let st = |p: Pattern| Pattern::App("star".into(), vec![p]);
    let rules = vec![
        RewriteRule::new(
            st(Pattern::Add(Box::new(v("s")), Box::new(v("t")))),
            Pattern::Add(Box::new(st(v("s"))), Box::new(st(v("t")))),
        )
        .unwrap(),
        RewriteRule::new(
            st(Pattern::Mul(Box::new(v("s")), Box::new(v("t")))),
            Pattern::Mul(Box::new(st(v("t"))), Box::new(st(v("s")))),
        )
        .unwrap(),
        RewriteRule::new(st(st(v("t"))), v("t")).unwrap(),
    ];
    let app = |t: Term| Term::app(star.clone(), vec![t]);
    let lhs = app(Term::add(Term::mul(app(a.clone()), b.clone()), app(app(b.clone()))));
    let phi = Formula::eq(lhs, a.clone());
    let once = apply_universal_rules(&sig, &phi, &rules).unwrap();
    let expected = Formula::eq(Term::add(Term::mul(app(b.clone()), a.clone()), app(b)), a);
    assert_eq!(once, expected);
    assert_eq!(apply_universal_rules(&sig, &once, &rules).unwrap(), once);
    assert!(RewriteRule::new(v("s"), v("t")).is_err());
}
