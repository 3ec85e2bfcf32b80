use criterion::{criterion_group, criterion_main, Criterion};
use opstat_core::membership::{find_witness, first_appearance, verify_membership, IdealPresentation, MonomialOrder};
use opstat_core::ncpoly::{IndeterminateTable, NCPolynomial};
use std::hint::black_box;

fn table() -> IndeterminateTable {
    let mut t = IndeterminateTable::new();
    for n in ["x", "iu", "iv", "ius", "xs", "ivs", "a", "b", "as", "bs", "c", "cs"] {
        t.intern(n);
    }
    t
}

const CORE: [&str; 8] = [
    "x*iu - x",
    "iv*x - x",
    "ius*xs - xs",
    "xs*ivs - xs",
    "xs*x*a*xs*x - xs*x",
    "x*xs*b*x*xs - x*xs",
    "xs*x*as*xs*x - xs*x",
    "x*xs*bs*x*xs - x*xs",
];

fn membership(c: &mut Criterion) {
    let t = table();
    let p = |s: &str| NCPolynomial::parse(s, &t).unwrap();
    let mut gens: Vec<NCPolynomial> = CORE.iter().map(|s| p(s)).collect();
    gens.push(p("x*a*xs*x - x*iu"));
    gens.push(p("x*xs*b*x - iv*x"));
    let ideal = IdealPresentation::new(gens);
    let target = p("x*xs*b*x*a*xs*x - x");
    c.bench_function("member_with_cancellation", |b| {
        b.iter(|| verify_membership(black_box(&target), black_box(&ideal), 20_000))
    });

    let core = IdealPresentation::new(CORE.iter().map(|s| p(s)).collect());
    c.bench_function("refute_on_core", |b| {
        b.iter(|| verify_membership(black_box(&target), black_box(&core), 20_000))
    });
}

fn witness(c: &mut Criterion) {
    let t = table();
    let p = |s: &str| NCPolynomial::parse(s, &t).unwrap();
    let mut gens: Vec<NCPolynomial> = CORE.iter().map(|s| p(s)).collect();
    for s in [
        "xs*x*a*xs*x - xs*x*iu",
        "x*a*xs*x - x*iu",
        "x*xs*b*x*xs - iv*x*xs",
        "x*xs*b*x - iv*x",
        "xs*x*as*xs*x - ius*xs*x",
        "xs*x*as*xs - ius*xs",
        "x*xs*bs*x*xs - x*xs*ivs",
        "xs*bs*x*xs - xs*ivs",
        "x*c*x - x",
        "c*x*c - c",
        "cs*xs - x*c",
        "xs*cs - c*x",
    ] {
        gens.push(p(s));
    }
    let (dc, dcs) = (t.get("c").unwrap(), t.get("cs").unwrap());
    let order = MonomialOrder::deglex(first_appearance(&gens)).with_elimination([dc, dcs]);
    let ideal = IdealPresentation::with_order(gens, order);
    c.bench_function("find_witness", |b| {
        b.iter(|| find_witness(black_box(&ideal), dc, 200_000))
    });
}

criterion_group!(benches, membership, witness);
criterion_main!(benches);
