use std::collections::BTreeSet;
use std::hint::black_box;
use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, Criterion};
use hoapp::automaton::automaton_product;
use hoapp::emptiness::{lasso_search, LassoConfig};
use hoapp::linsolve::{linearize, solve};
use hoapp::ltl::{parse_ltl, parse_type_mapping, translate};
use hoapp::semantics::{check_lasso, parse_word, Word};
use hoapp::syntax::{parse_expr, parse_hoapp};
use hoapp::typesys::check_automaton;
use hoapp::{Automaton, ParseOptions};

fn load(name: &str) -> Automaton {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(format!("{name}.hoa"));
    let text = std::fs::read_to_string(p).unwrap();
    check_automaton(&parse_hoapp(&text, &ParseOptions::default()).unwrap()).unwrap()
}

fn bench_product(c: &mut Criterion) {
    let a = load("counter_complement");
    let b = load("nonce_complement");
    c.bench_function("product counter_complement x nonce_complement", |bch| {
        bch.iter(|| automaton_product(black_box(&a), black_box(&b)).unwrap())
    });
}

fn bench_check_lasso(c: &mut Criterion) {
    let a = load("counter");
    let mut text: String = (0..100).map(|i| format!("x={i}\n")).collect();
    text.push_str("---loop\nx=100\n");
    let Word::Lasso(w) = parse_word(&text, &a.names(), &a.types()).unwrap() else {
        unreachable!()
    };
    c.bench_function("check_lasso counter stem 100", |bch| {
        bch.iter(|| check_lasso(black_box(&a), black_box(&w)).unwrap())
    });
}

fn bench_translate(c: &mut Criterion) {
    let m = parse_type_mapping("x:int\ny:int\np:bool\n").unwrap();
    let f = parse_ltl("G ((@x > @y) -> F (@p U (@y >= @x))) & G F @p", &m).unwrap();
    c.bench_function("translate response formula", |bch| {
        bch.iter(|| translate(black_box(&f), m.vars.clone()))
    });
}

fn bench_solve(c: &mut Criterion) {
    let names: Vec<String> = ["x", "y", "z"].map(String::from).to_vec();
    let e = parse_expr(
        "@x + @y + @z <= i10 & @x - @y >= i3 & i2*@z - @x == i1 & @y >= i1 & @z > i0",
        &names,
        &Default::default(),
    )
    .unwrap();
    let cs = linearize(&e).unwrap();
    let ints: BTreeSet<usize> = (0..3).collect();
    c.bench_function("solve small integer system", |bch| {
        bch.iter(|| solve(black_box(&cs), black_box(&ints)))
    });
}

fn bench_lasso_search(c: &mut Criterion) {
    let a = load("nonce_complement");
    let cfg = LassoConfig::default();
    c.bench_function("lasso_search nonce_complement", |bch| {
        bch.iter(|| lasso_search(black_box(&a), black_box(&cfg)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_product,
    bench_check_lasso,
    bench_translate,
    bench_solve,
    bench_lasso_search
);
criterion_main!(benches);
