mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::random::rng;
use hoapp::linsolve::*;
use hoapp::semantics::{eval_bool, Valuation, Value};
use hoapp::syntax::{parse_expr, BinOp, Expr, UnOp};
use num_rational::BigRational;
use num_traits::Signed;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn expr(s: &str) -> Expr {
    let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    parse_expr(s, &names, &Default::default()).unwrap()
}

fn cons(s: &str) -> Vec<LinearConstraint> {
    linearize(&expr(s)).unwrap()
}

fn ints(vs: &[usize]) -> BTreeSet<usize> {
    vs.iter().copied().collect()
}

#[test]
fn linearize_examples() {
    let c = cons("@x + i1 == @y");
    assert_eq!(c.len(), 1);
    assert_eq!(c[0].coeffs, BTreeMap::from([(0, q(1)), (1, q(-1))]));
    assert_eq!(c[0].rel, Rel::Eq);
    assert_eq!(c[0].rhs, q(-1));

    let c = cons("!(@x < i0)");
    assert_eq!(c.len(), 1);
    assert_eq!(c[0].coeffs, BTreeMap::from([(0, q(-1))]));
    assert_eq!(c[0].rel, Rel::Le);
    assert_eq!(c[0].rhs, q(0));

    assert!(linearize(&expr("@x * @y > i0")).is_err());
    assert!(linearize(&expr("@x < i0 | @y < i0")).is_err());

    let c = cons("!(@x == @y | @x >= i2 * @y + i3)");
    assert_eq!(c.len(), 2);
    assert_eq!(c[0].rel, Rel::Ne);
    // x < 2y + 3  ==>  x - 2y < 3
    assert_eq!(c[1].coeffs, BTreeMap::from([(0, q(1)), (1, q(-2))]));
    assert_eq!((c[1].rel, c[1].rhs.clone()), (Rel::Lt, q(3)));

    assert_eq!(cons("t"), vec![]);
    assert_eq!(solve(&cons("f"), &ints(&[])), SatResult::Unsat);
    assert_eq!(cons("i2 * (@x - r0.5) <= @z * i3").len(), 1);
}

#[test]
fn dnf_expansion() {
    let d = linearize_dnf(&expr("(@x < i0 | @y < i0) & !(@z == i1 & @x == i2)"), 16).unwrap();
    assert_eq!(d.len(), 4);
    assert!(d.iter().all(|c| c.len() == 2));
    assert!(linearize_dnf(&expr("(@x < i0 | @y < i0) & (@x < i1 | @y < i1)"), 3).is_err());
}

#[test]
fn solve_examples() {
    let i = ints(&[0, 1]);
    let unsat = [cons("@x == i5"), cons("@x == i6")].concat();
    assert_eq!(solve(&unsat, &i), SatResult::Unsat);

    let sys = [cons("@y == @x + i1"), cons("@x == i5")].concat();
    match solve(&sys, &i) {
        SatResult::Sat(m) => assert_eq!(m, BTreeMap::from([(0, q(5)), (1, q(6))])),
        other => panic!("{other:?}"),
    }

    assert_eq!(solve(&cons("i2 * @x == i1"), &ints(&[0])), SatResult::Unsat);
    match solve(&cons("i2 * @x == i1"), &ints(&[])) {
        SatResult::Sat(m) => assert_eq!(m[&0], BigRational::new(1.into(), 2.into())),
        other => panic!("{other:?}"),
    }

    // strictness survives elimination
    assert_eq!(solve(&cons("@x < @y & @y < @x"), &ints(&[])), SatResult::Unsat);
    assert_eq!(solve(&cons("@x <= @y & @y <= @x & @x != @y"), &ints(&[])), SatResult::Unsat);
    assert!(solve(&cons("@x < @y & @y < @x + i1"), &ints(&[])).is_sat());
    assert_eq!(solve(&cons("@x < @y & @y < @x + i1"), &ints(&[0, 1])), SatResult::Unsat);
}

#[test]
fn limits_are_reported() {
    let many: Vec<LinearConstraint> = (0..13).flat_map(|k| cons(&format!("@x != i{k}"))).collect();
    assert!(matches!(solve(&many, &ints(&[0])), SatResult::Unknown(_)));
    let ok: Vec<LinearConstraint> = (0..5).flat_map(|k| cons(&format!("@x != i{k}"))).collect();
    assert!(solve(&ok, &ints(&[0])).is_sat());

    // the relaxation puts x at 1/2, so branching is needed
    let branchy = cons("i2 * @x == @y & @y == i1");
    let one_node = Limits {
        bb_nodes: 1,
        ..Limits::default()
    };
    assert!(matches!(solve_with(&branchy, &ints(&[0, 1]), &one_node), SatResult::Unknown(_)));
    assert_eq!(solve(&branchy, &ints(&[0, 1])), SatResult::Unsat);
    let shallow = Limits {
        bb_depth: 0,
        ..Limits::default()
    };
    assert!(matches!(solve_with(&branchy, &ints(&[0, 1]), &shallow), SatResult::Unknown(_)));
    let r = solve(&cons("i3 * @x - i3 * @y <= i1 & i3 * @x - i3 * @y >= i1"), &ints(&[0, 1]));
    assert_eq!(r, SatResult::Unsat);
}

#[derive(Debug, Clone)]
struct Row {
    coeffs: [i64; 3],
    op: BinOp,
    constant: i64,
}

impl Row {
    fn holds(&self, p: [i64; 3]) -> bool {
        let l: i64 = self.coeffs.iter().zip(p).map(|(c, v)| c * v).sum();
        let r = self.constant;
        match self.op {
            BinOp::Lt => l < r,
            BinOp::Le => l <= r,
            BinOp::Gt => l > r,
            BinOp::Ge => l >= r,
            BinOp::Eq => l == r,
            _ => l != r,
        }
    }

    fn to_expr(&self) -> Expr {
        let lit = |c: i64| {
            if c < 0 {
                Expr::unary(UnOp::Neg, Expr::int(-c))
            } else {
                Expr::int(c)
            }
        };
        let mut lhs: Option<Expr> = None;
        for (v, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let t = Expr::binary(BinOp::Mul, lit(c), Expr::Var(v));
            lhs = Some(match lhs {
                None => t,
                Some(l) => Expr::binary(BinOp::Add, l, t),
            });
        }
        Expr::binary(self.op, lhs.unwrap_or_else(|| Expr::int(0)), lit(self.constant))
    }
}

fn system(rng: &mut ChaCha8Rng, vars: usize) -> Vec<Row> {
    let ops = [BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge, BinOp::Eq, BinOp::Ne];
    (0..rng.gen_range(1..=4))
        .map(|_| {
            let mut coeffs = [0; 3];
            for c in coeffs.iter_mut().take(vars) {
                *c = rng.gen_range(-3..=3);
            }
            Row {
                coeffs,
                op: ops[rng.gen_range(0..ops.len())],
                constant: rng.gen_range(-5..=5),
            }
        })
        .collect()
}

fn conj(rows: &[Row]) -> Expr {
    Expr::conj(rows.iter().map(Row::to_expr))
}

fn brute(rows: &[Row], vars: usize) -> bool {
    let r = -20..=20;
    let axis = |i: usize| if i < vars { r.clone() } else { 0..=0 };
    axis(0).any(|a| axis(1).any(|b| axis(2).any(|c| rows.iter().all(|row| row.holds([a, b, c])))))
}

fn valuation(m: &BTreeMap<usize, BigRational>, int: bool) -> Valuation {
    Valuation::new(
        (0..3)
            .map(|v| {
                let x = m.get(&v).cloned().unwrap_or_else(|| q(0));
                if int {
                    Value::Int(x.to_integer())
                } else {
                    Value::Real(x)
                }
            })
            .collect(),
    )
}

fn in_box(m: &BTreeMap<usize, BigRational>) -> bool {
    m.values().all(|v| v.abs() <= q(20))
}

#[test]
fn agrees_with_brute_force() {
    let mut rng = rng(0x11a5);
    let (mut sat, mut unsat, mut unknown) = (0, 0, 0);
    for round in 0..1000 {
        let vars = rng.gen_range(1..=3);
        let rows = system(&mut rng, vars);
        let e = conj(&rows);
        let cs = linearize(&e).unwrap();
        let r = solve(&cs, &ints(&[0, 1, 2]));
        assert_eq!(r, solve(&cs, &ints(&[0, 1, 2])), "nondeterministic on {rows:?}");
        let witness = brute(&rows, vars);
        match r {
            SatResult::Sat(m) => {
                assert!(m.values().all(|v| v.is_integer()), "{rows:?}: {m:?}");
                assert!(eval_bool(&e, &valuation(&m, true)).unwrap(), "{round}: {rows:?}: {m:?}");
                // a verified model outside the search box is still a model
                assert!(witness || !in_box(&m), "{round}: {rows:?}: {m:?}");
                sat += 1;
            }
            SatResult::Unsat => {
                assert!(!witness, "{round}: solver says unsat: {rows:?}");
                unsat += 1;
            }
            SatResult::Unknown(_) => unknown += 1,
            SatResult::Unsupported(w) => panic!("{w}"),
        }
    }
    eprintln!("sat {sat}, unsat {unsat}, unknown {unknown}");
    assert!(sat > 100 && unsat > 100, "degenerate sample: {sat}/{unsat}");
    assert!(unknown <= 10);
}

#[test]
fn rational_models_verify() {
    let mut rng = rng(0x7ea1);
    for _ in 0..500 {
        let vars = rng.gen_range(1..=3);
        let rows = system(&mut rng, vars);
        let e = conj(&rows);
        let r = solve(&linearize(&e).unwrap(), &ints(&[]));
        match r {
            SatResult::Sat(m) => assert!(eval_bool(&e, &valuation(&m, false)).unwrap()),
            SatResult::Unsat => assert!(!brute(&rows, vars), "{rows:?}"),
            other => panic!("{other:?}"),
        }
    }
}
