//! Exact satisfiability of conjunctions of linear constraints over integer
//! and rational variables.
//!
//! Equalities are eliminated by substitution, the remaining inequalities by
//! Fourier-Motzkin; disequalities are split into `<`/`>` cases and integer
//! variables are handled by branch and bound on the rational relaxation.
//! The procedure is sound in both directions but may give up with
//! [`SatResult::Unknown`] when a resource bound is hit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::syntax::{BinOp, Expr, UnOp};

type Q = BigRational;

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Eq,
    Le,
    Lt,
    Ne,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Eq => "=",
            Rel::Le => "<=",
            Rel::Lt => "<",
            Rel::Ne => "!=",
        }
    }
}

/// `Σ cᵢ·xᵢ + constant`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LinExpr {
    pub coeffs: BTreeMap<usize, Q>,
    pub constant: Q,
}

impl LinExpr {
    pub fn constant(c: Q) -> Self {
        LinExpr {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(x: usize) -> Self {
        LinExpr {
            coeffs: BTreeMap::from([(x, q(1))]),
            constant: q(0),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(mut self, other: &LinExpr, factor: &Q) -> Self {
        for (x, c) in &other.coeffs {
            let e = self.coeffs.entry(*x).or_insert_with(Q::zero);
            *e += c * factor;
            if e.is_zero() {
                self.coeffs.remove(x);
            }
        }
        self.constant += &other.constant * factor;
        self
    }

    pub fn scale(mut self, k: &Q) -> Self {
        if k.is_zero() {
            return LinExpr::default();
        }
        for c in self.coeffs.values_mut() {
            *c *= k;
        }
        self.constant *= k;
        self
    }

    pub fn eval(&self, model: &BTreeMap<usize, Q>) -> Q {
        self.coeffs.iter().fold(self.constant.clone(), |acc, (x, c)| {
            acc + c * model.get(x).cloned().unwrap_or_else(Q::zero)
        })
    }
}

/// `Σ cᵢ·xᵢ ⋈ rhs`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearConstraint {
    pub coeffs: BTreeMap<usize, Q>,
    pub rel: Rel,
    pub rhs: Q,
}

impl LinearConstraint {
    /// `e ⋈ 0`, normalized: constants move to the right, and equalities and
    /// disequalities get a positive leading coefficient.
    pub fn new(e: LinExpr, rel: Rel) -> Self {
        let mut c = LinearConstraint {
            coeffs: e.coeffs,
            rel,
            rhs: -e.constant,
        };
        let leading_negative = c.coeffs.values().next().is_some_and(|v| v.is_negative());
        if matches!(rel, Rel::Eq | Rel::Ne) && leading_negative {
            for v in c.coeffs.values_mut() {
                *v = -v.clone();
            }
            c.rhs = -c.rhs;
        }
        c
    }

    pub fn lhs(&self) -> LinExpr {
        LinExpr {
            coeffs: self.coeffs.clone(),
            constant: q(0),
        }
    }

    pub fn holds(&self, model: &BTreeMap<usize, Q>) -> bool {
        let l = self.lhs().eval(model);
        match self.rel {
            Rel::Eq => l == self.rhs,
            Rel::Le => l <= self.rhs,
            Rel::Lt => l < self.rhs,
            Rel::Ne => l != self.rhs,
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    fn falsum() -> Self {
        LinearConstraint {
            coeffs: BTreeMap::new(),
            rel: Rel::Lt,
            rhs: q(0),
        }
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            f.write_str("0")?;
        }
        for (i, (x, c)) in self.coeffs.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else if i > 0 { "+" } else { "" };
            let sep = if i > 0 { " " } else { "" };
            let mag = c.abs();
            if mag.is_one() {
                write!(f, "{sep}{sign}{}x{x}", if i > 0 { " " } else { "" })?;
            } else {
                write!(f, "{sep}{sign}{}{mag}*x{x}", if i > 0 { " " } else { "" })?;
            }
        }
        write!(f, " {} {}", self.rel.symbol(), self.rhs)
    }
}

/// Input that falls outside linear arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unsupported(pub String);

impl fmt::Display for Unsupported {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn unsupported(e: &Expr, why: &str) -> Unsupported {
    Unsupported(format!("`{}`: {why}", crate::syntax::print_expr(e)))
}

/// A linear term.
pub fn linear_term(e: &Expr) -> Result<LinExpr, Unsupported> {
    match e {
        Expr::Int(n) => Ok(LinExpr::constant(Q::from_integer(n.clone()))),
        Expr::Real(r) => Ok(LinExpr::constant(r.clone())),
        Expr::Var(x) => Ok(LinExpr::var(*x)),
        Expr::Unary(UnOp::Neg, x) => Ok(linear_term(x)?.scale(&q(-1))),
        Expr::Binary(op @ (BinOp::Add | BinOp::Sub), l, r) => {
            let k = if *op == BinOp::Add { q(1) } else { q(-1) };
            Ok(linear_term(l)?.add(&linear_term(r)?, &k))
        }
        Expr::Binary(BinOp::Mul, l, r) => {
            let (l, r) = (linear_term(l)?, linear_term(r)?);
            if l.is_constant() {
                Ok(r.scale(&l.constant))
            } else if r.is_constant() {
                Ok(l.scale(&r.constant))
            } else {
                Err(unsupported(e, "product of two variables"))
            }
        }
        _ => Err(unsupported(e, "not a linear term")),
    }
}

fn comparison(op: BinOp, l: &Expr, r: &Expr, negated: bool) -> Result<LinearConstraint, Unsupported> {
    let (l, r) = (linear_term(l)?, linear_term(r)?);
    let diff = |a: LinExpr, b: &LinExpr| a.add(b, &q(-1));
    use BinOp::*;
    let op = if negated {
        match op {
            Lt => Ge,
            Le => Gt,
            Gt => Le,
            Ge => Lt,
            Eq => Ne,
            _ => Eq,
        }
    } else {
        op
    };
    Ok(match op {
        Lt => LinearConstraint::new(diff(l, &r), Rel::Lt),
        Le => LinearConstraint::new(diff(l, &r), Rel::Le),
        Gt => LinearConstraint::new(diff(r, &l), Rel::Lt),
        Ge => LinearConstraint::new(diff(r, &l), Rel::Le),
        Eq => LinearConstraint::new(diff(l, &r), Rel::Eq),
        _ => LinearConstraint::new(diff(l, &r), Rel::Ne),
    })
}

fn is_numeric_test(l: &Expr, r: &Expr) -> bool {
    linear_term(l).is_ok() || linear_term(r).is_ok()
}

/// Disjunctive normal form of a boolean expression over linear atoms,
/// with negations pushed to the comparisons. At most `limit` disjuncts.
pub fn linearize_dnf(e: &Expr, limit: usize) -> Result<Vec<Vec<LinearConstraint>>, Unsupported> {
    dnf(e, false, limit)
}

fn dnf(e: &Expr, neg: bool, limit: usize) -> Result<Vec<Vec<LinearConstraint>>, Unsupported> {
    match e {
        Expr::Bool(b) => Ok(if *b != neg { vec![Vec::new()] } else { Vec::new() }),
        Expr::Unary(UnOp::Not, x) => dnf(x, !neg, limit),
        Expr::Binary(op @ (BinOp::And | BinOp::Or), l, r) => {
            let conj = (*op == BinOp::And) != neg;
            let (a, b) = (dnf(l, neg, limit)?, dnf(r, neg, limit)?);
            if conj {
                if a.len() * b.len() > limit {
                    return Err(unsupported(e, "too many disjuncts"));
                }
                let mut out = Vec::new();
                for x in &a {
                    for y in &b {
                        out.push(x.iter().chain(y).cloned().collect());
                    }
                }
                Ok(out)
            } else {
                if a.len() + b.len() > limit {
                    return Err(unsupported(e, "too many disjuncts"));
                }
                Ok(a.into_iter().chain(b).collect())
            }
        }
        Expr::Binary(op @ (BinOp::Eq | BinOp::Ne), l, r) if !is_numeric_test(l, r) => {
            // boolean equivalence / exclusive or
            let iff = (*op == BinOp::Eq) != neg;
            let both = Expr::binary(BinOp::And, (**l).clone(), (**r).clone());
            let neither = Expr::binary(
                BinOp::And,
                Expr::negation((**l).clone()),
                Expr::negation((**r).clone()),
            );
            let left_only = Expr::binary(BinOp::And, (**l).clone(), Expr::negation((**r).clone()));
            let right_only = Expr::binary(BinOp::And, Expr::negation((**l).clone()), (**r).clone());
            let form = if iff {
                Expr::binary(BinOp::Or, both, neither)
            } else {
                Expr::binary(BinOp::Or, left_only, right_only)
            };
            dnf(&form, false, limit)
        }
        Expr::Binary(op, l, r) if op.is_cmp() || op.is_test() => {
            let c = comparison(*op, l, r, neg)?;
            Ok(vec![vec![c]])
        }
        _ => Err(unsupported(e, "not a linear constraint")),
    }
}

/// Conjunction of linear constraints equivalent to `e`; fails on
/// non-linear terms and on disjunctions that cannot be avoided.
pub fn linearize(e: &Expr) -> Result<Vec<LinearConstraint>, Unsupported> {
    let mut d = dnf(e, false, 1)
        .map_err(|u| Unsupported(u.0.replace("too many disjuncts", "disjunction")))?;
    match d.len() {
        0 => Ok(vec![LinearConstraint::falsum()]),
        1 => Ok(d.pop().unwrap()),
        _ => Err(unsupported(e, "disjunction")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Sat(BTreeMap<usize, Q>),
    Unsat,
    Unknown(String),
    Unsupported(String),
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }
}

/// Resource bounds for [`solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// At most `2^split_bits` disequality cases.
    pub split_bits: u32,
    /// Maximum branch-and-bound depth.
    pub bb_depth: usize,
    /// Maximum number of branch-and-bound nodes per case.
    pub bb_nodes: usize,
    /// Maximum number of constraints during elimination.
    pub max_constraints: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            split_bits: 12,
            bb_depth: 50,
            bb_nodes: 2000,
            max_constraints: 20_000,
        }
    }
}

enum Outcome {
    Sat(BTreeMap<usize, Q>),
    Unsat,
    Unknown(String),
}

/// Decides `cs`; variables in `ints` range over the integers, all others
/// over the rationals. Variables without constraints are absent from the
/// model.
pub fn solve(cs: &[LinearConstraint], ints: &BTreeSet<usize>) -> SatResult {
    solve_with(cs, ints, &Limits::default())
}

pub fn solve_with(cs: &[LinearConstraint], ints: &BTreeSet<usize>, limits: &Limits) -> SatResult {
    let (neq, base): (Vec<_>, Vec<_>) = cs.iter().cloned().partition(|c| c.rel == Rel::Ne);
    if neq.len() > limits.split_bits as usize {
        return SatResult::Unknown(format!("{} disequalities exceed the split bound", neq.len()));
    }
    let mut unknown = None;
    for case in 0u64..1 << neq.len() {
        let mut sys = base.clone();
        for (i, c) in neq.iter().enumerate() {
            // bit clear: lhs < rhs (explored first); bit set: lhs > rhs
            let greater = case >> i & 1 == 1;
            let e = LinExpr {
                coeffs: c.coeffs.clone(),
                constant: -c.rhs.clone(),
            };
            sys.push(LinearConstraint::new(
                if greater { e.scale(&q(-1)) } else { e },
                Rel::Lt,
            ));
        }
        let mut budget = limits.bb_nodes;
        match branch_and_bound(sys, ints, limits, 0, &mut budget) {
            Outcome::Sat(m) => {
                if cs.iter().all(|c| c.holds(&m)) {
                    return SatResult::Sat(m);
                }
                unknown = Some("model failed re-evaluation".to_string());
            }
            Outcome::Unsat => {}
            Outcome::Unknown(why) => {
                unknown.get_or_insert(why);
            }
        }
    }
    match unknown {
        Some(why) => SatResult::Unknown(why),
        None => SatResult::Unsat,
    }
}

fn floor(v: &Q) -> BigInt {
    v.floor().to_integer()
}

fn branch_and_bound(
    sys: Vec<LinearConstraint>,
    ints: &BTreeSet<usize>,
    limits: &Limits,
    depth: usize,
    budget: &mut usize,
) -> Outcome {
    if *budget == 0 {
        return Outcome::Unknown("branch-and-bound node budget exhausted".into());
    }
    *budget -= 1;
    let sys = match tighten(sys, ints) {
        Some(s) => s,
        None => return Outcome::Unsat,
    };
    let model = match rational_model(&sys, limits) {
        Outcome::Sat(m) => m,
        other => return other,
    };
    let fractional = model
        .iter()
        .find(|(x, v)| ints.contains(x) && !v.is_integer());
    let Some((&x, v)) = fractional else {
        return Outcome::Sat(model);
    };
    if depth >= limits.bb_depth {
        return Outcome::Unknown("branch-and-bound depth exhausted".into());
    }
    let f = Q::from_integer(floor(v));
    let mut low = sys.clone();
    low.push(LinearConstraint::new(LinExpr::var(x).add(&LinExpr::constant(f.clone()), &q(-1)), Rel::Le));
    let mut high = sys;
    high.push(LinearConstraint::new(
        LinExpr::constant(f + q(1)).add(&LinExpr::var(x), &q(-1)),
        Rel::Le,
    ));
    let mut unknown = None;
    for branch in [low, high] {
        match branch_and_bound(branch, ints, limits, depth + 1, budget) {
            Outcome::Sat(m) => return Outcome::Sat(m),
            Outcome::Unsat => {}
            Outcome::Unknown(w) => {
                unknown.get_or_insert(w);
            }
        }
    }
    unknown.map_or(Outcome::Unsat, Outcome::Unknown)
}

/// For constraints over integer variables only: scales to coprime integer
/// coefficients, rounds the bound, and applies the divisibility test to
/// equalities. `None` when a constraint is unsatisfiable over the integers.
fn tighten(sys: Vec<LinearConstraint>, ints: &BTreeSet<usize>) -> Option<Vec<LinearConstraint>> {
    let mut out = Vec::with_capacity(sys.len());
    for mut c in sys {
        if c.coeffs.is_empty() || !c.vars().all(|x| ints.contains(&x)) {
            out.push(c);
            continue;
        }
        let lcm = c
            .coeffs
            .values()
            .fold(BigInt::one(), |l, v| l.lcm(v.denom()));
        let nums: Vec<BigInt> = c
            .coeffs
            .values()
            .map(|v| (v * Q::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = nums.iter().fold(BigInt::zero(), |g, n| g.gcd(n));
        let k = Q::new(lcm, g);
        for v in c.coeffs.values_mut() {
            *v = &*v * &k;
        }
        let rhs = &c.rhs * &k;
        match c.rel {
            Rel::Eq if !rhs.is_integer() => return None,
            Rel::Eq => c.rhs = rhs,
            Rel::Le => c.rhs = Q::from_integer(floor(&rhs)),
            Rel::Lt => {
                c.rel = Rel::Le;
                c.rhs = Q::from_integer(rhs.ceil().to_integer() - 1);
            }
            Rel::Ne => c.rhs = rhs,
        }
        out.push(c);
    }
    Some(out)
}

/// An inequality `Σ cᵢ·xᵢ ⋈ rhs` with `⋈` one of `<=`, `<`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Ineq {
    coeffs: BTreeMap<usize, Q>,
    strict: bool,
    rhs: Q,
}

impl Ineq {
    /// Scales so that the first coefficient has magnitude one, which lets
    /// duplicates collapse.
    fn normalized(mut self) -> Ineq {
        if let Some(first) = self.coeffs.values().next().map(|v| v.abs()) {
            for v in self.coeffs.values_mut() {
                *v = &*v / &first;
            }
            self.rhs = &self.rhs / &first;
        }
        self
    }

    fn trivially_holds(&self) -> bool {
        if self.strict {
            self.rhs.is_positive()
        } else {
            !self.rhs.is_negative()
        }
    }
}

/// Rational satisfiability of `Eq`/`Le`/`Lt` constraints with a model.
fn rational_model(sys: &[LinearConstraint], limits: &Limits) -> Outcome {
    // equalities: substitute `x = (rhs - rest) / c` for the smallest x
    let mut eqs: Vec<LinExpr> = Vec::new();
    let mut ineqs: Vec<LinExpr> = Vec::new();
    let mut strict: Vec<bool> = Vec::new();
    for c in sys {
        let e = LinExpr {
            coeffs: c.coeffs.clone(),
            constant: -c.rhs.clone(),
        };
        match c.rel {
            Rel::Eq => eqs.push(e),
            Rel::Le | Rel::Lt => {
                ineqs.push(e);
                strict.push(c.rel == Rel::Lt);
            }
            Rel::Ne => unreachable!("disequalities are split before elimination"),
        }
    }
    let mut subst: Vec<(usize, LinExpr)> = Vec::new();
    while let Some(e) = eqs.pop() {
        let Some((&x, c)) = e.coeffs.iter().next() else {
            if e.constant.is_zero() {
                continue;
            }
            return Outcome::Unsat;
        };
        // x = -(e - c·x) / c
        let c = c.clone();
        let mut rest = e.clone();
        rest.coeffs.remove(&x);
        let def = rest.scale(&(-q(1) / c));
        let apply = |t: &mut LinExpr| {
            if let Some(k) = t.coeffs.remove(&x) {
                *t = std::mem::take(t).add(&def, &k);
            }
        };
        eqs.iter_mut().for_each(apply);
        ineqs.iter_mut().for_each(apply);
        for (_, d) in subst.iter_mut() {
            apply(d);
        }
        subst.push((x, def));
    }

    let system: Vec<Ineq> = ineqs
        .into_iter()
        .zip(strict)
        .map(|(e, s)| Ineq {
            coeffs: e.coeffs,
            strict: s,
            rhs: -e.constant,
        })
        .collect();
    let mut model = match fourier_motzkin(system, limits) {
        Outcome::Sat(m) => m,
        other => return other,
    };
    // definitions only mention variables that survived substitution
    let defs: Vec<(usize, Q)> = subst.iter().map(|(x, d)| (*x, d.eval(&model))).collect();
    model.extend(defs);
    Outcome::Sat(model)
}

fn fourier_motzkin(system: Vec<Ineq>, limits: &Limits) -> Outcome {
    let vars: BTreeSet<usize> = system.iter().flat_map(|c| c.coeffs.keys().copied()).collect();
    let order: Vec<usize> = vars.into_iter().collect();
    let mut levels: Vec<Vec<Ineq>> = Vec::with_capacity(order.len() + 1);
    let mut cur: BTreeSet<Ineq> = system.into_iter().map(Ineq::normalized).collect();
    for &x in &order {
        let (mut upper, mut lower, mut keep) = (Vec::new(), Vec::new(), Vec::new());
        for c in &cur {
            match c.coeffs.get(&x) {
                Some(a) if a.is_positive() => upper.push(c.clone()),
                Some(_) => lower.push(c.clone()),
                None => keep.push(c.clone()),
            }
        }
        levels.push(cur.iter().cloned().collect());
        let mut next: BTreeSet<Ineq> = keep.into_iter().collect();
        for u in &upper {
            for l in &lower {
                let (au, al) = (u.coeffs[&x].clone(), -l.coeffs[&x].clone());
                let mut coeffs: BTreeMap<usize, Q> = BTreeMap::new();
                for (y, c) in &u.coeffs {
                    *coeffs.entry(*y).or_insert_with(Q::zero) += c * &al;
                }
                for (y, c) in &l.coeffs {
                    *coeffs.entry(*y).or_insert_with(Q::zero) += c * &au;
                }
                coeffs.retain(|_, v| !v.is_zero());
                let c = Ineq {
                    coeffs,
                    strict: u.strict || l.strict,
                    rhs: &u.rhs * &al + &l.rhs * &au,
                };
                if c.coeffs.is_empty() {
                    if !c.trivially_holds() {
                        return Outcome::Unsat;
                    }
                    continue;
                }
                next.insert(c.normalized());
            }
            if next.len() > limits.max_constraints {
                return Outcome::Unknown("elimination produced too many constraints".into());
            }
        }
        cur = next;
    }
    if cur.iter().any(|c| !c.trivially_holds()) {
        return Outcome::Unsat;
    }
    // back-substitution, last eliminated variable first
    let mut model: BTreeMap<usize, Q> = BTreeMap::new();
    for (i, &x) in order.iter().enumerate().rev() {
        let mut lo: Option<(Q, bool)> = None;
        let mut hi: Option<(Q, bool)> = None;
        for c in &levels[i] {
            let Some(a) = c.coeffs.get(&x) else { continue };
            let rest: Q = c
                .coeffs
                .iter()
                .filter(|(y, _)| **y != x)
                .map(|(y, k)| k * &model[y])
                .sum();
            let bound = (&c.rhs - rest) / a;
            if a.is_positive() {
                if hi.as_ref().is_none_or(|(h, s)| bound < *h || (bound == *h && c.strict && !s)) {
                    hi = Some((bound, c.strict));
                }
            } else if lo.as_ref().is_none_or(|(l, s)| bound > *l || (bound == *l && c.strict && !s)) {
                lo = Some((bound, c.strict));
            }
        }
        model.insert(x, pick(lo, hi));
    }
    Outcome::Sat(model)
}

/// A value strictly/weakly between the bounds, preferring the integer
/// closest to zero.
fn pick(lo: Option<(Q, bool)>, hi: Option<(Q, bool)>) -> Q {
    let lo_int = lo.as_ref().map(|(l, s)| {
        let f = floor(l);
        if *s || !l.is_integer() {
            f + 1
        } else {
            f
        }
    });
    let hi_int = hi.as_ref().map(|(h, s)| {
        let c = h.ceil().to_integer();
        if *s || !h.is_integer() {
            c - 1
        } else {
            c
        }
    });
    let fits = match (&lo_int, &hi_int) {
        (Some(l), Some(h)) => l <= h,
        _ => true,
    };
    if fits {
        let mut v = BigInt::zero();
        if let Some(l) = lo_int {
            v = v.max(l);
        }
        if let Some(h) = hi_int {
            v = v.min(h);
        }
        return Q::from_integer(v);
    }
    let (l, h) = (lo.unwrap().0, hi.unwrap().0);
    if l == h {
        return l;
    }
    // the shortest decimal strictly inside (l, h)
    let mut scale = BigInt::one();
    loop {
        scale *= 10;
        let s = Q::from_integer(scale.clone());
        let v = Q::new(floor(&(&l * &s)) + 1, scale.clone());
        if v < h {
            return v;
        }
        if scale.bits() > 256 {
            return (l + h) / q(2);
        }
    }
}
