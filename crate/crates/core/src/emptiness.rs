//! Non-emptiness: a VMT-LIB encoding for external model checkers and a
//! bounded lasso search backed by [`crate::linsolve`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::automaton::{AcceptanceCond, Automaton, Disjunct, Edge};
use crate::error::{Error, Result};
use crate::linsolve::{self, LinExpr, LinearConstraint, Limits, Rel, SatResult};
use crate::ltl::LtlFormula;
use crate::semantics::{check_lasso, LassoWord, Valuation, Value};
use crate::syntax::{BinOp, Expr, UnOp};
use crate::typesys::Type;

/// Maps `Fin(i)` to `F G !ACC_i` and `Inf(i)` to `G F ACC_i`; the atom
/// `Var(i)` stands for the acceptance bit `ACC_i`.
pub fn acceptance_to_ltl(acc: &AcceptanceCond) -> LtlFormula {
    let bit = |i: usize| LtlFormula::Atom(Expr::Var(i));
    match acc {
        AcceptanceCond::True => LtlFormula::tt(),
        AcceptanceCond::False => LtlFormula::ff(),
        AcceptanceCond::Fin(i) => LtlFormula::finally(LtlFormula::globally(LtlFormula::negation(bit(*i)))),
        AcceptanceCond::Inf(i) => LtlFormula::globally(LtlFormula::finally(bit(*i))),
        AcceptanceCond::And(l, r) => LtlFormula::and(acceptance_to_ltl(l), acceptance_to_ltl(r)),
        AcceptanceCond::Or(l, r) => LtlFormula::or(acceptance_to_ltl(l), acceptance_to_ltl(r)),
    }
}

fn require_existential(a: &Automaton, what: &str) -> Result<()> {
    if a.is_existential() {
        Ok(())
    } else {
        Err(Error::Semantic(format!(
            "{what} requires an existential automaton (no and-states)"
        )))
    }
}

fn simple_symbol(s: &str) -> bool {
    let ok = |c: char| c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c);
    !s.is_empty() && !s.starts_with(|c: char| c.is_ascii_digit()) && s.chars().all(ok) && !s.contains('|')
}

fn symbol(s: &str) -> String {
    if simple_symbol(s) {
        s.to_string()
    } else {
        format!("|{}|", s.replace(['|', '\\'], "_"))
    }
}

struct Symbols {
    loc: String,
    vars: Vec<String>,
    acc: Vec<String>,
}

impl Symbols {
    fn new(a: &Automaton) -> Self {
        let mut taken: BTreeSet<String> = BTreeSet::new();
        let mut fresh = |base: String| {
            let mut s = base;
            while taken.contains(&s) || taken.contains(&format!("{s}.next")) {
                s.push('_');
            }
            taken.insert(s.clone());
            s
        };
        // variables keep their names; location and acceptance bits yield
        let vars: Vec<String> = a.vars.iter().map(|v| fresh(v.name.clone())).collect();
        let loc = fresh("loc".into());
        let acc = (0..a.num_sets).map(|i| fresh(format!("ACC_{i}"))).collect();
        Symbols { loc, vars, acc }
    }
}

fn smt_sort(t: Type) -> &'static str {
    match t {
        Type::Int => "Int",
        Type::Real => "Real",
        _ => "Bool",
    }
}

fn smt_num(n: &num_bigint::BigInt) -> String {
    if n.is_negative() {
        format!("(- {})", -n)
    } else {
        n.to_string()
    }
}

/// SMT-LIB rendering of `e` with its type; integer operands of real
/// operations are wrapped in `to_real`.
fn smt(e: &Expr, types: &[Type], name: &dyn Fn(usize) -> String) -> (String, Type) {
    let coerce = |(s, t): (String, Type), to: Type| {
        if t == Type::Int && to == Type::Real {
            format!("(to_real {s})")
        } else {
            s
        }
    };
    match e {
        Expr::Bool(b) => (b.to_string(), Type::Bool),
        Expr::Int(n) => (smt_num(n), Type::Int),
        Expr::Real(r) => {
            let s = if r.is_integer() {
                format!("{}.0", r.numer().abs())
            } else {
                format!("(/ {}.0 {}.0)", r.numer().abs(), r.denom())
            };
            let s = if r.is_negative() { format!("(- {s})") } else { s };
            (s, Type::Real)
        }
        Expr::Var(x) => (name(*x), types[*x]),
        Expr::Alias(a) => (symbol(&format!("@{a}")), Type::Bool),
        Expr::Unary(op, x) => {
            let (s, t) = smt(x, types, name);
            match op {
                UnOp::Neg => (format!("(- {s})"), t),
                UnOp::Not => (format!("(not {s})"), Type::Bool),
                _ => (format!("({op:?} {s})"), Type::Ltl),
            }
        }
        Expr::Binary(op, l, r) => {
            let (l, r) = (smt(l, types, name), smt(r, types, name));
            let wide = if l.1 == Type::Real || r.1 == Type::Real {
                Type::Real
            } else {
                l.1
            };
            let (ls, rs) = (coerce(l, wide), coerce(r, wide));
            let head = match op {
                BinOp::And => "and",
                BinOp::Or => "or",
                BinOp::Add => "+",
                BinOp::Sub => "-",
                BinOp::Mul => "*",
                BinOp::Lt => "<",
                BinOp::Le => "<=",
                BinOp::Gt => ">",
                BinOp::Ge => ">=",
                BinOp::Eq => "=",
                BinOp::Ne => "distinct",
                _ => "ltl.U",
            };
            let ty = if op.is_arith() { wide } else { Type::Bool };
            (format!("({head} {ls} {rs})"), ty)
        }
    }
}

fn smt_ltl(f: &LtlFormula, bits: &[String]) -> String {
    use LtlFormula as F;
    match f {
        F::Atom(Expr::Var(i)) => bits[*i].clone(),
        F::Atom(Expr::Bool(b)) => b.to_string(),
        F::Atom(e) => crate::syntax::print_expr(e),
        F::Not(x) => format!("(not {})", smt_ltl(x, bits)),
        F::And(l, r) => format!("(and {} {})", smt_ltl(l, bits), smt_ltl(r, bits)),
        F::Or(l, r) => format!("(or {} {})", smt_ltl(l, bits), smt_ltl(r, bits)),
        F::Next(x) => format!("(ltl.X {})", smt_ltl(x, bits)),
        F::Finally(x) => format!("(ltl.F {})", smt_ltl(x, bits)),
        F::Globally(x) => format!("(ltl.G {})", smt_ltl(x, bits)),
        F::Until(l, r) => format!("(ltl.U {} {})", smt_ltl(l, bits), smt_ltl(r, bits)),
        F::Release(l, r) => format!("(ltl.R {} {})", smt_ltl(l, bits), smt_ltl(r, bits)),
    }
}

/// Sets `i` when the condition is a disjunction of `Inf` atoms, so that its
/// negation is `F G` of a conjunction of negated bits.
fn inf_disjunction(acc: &AcceptanceCond, out: &mut Vec<usize>) -> bool {
    match acc {
        AcceptanceCond::Inf(i) => {
            out.push(*i);
            true
        }
        AcceptanceCond::False => true,
        AcceptanceCond::Or(l, r) => inf_disjunction(l, out) && inf_disjunction(r, out),
        _ => false,
    }
}

fn conj_smt(parts: Vec<String>) -> String {
    match parts.len() {
        0 => "true".into(),
        1 => parts.into_iter().next().unwrap(),
        _ => format!("(and {})", parts.join(" ")),
    }
}

fn disj_smt(parts: Vec<String>) -> String {
    match parts.len() {
        0 => "false".into(),
        1 => parts.into_iter().next().unwrap(),
        _ => format!("(or {})", parts.join(" ")),
    }
}

/// VMT-LIB transition system whose counterexamples to the property are
/// accepting runs of `a`.
pub fn emit_vmt(a: &Automaton) -> Result<String> {
    require_existential(a, "VMT emission")?;
    let sym = Symbols::new(a);
    let types = a.types();
    let mut out = String::new();
    let n = a.num_states;
    writeln!(out, "; states: {n}, variables: {}, acceptance sets: {}", a.vars.len(), a.num_sets).unwrap();
    writeln!(out, "; acceptance: {}", a.acc).unwrap();
    let mut decls: Vec<(String, &str)> = vec![(sym.loc.clone(), "Int")];
    decls.extend(sym.vars.iter().zip(&types).map(|(s, t)| (s.clone(), smt_sort(*t))));
    decls.extend(sym.acc.iter().map(|s| (s.clone(), "Bool")));
    for (i, (s, sort)) in decls.iter().enumerate() {
        let next = symbol(&format!("{}.next", s.trim_matches('|')));
        let cur = symbol(s.trim_matches('|'));
        writeln!(out, "(declare-fun {cur} () {sort})").unwrap();
        writeln!(out, "(declare-fun {next} () {sort})").unwrap();
        writeln!(out, "(define-fun .sv{i} () {sort} (! {cur} :next {next}))").unwrap();
    }
    let cur = |s: &str| symbol(s.trim_matches('|'));
    let next = |s: &str| symbol(&format!("{}.next", s.trim_matches('|')));
    let loc = cur(&sym.loc);

    let mut init = vec![disj_smt(
        a.initial
            .iter()
            .filter_map(|z| z.as_single())
            .map(|q| format!("(= {loc} {q})"))
            .collect(),
    )];
    init.extend(sym.acc.iter().map(|b| format!("(not {})", cur(b))));
    writeln!(out, "(define-fun .init () Bool (! {} :init true))", conj_smt(init)).unwrap();

    let cur_name = |x: usize| cur(&sym.vars[x]);
    let mut trans = Vec::new();
    for e in a.all_edges() {
        let target = e.target.as_single().expect("existential");
        let mut parts = vec![format!("(= {loc} {})", e.source)];
        if e.guard != Expr::Bool(true) {
            parts.push(smt(&e.guard, &types, &cur_name).0);
        }
        parts.push(format!("(= {} {target})", next(&sym.loc)));
        for (x, t) in &e.obligation.positive {
            let (s, ty) = smt(t, &types, &cur_name);
            let s = if ty == Type::Int && types[*x] == Type::Real { format!("(to_real {s})") } else { s };
            parts.push(format!("(= {} {s})", next(&sym.vars[*x])));
        }
        for (x, t) in &e.obligation.negative {
            let (s, ty) = smt(t, &types, &cur_name);
            let s = if ty == Type::Int && types[*x] == Type::Real { format!("(to_real {s})") } else { s };
            parts.push(format!("(distinct {} {s})", next(&sym.vars[*x])));
        }
        for (i, b) in sym.acc.iter().enumerate() {
            let nb = next(b);
            parts.push(if e.acc.contains(&i) { nb } else { format!("(not {nb})") });
        }
        trans.push(conj_smt(parts));
    }
    writeln!(out, "(define-fun .trans () Bool (! {} :trans true))", disj_smt(trans)).unwrap();

    let acc_bits: Vec<String> = sym.acc.iter().map(|b| cur(b)).collect();
    let property = LtlFormula::negation(acceptance_to_ltl(&a.acc));
    writeln!(
        out,
        "(define-fun .prop () Bool (! {} :ltl-property 0))",
        smt_ltl(&property, &acc_bits)
    )
    .unwrap();
    let mut infs = Vec::new();
    if inf_disjunction(&a.acc, &mut infs) {
        infs.sort_unstable();
        infs.dedup();
        let p = conj_smt(infs.iter().map(|i| format!("(not {})", acc_bits[*i])).collect());
        writeln!(out, "(define-fun .live () Bool (! {p} :live-property 0))").unwrap();
    }
    Ok(out)
}

/// Bounds for [`lasso_search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LassoConfig {
    pub stem: usize,
    pub loop_len: usize,
    /// Maximum number of solver calls over the whole search.
    pub max_solver_calls: usize,
    /// Maximum number of disjuncts per step formula.
    pub max_disjuncts: usize,
    pub limits: Limits,
}

impl Default for LassoConfig {
    fn default() -> Self {
        LassoConfig {
            stem: 3,
            loop_len: 3,
            max_solver_calls: 50_000,
            max_disjuncts: 64,
            limits: Limits::default(),
        }
    }
}

/// Edge identifier: source state and position in its edge list.
pub type EdgeId = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonEmptyWitness {
    pub word: LassoWord,
    pub stem: Vec<EdgeId>,
    pub cycle: Vec<EdgeId>,
    pub disjunct: Disjunct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchResult {
    Witness(NonEmptyWitness),
    Unknown(String),
}

/// Replaces boolean variables by 0/1 integers so that guards become linear.
fn encode(e: &Expr, types: &[Type]) -> Expr {
    let is_bool = |e: &Expr| match e {
        Expr::Bool(_) => true,
        Expr::Var(x) => types[*x] == Type::Bool,
        Expr::Unary(UnOp::Not, _) => true,
        Expr::Binary(op, _, _) => matches!(op, BinOp::And | BinOp::Or) || op.is_cmp() || op.is_test(),
        _ => false,
    };
    match e {
        Expr::Var(x) if types[*x] == Type::Bool => {
            Expr::binary(BinOp::Ge, Expr::Var(*x), Expr::int(1))
        }
        Expr::Unary(UnOp::Not, x) => Expr::negation(encode(x, types)),
        Expr::Binary(op @ (BinOp::And | BinOp::Or), l, r) => {
            Expr::binary(*op, encode(l, types), encode(r, types))
        }
        Expr::Binary(op @ (BinOp::Eq | BinOp::Ne), l, r) if is_bool(l) => {
            let (l, r) = (encode(l, types), encode(r, types));
            let same = Expr::binary(
                BinOp::Or,
                Expr::binary(BinOp::And, l.clone(), r.clone()),
                Expr::binary(BinOp::And, Expr::negation(l), Expr::negation(r)),
            );
            if *op == BinOp::Eq {
                same
            } else {
                Expr::negation(same)
            }
        }
        _ => e.clone(),
    }
}

fn shift(e: &Expr, f: &dyn Fn(usize) -> usize) -> Expr {
    match e {
        Expr::Var(x) => Expr::Var(f(*x)),
        Expr::Unary(op, x) => Expr::unary(*op, shift(x, f)),
        Expr::Binary(op, l, r) => Expr::binary(*op, shift(l, f), shift(r, f)),
        _ => e.clone(),
    }
}

struct Search<'a> {
    a: &'a Automaton,
    cfg: &'a LassoConfig,
    types: Vec<Type>,
    calls: usize,
    gave_up: Option<String>,
}

enum Extend {
    Model(BTreeMap<usize, BigRational>),
    Unsat,
    Exhausted,
}

enum Step {
    Found(NonEmptyWitness),
    Continue,
    Stop,
}

impl Search<'_> {
    fn edge(&self, id: EdgeId) -> &Edge {
        &self.a.edges[id.0][id.1]
    }

    /// Step-`j` constraint of edge `e` where position `s + l` folds onto `s`.
    fn step_formula(&self, e: &Edge, j: usize, s: usize, l: usize) -> Expr {
        let n = self.types.len();
        let pos = |p: usize| if p == s + l { s } else { p };
        let now = |x: usize| pos(j) * n + x;
        let later = |x: usize| pos(j + 1) * n + x;
        let mut parts = vec![shift(&e.guard, &now)];
        for (x, t) in &e.obligation.positive {
            parts.push(Expr::binary(BinOp::Eq, Expr::Var(later(*x)), shift(t, &now)));
        }
        for (x, t) in &e.obligation.negative {
            parts.push(Expr::binary(BinOp::Ne, Expr::Var(later(*x)), shift(t, &now)));
        }
        Expr::conj(parts)
    }

    fn try_lasso(&mut self, stem: &[EdgeId], cycle: &[EdgeId], disjunct: &Disjunct) -> Step {
        let (s, l) = (stem.len(), cycle.len());
        let n = self.types.len();
        let steps = s + l;
        let step_types: Vec<Type> = (0..steps * n).map(|k| self.types[k % n]).collect();
        let mut ints = BTreeSet::new();
        let mut base = Vec::new();
        for (k, t) in step_types.iter().enumerate() {
            match t {
                Type::Int => {
                    ints.insert(k);
                }
                Type::Bool => {
                    // 0 <= b <= 1
                    ints.insert(k);
                    let minus_one = -BigRational::one();
                    base.push(LinearConstraint::new(LinExpr::var(k).scale(&minus_one), Rel::Le));
                    base.push(LinearConstraint::new(
                        LinExpr::var(k).add(&LinExpr::constant(BigRational::one()), &minus_one),
                        Rel::Le,
                    ));
                }
                _ => {}
            }
        }
        let mut dnfs = Vec::with_capacity(steps);
        for (j, id) in stem.iter().chain(cycle).enumerate() {
            let f = encode(&self.step_formula(self.edge(*id), j, s, l), &step_types);
            match linsolve::linearize_dnf(&f, self.cfg.max_disjuncts) {
                Ok(d) if d.is_empty() => return Step::Continue,
                Ok(d) => dnfs.push(d),
                Err(u) => {
                    self.gave_up.get_or_insert(format!("unsupported: {u}"));
                    return Step::Continue;
                }
            }
        }
        match self.extend(&dnfs, 0, base, &ints) {
            Extend::Model(model) => {
                let value = |p: usize, x: usize| {
                    let v = model.get(&(p * n + x)).cloned().unwrap_or_else(BigRational::zero);
                    match self.types[x] {
                        Type::Bool => Value::Bool(v >= BigRational::one()),
                        Type::Int => Value::Int(v.to_integer()),
                        _ => Value::Real(v),
                    }
                };
                let val = |p: usize| Valuation::new((0..n).map(|x| value(p, x)).collect());
                let word = LassoWord::new((0..s).map(val).collect(), (s..steps).map(val).collect());
                match check_lasso(self.a, &word) {
                    Ok(true) => Step::Found(NonEmptyWitness {
                        word,
                        stem: stem.to_vec(),
                        cycle: cycle.to_vec(),
                        disjunct: disjunct.clone(),
                    }),
                    _ => {
                        self.gave_up.get_or_insert("a solver model failed verification".into());
                        Step::Continue
                    }
                }
            }
            Extend::Exhausted => Step::Stop,
            Extend::Unsat => Step::Continue,
        }
    }

    /// Depth-first choice of one disjunct per step with a satisfiability
    /// check after each step.
    fn extend(
        &mut self,
        dnfs: &[Vec<Vec<LinearConstraint>>],
        j: usize,
        acc: Vec<LinearConstraint>,
        ints: &BTreeSet<usize>,
    ) -> Extend {
        for d in &dnfs[j] {
            if self.calls >= self.cfg.max_solver_calls {
                self.gave_up = Some("solver call budget exhausted".into());
                return Extend::Exhausted;
            }
            self.calls += 1;
            let mut cs = acc.clone();
            cs.extend(d.iter().cloned());
            match linsolve::solve_with(&cs, ints, &self.cfg.limits) {
                SatResult::Sat(m) if j + 1 == dnfs.len() => return Extend::Model(m),
                SatResult::Sat(_) => match self.extend(dnfs, j + 1, cs, ints) {
                    Extend::Unsat => {}
                    found => return found,
                },
                SatResult::Unsat => {}
                SatResult::Unknown(w) | SatResult::Unsupported(w) => {
                    self.gave_up.get_or_insert(format!("solver: {w}"));
                }
            }
        }
        Extend::Unsat
    }

    fn walks(&self, from: usize, len: usize, to: Option<usize>) -> Vec<Vec<EdgeId>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.walk(from, len, to, &mut path, &mut out);
        out
    }

    fn walk(&self, q: usize, left: usize, to: Option<usize>, path: &mut Vec<EdgeId>, out: &mut Vec<Vec<EdgeId>>) {
        if left == 0 {
            if to.is_none_or(|t| t == q) {
                out.push(path.clone());
            }
            return;
        }
        for (i, e) in self.a.edges[q].iter().enumerate() {
            if e.guard == Expr::Bool(false) {
                continue;
            }
            path.push((q, i));
            self.walk(e.target.states()[0], left - 1, to, path, out);
            path.pop();
        }
    }
}

/// Searches lassos with stem length at most `cfg.stem` and loops (closed
/// walks) of length at most `cfg.loop_len` for an ultimately periodic
/// accepted word. Finding none proves nothing.
pub fn lasso_search(a: &Automaton, cfg: &LassoConfig) -> Result<SearchResult> {
    require_existential(a, "lasso search")?;
    let dnf = a.acc.dnf();
    let mut search = Search {
        a,
        cfg,
        types: a.types(),
        calls: 0,
        gave_up: None,
    };
    let starts: Vec<usize> = a.initial.iter().filter_map(|z| z.as_single()).collect();
    for s in 0..=cfg.stem {
        for l in 1..=cfg.loop_len {
            for &q0 in &starts {
                for stem in search.walks(q0, s, None) {
                    let q = stem.last().map_or(q0, |id| search.edge(*id).target.states()[0]);
                    for cycle in search.walks(q, l, Some(q)) {
                        let hit: BTreeSet<usize> =
                            cycle.iter().flat_map(|id| search.edge(*id).acc.iter().copied()).collect();
                        let Some(d) = dnf.iter().find(|d| d.holds(&hit)) else {
                            continue;
                        };
                        match search.try_lasso(&stem, &cycle, d) {
                            Step::Found(w) => return Ok(SearchResult::Witness(w)),
                            Step::Continue => {}
                            Step::Stop => return Ok(SearchResult::Unknown(search.gave_up.unwrap())),
                        }
                    }
                }
            }
        }
    }
    let mut why = format!(
        "no ultimately periodic witness with stem <= {} and loop <= {}",
        cfg.stem, cfg.loop_len
    );
    if let Some(g) = search.gave_up {
        write!(why, " ({g})").unwrap();
    }
    Ok(SearchResult::Unknown(why))
}
