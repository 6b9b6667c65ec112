//! LTL over theory atoms: parsing, negation normal form, a tableau
//! translation to transition-based generalized Büchi automata, and the
//! assume/guarantee composition of automaton header items.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::automaton::{
    automaton_product, automaton_sum, AcceptanceCond, AndState, Automaton, Edge, Obligation,
    Variable,
};
use crate::error::{Error, Pos, Result, TypeError};
use crate::syntax::{self, AliasEnv, BinOp, Expr, UnOp};
use crate::typesys::{type_of_expr, Type};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LtlFormula {
    /// A modality-free boolean expression; `t` and `f` are atoms too.
    Atom(Expr),
    Not(Box<LtlFormula>),
    And(Box<LtlFormula>, Box<LtlFormula>),
    Or(Box<LtlFormula>, Box<LtlFormula>),
    Next(Box<LtlFormula>),
    Finally(Box<LtlFormula>),
    Globally(Box<LtlFormula>),
    Until(Box<LtlFormula>, Box<LtlFormula>),
    Release(Box<LtlFormula>, Box<LtlFormula>),
}

use LtlFormula as F;

fn bx(f: F) -> Box<F> {
    Box::new(f)
}

impl LtlFormula {
    pub fn tt() -> F {
        F::Atom(Expr::tt())
    }

    pub fn ff() -> F {
        F::Atom(Expr::ff())
    }

    pub fn negation(f: F) -> F {
        F::Not(bx(f))
    }

    pub fn and(l: F, r: F) -> F {
        F::And(bx(l), bx(r))
    }

    pub fn or(l: F, r: F) -> F {
        F::Or(bx(l), bx(r))
    }

    pub fn next(f: F) -> F {
        F::Next(bx(f))
    }

    pub fn finally(f: F) -> F {
        F::Finally(bx(f))
    }

    pub fn globally(f: F) -> F {
        F::Globally(bx(f))
    }

    pub fn until(l: F, r: F) -> F {
        F::Until(bx(l), bx(r))
    }

    pub fn release(l: F, r: F) -> F {
        F::Release(bx(l), bx(r))
    }

    /// Conjunction of `fs`; `t` when empty.
    pub fn conj(fs: impl IntoIterator<Item = F>) -> F {
        fs.into_iter()
            .reduce(F::and)
            .unwrap_or_else(F::tt)
    }

    /// Reads an `ltl_t` expression. Maximal modality-free subexpressions
    /// become atoms; `==` and `!=` between temporal operands read as
    /// equivalence and exclusive or.
    pub fn from_expr(e: &Expr) -> F {
        if !e.has_modality() {
            return F::Atom(e.clone());
        }
        match e {
            Expr::Unary(op, x) => {
                let x = F::from_expr(x);
                match op {
                    UnOp::Not => F::negation(x),
                    UnOp::Next => F::next(x),
                    UnOp::Finally => F::finally(x),
                    UnOp::Globally => F::globally(x),
                    UnOp::Neg => unreachable!("numeric negation of a temporal operand"),
                }
            }
            Expr::Binary(op, l, r) => {
                let (l, r) = (F::from_expr(l), F::from_expr(r));
                match op {
                    BinOp::And => F::and(l, r),
                    BinOp::Or => F::or(l, r),
                    BinOp::Until => F::until(l, r),
                    BinOp::Eq => F::or(
                        F::and(l.clone(), r.clone()),
                        F::and(F::negation(l), F::negation(r)),
                    ),
                    BinOp::Ne => F::or(F::and(l.clone(), F::negation(r.clone())), F::and(F::negation(l), r)),
                    _ => unreachable!("arithmetic over temporal operands"),
                }
            }
            _ => unreachable!("leaves are modality-free"),
        }
    }

    /// The formula as an expression. Release is written `!(!a U !b)`.
    pub fn to_expr(&self) -> Expr {
        let un = |op, f: &F| Expr::unary(op, f.to_expr());
        let bin = |op, l: &F, r: &F| Expr::binary(op, l.to_expr(), r.to_expr());
        match self {
            F::Atom(e) => e.clone(),
            F::Not(f) => Expr::negation(f.to_expr()),
            F::And(l, r) => bin(BinOp::And, l, r),
            F::Or(l, r) => bin(BinOp::Or, l, r),
            F::Next(f) => un(UnOp::Next, f),
            F::Finally(f) => un(UnOp::Finally, f),
            F::Globally(f) => un(UnOp::Globally, f),
            F::Until(l, r) => bin(BinOp::Until, l, r),
            F::Release(l, r) => Expr::negation(Expr::binary(
                BinOp::Until,
                Expr::negation(l.to_expr()),
                Expr::negation(r.to_expr()),
            )),
        }
    }

    /// Distinct atoms in first-occurrence order.
    pub fn atoms(&self) -> Vec<Expr> {
        fn go(f: &F, out: &mut Vec<Expr>) {
            match f {
                F::Atom(e) => {
                    if !out.contains(e) {
                        out.push(e.clone());
                    }
                }
                F::Not(x) | F::Next(x) | F::Finally(x) | F::Globally(x) => go(x, out),
                F::And(l, r) | F::Or(l, r) | F::Until(l, r) | F::Release(l, r) => {
                    go(l, out);
                    go(r, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            F::Atom(_) => true,
            F::Not(x) => matches!(**x, F::Atom(_)),
            F::Finally(_) | F::Globally(_) => false,
            F::Next(x) => x.is_nnf(),
            F::And(l, r) | F::Or(l, r) | F::Until(l, r) | F::Release(l, r) => {
                l.is_nnf() && r.is_nnf()
            }
        }
    }
}

impl fmt::Display for LtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&syntax::print_expr(&self.to_expr()))
    }
}

/// The variables a standalone formula ranges over, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TypeMapping {
    pub vars: Vec<Variable>,
}

impl TypeMapping {
    pub fn new(vars: Vec<Variable>) -> Self {
        TypeMapping { vars }
    }

    pub fn names(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.name.clone()).collect()
    }

    pub fn types(&self) -> Vec<Type> {
        self.vars.iter().map(|v| v.ty).collect()
    }
}

/// Parses a type-mapping file: one `name:type[:controllable]` per line,
/// blank lines and `#` comments ignored.
pub fn parse_type_mapping(text: &str) -> Result<TypeMapping> {
    let mut vars: Vec<Variable> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let pos = Pos::new(ln + 1, 1);
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split(':').map(str::trim).collect();
        let (name, ty, ctrl) = match parts[..] {
            [n, t] => (n, t, false),
            [n, t, "controllable"] => (n, t, true),
            _ => return Err(Error::parse(pos, "expected `name:type` or `name:type:controllable`")),
        };
        if name.is_empty() {
            return Err(Error::parse(pos, "empty variable name"));
        }
        let ty = match Type::parse(ty) {
            Some(t) if t != Type::Ltl => t,
            _ => return Err(Error::parse(pos, format!("unknown variable type `{ty}`"))),
        };
        if vars.iter().any(|v| v.name == name) {
            return Err(Error::parse(pos, format!("variable `{name}` declared twice")));
        }
        let mut v = Variable::new(name, ty);
        v.controllable = ctrl;
        vars.push(v);
    }
    Ok(TypeMapping { vars })
}

/// Parses and type-checks a formula over the variables of `m`. Variables
/// are written `@name` (or by index). A name missing from the mapping has
/// no type and is reported as a type error.
pub fn parse_ltl(text: &str, m: &TypeMapping) -> Result<LtlFormula> {
    let e = syntax::parse_expr(text, &m.names(), &AliasEnv::new()).map_err(|e| match e {
        Error::Parse { pos, message } if message.starts_with("unknown name") => Error::Type(vec![TypeError {
            pos,
            term: message.trim_start_matches("unknown name ").trim_matches('`').to_string(),
            message: "variable is not in the type mapping".into(),
        }]),
        other => other,
    })?;
    match type_of_expr(&e, &m.types()) {
        Ok(t) if t.is_logical() => Ok(LtlFormula::from_expr(&e)),
        Ok(t) => Err(Error::Type(vec![TypeError {
            pos: Pos::new(1, 1),
            term: syntax::print_expr(&e),
            message: format!("formula has type {t}, expected ltl_t"),
        }])),
        Err(mut te) => {
            te.pos = Pos::new(1, 1);
            Err(Error::Type(vec![te]))
        }
    }
}

fn negate_atom(e: &Expr) -> Expr {
    match e {
        Expr::Bool(b) => Expr::Bool(!b),
        Expr::Unary(UnOp::Not, x) => (**x).clone(),
        _ => Expr::negation(e.clone()),
    }
}

/// Negation normal form: negations only on atoms, `F`/`G` rewritten to
/// `U`/`R`, double negations removed.
pub fn to_nnf(f: &LtlFormula) -> LtlFormula {
    nnf(f, false)
}

fn nnf(f: &F, neg: bool) -> F {
    match (f, neg) {
        (F::Atom(e), false) => F::Atom(e.clone()),
        (F::Atom(e), true) => match negate_atom(e) {
            Expr::Unary(UnOp::Not, x) => F::negation(F::Atom(*x)),
            other => F::Atom(other),
        },
        (F::Not(x), _) => nnf(x, !neg),
        (F::And(l, r), false) | (F::Or(l, r), true) => F::and(nnf(l, neg), nnf(r, neg)),
        (F::Or(l, r), false) | (F::And(l, r), true) => F::or(nnf(l, neg), nnf(r, neg)),
        (F::Next(x), _) => F::next(nnf(x, neg)),
        (F::Finally(x), false) | (F::Globally(x), true) => F::until(F::tt(), nnf(x, neg)),
        (F::Globally(x), false) | (F::Finally(x), true) => F::release(F::ff(), nnf(x, neg)),
        (F::Until(l, r), false) | (F::Release(l, r), true) => F::until(nnf(l, neg), nnf(r, neg)),
        (F::Release(l, r), false) | (F::Until(l, r), true) => {
            F::release(nnf(l, neg), nnf(r, neg))
        }
    }
}

/// One way of satisfying a state's requirements for the current letter.
#[derive(Debug, Clone, Default)]
struct Cover {
    lits: BTreeSet<(Expr, bool)>,
    next: BTreeSet<F>,
    postponed: BTreeSet<usize>,
}

fn untils(f: &F, out: &mut Vec<F>) {
    match f {
        F::Atom(_) => {}
        F::Not(x) | F::Next(x) | F::Finally(x) | F::Globally(x) => untils(x, out),
        F::Until(l, r) => {
            if !out.contains(f) {
                out.push(f.clone());
            }
            untils(l, out);
            untils(r, out);
        }
        F::And(l, r) | F::Or(l, r) | F::Release(l, r) => {
            untils(l, out);
            untils(r, out);
        }
    }
}

impl Cover {
    /// Every letter and continuation allowed by `other` is allowed by
    /// `self`, with at least the same acceptance sets.
    fn dominates(&self, other: &Cover) -> bool {
        self.lits.is_subset(&other.lits)
            && self.next.is_subset(&other.next)
            && self.postponed.is_subset(&other.postponed)
    }
}

/// Drops covers dominated by another; of two equal covers the first stays.
fn prune_dominated(covers: Vec<Cover>) -> Vec<Cover> {
    let mut kept: Vec<Cover> = Vec::new();
    for c in covers {
        if kept.iter().any(|k| k.dominates(&c)) {
            continue;
        }
        kept.retain(|k| !c.dominates(k));
        kept.push(c);
    }
    kept
}

/// Adds a literal; false when its complement is already present.
fn add_literal(cover: &mut Cover, e: &Expr, pos: bool) -> bool {
    if cover.lits.contains(&(e.clone(), !pos)) {
        return false;
    }
    cover.lits.insert((e.clone(), pos));
    true
}

fn expand(
    mut todo: Vec<F>,
    mut seen: BTreeSet<F>,
    mut cover: Cover,
    index: &BTreeMap<F, usize>,
    out: &mut Vec<Cover>,
) {
    while let Some(f) = todo.pop() {
        if !seen.insert(f.clone()) {
            continue;
        }
        match &f {
            F::Atom(Expr::Bool(true)) => {}
            F::Atom(Expr::Bool(false)) => return,
            F::Atom(e) => {
                if !add_literal(&mut cover, e, true) {
                    return;
                }
            }
            F::Not(x) if matches!(**x, F::Atom(_)) => {
                let F::Atom(e) = &**x else { unreachable!() };
                if !add_literal(&mut cover, e, false) {
                    return;
                }
            }
            F::Not(_) | F::Finally(_) | F::Globally(_) => unreachable!("formula is not in NNF"),
            F::And(l, r) => {
                todo.push((**r).clone());
                todo.push((**l).clone());
            }
            F::Or(l, r) => {
                let mut t2 = todo.clone();
                t2.push((**r).clone());
                expand(t2, seen.clone(), cover.clone(), index, out);
                todo.push((**l).clone());
            }
            F::Next(x) => {
                cover.next.insert((**x).clone());
            }
            F::Until(l, r) => {
                let mut later = cover.clone();
                later.next.insert(f.clone());
                later.postponed.insert(index[&f]);
                let mut t2 = todo.clone();
                t2.push((**l).clone());
                expand(t2, seen.clone(), later, index, out);
                todo.push((**r).clone());
            }
            F::Release(l, r) => {
                let mut later = cover.clone();
                later.next.insert(f.clone());
                let mut t2 = todo.clone();
                t2.push((**r).clone());
                expand(t2, seen.clone(), later, index, out);
                todo.push((**r).clone());
                todo.push((**l).clone());
            }
        }
    }
    out.push(cover);
}

/// Tableau translation to an obligation-free existential automaton over
/// `vars`, with one acceptance set per until-subformula.
pub fn translate(f: &LtlFormula, vars: Vec<Variable>) -> Automaton {
    let f = to_nnf(f);
    let mut us = Vec::new();
    untils(&f, &mut us);
    let index: BTreeMap<F, usize> = us.into_iter().enumerate().map(|(i, u)| (u, i)).collect();
    let n_sets = index.len();

    let mut ids: BTreeMap<BTreeSet<F>, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    let mut init = BTreeSet::from([f]);
    init.remove(&F::tt());
    ids.insert(init.clone(), 0);
    queue.push_back(init);
    let mut edges: Vec<Vec<Edge>> = Vec::new();
    while let Some(state) = queue.pop_front() {
        let source = ids[&state];
        let mut covers = Vec::new();
        expand(
            state.iter().rev().cloned().collect(),
            BTreeSet::new(),
            Cover::default(),
            &index,
            &mut covers,
        );
        for c in &mut covers {
            c.next.remove(&F::tt());
        }
        let covers = prune_dominated(covers);
        let mut out: Vec<Edge> = Vec::new();
        for c in covers {
            let target = match ids.get(&c.next) {
                Some(&t) => t,
                None => {
                    let t = ids.len();
                    ids.insert(c.next.clone(), t);
                    queue.push_back(c.next.clone());
                    t
                }
            };
            let guard = Expr::conj(
                c.lits
                    .iter()
                    .map(|(e, pos)| if *pos { e.clone() } else { negate_atom(e) }),
            );
            let e = Edge {
                source,
                guard,
                obligation: Obligation::empty(),
                target: AndState::single(target),
                acc: (0..n_sets).filter(|k| !c.postponed.contains(k)).collect(),
            };
            if !out.contains(&e) {
                out.push(e);
            }
        }
        edges.push(out);
    }
    let mut a = Automaton::new(vars, ids.len());
    a.initial.push(AndState::single(0));
    a.num_sets = n_sets;
    a.acc = AcceptanceCond::generalized_buchi(n_sets);
    a.edges = edges;
    a
}

/// Folds the automaton's `assume`/`guarantee` items into its structure:
/// `(A ⊗ B(g₁ ∧ …)) ⊕ B(¬(a₁ ∧ …))`. The result has no such items left.
pub fn apply_assume_guarantee(a: &Automaton) -> Result<Automaton> {
    if a.assumes.is_empty() && a.guarantees.is_empty() {
        return Ok(a.clone());
    }
    let conj = |es: &[Expr]| F::conj(es.iter().map(F::from_expr));
    let mut base = a.clone();
    base.assumes.clear();
    base.guarantees.clear();
    let mut out = if a.guarantees.is_empty() {
        base
    } else {
        automaton_product(&base, &translate(&conj(&a.guarantees), a.vars.clone()))?
    };
    if !a.assumes.is_empty() {
        let escape = translate(&F::negation(conj(&a.assumes)), a.vars.clone());
        out = automaton_sum(&out, &escape)?;
    }
    out.assumes.clear();
    out.guarantees.clear();
    Ok(out)
}
