//! The four-type system (`bool`, `int`, `real`, `ltl_t`) and automaton
//! certification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::automaton::{AndState, Automaton, Edge, Obligation, Variable};
use crate::error::{Error, Pos, Result, TypeError};
use crate::syntax::{self, BinOp, Expr, ItemKind, RawAutomaton, UnOp, VarRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Bool,
    Int,
    Real,
    /// Internal type of LTL formulas.
    Ltl,
}

impl Type {
    pub const ALL: [Type; 4] = [Type::Bool, Type::Int, Type::Real, Type::Ltl];

    pub fn name(self) -> &'static str {
        match self {
            Type::Bool => "bool",
            Type::Int => "int",
            Type::Real => "real",
            Type::Ltl => "ltl_t",
        }
    }

    pub fn parse(s: &str) -> Option<Type> {
        match s {
            "bool" => Some(Type::Bool),
            "int" => Some(Type::Int),
            "real" => Some(Type::Real),
            _ => None,
        }
    }

    /// `self ≤ other`: the reflexive closure of `int ≤ real` and `bool ≤ ltl_t`.
    pub fn is_subtype_of(self, other: Type) -> bool {
        self == other
            || matches!(
                (self, other),
                (Type::Int, Type::Real) | (Type::Bool, Type::Ltl)
            )
    }

    pub fn is_numeric(self) -> bool {
        self.is_subtype_of(Type::Real)
    }

    pub fn is_logical(self) -> bool {
        self.is_subtype_of(Type::Ltl)
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The larger of two comparable types; `None` plays the role of ⊥.
pub fn max_type(t1: Type, t2: Type) -> Option<Type> {
    if t2.is_subtype_of(t1) {
        Some(t1)
    } else if t1.is_subtype_of(t2) {
        Some(t2)
    } else {
        None
    }
}

/// Variable types and controllability, index-aligned with the AP list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TypeEnv {
    pub types: Vec<Type>,
    pub controllable: Vec<bool>,
}

impl TypeEnv {
    pub fn all_bool(n: usize) -> Self {
        TypeEnv {
            types: vec![Type::Bool; n],
            controllable: vec![false; n],
        }
    }
}

fn err(e: &Expr, message: impl Into<String>) -> TypeError {
    TypeError {
        pos: Pos::default(),
        term: syntax::print_expr(e),
        message: message.into(),
    }
}

/// Least type of `e` under the variable types `env`.
pub fn type_of_expr(e: &Expr, env: &[Type]) -> Result<Type, TypeError> {
    match e {
        Expr::Bool(_) => Ok(Type::Bool),
        Expr::Int(_) => Ok(Type::Int),
        Expr::Real(_) => Ok(Type::Real),
        Expr::Var(i) => env
            .get(*i)
            .copied()
            .ok_or_else(|| err(e, format!("variable {i} has no declared type"))),
        Expr::Alias(a) => Err(err(e, format!("unexpanded alias `@{a}`"))),
        Expr::Unary(op, x) => {
            let t = type_of_expr(x, env)?;
            match op {
                UnOp::Neg if t.is_numeric() => Ok(t),
                UnOp::Neg => Err(err(e, format!("unary minus needs a numeric operand, found {t}"))),
                UnOp::Not if t.is_logical() => Ok(t),
                UnOp::Not => Err(err(e, format!("`!` needs a bool or ltl_t operand, found {t}"))),
                _ if t.is_logical() => Ok(Type::Ltl),
                _ => Err(err(
                    e,
                    format!("`{}` needs an ltl_t operand, found {t}", op.symbol()),
                )),
            }
        }
        Expr::Binary(op, l, r) => {
            let t1 = type_of_expr(l, env)?;
            let t2 = type_of_expr(r, env)?;
            let numeric = t1.is_numeric() && t2.is_numeric();
            let logical = t1.is_logical() && t2.is_logical();
            let sym = op.symbol();
            match op {
                _ if op.is_arith() && numeric => Ok(max_type(t1, t2).expect("numeric types are comparable")),
                _ if op.is_cmp() && numeric => Ok(Type::Bool),
                _ if op.is_test() && numeric => Ok(Type::Bool),
                _ if op.is_test() && logical => Ok(max_type(t1, t2).expect("logical types are comparable")),
                BinOp::And | BinOp::Or if logical => Ok(max_type(t1, t2).expect("logical types are comparable")),
                BinOp::Until if logical => Ok(Type::Ltl),
                _ if op.is_arith() || op.is_cmp() => Err(err(
                    e,
                    format!("`{sym}` needs numeric operands, found {t1} and {t2}"),
                )),
                _ if op.is_test() => Err(err(
                    e,
                    format!("`{sym}` needs two numeric or two logical operands, found {t1} and {t2}"),
                )),
                _ => Err(err(
                    e,
                    format!("`{sym}` needs bool or ltl_t operands, found {t1} and {t2}"),
                )),
            }
        }
    }
}

/// Checks `lhs := rhs` (or `lhs != rhs`): the right-hand side must be free
/// of modalities and its type must be a subtype of the variable's type.
pub fn check_assignment(a: &syntax::Assignment, env: &[Type]) -> Result<(), TypeError> {
    let VarRef::Index(x) = &a.lhs else {
        return Err(err(&a.rhs, "assignment target is an unexpanded alias"));
    };
    let Some(&tx) = env.get(*x) else {
        return Err(err(&a.rhs, format!("assignment to undeclared variable {x}")));
    };
    if a.rhs.has_modality() {
        return Err(err(&a.rhs, "LTL modality in an assignment"));
    }
    let t = type_of_expr(&a.rhs, env)?;
    if t == Type::Ltl || !t.is_subtype_of(tx) {
        return Err(err(
            &a.rhs,
            format!("cannot assign a {t} expression to variable {x} of type {tx}"),
        ));
    }
    Ok(())
}

fn at(mut e: TypeError, pos: Pos) -> TypeError {
    e.pos = pos;
    e
}

/// Type-checks a document and builds the semantic automaton.
///
/// Aliases are expanded first. Typing problems are collected into one
/// [`Error::Type`]; structural problems (acceptance indices out of range,
/// duplicate variable names) are [`Error::Semantic`].
pub fn check_automaton(raw: &RawAutomaton) -> Result<Automaton> {
    let raw = syntax::expand_aliases(raw)?;
    let names = raw.ap_names();
    let n = names.len();
    let mut errors = Vec::new();

    let mut types = vec![Type::Bool; n];
    let mut controllable = vec![false; n];
    let mut initial = Vec::new();
    let mut num_sets = 0;
    let mut acc = crate::automaton::AcceptanceCond::True;
    let mut assumes = Vec::new();
    let mut guarantees = Vec::new();
    let mut declared_states = None;

    let mut seen = BTreeSet::new();
    for name in &names {
        if !seen.insert(name) {
            return Err(Error::semantic(format!("duplicate variable name \"{name}\"")));
        }
    }

    for h in &raw.header {
        match &h.kind {
            ItemKind::ApType(ts) => {
                if ts.len() != n {
                    errors.push(TypeError {
                        pos: h.pos,
                        term: "AP-type".into(),
                        message: format!("AP-type lists {} types for {n} variables", ts.len()),
                    });
                } else {
                    types = ts.clone();
                }
            }
            ItemKind::ControllableAp(v) => {
                for &i in v {
                    if i < n {
                        controllable[i] = true;
                    } else {
                        errors.push(TypeError {
                            pos: h.pos,
                            term: "controllable-AP".into(),
                            message: format!("controllable variable {i} out of range ({n} declared)"),
                        });
                    }
                }
            }
            ItemKind::Start(z) => initial.push(AndState::new(z.iter().copied())),
            ItemKind::Acceptance(k, c) => {
                num_sets = *k;
                acc = c.clone();
            }
            ItemKind::States(k) => declared_states = Some(*k),
            _ => {}
        }
    }
    if let Some(k) = acc.max_index() {
        if k >= num_sets {
            return Err(Error::semantic(format!(
                "acceptance condition uses set {k} but only {num_sets} are declared"
            )));
        }
    }

    for h in &raw.header {
        if let ItemKind::Assume(e) | ItemKind::Guarantee(e) = &h.kind {
            match type_of_expr(e, &types) {
                Ok(t) if t.is_logical() => {}
                Ok(t) => errors.push(at(err(e, format!("LTL item has type {t}, expected ltl_t")), h.pos)),
                Err(te) => errors.push(at(te, h.pos)),
            }
            if let ItemKind::Assume(_) = h.kind {
                assumes.push(e.clone());
            } else {
                guarantees.push(e.clone());
            }
        }
    }

    let num_states = declared_states
        .unwrap_or_else(|| raw.states.iter().map(|s| s.index + 1).max().unwrap_or(0));
    let mut state_names = vec![None; num_states];
    let mut edges: Vec<Vec<Edge>> = vec![Vec::new(); num_states];
    for s in &raw.states {
        state_names[s.index] = s.name.clone();
        for re in &s.edges {
            let g = &re.label.guard;
            if g.has_modality() {
                errors.push(at(err(g, "guard has type ltl_t, expected bool"), re.pos));
            } else {
                match type_of_expr(g, &types) {
                    Ok(Type::Bool) => {}
                    Ok(t) => errors.push(at(err(g, format!("guard has type {t}, expected bool")), re.pos)),
                    Err(te) => errors.push(at(te, re.pos)),
                }
            }
            let mut positive = BTreeMap::new();
            let mut negative = BTreeSet::new();
            for asg in &re.label.obligation {
                if let Err(te) = check_assignment(asg, &types) {
                    errors.push(at(te, re.pos));
                    continue;
                }
                let VarRef::Index(x) = asg.lhs else { unreachable!() };
                if asg.negated {
                    negative.insert((x, asg.rhs.clone()));
                } else if positive.insert(x, asg.rhs.clone()).is_some() {
                    errors.push(at(
                        err(&asg.rhs, format!("variable {x} assigned twice in one obligation")),
                        re.pos,
                    ));
                }
            }
            let acc_sets: BTreeSet<usize> = re.acc.iter().chain(&s.acc).copied().collect();
            edges[s.index].push(Edge {
                source: s.index,
                guard: g.clone(),
                obligation: Obligation { positive, negative },
                target: AndState::new(re.target.iter().copied()),
                acc: acc_sets,
            });
        }
    }

    if !errors.is_empty() {
        return Err(Error::Type(errors));
    }
    let vars = names
        .into_iter()
        .zip(types)
        .zip(controllable)
        .map(|((name, ty), controllable)| Variable { name, ty, controllable })
        .collect();
    Ok(Automaton {
        vars,
        num_states,
        state_names,
        initial,
        edges,
        num_sets,
        acc,
        assumes,
        guarantees,
    })
}
