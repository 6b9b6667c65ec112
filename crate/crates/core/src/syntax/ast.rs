//! Parse trees for HOApp / HOA v1 documents.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::automaton::AcceptanceCond;
use crate::error::Pos;
use crate::typesys::Type;

/// Unary operators, including the LTL modalities `X`, `F`, `G`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnOp {
    Neg,
    Not,
    Next,
    Finally,
    Globally,
}

impl UnOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnOp::Neg => "-",
            UnOp::Not => "!",
            UnOp::Next => "X",
            UnOp::Finally => "F",
            UnOp::Globally => "G",
        }
    }

    pub fn is_modality(self) -> bool {
        matches!(self, UnOp::Next | UnOp::Finally | UnOp::Globally)
    }
}

/// Binary operators. `Until` is the only binary LTL modality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
    Until,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&",
            BinOp::Or => "|",
            BinOp::Until => "U",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Until => 3,
            BinOp::Eq | BinOp::Ne => 4,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 5,
            BinOp::Add | BinOp::Sub => 6,
            BinOp::Mul => 7,
        }
    }

    pub fn is_arith(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul)
    }

    pub fn is_cmp(self) -> bool {
        matches!(self, BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge)
    }

    pub fn is_test(self) -> bool {
        matches!(self, BinOp::Eq | BinOp::Ne)
    }

    pub fn right_assoc(self) -> bool {
        self == BinOp::Until
    }
}

/// Precedence of unary operators and atoms, above every binary operator.
pub const UNARY_PRECEDENCE: u8 = 8;
pub const ATOM_PRECEDENCE: u8 = 9;

/// Terms, predicates and LTL formulas over the automaton's variables.
///
/// Rational literals are always kept in lowest terms with a positive
/// denominator (guaranteed by [`BigRational`]).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Bool(bool),
    Int(BigInt),
    Real(BigRational),
    /// 0-based index into the `AP` list.
    Var(usize),
    /// Unexpanded alias reference, without the leading `@`.
    Alias(String),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn tt() -> Expr {
        Expr::Bool(true)
    }

    pub fn ff() -> Expr {
        Expr::Bool(false)
    }

    pub fn int(v: i64) -> Expr {
        Expr::Int(BigInt::from(v))
    }

    pub fn unary(op: UnOp, e: Expr) -> Expr {
        Expr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn negation(e: Expr) -> Expr {
        Expr::unary(UnOp::Not, e)
    }

    pub fn eq(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinOp::Eq, l, r)
    }

    pub fn ne(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinOp::Ne, l, r)
    }

    /// Conjunction that absorbs a literal `t` on either side.
    pub fn and(l: Expr, r: Expr) -> Expr {
        match (l, r) {
            (Expr::Bool(true), r) => r,
            (l, Expr::Bool(true)) => l,
            (l, r) => Expr::binary(BinOp::And, l, r),
        }
    }

    /// Left-folded conjunction of `parts`; `t` when empty.
    pub fn conj(parts: impl IntoIterator<Item = Expr>) -> Expr {
        parts.into_iter().fold(Expr::tt(), Expr::and)
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Expr::Bool(true))
    }

    /// True if an LTL modality (`X`, `F`, `G`, `U`) occurs anywhere.
    pub fn has_modality(&self) -> bool {
        match self {
            Expr::Unary(op, e) => op.is_modality() || e.has_modality(),
            Expr::Binary(op, l, r) => {
                *op == BinOp::Until || l.has_modality() || r.has_modality()
            }
            _ => false,
        }
    }

    pub fn has_alias(&self) -> bool {
        match self {
            Expr::Alias(_) => true,
            Expr::Unary(_, e) => e.has_alias(),
            Expr::Binary(_, l, r) => l.has_alias() || r.has_alias(),
            _ => false,
        }
    }

    /// Variable indices occurring in the expression.
    pub fn vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Expr::Var(i) => {
                out.insert(*i);
            }
            Expr::Unary(_, e) => e.collect_vars(out),
            Expr::Binary(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            _ => {}
        }
    }

    /// Rebuilds the tree bottom-up, replacing every leaf through `f`.
    pub fn map_leaves(&self, f: &mut impl FnMut(&Expr) -> Expr) -> Expr {
        match self {
            Expr::Unary(op, e) => Expr::unary(*op, e.map_leaves(f)),
            Expr::Binary(op, l, r) => {
                let l = l.map_leaves(f);
                let r = r.map_leaves(f);
                Expr::binary(*op, l, r)
            }
            leaf => f(leaf),
        }
    }

    /// Renames variable indices through `f`.
    pub fn map_vars(&self, f: &impl Fn(usize) -> usize) -> Expr {
        self.map_leaves(&mut |leaf| match leaf {
            Expr::Var(i) => Expr::Var(f(*i)),
            other => other.clone(),
        })
    }

    /// Replaces variable references by arbitrary expressions.
    pub fn substitute(&self, f: &impl Fn(usize) -> Expr) -> Expr {
        self.map_leaves(&mut |leaf| match leaf {
            Expr::Var(i) => f(*i),
            other => other.clone(),
        })
    }

    /// Binding strength of the root node, for parenthesization.
    pub fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, _, _) => op.precedence(),
            Expr::Unary(..) => UNARY_PRECEDENCE,
            _ => ATOM_PRECEDENCE,
        }
    }
}

/// Left-hand side of an assignment: a variable index or an alias that must
/// resolve to one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarRef {
    Index(usize),
    Alias(String),
}

/// `lhs := rhs`, or `lhs != rhs` for a negative obligation entry.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    pub lhs: VarRef,
    pub rhs: Expr,
    pub negated: bool,
}

impl Assignment {
    pub fn new(lhs: usize, rhs: Expr) -> Self {
        Assignment {
            lhs: VarRef::Index(lhs),
            rhs,
            negated: false,
        }
    }

    pub fn negative(lhs: usize, rhs: Expr) -> Self {
        Assignment {
            lhs: VarRef::Index(lhs),
            rhs,
            negated: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeLabel {
    pub guard: Expr,
    pub obligation: Vec<Assignment>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Version {
    V1,
    V1pp,
}

impl Version {
    pub fn as_str(self) -> &'static str {
        match self {
            Version::V1 => "v1",
            Version::V1pp => "v1pp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ItemKind {
    States(usize),
    /// One `Start:` item: an and-state (a singleton for existential starts).
    Start(Vec<usize>),
    Ap(Vec<String>),
    ApType(Vec<Type>),
    Acceptance(usize, AcceptanceCond),
    Alias(String, Expr),
    ControllableAp(Vec<usize>),
    Assume(Expr),
    Guarantee(Expr),
    /// Any other lowercase item, kept verbatim: name (without colon) and the
    /// trimmed source text of its data.
    Other(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeaderItem {
    pub pos: Pos,
    pub kind: ItemKind,
}

impl HeaderItem {
    pub fn new(kind: ItemKind) -> Self {
        HeaderItem {
            pos: Pos::default(),
            kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEdge {
    pub pos: Pos,
    pub label: EdgeLabel,
    /// Target and-state; a single index for existential edges.
    pub target: Vec<usize>,
    pub acc: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawState {
    pub pos: Pos,
    pub index: usize,
    pub name: Option<String>,
    pub acc: Vec<usize>,
    pub edges: Vec<RawEdge>,
}

/// A parsed HOApp or HOA v1 document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawAutomaton {
    pub version: Version,
    pub header: Vec<HeaderItem>,
    pub states: Vec<RawState>,
}

impl RawAutomaton {
    pub fn items(&self) -> impl Iterator<Item = &ItemKind> {
        self.header.iter().map(|h| &h.kind)
    }

    pub fn ap_names(&self) -> Vec<String> {
        self.items()
            .find_map(|k| match k {
                ItemKind::Ap(names) => Some(names.clone()),
                _ => None,
            })
            .unwrap_or_default()
    }

    pub fn ap_types(&self) -> Option<Vec<Type>> {
        self.items().find_map(|k| match k {
            ItemKind::ApType(t) => Some(t.clone()),
            _ => None,
        })
    }

    pub fn aliases(&self) -> Vec<(String, Expr)> {
        self.items()
            .filter_map(|k| match k {
                ItemKind::Alias(n, e) => Some((n.clone(), e.clone())),
                _ => None,
            })
            .collect()
    }

    /// Value of a verbatim lowercase item, if present.
    pub fn other_item(&self, name: &str) -> Option<&str> {
        self.items().find_map(|k| match k {
            ItemKind::Other(n, v) if n == name => Some(v.as_str()),
            _ => None,
        })
    }

    pub fn edge_count(&self) -> usize {
        self.states.iter().map(|s| s.edges.len()).sum()
    }
}
