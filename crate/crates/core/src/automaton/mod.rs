//! Semantic obligation automata and their algebra.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::syntax::{
    Assignment, EdgeLabel, Expr, HeaderItem, ItemKind, RawAutomaton, RawEdge, RawState, Version,
};
use crate::typesys::{Type, TypeEnv};

mod acceptance;
mod algebra;

pub use acceptance::{dnf_acceptance, eval_acceptance, AcceptanceCond, Disjunct};
pub use algebra::{
    automaton_product, automaton_sum, erase_obligations, obligation_product,
    obligation_product_n,
};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variable {
    pub name: String,
    pub ty: Type,
    pub controllable: bool,
}

impl Variable {
    pub fn new(name: impl Into<String>, ty: Type) -> Self {
        Variable {
            name: name.into(),
            ty,
            controllable: false,
        }
    }
}

/// A non-empty conjunction of states, kept sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AndState(Vec<usize>);

impl AndState {
    pub fn new(states: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = states.into_iter().collect();
        AndState(set.into_iter().collect())
    }

    pub fn single(q: usize) -> Self {
        AndState(vec![q])
    }

    pub fn states(&self) -> &[usize] {
        &self.0
    }

    pub fn is_single(&self) -> bool {
        self.0.len() == 1
    }

    /// The state of a singleton and-state.
    pub fn as_single(&self) -> Option<usize> {
        match self.0.as_slice() {
            [q] => Some(*q),
            _ => None,
        }
    }

    pub fn union(&self, other: &AndState) -> AndState {
        AndState::new(self.0.iter().chain(&other.0).copied())
    }
}

impl fmt::Display for AndState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|q| q.to_string()).collect();
        f.write_str(&parts.join("&"))
    }
}

/// Positive assignments `x ↦ t` and negative entries `x ↛ t`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Obligation {
    pub positive: BTreeMap<usize, Expr>,
    pub negative: BTreeSet<(usize, Expr)>,
}

impl Obligation {
    pub fn empty() -> Self {
        Obligation::default()
    }

    pub fn is_empty(&self) -> bool {
        self.positive.is_empty() && self.negative.is_empty()
    }

    pub fn assign(mut self, x: usize, t: Expr) -> Self {
        self.positive.insert(x, t);
        self
    }

    pub fn forbid(mut self, x: usize, t: Expr) -> Self {
        self.negative.insert((x, t));
        self
    }

    /// Renames every variable (keys and terms) through `f`.
    pub fn map_vars(&self, f: &impl Fn(usize) -> usize) -> Obligation {
        Obligation {
            positive: self
                .positive
                .iter()
                .map(|(x, t)| (f(*x), t.map_vars(f)))
                .collect(),
            negative: self
                .negative
                .iter()
                .map(|(x, t)| (f(*x), t.map_vars(f)))
                .collect(),
        }
    }

    /// Assignment list: positive entries in variable order, then negative ones.
    pub fn assignments(&self) -> Vec<Assignment> {
        self.positive
            .iter()
            .map(|(x, t)| Assignment::new(*x, t.clone()))
            .chain(
                self.negative
                    .iter()
                    .map(|(x, t)| Assignment::negative(*x, t.clone())),
            )
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: usize,
    pub guard: Expr,
    pub obligation: Obligation,
    pub target: AndState,
    pub acc: BTreeSet<usize>,
}

/// An obligation automaton with Emerson-Lei acceptance over edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    pub vars: Vec<Variable>,
    pub num_states: usize,
    pub state_names: Vec<Option<String>>,
    pub initial: Vec<AndState>,
    /// Outgoing edges, indexed by source state.
    pub edges: Vec<Vec<Edge>>,
    pub num_sets: usize,
    pub acc: AcceptanceCond,
    pub assumes: Vec<Expr>,
    pub guarantees: Vec<Expr>,
}

impl Automaton {
    /// An automaton over `vars` with `n` unnamed states and no edges.
    pub fn new(vars: Vec<Variable>, n: usize) -> Self {
        Automaton {
            vars,
            num_states: n,
            state_names: vec![None; n],
            initial: Vec::new(),
            edges: vec![Vec::new(); n],
            num_sets: 0,
            acc: AcceptanceCond::True,
            assumes: Vec::new(),
            guarantees: Vec::new(),
        }
    }

    pub fn add_edge(&mut self, edge: Edge) {
        self.edges[edge.source].push(edge);
    }

    pub fn names(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.name.clone()).collect()
    }

    pub fn types(&self) -> Vec<Type> {
        self.vars.iter().map(|v| v.ty).collect()
    }

    pub fn type_env(&self) -> TypeEnv {
        TypeEnv {
            types: self.types(),
            controllable: self.vars.iter().map(|v| v.controllable).collect(),
        }
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn all_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().flatten()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// All initial and-states and all edge targets are singletons.
    pub fn is_existential(&self) -> bool {
        self.initial.iter().all(AndState::is_single)
            && self.all_edges().all(|e| e.target.is_single())
    }

    pub fn has_obligations(&self) -> bool {
        self.all_edges().any(|e| !e.obligation.is_empty())
    }

    /// Serializable document form (`HOA: v1pp`, indices, no aliases).
    pub fn to_raw(&self) -> RawAutomaton {
        let mut header = vec![HeaderItem::new(ItemKind::States(self.num_states))];
        for z in &self.initial {
            header.push(HeaderItem::new(ItemKind::Start(z.states().to_vec())));
        }
        header.push(HeaderItem::new(ItemKind::Ap(self.names())));
        if !self.vars.is_empty() {
            header.push(HeaderItem::new(ItemKind::ApType(self.types())));
        }
        header.push(HeaderItem::new(ItemKind::Acceptance(
            self.num_sets,
            self.acc.clone(),
        )));
        let ctrl: Vec<usize> = (0..self.vars.len())
            .filter(|&i| self.vars[i].controllable)
            .collect();
        if !ctrl.is_empty() {
            header.push(HeaderItem::new(ItemKind::ControllableAp(ctrl)));
        }
        for e in &self.assumes {
            header.push(HeaderItem::new(ItemKind::Assume(e.clone())));
        }
        for e in &self.guarantees {
            header.push(HeaderItem::new(ItemKind::Guarantee(e.clone())));
        }
        let states = (0..self.num_states)
            .map(|q| RawState {
                pos: Default::default(),
                index: q,
                name: self.state_names[q].clone(),
                acc: Vec::new(),
                edges: self.edges[q]
                    .iter()
                    .map(|e| RawEdge {
                        pos: Default::default(),
                        label: EdgeLabel {
                            guard: e.guard.clone(),
                            obligation: e.obligation.assignments(),
                        },
                        target: e.target.states().to_vec(),
                        acc: e.acc.iter().copied().collect(),
                    })
                    .collect(),
            })
            .collect();
        RawAutomaton {
            version: Version::V1pp,
            header,
            states,
        }
    }

    /// One-line summary: state, edge and set counts plus branching mode.
    pub fn summary(&self) -> String {
        let plural = |n: usize, w: &str| format!("{n} {w}{}", if n == 1 { "" } else { "s" });
        format!(
            "{}, {}, {}, {}",
            plural(self.num_states, "state"),
            plural(self.edge_count(), "edge"),
            plural(self.num_sets, "set"),
            if self.is_existential() {
                "existential"
            } else {
                "universal"
            }
        )
    }
}

impl fmt::Display for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_hoapp(&self.to_raw()))
    }
}
