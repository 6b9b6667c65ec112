//! Expression evaluation, runs over finite prefixes and lasso words, and
//! the and-state successor rule for universal branching.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::automaton::{obligation_product_n, AndState, Automaton, Obligation};
use crate::error::{Error, Result};
use crate::syntax::Expr;

mod value;
mod word;

pub use value::{eval_bool, eval_expr, Valuation, Value};
pub use word::{parse_word, LassoWord, Word};

/// A run configuration: current and-state plus the constraint the next
/// symbol must satisfy.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Config {
    pub state: AndState,
    pub pending: Expr,
}

impl Config {
    pub fn initial(state: AndState) -> Self {
        Config {
            state,
            pending: Expr::tt(),
        }
    }
}

/// A composed arc of a universal-branching automaton.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArcLabel {
    pub guard: Expr,
    pub obligation: Obligation,
    pub acc: BTreeSet<usize>,
}

/// `⋀ x == ⟦t⟧v` over positive entries and `⋀ x != ⟦t⟧v` over negative
/// ones, with constant right-hand sides.
pub fn obligation_constraint(o: &Obligation, v: &Valuation) -> Result<Expr> {
    let mut parts = Vec::new();
    for (x, t) in &o.positive {
        parts.push(Expr::eq(Expr::Var(*x), eval_expr(t, v)?.to_expr()));
    }
    for (x, t) in &o.negative {
        parts.push(Expr::ne(Expr::Var(*x), eval_expr(t, v)?.to_expr()));
    }
    Ok(Expr::conj(parts))
}

fn require_existential(a: &Automaton) -> Result<()> {
    if a.is_existential() {
        Ok(())
    } else {
        Err(Error::semantic(
            "automaton has universal branching; an existential automaton is required",
        ))
    }
}

/// Successors of one existential configuration: `(edge index, successor, acc sets)`.
fn successors(
    a: &Automaton,
    cfg: &Config,
    v: &Valuation,
) -> Result<Vec<(usize, Config, BTreeSet<usize>)>> {
    if !eval_bool(&cfg.pending, v)? {
        return Ok(Vec::new());
    }
    let q = cfg.state.as_single().expect("existential configuration");
    let mut out = Vec::new();
    for (k, e) in a.edges[q].iter().enumerate() {
        if eval_bool(&e.guard, v)? {
            out.push((
                k,
                Config {
                    state: e.target.clone(),
                    pending: obligation_constraint(&e.obligation, v)?,
                },
                e.acc.clone(),
            ));
        }
    }
    Ok(out)
}

/// One step of an existential automaton from a set of configurations.
pub fn step_existential(
    a: &Automaton,
    cfgs: &BTreeSet<Config>,
    v: &Valuation,
) -> Result<BTreeSet<(Config, BTreeSet<usize>)>> {
    require_existential(a)?;
    let mut out = BTreeSet::new();
    for cfg in cfgs {
        for (_, c, acc) in successors(a, cfg, v)? {
            out.insert((c, acc));
        }
    }
    Ok(out)
}

fn initial_configs(a: &Automaton) -> BTreeSet<Config> {
    a.initial.iter().cloned().map(Config::initial).collect()
}

/// Configuration sets reached after each symbol of `prefix`; element 0 is
/// the initial set.
pub fn prefix_configs(a: &Automaton, prefix: &[Valuation]) -> Result<Vec<BTreeSet<Config>>> {
    require_existential(a)?;
    let mut levels = vec![initial_configs(a)];
    for v in prefix {
        let next = step_existential(a, levels.last().unwrap(), v)?
            .into_iter()
            .map(|(c, _)| c)
            .collect();
        levels.push(next);
    }
    Ok(levels)
}

/// Whether some run of `a` reads all of `prefix`.
pub fn check_prefix(a: &Automaton, prefix: &[Valuation]) -> Result<bool> {
    Ok(!prefix_configs(a, prefix)?.last().unwrap().is_empty())
}

/// The position graph of `a` over the lasso `w`: nodes are configurations
/// paired with word positions, arcs carry acceptance sets.
struct PositionGraph {
    pos: Vec<usize>,
    arcs: Vec<(usize, usize, BTreeSet<usize>)>,
}

fn position_graph(a: &Automaton, w: &LassoWord) -> Result<PositionGraph> {
    let mut ids: HashMap<(Config, usize), usize> = HashMap::new();
    let mut g = PositionGraph {
        pos: Vec::new(),
        arcs: Vec::new(),
    };
    let mut queue = VecDeque::new();
    let mut intern = |node: (Config, usize), g: &mut PositionGraph, queue: &mut VecDeque<_>| {
        if let Some(&id) = ids.get(&node) {
            return id;
        }
        let id = g.pos.len();
        g.pos.push(node.1);
        ids.insert(node.clone(), id);
        queue.push_back((id, node));
        id
    };
    for c in initial_configs(a) {
        intern((c, 0), &mut g, &mut queue);
    }
    while let Some((id, (cfg, i))) = queue.pop_front() {
        let j = w.next_pos(i);
        for (_, c, acc) in successors(a, &cfg, w.at(i))? {
            let t = intern((c, j), &mut g, &mut queue);
            g.arcs.push((id, t, acc));
        }
    }
    Ok(g)
}

/// Whether `a` accepts the ultimately periodic word `w`.
pub fn check_lasso(a: &Automaton, w: &LassoWord) -> Result<bool> {
    require_existential(a)?;
    let g = position_graph(a, w)?;
    let stem = w.stem.len();
    for d in a.acc.dnf() {
        let mut sub: DiGraph<usize, ()> = DiGraph::new();
        let nodes: Vec<_> = (0..g.pos.len()).map(|i| sub.add_node(i)).collect();
        let kept: Vec<_> = g
            .arcs
            .iter()
            .filter(|(s, t, acc)| g.pos[*s] >= stem && g.pos[*t] >= stem && acc.is_disjoint(&d.fins))
            .collect();
        for (s, t, _) in &kept {
            sub.add_edge(nodes[*s], nodes[*t], ());
        }
        let mut comp = vec![usize::MAX; g.pos.len()];
        for (ci, scc) in tarjan_scc(&sub).into_iter().enumerate() {
            for n in scc {
                comp[sub[n]] = ci;
            }
        }
        let mut seen: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (s, t, acc) in &kept {
            if comp[*s] == comp[*t] {
                seen.entry(comp[*s]).or_default().extend(acc.iter().copied());
            }
        }
        if seen.values().any(|sets| d.infs.is_subset(sets)) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Successor and-states of `z` under `v`: one enabled edge is chosen per
/// state of `z`, obligations are composed, and choices whose composed
/// equality guard fails under `v` are dropped.
pub fn alternating_successors(
    a: &Automaton,
    z: &AndState,
    v: &Valuation,
    pending: &Expr,
) -> Result<Vec<(AndState, ArcLabel)>> {
    if !eval_bool(pending, v)? {
        return Ok(Vec::new());
    }
    let mut enabled = Vec::new();
    for &q in z.states() {
        let mut es = Vec::new();
        for e in &a.edges[q] {
            if eval_bool(&e.guard, v)? {
                es.push(e);
            }
        }
        if es.is_empty() {
            return Ok(Vec::new());
        }
        enabled.push(es);
    }
    let mut out = BTreeSet::new();
    let mut choice = vec![0usize; enabled.len()];
    loop {
        let picked: Vec<_> = choice.iter().zip(&enabled).map(|(&k, es)| es[k]).collect();
        let (ext, obligation) = obligation_product_n(picked.iter().map(|e| &e.obligation));
        if eval_bool(&ext, v)? {
            let target = picked
                .iter()
                .fold(None, |acc: Option<AndState>, e| {
                    Some(match acc {
                        None => e.target.clone(),
                        Some(t) => t.union(&e.target),
                    })
                })
                .expect("and-states are non-empty");
            let label = ArcLabel {
                guard: Expr::and(Expr::conj(picked.iter().map(|e| e.guard.clone())), ext),
                obligation,
                acc: picked.iter().flat_map(|e| e.acc.iter().copied()).collect(),
            };
            out.insert((target, label));
        }
        // advance the mixed-radix counter
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(out.into_iter().collect());
            }
            choice[i] += 1;
            if choice[i] < enabled[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Levels of run-DAG prefixes: each level is the set of reachable
/// `(and-state, pending)` configurations; element 0 is the initial level.
pub fn alternating_levels(a: &Automaton, prefix: &[Valuation]) -> Result<Vec<BTreeSet<Config>>> {
    let mut levels = vec![initial_configs(a)];
    for v in prefix {
        let mut next = BTreeSet::new();
        for cfg in levels.last().unwrap() {
            for (z, label) in alternating_successors(a, &cfg.state, v, &cfg.pending)? {
                next.insert(Config {
                    state: z,
                    pending: obligation_constraint(&label.obligation, v)?,
                });
            }
        }
        levels.push(next);
    }
    Ok(levels)
}

/// Whether a run-DAG prefix over `prefix` exists.
pub fn check_prefix_alternating(a: &Automaton, prefix: &[Valuation]) -> Result<bool> {
    Ok(!alternating_levels(a, prefix)?.last().unwrap().is_empty())
}
