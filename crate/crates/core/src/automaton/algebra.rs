use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::syntax::Expr;

use super::{AcceptanceCond, AndState, Automaton, Edge, Obligation, Variable};

/// Product of two obligations: `o1`'s terms win on shared variables and the
/// disagreement becomes an equality `t1 == t2` in the returned guard.
/// Negative entries are united.
pub fn obligation_product(o1: &Obligation, o2: &Obligation) -> (Expr, Obligation) {
    let mut guard = Expr::tt();
    let mut combined = o1.clone();
    for (x, t2) in &o2.positive {
        match o1.positive.get(x) {
            Some(t1) => guard = Expr::and(guard, Expr::eq(t1.clone(), t2.clone())),
            None => {
                combined.positive.insert(*x, t2.clone());
            }
        }
    }
    combined.negative.extend(o2.negative.iter().cloned());
    (guard, combined)
}

/// Left fold of [`obligation_product`].
pub fn obligation_product_n<'a>(os: impl IntoIterator<Item = &'a Obligation>) -> (Expr, Obligation) {
    os.into_iter()
        .fold((Expr::tt(), Obligation::empty()), |(g, acc), o| {
            let (g2, next) = obligation_product(&acc, o);
            (Expr::and(g, g2), next)
        })
}

/// Unifies variables by name: `a`'s variables in order, then `b`'s unshared
/// ones. Returns the merged list and the index map for `b`.
fn merge_vars(a: &[Variable], b: &[Variable]) -> Result<(Vec<Variable>, Vec<usize>)> {
    let mut vars = a.to_vec();
    let mut map = Vec::with_capacity(b.len());
    for v in b {
        match vars.iter().position(|w| w.name == v.name) {
            Some(i) => {
                let w = &vars[i];
                if w.ty != v.ty {
                    return Err(Error::semantic(format!(
                        "variable \"{}\" has type {} in one operand and {} in the other",
                        v.name, w.ty, v.ty
                    )));
                }
                if w.controllable != v.controllable {
                    return Err(Error::semantic(format!(
                        "variable \"{}\" differs in controllability between operands",
                        v.name
                    )));
                }
                map.push(i);
            }
            None => {
                map.push(vars.len());
                vars.push(v.clone());
            }
        }
    }
    Ok((vars, map))
}

fn remap_edge(e: &Edge, map: &[usize], state_offset: usize, set_offset: usize) -> Edge {
    let f = |i: usize| map[i];
    Edge {
        source: e.source + state_offset,
        guard: e.guard.map_vars(&f),
        obligation: e.obligation.map_vars(&f),
        target: AndState::new(e.target.states().iter().map(|q| q + state_offset)),
        acc: e.acc.iter().map(|k| k + set_offset).collect(),
    }
}

fn state_label(a: &Automaton, q: usize) -> String {
    a.state_names[q].clone().unwrap_or_else(|| q.to_string())
}

/// Synchronous product of two existential automata, restricted to the
/// states reachable from the initial pairs.
pub fn automaton_product(a: &Automaton, b: &Automaton) -> Result<Automaton> {
    if !a.is_existential() || !b.is_existential() {
        return Err(Error::semantic(
            "product is only defined for existential automata",
        ));
    }
    let (vars, map) = merge_vars(&a.vars, &b.vars)?;
    let ident: Vec<usize> = (0..a.vars.len()).collect();
    let n = a.num_sets;

    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |p: (usize, usize), order: &mut Vec<_>, queue: &mut VecDeque<_>| {
        *index.entry(p).or_insert_with(|| {
            order.push(p);
            queue.push_back(p);
            order.len() - 1
        })
    };

    let mut initial = Vec::new();
    for za in &a.initial {
        for zb in &b.initial {
            let p = (za.as_single().unwrap(), zb.as_single().unwrap());
            let i = intern(p, &mut order, &mut queue);
            initial.push(AndState::single(i));
        }
    }
    let mut edges: Vec<Vec<Edge>> = Vec::new();
    while let Some((qa, qb)) = queue.pop_front() {
        let src = edges.len();
        let mut out = Vec::new();
        for ea in &a.edges[qa] {
            let ea = remap_edge(ea, &ident, 0, 0);
            for eb in &b.edges[qb] {
                let eb = remap_edge(eb, &map, 0, n);
                let (ext, obligation) = obligation_product(&ea.obligation, &eb.obligation);
                let p = (
                    ea.target.as_single().unwrap(),
                    eb.target.as_single().unwrap(),
                );
                let tgt = intern(p, &mut order, &mut queue);
                out.push(Edge {
                    source: src,
                    guard: Expr::and(Expr::and(ea.guard.clone(), eb.guard), ext),
                    obligation,
                    target: AndState::single(tgt),
                    acc: ea.acc.union(&eb.acc).copied().collect(),
                });
            }
        }
        edges.push(out);
    }
    let state_names = order
        .iter()
        .map(|&(qa, qb)| Some(format!("({}, {})", state_label(a, qa), state_label(b, qb))))
        .collect();
    let mut assumes = a.assumes.clone();
    assumes.extend(b.assumes.iter().map(|e| e.map_vars(&|i| map[i])));
    let mut guarantees = a.guarantees.clone();
    guarantees.extend(b.guarantees.iter().map(|e| e.map_vars(&|i| map[i])));
    Ok(Automaton {
        vars,
        num_states: order.len(),
        state_names,
        initial,
        edges,
        num_sets: n + b.num_sets,
        acc: AcceptanceCond::and(a.acc.clone(), b.acc.shift(n)),
        assumes,
        guarantees,
    })
}

/// Disjoint union of two automata with acceptance `acc_a | acc_b`.
///
/// A run of one operand never visits the other operand's sets, so an
/// operand condition that already holds on the empty set (`t`, `Fin`) would
/// accept the other operand's runs too. Such an operand gets a fresh set
/// marking all its own edges and its condition is guarded by `Inf` of it.
pub fn automaton_sum(a: &Automaton, b: &Automaton) -> Result<Automaton> {
    let (vars, map) = merge_vars(&a.vars, &b.vars)?;
    let ident: Vec<usize> = (0..a.vars.len()).collect();
    let n = a.num_sets;
    let m = b.num_sets;
    let off = a.num_states;
    let mut num_sets = n + m;
    let empty = Default::default();
    let guard_a = a.acc.eval(&empty).then(|| {
        num_sets += 1;
        num_sets - 1
    });
    let guard_b = b.acc.eval(&empty).then(|| {
        num_sets += 1;
        num_sets - 1
    });

    let mut edges = Vec::with_capacity(a.num_states + b.num_states);
    for es in &a.edges {
        edges.push(
            es.iter()
                .map(|e| {
                    let mut e = remap_edge(e, &ident, 0, 0);
                    e.acc.extend(guard_a);
                    e
                })
                .collect(),
        );
    }
    for es in &b.edges {
        edges.push(
            es.iter()
                .map(|e| {
                    let mut e = remap_edge(e, &map, off, n);
                    e.acc.extend(guard_b);
                    e
                })
                .collect(),
        );
    }
    let guarded = |c: AcceptanceCond, g: Option<usize>| match g {
        Some(k) => AcceptanceCond::and(AcceptanceCond::Inf(k), c),
        None => c,
    };
    let acc = AcceptanceCond::or(
        guarded(a.acc.clone(), guard_a),
        guarded(b.acc.shift(n), guard_b),
    );
    let mut initial = a.initial.clone();
    initial.extend(
        b.initial
            .iter()
            .map(|z| AndState::new(z.states().iter().map(|q| q + off))),
    );
    let mut state_names = a.state_names.clone();
    state_names.extend(b.state_names.iter().cloned());
    let mut assumes = a.assumes.clone();
    assumes.extend(b.assumes.iter().map(|e| e.map_vars(&|i| map[i])));
    let mut guarantees = a.guarantees.clone();
    guarantees.extend(b.guarantees.iter().map(|e| e.map_vars(&|i| map[i])));
    Ok(Automaton {
        vars,
        num_states: a.num_states + b.num_states,
        state_names,
        initial,
        edges,
        num_sets,
        acc,
        assumes,
        guarantees,
    })
}

/// Replaces every obligation by the empty one.
pub fn erase_obligations(a: &Automaton) -> Automaton {
    let mut out = a.clone();
    for e in out.edges.iter_mut().flatten() {
        e.obligation = Obligation::empty();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_single_assignments() {
        let o1 = Obligation::empty().assign(0, Expr::Var(1));
        let o2 = Obligation::empty().assign(0, Expr::int(3));
        let (g, c) = obligation_product(&o1, &o2);
        assert_eq!(g, Expr::eq(Expr::Var(1), Expr::int(3)));
        assert_eq!(c, o1);
        let (g, c) = obligation_product(&o1, &Obligation::empty());
        assert!(g.is_true());
        assert_eq!(c, o1);
    }

    #[test]
    fn product_n_folds() {
        let os = [
            Obligation::empty().assign(0, Expr::int(1)),
            Obligation::empty().assign(0, Expr::Var(1)),
            Obligation::empty().assign(0, Expr::Var(2)),
        ];
        let (g, c) = obligation_product_n(&os);
        assert_eq!(
            g,
            Expr::and(
                Expr::eq(Expr::int(1), Expr::Var(1)),
                Expr::eq(Expr::int(1), Expr::Var(2))
            )
        );
        assert_eq!(c, Obligation::empty().assign(0, Expr::int(1)));
        let (g, c) = obligation_product_n(&[Obligation::empty(), Obligation::empty(), Obligation::empty()]);
        assert!(g.is_true() && c.is_empty());
    }
}
