#![allow(dead_code)]

use std::path::PathBuf;

use hoapp::syntax::{self, ParseOptions, RawAutomaton};
use hoapp::{typesys, Automaton};

pub const CORPUS: [&str; 9] = [
    "g_x",
    "counter",
    "counter_complement",
    "nonce_complement",
    "nonce_alternating",
    "arbiter",
    "counter_negative",
    "constant",
    "thermostat",
];

pub fn opts() -> ParseOptions {
    ParseOptions {
        neg_obligations: true,
    }
}

pub fn fixture_text(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", &format!("{name}.hoa")]
        .iter()
        .collect();
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

pub fn raw(name: &str) -> RawAutomaton {
    syntax::parse_hoapp(&fixture_text(name), &opts()).unwrap()
}

pub fn load(name: &str) -> Automaton {
    typesys::check_automaton(&raw(name)).unwrap()
}

pub mod gen {
    use hoapp::syntax::{BinOp, Expr, UnOp};
    use num_rational::BigRational;
    use proptest::prelude::*;
    use proptest::sample::select;

    /// Parse-shaped expressions: non-negative literals, indices < 3, a few aliases.
    pub fn expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            any::<bool>().prop_map(Expr::Bool),
            (0i64..20).prop_map(Expr::int),
            (0i64..400, select(vec![1i64, 2, 4, 5, 10]))
                .prop_map(|(n, d)| Expr::Real(BigRational::new(n.into(), d.into()))),
            (0usize..3).prop_map(Expr::Var),
            select(vec!["a", "b_1", "c-d"]).prop_map(|s| Expr::Alias(s.into())),
        ];
        leaf.prop_recursive(4, 40, 2, |inner| {
            prop_oneof![
                (
                    select(vec![UnOp::Neg, UnOp::Not, UnOp::Next, UnOp::Finally, UnOp::Globally]),
                    inner.clone()
                )
                    .prop_map(|(op, e)| Expr::unary(op, e)),
                (
                    select(vec![
                        BinOp::Add,
                        BinOp::Sub,
                        BinOp::Mul,
                        BinOp::Lt,
                        BinOp::Le,
                        BinOp::Gt,
                        BinOp::Ge,
                        BinOp::Eq,
                        BinOp::Ne,
                        BinOp::And,
                        BinOp::Or,
                        BinOp::Until,
                    ]),
                    inner.clone(),
                    inner
                )
                    .prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            ]
        })
    }
}

pub mod typing {
    use hoapp::syntax::{parse_expr, AliasEnv, BinOp, Expr, UnOp};
    use hoapp::typesys::{max_type, Type};

    pub const NAMES: [&str; 5] = ["b", "c", "x", "y", "r"];
    pub const TYPES: [Type; 5] = [Type::Bool, Type::Bool, Type::Int, Type::Int, Type::Real];

    pub fn parse(s: &str) -> Expr {
        let names: Vec<String> = NAMES.iter().map(|s| s.to_string()).collect();
        parse_expr(s, &names, &AliasEnv::new()).unwrap()
    }

    /// (rule family, expression, expected least type; `None` = ill-typed).
    pub fn judgments() -> Vec<(&'static str, &'static str, Option<Type>)> {
        use Type::*;
        vec![
            ("literal", "i1 + r2.5", Some(Real)),
            ("literal", "i0 + i2", Some(Int)),
            ("literal", "t", Some(Bool)),
            ("literal", "f", Some(Bool)),
            ("literal", "i7", Some(Int)),
            ("literal", "r0.5", Some(Real)),
            ("variable", "x", Some(Int)),
            ("variable", "r", Some(Real)),
            ("variable", "b", Some(Bool)),
            ("minus", "-x", Some(Int)),
            ("minus", "-r", Some(Real)),
            ("minus", "-(x + r)", Some(Real)),
            ("minus", "-b", None),
            ("numeric", "x < r", Some(Bool)),
            ("numeric", "x == r2.0", Some(Bool)),
            ("numeric", "x * y - i1", Some(Int)),
            ("numeric", "x * r", Some(Real)),
            ("numeric", "x + b", None),
            ("numeric", "b < c", None),
            ("numeric", "x == b", None),
            ("logical", "b & c", Some(Bool)),
            ("logical", "b | x > i0", Some(Bool)),
            ("logical", "b == c", Some(Bool)),
            ("logical", "b != (x < y)", Some(Bool)),
            ("logical", "b & G c", Some(Ltl)),
            ("logical", "x & b", None),
            ("logical", "!b", Some(Bool)),
            ("logical", "!x", None),
            ("temporal", "G (x == i0)", Some(Ltl)),
            ("temporal", "X b", Some(Ltl)),
            ("temporal", "F b U c", Some(Ltl)),
            ("temporal", "!G F b", Some(Ltl)),
            ("temporal", "(G b) == c", Some(Ltl)),
            ("temporal", "G x", None),
            ("temporal", "b U x", None),
            ("temporal", "G b + i1", None),
        ]
    }

    /// Every type `e` can be given by the rules plus subsumption, computed
    /// bottom-up as the upward closure of the directly derivable types.
    pub fn derivable(e: &Expr, env: &[Type]) -> Vec<Type> {
        let direct = direct(e, env);
        Type::ALL
            .into_iter()
            .filter(|&t| direct.iter().any(|&s| s.is_subtype_of(t)))
            .collect()
    }

    fn pairs(l: &[Type], r: &[Type], bound: Type) -> Vec<(Type, Type)> {
        let mut v = Vec::new();
        for &t1 in l {
            for &t2 in r {
                if t1.is_subtype_of(bound) && t2.is_subtype_of(bound) {
                    v.push((t1, t2));
                }
            }
        }
        v
    }

    fn direct(e: &Expr, env: &[Type]) -> Vec<Type> {
        let only = |ok: bool, t: Type| if ok { vec![t] } else { vec![] };
        match e {
            Expr::Bool(_) => vec![Type::Bool],
            Expr::Int(_) => vec![Type::Int],
            Expr::Real(_) => vec![Type::Real],
            Expr::Var(i) => vec![env[*i]],
            Expr::Alias(_) => vec![],
            Expr::Unary(op, x) => {
                let d = derivable(x, env);
                match op {
                    UnOp::Neg => d.into_iter().filter(|t| t.is_subtype_of(Type::Real)).collect(),
                    UnOp::Not => d.into_iter().filter(|t| t.is_subtype_of(Type::Ltl)).collect(),
                    _ => only(d.contains(&Type::Ltl), Type::Ltl),
                }
            }
            Expr::Binary(op, l, r) => {
                let (dl, dr) = (derivable(l, env), derivable(r, env));
                if *op == BinOp::Until {
                    return only(dl.contains(&Type::Ltl) && dr.contains(&Type::Ltl), Type::Ltl);
                }
                let num = pairs(&dl, &dr, Type::Real);
                let log = pairs(&dl, &dr, Type::Ltl);
                let maxes = |ps: &[(Type, Type)]| -> Vec<Type> {
                    ps.iter().filter_map(|&(a, b)| max_type(a, b)).collect()
                };
                match op {
                    BinOp::Add | BinOp::Sub | BinOp::Mul => maxes(&num),
                    BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => only(!num.is_empty(), Type::Bool),
                    BinOp::Eq | BinOp::Ne => {
                        let mut v = maxes(&log);
                        v.extend(only(!num.is_empty(), Type::Bool));
                        v
                    }
                    _ => maxes(&log),
                }
            }
        }
    }

    /// Least derivable type, if any.
    pub fn least(e: &Expr, env: &[Type]) -> Option<Type> {
        let ds = derivable(e, env);
        ds.iter()
            .copied()
            .find(|&t| ds.iter().all(|&u| t.is_subtype_of(u)))
    }
}

pub mod random {
    use std::collections::BTreeSet;

    use hoapp::automaton::{AcceptanceCond, AndState, Automaton, Edge, Obligation, Variable};
    use hoapp::semantics::{LassoWord, Valuation, Value};
    use hoapp::syntax::{BinOp, Expr, UnOp};
    use hoapp::Type;
    use rand::seq::SliceRandom;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        rand::SeedableRng::seed_from_u64(seed)
    }

    fn int_lit(c: i64) -> Expr {
        if c < 0 {
            Expr::unary(UnOp::Neg, Expr::int(-c))
        } else {
            Expr::int(c)
        }
    }

    /// `c0 + c1*v1 + ...` with coefficients in [-2, 2], parse-shaped.
    pub fn linear_term(rng: &mut ChaCha8Rng, vars: usize) -> Expr {
        let mut t: Option<Expr> = None;
        for v in 0..vars {
            let c: i64 = rng.gen_range(-2..=2);
            if c == 0 {
                continue;
            }
            let m = match c {
                1 => Expr::Var(v),
                -1 => Expr::unary(UnOp::Neg, Expr::Var(v)),
                c => Expr::binary(BinOp::Mul, int_lit(c), Expr::Var(v)),
            };
            t = Some(match t {
                None => m,
                Some(t) => Expr::binary(BinOp::Add, t, m),
            });
        }
        let c0: i64 = rng.gen_range(-2..=2);
        match t {
            None => int_lit(c0),
            Some(t) if c0 == 0 => t,
            Some(t) if c0 > 0 => Expr::binary(BinOp::Add, t, Expr::int(c0)),
            Some(t) => Expr::binary(BinOp::Sub, t, Expr::int(-c0)),
        }
    }

    fn atom(rng: &mut ChaCha8Rng, vars: usize) -> Expr {
        let op = *[BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge, BinOp::Eq, BinOp::Ne]
            .choose(rng)
            .unwrap();
        let l = Expr::Var(rng.gen_range(0..vars));
        Expr::binary(op, l, linear_term(rng, vars))
    }

    pub fn int_guard(rng: &mut ChaCha8Rng, vars: usize) -> Expr {
        match rng.gen_range(0..10) {
            0..=2 => Expr::tt(),
            3..=6 => atom(rng, vars),
            7 => Expr::negation(atom(rng, vars)),
            8 => Expr::binary(BinOp::And, atom(rng, vars), atom(rng, vars)),
            _ => Expr::binary(BinOp::Or, atom(rng, vars), atom(rng, vars)),
        }
    }

    /// Random existential Büchi obligation automaton over int variables.
    pub fn int_automaton(rng: &mut ChaCha8Rng, names: &[&str], max_states: usize, negative: bool) -> Automaton {
        let vars: Vec<Variable> = names.iter().map(|n| Variable::new(*n, Type::Int)).collect();
        let nv = vars.len();
        let n = rng.gen_range(1..=max_states);
        let mut a = Automaton::new(vars, n);
        a.initial.push(AndState::single(0));
        if n > 1 && rng.gen_bool(0.2) {
            a.initial.push(AndState::single(rng.gen_range(1..n)));
        }
        a.num_sets = 1;
        a.acc = AcceptanceCond::Inf(0);
        for q in 0..n {
            for _ in 0..rng.gen_range(1..=3) {
                let mut o = Obligation::empty();
                for v in 0..nv {
                    if rng.gen_bool(0.3) {
                        o = o.assign(v, linear_term(rng, nv));
                    }
                }
                if negative && rng.gen_bool(0.15) {
                    o = o.forbid(rng.gen_range(0..nv), linear_term(rng, nv));
                }
                let acc: BTreeSet<usize> = if rng.gen_bool(0.5) { BTreeSet::from([0]) } else { BTreeSet::new() };
                a.add_edge(Edge {
                    source: q,
                    guard: int_guard(rng, nv),
                    obligation: o,
                    target: AndState::single(rng.gen_range(0..n)),
                    acc,
                });
            }
        }
        a
    }

    pub fn int_word(rng: &mut ChaCha8Rng, vars: usize, max_stem: usize, max_loop: usize, range: i64) -> LassoWord {
        let val = |rng: &mut ChaCha8Rng| Valuation::new((0..vars).map(|_| Value::int(rng.gen_range(-range..=range))).collect());
        let stem = (0..rng.gen_range(0..=max_stem)).map(|_| val(rng)).collect();
        let cycle = (0..rng.gen_range(1..=max_loop)).map(|_| val(rng)).collect();
        LassoWord::new(stem, cycle)
    }

    /// Restricts a word over `from` to the variables `to` (matched by name).
    pub fn project(w: &LassoWord, from: &[String], to: &[String]) -> LassoWord {
        let idx: Vec<usize> = to.iter().map(|n| from.iter().position(|m| m == n).unwrap()).collect();
        let p = |v: &Valuation| Valuation::new(idx.iter().map(|&i| v.0[i].clone()).collect());
        LassoWord::new(w.stem.iter().map(p).collect(), w.cycle.iter().map(p).collect())
    }

    pub fn bool_guard(rng: &mut ChaCha8Rng, vars: usize) -> Expr {
        let lit = |rng: &mut ChaCha8Rng| {
            let v = Expr::Var(rng.gen_range(0..vars));
            if rng.gen_bool(0.5) { Expr::negation(v) } else { v }
        };
        match rng.gen_range(0..6) {
            0 => Expr::tt(),
            1 | 2 => lit(rng),
            3 => Expr::binary(BinOp::And, lit(rng), lit(rng)),
            4 => Expr::binary(BinOp::Or, lit(rng), lit(rng)),
            _ => Expr::ff(),
        }
    }

    pub fn acceptance(rng: &mut ChaCha8Rng, sets: usize, depth: usize) -> AcceptanceCond {
        if depth == 0 || rng.gen_bool(0.35) {
            return match rng.gen_range(0..10) {
                0 => AcceptanceCond::True,
                1 => AcceptanceCond::False,
                2..=5 => AcceptanceCond::Fin(rng.gen_range(0..sets)),
                _ => AcceptanceCond::Inf(rng.gen_range(0..sets)),
            };
        }
        let l = acceptance(rng, sets, depth - 1);
        let r = acceptance(rng, sets, depth - 1);
        if rng.gen_bool(0.5) {
            AcceptanceCond::and(l, r)
        } else {
            AcceptanceCond::or(l, r)
        }
    }

    /// Random obligation-free automaton over boolean variables with a random
    /// Emerson-Lei condition on up to 2 sets.
    pub fn bool_automaton(rng: &mut ChaCha8Rng, vars: usize, max_states: usize) -> Automaton {
        let vs = (0..vars).map(|i| Variable::new(format!("p{i}"), Type::Bool)).collect();
        let n = rng.gen_range(1..=max_states);
        let mut a = Automaton::new(vs, n);
        a.initial.push(AndState::single(0));
        a.num_sets = rng.gen_range(1..=2);
        a.acc = acceptance(rng, a.num_sets, 2);
        for q in 0..n {
            for _ in 0..rng.gen_range(0..=3) {
                let acc = (0..a.num_sets).filter(|_| rng.gen_bool(0.4)).collect();
                a.add_edge(Edge {
                    source: q,
                    guard: bool_guard(rng, vars),
                    obligation: Obligation::empty(),
                    target: AndState::single(rng.gen_range(0..n)),
                    acc,
                });
            }
        }
        a
    }

    pub fn bool_word(rng: &mut ChaCha8Rng, vars: usize, max_stem: usize, max_loop: usize) -> LassoWord {
        let val = |rng: &mut ChaCha8Rng| Valuation::new((0..vars).map(|_| Value::Bool(rng.gen_bool(0.5))).collect());
        let stem = (0..rng.gen_range(0..=max_stem)).map(|_| val(rng)).collect();
        let cycle = (0..rng.gen_range(1..=max_loop)).map(|_| val(rng)).collect();
        LassoWord::new(stem, cycle)
    }

    /// Every boolean lasso word over `vars` variables with the given lengths.
    pub fn all_bool_words(vars: usize, stem: usize, cycle: usize) -> Vec<LassoWord> {
        let letters: Vec<Valuation> = (0..1u32 << vars)
            .map(|m| Valuation::new((0..vars).map(|i| Value::Bool(m >> i & 1 == 1)).collect()))
            .collect();
        let total = stem + cycle;
        let mut out = Vec::new();
        let count = letters.len().pow(total as u32);
        for mut code in 0..count {
            let mut seq = Vec::with_capacity(total);
            for _ in 0..total {
                seq.push(letters[code % letters.len()].clone());
                code /= letters.len();
            }
            let cyc = seq.split_off(stem);
            out.push(LassoWord::new(seq, cyc));
        }
        out
    }
}

pub mod oracle {
    use std::collections::{BTreeSet, HashSet};

    use hoapp::automaton::Automaton;
    use hoapp::semantics::{eval_bool, LassoWord, Valuation, Value};
    use petgraph::algo::tarjan_scc;
    use petgraph::graph::DiGraph;

    /// Acceptance of an obligation-free existential automaton on a lasso,
    /// by explicit product with the word and enumeration of simple cycles
    /// and their connected unions.
    pub fn accepts_obligation_free(a: &Automaton, w: &LassoWord) -> bool {
        assert!(!a.has_obligations());
        let p = w.positions();
        let node = |q: usize, i: usize| q * p + i;
        let nn = a.num_states * p;
        // arcs: (from, to, acc mask)
        let mut arcs: Vec<Vec<(usize, u64)>> = vec![Vec::new(); nn];
        for q in 0..a.num_states {
            for i in 0..p {
                for e in &a.edges[q] {
                    if eval_bool(&e.guard, w.at(i)).unwrap() {
                        let t = e.target.as_single().unwrap();
                        let mask = e.acc.iter().fold(0u64, |m, k| m | 1 << k);
                        arcs[node(q, i)].push((node(t, w.next_pos(i)), mask));
                    }
                }
            }
        }
        let mut reach = vec![false; nn];
        let mut stack: Vec<usize> = a.initial.iter().map(|z| node(z.as_single().unwrap(), 0)).collect();
        while let Some(n) = stack.pop() {
            if std::mem::replace(&mut reach[n], true) {
                continue;
            }
            stack.extend(arcs[n].iter().map(|a| a.0));
        }
        let in_loop = |n: usize| n % p >= w.stem.len();
        // simple cycles as (node mask, acc mask)
        let mut cycles: HashSet<(u128, u64)> = HashSet::new();
        fn dfs(
            s: usize,
            n: usize,
            nodes: u128,
            acc: u64,
            arcs: &[Vec<(usize, u64)>],
            ok: &dyn Fn(usize) -> bool,
            out: &mut HashSet<(u128, u64)>,
        ) {
            for &(t, m) in &arcs[n] {
                if !ok(t) {
                    continue;
                }
                if t == s {
                    out.insert((nodes, acc | m));
                } else if t > s && nodes & (1 << t) == 0 {
                    dfs(s, t, nodes | 1 << t, acc | m, arcs, ok, out);
                }
            }
        }
        assert!(nn <= 128);
        for (s, &r) in reach.iter().enumerate().take(nn) {
            if r && in_loop(s) {
                dfs(s, s, 1 << s, 0, &arcs, &|t| in_loop(t), &mut cycles);
            }
        }
        // connected unions of cycles
        let mut all: HashSet<(u128, u64)> = cycles.clone();
        let mut frontier: Vec<(u128, u64)> = all.iter().copied().collect();
        while let Some((n1, a1)) = frontier.pop() {
            for &(n2, a2) in &cycles {
                if n1 & n2 != 0 {
                    let u = (n1 | n2, a1 | a2);
                    if all.insert(u) {
                        frontier.push(u);
                    }
                }
            }
        }
        all.iter().any(|&(_, m)| {
            let set: BTreeSet<usize> = (0..64).filter(|k| m >> k & 1 == 1).collect();
            a.acc.eval(&set)
        })
    }

    /// Brute-force emptiness for obligation-free boolean automata: try
    /// every lasso word with stem and loop up to the given lengths.
    pub fn nonempty_by_enumeration(a: &Automaton, max_stem: usize, max_loop: usize) -> bool {
        for s in 0..=max_stem {
            for l in 1..=max_loop {
                for w in super::random::all_bool_words(a.vars.len(), s, l) {
                    if accepts_obligation_free(a, &w) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Emptiness of an obligation-free boolean automaton: some acceptance
    /// disjunct has a reachable non-trivial SCC of enabled, non-Fin edges that
    /// covers its Inf sets.
    pub fn nonempty_by_scc(a: &Automaton) -> bool {
        let n = a.vars.len();
        let letters: Vec<Valuation> = (0..1u32 << n)
            .map(|m| Valuation::new((0..n).map(|i| Value::Bool(m >> i & 1 == 1)).collect()))
            .collect();
        let enabled: Vec<_> = a
            .all_edges()
            .filter(|e| letters.iter().any(|v| eval_bool(&e.guard, v).unwrap()))
            .collect();
        let mut reach: BTreeSet<usize> = a.initial.iter().map(|z| z.states()[0]).collect();
        loop {
            let more: Vec<usize> = enabled
                .iter()
                .filter(|e| reach.contains(&e.source))
                .map(|e| e.target.states()[0])
                .filter(|t| !reach.contains(t))
                .collect();
            if more.is_empty() {
                break;
            }
            reach.extend(more);
        }
        a.acc.dnf().iter().any(|d| {
            let mut g = DiGraph::<usize, ()>::new();
            let nodes: Vec<_> = (0..a.num_states).map(|q| g.add_node(q)).collect();
            let kept: Vec<_> = enabled
                .iter()
                .filter(|e| reach.contains(&e.source) && e.acc.is_disjoint(&d.fins))
                .collect();
            for e in &kept {
                g.add_edge(nodes[e.source], nodes[e.target.states()[0]], ());
            }
            let mut comp = vec![0; a.num_states];
            for (c, scc) in tarjan_scc(&g).into_iter().enumerate() {
                for v in scc {
                    comp[g[v]] = c;
                }
            }
            (0..a.num_states).any(|c| {
                let inner: Vec<_> = kept
                    .iter()
                    .filter(|e| comp[e.source] == c && comp[e.target.states()[0]] == c)
                    .collect();
                let sets: BTreeSet<usize> = inner.iter().flat_map(|e| e.acc.iter().copied()).collect();
                !inner.is_empty() && d.infs.is_subset(&sets)
            })
        })
    }
}

pub mod typed {
    use hoapp::semantics::{LassoWord, Valuation, Value};
    use hoapp::Type;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    /// A small random value of type `ty`; reals are halves.
    pub fn value(rng: &mut ChaCha8Rng, ty: Type) -> Value {
        match ty {
            Type::Bool => Value::Bool(rng.gen_bool(0.5)),
            Type::Int => Value::int(rng.gen_range(-3..=3)),
            _ => Value::real(rng.gen_range(-6..=6), 2),
        }
    }

    pub fn word(rng: &mut ChaCha8Rng, types: &[Type], max_stem: usize, max_loop: usize) -> LassoWord {
        let val = |rng: &mut ChaCha8Rng| Valuation::new(types.iter().map(|&t| value(rng, t)).collect());
        let stem = (0..rng.gen_range(0..=max_stem)).map(|_| val(rng)).collect();
        let cycle = (0..rng.gen_range(1..=max_loop)).map(|_| val(rng)).collect();
        LassoWord::new(stem, cycle)
    }
}

pub mod ltl_oracle {
    use hoapp::ltl::LtlFormula as F;
    use hoapp::semantics::{eval_bool, LassoWord};
    use hoapp::syntax::Expr;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    /// Truth of `f` at each position of the lasso, by fixpoint iteration
    /// over the finite position graph.
    pub fn eval(f: &F, w: &LassoWord) -> Vec<bool> {
        let p = w.positions();
        let fix = |a: &[bool], b: &[bool], least: bool| {
            let mut v = vec![!least; p];
            loop {
                let mut changed = false;
                for i in (0..p).rev() {
                    let n = v[w.next_pos(i)];
                    let x = if least { b[i] || (a[i] && n) } else { b[i] && (a[i] || n) };
                    changed |= x != v[i];
                    v[i] = x;
                }
                if !changed {
                    return v;
                }
            }
        };
        match f {
            F::Atom(e) => (0..p).map(|i| eval_bool(e, w.at(i)).unwrap()).collect(),
            F::Not(x) => eval(x, w).into_iter().map(|b| !b).collect(),
            F::And(l, r) => eval(l, w).iter().zip(eval(r, w)).map(|(a, b)| *a && b).collect(),
            F::Or(l, r) => eval(l, w).iter().zip(eval(r, w)).map(|(a, b)| *a || b).collect(),
            F::Next(x) => {
                let v = eval(x, w);
                (0..p).map(|i| v[w.next_pos(i)]).collect()
            }
            F::Finally(x) => fix(&vec![true; p], &eval(x, w), true),
            F::Globally(x) => fix(&vec![false; p], &eval(x, w), false),
            F::Until(a, b) => fix(&eval(a, w), &eval(b, w), true),
            F::Release(a, b) => fix(&eval(a, w), &eval(b, w), false),
        }
    }

    pub fn holds(f: &F, w: &LassoWord) -> bool {
        eval(f, w)[0]
    }

    /// Random formula of depth at most `depth` over boolean variables `0..vars`.
    pub fn formula(rng: &mut ChaCha8Rng, vars: usize, depth: usize) -> F {
        if depth == 0 || rng.gen_bool(0.2) {
            return match rng.gen_range(0..10) {
                0 => F::tt(),
                1 => F::ff(),
                _ => F::Atom(Expr::Var(rng.gen_range(0..vars))),
            };
        }
        let sub = |rng: &mut ChaCha8Rng| formula(rng, vars, depth - 1);
        match rng.gen_range(0..9) {
            0 => F::negation(sub(rng)),
            1 => F::and(sub(rng), sub(rng)),
            2 => F::or(sub(rng), sub(rng)),
            3 => F::next(sub(rng)),
            4 => F::finally(sub(rng)),
            5 => F::globally(sub(rng)),
            6 | 7 => F::until(sub(rng), sub(rng)),
            _ => F::release(sub(rng), sub(rng)),
        }
    }
}

pub mod vmt {
    use std::collections::{BTreeSet, HashSet};

    /// Tokens of an SMT-LIB text: parentheses, quoted symbols, other atoms.
    fn tokens(text: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut chars = text.chars().peekable();
        while let Some(c) = chars.next() {
            match c {
                ';' => {
                    for c in chars.by_ref() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                '(' | ')' => out.push(c.to_string()),
                '|' => {
                    let mut s = String::from("|");
                    for c in chars.by_ref() {
                        s.push(c);
                        if c == '|' {
                            break;
                        }
                    }
                    assert!(s.len() > 1 && s.ends_with('|'), "unterminated quoted symbol");
                    out.push(s);
                }
                c if c.is_whitespace() => {}
                c => {
                    let mut s = c.to_string();
                    while let Some(&d) = chars.peek() {
                        if d.is_whitespace() || d == '(' || d == ')' {
                            break;
                        }
                        s.push(d);
                        chars.next();
                    }
                    out.push(s);
                }
            }
        }
        out
    }

    const BUILTINS: &[&str] = &[
        "declare-fun", "define-fun", "!", "and", "or", "not", "=", "distinct", "+", "-", "*", "/", "<", "<=",
        ">", ">=", "to_real", "true", "false", "Int", "Real", "Bool", "ltl.G", "ltl.F", "ltl.X", "ltl.U",
        "ltl.R",
    ];

    /// Balanced s-expressions, only `declare-fun`/`define-fun` commands, every
    /// symbol declared before use, and the required annotations present.
    pub fn validate_vmt(text: &str) -> Result<(), String> {
        let toks = tokens(text);
        let mut declared: HashSet<String> = HashSet::new();
        let mut depth = 0usize;
        let mut i = 0;
        let mut annotations = BTreeSet::new();
        while i < toks.len() {
            let t = &toks[i];
            match t.as_str() {
                "(" => {
                    if depth == 0 {
                        let head = toks.get(i + 1).ok_or("dangling (")?;
                        if head != "declare-fun" && head != "define-fun" {
                            return Err(format!("unexpected command {head}"));
                        }
                        let name = toks.get(i + 2).ok_or("missing name")?;
                        if !declared.insert(name.trim_matches('|').to_string()) {
                            return Err(format!("{name} declared twice"));
                        }
                        i += 3;
                        depth += 1;
                        continue;
                    }
                    depth += 1;
                }
                ")" => depth = depth.checked_sub(1).ok_or("unbalanced )")?,
                _ if depth == 0 => return Err(format!("atom {t} at top level")),
                _ if t.starts_with(':') => {
                    annotations.insert(t.clone());
                }
                _ if t.parse::<u64>().is_ok() || t.parse::<f64>().is_ok() => {}
                _ if BUILTINS.contains(&t.as_str()) => {}
                _ => {
                    if !declared.contains(t.trim_matches('|')) {
                        return Err(format!("{t} used before declaration"));
                    }
                }
            }
            i += 1;
        }
        if depth != 0 {
            return Err("unbalanced (".into());
        }
        for need in [":next", ":init", ":trans", ":ltl-property"] {
            if !annotations.contains(need) {
                return Err(format!("missing {need}"));
            }
        }
        Ok(())
    }
}
