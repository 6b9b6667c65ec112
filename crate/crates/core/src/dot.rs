//! GraphViz rendering. Edges into and-states go through a junction point
//! that fans out to every member state.

use std::fmt::Write as _;

use crate::automaton::{AcceptanceCond, Automaton, Edge};
use crate::syntax::{alias_names, print_assignment_styled, print_expr_styled, BinOp, Expr, VarStyle};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Edge label: guard, obligation after `$`, acceptance sets in braces.
pub fn edge_label(a: &Automaton, e: &Edge) -> String {
    let names = a.names();
    let aliases = alias_names(&names);
    let st = VarStyle::Names {
        names: &names,
        aliases: &aliases,
    };
    let mut label = print_expr_styled(&e.guard, st);
    let mut ob: Vec<String> = e
        .obligation
        .assignments()
        .iter()
        .map(|x| print_assignment_styled(x, st))
        .collect();
    for (x, t) in &e.obligation.negative {
        ob.push(print_expr_styled(&Expr::binary(BinOp::Ne, Expr::Var(*x), t.clone()), st));
    }
    if !ob.is_empty() {
        write!(label, " $ {}", ob.join(", ")).unwrap();
    }
    if !e.acc.is_empty() {
        let sets: Vec<String> = e.acc.iter().map(|k| k.to_string()).collect();
        write!(label, " {{{}}}", sets.join(" ")).unwrap();
    }
    label
}

pub fn to_dot(a: &Automaton) -> String {
    let mut out = String::from("digraph automaton {\n  rankdir=LR;\n  node [shape=circle];\n");
    if a.acc != AcceptanceCond::True {
        writeln!(out, "  label=\"{}\";", escape(&format!("Acc: {}", a.acc))).unwrap();
    }
    for q in 0..a.num_states {
        let name = match &a.state_names[q] {
            Some(n) => format!("{q}: {n}"),
            None => q.to_string(),
        };
        writeln!(out, "  s{q} [label=\"{}\"];", escape(&name)).unwrap();
    }
    let mut junctions = 0;
    let mut fan = |out: &mut String, from: String, label: Option<String>, targets: &[usize]| {
        let lab = label.map(|l| format!("label=\"{}\"", escape(&l)));
        if let [t] = targets {
            let attrs = lab.map(|l| format!(" [{l}]")).unwrap_or_default();
            writeln!(out, "  {from} -> s{t}{attrs};").unwrap();
        } else {
            let j = format!("j{junctions}");
            junctions += 1;
            writeln!(out, "  {j} [shape=point, width=0.05];").unwrap();
            let attrs = lab.map(|l| format!("{l}, ")).unwrap_or_default();
            writeln!(out, "  {from} -> {j} [{attrs}arrowhead=none];").unwrap();
            for t in targets {
                writeln!(out, "  {j} -> s{t};").unwrap();
            }
        }
    };
    for (i, z) in a.initial.iter().enumerate() {
        writeln!(out, "  init{i} [shape=point, style=invis];").unwrap();
        fan(&mut out, format!("init{i}"), None, z.states());
    }
    for e in a.all_edges() {
        fan(&mut out, format!("s{}", e.source), Some(edge_label(a, e)), e.target.states());
    }
    out.push_str("}\n");
    out
}
