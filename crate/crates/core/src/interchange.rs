//! Lowering to plain HOA v1 and lifting back.
//!
//! Lowering replaces every theory predicate and every obligation entry by a
//! fresh atomic proposition named by its canonical text, e.g. `"x != i0"` or
//! `"x := x + i1"`. Variable names, types, controllability and temporal
//! header items travel in `v1pp-*` items so that lifting can rebuild the
//! original automaton.

use std::collections::{BTreeMap, BTreeSet};

use crate::automaton::Automaton;
use crate::error::{Error, Pos, Result};
use crate::syntax::{
    self, alias_names, expand_aliases, parse_assignment, parse_expr, print_assignment_styled,
    print_expr_named, quote, AliasEnv, Assignment, BinOp, EdgeLabel, Expr, HeaderItem, ItemKind,
    ParseOptions, RawAutomaton, UnOp, VarStyle, Version,
};
use crate::typesys::{self, Type};

pub const ITEM_AP: &str = "v1pp-AP";
pub const ITEM_AP_TYPE: &str = "v1pp-AP-type";
pub const ITEM_CONTROLLABLE: &str = "v1pp-controllable-AP";
pub const ITEM_ASSUME: &str = "v1pp-assume";
pub const ITEM_GUARANTEE: &str = "v1pp-guarantee";
pub const ITEM_NEG: &str = "v1pp-neg-obligation";

/// Fresh propositions in first-use order, deduplicated by name.
#[derive(Default)]
struct ApTable {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl ApTable {
    fn get(&mut self, name: String) -> usize {
        if let Some(&i) = self.index.get(&name) {
            return i;
        }
        let i = self.names.len();
        self.index.insert(name.clone(), i);
        self.names.push(name);
        i
    }
}

struct Lowering<'a> {
    a: &'a Automaton,
    names: Vec<String>,
    aliases: Vec<String>,
    aps: ApTable,
    /// Names used by negative obligation entries.
    neg_names: BTreeSet<String>,
    neg_aps: BTreeSet<usize>,
}

impl Lowering<'_> {
    fn style(&self) -> VarStyle<'_> {
        VarStyle::Names {
            names: &self.names,
            aliases: &self.aliases,
        }
    }

    fn guard(&mut self, e: &Expr) -> Expr {
        match e {
            Expr::Bool(_) => e.clone(),
            Expr::Var(i) if self.a.vars[*i].ty == Type::Bool => {
                Expr::Var(self.aps.get(self.names[*i].clone()))
            }
            Expr::Unary(UnOp::Not, x) => Expr::negation(self.guard(x)),
            Expr::Binary(op @ (BinOp::And | BinOp::Or), l, r) => {
                Expr::binary(*op, self.guard(l), self.guard(r))
            }
            _ => {
                let mut name = syntax::print_expr_styled(e, self.style());
                if self.neg_names.contains(&name) {
                    // keep predicates apart from identically printed
                    // negative obligations
                    name = format!("({name})");
                }
                Expr::Var(self.aps.get(name))
            }
        }
    }
}

/// Lowers `a` to a plain HOA v1 document.
pub fn lower(a: &Automaton) -> RawAutomaton {
    let names = a.names();
    let mut low = Lowering {
        a,
        aliases: alias_names(&names),
        names,
        aps: ApTable::default(),
        neg_names: BTreeSet::new(),
        neg_aps: BTreeSet::new(),
    };
    for e in a.all_edges() {
        for (x, t) in &e.obligation.negative {
            let s = print_assignment_styled(&Assignment::negative(*x, t.clone()), low.style());
            low.neg_names.insert(s);
        }
    }

    let mut raw = a.to_raw();
    raw.version = Version::V1;
    for st in &mut raw.states {
        for e in &mut st.edges {
            let mut g = low.guard(&e.label.guard);
            for asg in std::mem::take(&mut e.label.obligation) {
                let name = print_assignment_styled(&asg, low.style());
                let k = low.aps.get(name);
                if asg.negated {
                    low.neg_aps.insert(k);
                }
                g = if g.is_true() {
                    Expr::Var(k)
                } else {
                    Expr::binary(BinOp::And, g, Expr::Var(k))
                };
            }
            e.label = EdgeLabel {
                guard: g,
                obligation: Vec::new(),
            };
        }
    }

    let other = |name: &str, data: String| HeaderItem::new(ItemKind::Other(name.to_string(), data));
    let quoted = |xs: &[String]| xs.iter().map(|s| quote(s)).collect::<Vec<_>>().join(" ");
    let numbers = |xs: &mut dyn Iterator<Item = usize>| {
        xs.map(|k| k.to_string()).collect::<Vec<_>>().join(" ")
    };
    let mut header = Vec::new();
    for item in raw.header {
        match item.kind {
            ItemKind::Ap(_) => {
                header.push(HeaderItem::new(ItemKind::Ap(low.aps.names.clone())));
                header.push(other(
                    ITEM_AP,
                    format!("{} {}", low.names.len(), quoted(&low.names)).trim_end().to_string(),
                ));
                if !a.vars.is_empty() {
                    let types: Vec<&str> = a.vars.iter().map(|v| v.ty.name()).collect();
                    header.push(other(ITEM_AP_TYPE, types.join(" ")));
                }
                let ctrl: Vec<usize> = (0..a.vars.len()).filter(|&i| a.vars[i].controllable).collect();
                if !ctrl.is_empty() {
                    header.push(other(ITEM_CONTROLLABLE, numbers(&mut ctrl.into_iter())));
                }
                if !low.neg_aps.is_empty() {
                    header.push(other(ITEM_NEG, numbers(&mut low.neg_aps.iter().copied())));
                }
            }
            ItemKind::ApType(_) | ItemKind::ControllableAp(_) => {}
            ItemKind::Assume(e) => {
                header.push(other(ITEM_ASSUME, quote(&print_expr_named(&e, &low.names))))
            }
            ItemKind::Guarantee(e) => {
                header.push(other(ITEM_GUARANTEE, quote(&print_expr_named(&e, &low.names))))
            }
            _ => header.push(item),
        }
    }
    RawAutomaton {
        version: Version::V1,
        header,
        states: raw.states,
    }
}

/// Splits a run of double-quoted strings, undoing [`quote`] escapes.
fn unquote_all(data: &str, item: &str) -> Result<Vec<String>> {
    let bad = || Error::parse(Pos::new(1, 1), format!("malformed string list in `{item}`"));
    let mut out = Vec::new();
    let mut chars = data.chars().peekable();
    loop {
        while chars.next_if(|c| c.is_whitespace()).is_some() {}
        match chars.next() {
            None => return Ok(out),
            Some('"') => {}
            Some(_) => return Err(bad()),
        }
        let mut s = String::new();
        loop {
            match chars.next().ok_or_else(bad)? {
                '"' => break,
                '\\' => match chars.next().ok_or_else(bad)? {
                    'n' => s.push('\n'),
                    c => s.push(c),
                },
                c => s.push(c),
            }
        }
        out.push(s);
    }
}

fn item_error(item: &str, msg: impl std::fmt::Display) -> Error {
    Error::parse(Pos::new(1, 1), format!("`{item}`: {msg}"))
}

fn numbers(data: &str, item: &str) -> Result<Vec<usize>> {
    data.split_whitespace()
        .map(|w| w.parse().map_err(|_| item_error(item, format!("`{w}` is not an index"))))
        .collect()
}

/// How a lowered proposition is read back.
enum ApMeaning {
    Predicate(Expr),
    Obligation(Assignment),
}

/// Lifts a lowered document. A plain HOA v1 file without `v1pp-AP`
/// lifts to an all-boolean, obligation-free automaton.
pub fn lift(raw: &RawAutomaton) -> Result<Automaton> {
    let raw = expand_aliases(raw)?;
    let Some(ap_data) = raw.other_item(ITEM_AP) else {
        let mut plain = raw.clone();
        plain.header.retain(|h| !matches!(&h.kind, ItemKind::Other(n, _) if n.starts_with("v1pp-")));
        return typesys::check_automaton(&plain);
    };

    let (count, rest) = ap_data.trim().split_once(' ').unwrap_or((ap_data.trim(), ""));
    let count: usize = count
        .parse()
        .map_err(|_| item_error(ITEM_AP, "expected a count"))?;
    let names = unquote_all(rest, ITEM_AP)?;
    if names.len() != count {
        return Err(item_error(ITEM_AP, format!("declares {count} names but lists {}", names.len())));
    }
    let types = match raw.other_item(ITEM_AP_TYPE) {
        Some(d) => d
            .split_whitespace()
            .map(|w| Type::parse(w).ok_or_else(|| item_error(ITEM_AP_TYPE, format!("unknown type `{w}`"))))
            .collect::<Result<Vec<_>>>()?,
        None => vec![Type::Bool; names.len()],
    };
    if types.len() != names.len() {
        return Err(item_error(ITEM_AP_TYPE, "arity differs from v1pp-AP"));
    }
    let ctrl = match raw.other_item(ITEM_CONTROLLABLE) {
        Some(d) => numbers(d, ITEM_CONTROLLABLE)?,
        None => Vec::new(),
    };
    let neg: BTreeSet<usize> = match raw.other_item(ITEM_NEG) {
        Some(d) => numbers(d, ITEM_NEG)?.into_iter().collect(),
        None => BTreeSet::new(),
    };

    let env: AliasEnv = alias_names(&names)
        .into_iter()
        .enumerate()
        .map(|(i, a)| (a, Expr::Var(i)))
        .collect();
    let lowered_aps = raw.ap_names();
    let mut meaning = Vec::with_capacity(lowered_aps.len());
    for (k, ap) in lowered_aps.iter().enumerate() {
        let m = if neg.contains(&k) {
            let e = parse_expr(ap, &names, &env)?;
            match e {
                Expr::Binary(BinOp::Ne, l, r) if matches!(*l, Expr::Var(_)) => {
                    let Expr::Var(x) = *l else { unreachable!() };
                    ApMeaning::Obligation(Assignment::negative(x, *r))
                }
                _ => return Err(item_error(ITEM_NEG, format!("`{ap}` is not of the form `x != t`"))),
            }
        } else if ap.contains(":=") {
            let opts = ParseOptions::default();
            ApMeaning::Obligation(parse_assignment(ap, &names, &env, &opts)?)
        } else if let Some(i) = names.iter().position(|n| n == ap) {
            ApMeaning::Predicate(Expr::Var(i))
        } else {
            ApMeaning::Predicate(parse_expr(ap, &names, &env).map_err(|e| {
                Error::parse(Pos::new(1, 1), format!("proposition `{ap}` is neither a variable nor a predicate: {e}"))
            })?)
        };
        meaning.push(m);
    }
    let is_obligation = |k: usize| matches!(meaning.get(k), Some(ApMeaning::Obligation(_)));

    let mut out = raw.clone();
    out.version = Version::V1pp;
    for st in &mut out.states {
        for e in &mut st.edges {
            let mut g = e.label.guard.clone();
            let mut obligation = Vec::new();
            loop {
                match g {
                    Expr::Var(k) if is_obligation(k) => {
                        obligation.push(k);
                        g = Expr::tt();
                    }
                    Expr::Binary(BinOp::And, l, r) if matches!(*r, Expr::Var(k) if is_obligation(k)) => {
                        let Expr::Var(k) = *r else { unreachable!() };
                        obligation.push(k);
                        g = *l;
                    }
                    other => {
                        g = other;
                        break;
                    }
                }
            }
            if let Some(k) = g.vars().into_iter().find(|&k| is_obligation(k)) {
                return Err(Error::parse(
                    e.pos,
                    format!(
                        "assignment proposition `{}` may only appear as a positive conjunct",
                        lowered_aps[k]
                    ),
                ));
            }
            obligation.reverse();
            let guard = g.substitute(&|k| match &meaning[k] {
                ApMeaning::Predicate(p) => p.clone(),
                ApMeaning::Obligation(_) => unreachable!("checked above"),
            });
            let obligation = obligation
                .into_iter()
                .map(|k| match &meaning[k] {
                    ApMeaning::Obligation(a) => a.clone(),
                    ApMeaning::Predicate(_) => unreachable!(),
                })
                .collect();
            e.label = EdgeLabel { guard, obligation };
        }
    }

    let mut header = Vec::new();
    for item in &raw.header {
        match &item.kind {
            ItemKind::Ap(_) => {
                header.push(HeaderItem { pos: item.pos, kind: ItemKind::Ap(names.clone()) });
                if !names.is_empty() {
                    header.push(HeaderItem::new(ItemKind::ApType(types.clone())));
                }
                if !ctrl.is_empty() {
                    header.push(HeaderItem::new(ItemKind::ControllableAp(ctrl.clone())));
                }
            }
            ItemKind::Other(n, d) if n == ITEM_ASSUME || n == ITEM_GUARANTEE => {
                let [text] = &unquote_all(d, n)?[..] else {
                    return Err(item_error(n, "expected one quoted formula"));
                };
                let e = parse_expr(text, &names, &env)?;
                header.push(HeaderItem {
                    pos: item.pos,
                    kind: if n == ITEM_ASSUME { ItemKind::Assume(e) } else { ItemKind::Guarantee(e) },
                });
            }
            ItemKind::Other(n, _) if n.starts_with("v1pp-") => {}
            _ => header.push(item.clone()),
        }
    }
    out.header = header;
    typesys::check_automaton(&out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoted_lists() {
        assert_eq!(
            unquote_all(r#""a" "b \"c\"" "d\\e""#, "t").unwrap(),
            vec!["a", "b \"c\"", "d\\e"]
        );
        assert!(unquote_all("\"open", "t").is_err());
        assert!(unquote_all("bare", "t").is_err());
        let s = "x \"y\"\\\n";
        assert_eq!(unquote_all(&quote(s), "t").unwrap(), vec![s]);
    }
}
