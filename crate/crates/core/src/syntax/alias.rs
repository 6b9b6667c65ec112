use std::collections::BTreeSet;

use crate::error::{Error, Result};

use super::ast::*;
use super::AliasEnv;

/// Maps a variable name onto the alias lexicon `[A-Za-z0-9_-]+`.
pub fn sanitize(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect();
    if s.is_empty() {
        "_".to_string()
    } else {
        s
    }
}

/// One distinct alias name per variable, in AP order. Collisions after
/// sanitizing get `_2`, `_3`, ... appended.
pub fn alias_names(names: &[String]) -> Vec<String> {
    let mut used = BTreeSet::new();
    names
        .iter()
        .map(|n| {
            let base = sanitize(n);
            let mut cand = base.clone();
            let mut k = 2;
            while used.contains(&cand) {
                cand = format!("{base}_{k}");
                k += 1;
            }
            used.insert(cand.clone());
            cand
        })
        .collect()
}

/// Fully expands `e` under `env`.
pub fn expand_in(e: &Expr, env: &AliasEnv) -> Result<Expr> {
    let mut stack = Vec::new();
    expand_rec(e, env, &mut stack)
}

fn expand_rec(e: &Expr, env: &AliasEnv, stack: &mut Vec<String>) -> Result<Expr> {
    match e {
        Expr::Alias(name) => {
            if stack.contains(name) {
                stack.push(name.clone());
                return Err(Error::Alias(format!(
                    "cyclic alias chain: @{}",
                    stack.join(" -> @")
                )));
            }
            let body = env
                .get(name)
                .ok_or_else(|| Error::Alias(format!("undefined alias `@{name}`")))?;
            stack.push(name.clone());
            let out = expand_rec(body, env, stack)?;
            stack.pop();
            Ok(out)
        }
        Expr::Unary(op, x) => Ok(Expr::unary(*op, expand_rec(x, env, stack)?)),
        Expr::Binary(op, l, r) => Ok(Expr::binary(
            *op,
            expand_rec(l, env, stack)?,
            expand_rec(r, env, stack)?,
        )),
        leaf => Ok(leaf.clone()),
    }
}

fn env_of(a: &RawAutomaton) -> AliasEnv {
    a.aliases().into_iter().collect()
}

/// Expands every alias reference and drops the `Alias:` items.
pub fn expand_aliases(a: &RawAutomaton) -> Result<RawAutomaton> {
    let env = env_of(a);
    // Report cycles even in aliases that are never used.
    for body in env.values() {
        expand_in(body, &env)?;
    }
    let mut out = a.clone();
    out.header.retain(|h| !matches!(h.kind, ItemKind::Alias(..)));
    for h in &mut out.header {
        if let ItemKind::Assume(e) | ItemKind::Guarantee(e) = &mut h.kind {
            *e = expand_in(e, &env)?;
        }
    }
    for s in &mut out.states {
        for edge in &mut s.edges {
            edge.label.guard = expand_in(&edge.label.guard, &env)?;
            for asg in &mut edge.label.obligation {
                asg.rhs = expand_in(&asg.rhs, &env)?;
                if let VarRef::Alias(name) = &asg.lhs {
                    match expand_in(&Expr::Alias(name.clone()), &env)? {
                        Expr::Var(i) => asg.lhs = VarRef::Index(i),
                        _ => {
                            return Err(Error::Alias(format!(
                                "assignment target `@{name}` is not a variable"
                            )))
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Expands all aliases, then defines one alias per variable and rewrites
/// every variable reference to use it.
pub fn auto_alias(a: &RawAutomaton) -> Result<RawAutomaton> {
    let mut out = expand_aliases(a)?;
    let names = alias_names(&a.ap_names());
    let to_alias = |e: &Expr| e.substitute(&|i| Expr::Alias(names[i].clone()));
    for h in &mut out.header {
        if let ItemKind::Assume(e) | ItemKind::Guarantee(e) = &mut h.kind {
            *e = to_alias(e);
        }
    }
    for s in &mut out.states {
        for edge in &mut s.edges {
            edge.label.guard = to_alias(&edge.label.guard);
            for asg in &mut edge.label.obligation {
                asg.rhs = to_alias(&asg.rhs);
                if let VarRef::Index(i) = asg.lhs {
                    asg.lhs = VarRef::Alias(names[i].clone());
                }
            }
        }
    }
    let at = out
        .header
        .iter()
        .position(|h| matches!(h.kind, ItemKind::Ap(_)))
        .map_or(out.header.len(), |p| p + 1);
    let defs = names
        .iter()
        .enumerate()
        .map(|(i, n)| HeaderItem::new(ItemKind::Alias(n.clone(), Expr::Var(i))));
    out.header.splice(at..at, defs);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sanitize_and_collisions() {
        let names: Vec<String> = ["a b", "a_b", "x", "a-b", "a.b", ""]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(alias_names(&names), ["a_b", "a_b_2", "x", "a-b", "a_b_3", "_"]);
    }

    #[test]
    fn recursive_expansion() {
        let mut env = AliasEnv::new();
        env.insert("a".into(), Expr::and(Expr::Alias("b".into()), Expr::Var(0)));
        env.insert("b".into(), Expr::negation(Expr::Var(1)));
        let e = expand_in(&Expr::Alias("a".into()), &env).unwrap();
        assert_eq!(e, Expr::and(Expr::negation(Expr::Var(1)), Expr::Var(0)));
    }

    #[test]
    fn cycles_and_undefined() {
        let mut env = AliasEnv::new();
        env.insert("a".into(), Expr::Alias("b".into()));
        env.insert("b".into(), Expr::negation(Expr::Alias("a".into())));
        assert!(matches!(expand_in(&Expr::Alias("a".into()), &env), Err(Error::Alias(_))));
        assert!(matches!(
            expand_in(&Expr::Alias("zz".into()), &AliasEnv::new()),
            Err(Error::Alias(_))
        ));
    }
}
