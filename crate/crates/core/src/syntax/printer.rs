//! Canonical serializer for expressions and documents.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::automaton::AcceptanceCond;

use super::ast::*;

/// How variable references are rendered.
#[derive(Clone, Copy)]
pub enum VarStyle<'a> {
    /// Plain HOA indices: `0`, `1`, ...
    Index,
    /// Variable names: bare when they lex as an ordinary identifier,
    /// otherwise as `@alias` from the parallel `aliases` table.
    Names {
        names: &'a [String],
        aliases: &'a [String],
    },
}

/// Whether `name` can be printed bare and read back as a variable name.
pub fn is_bare_name(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    if !(first.is_ascii_alphabetic() || first == '_') {
        return false;
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return false;
    }
    if matches!(name, "t" | "f" | "X" | "F" | "G" | "U") {
        return false;
    }
    let b = name.as_bytes();
    !((b[0] == b'i' || b[0] == b'r') && b.len() > 1 && b[1].is_ascii_digit())
}

pub fn print_int(n: &BigInt) -> String {
    if n.is_negative() {
        format!("-i{}", -n)
    } else {
        format!("i{n}")
    }
}

/// Finite decimal expansion of `r`, if its denominator only has the prime
/// factors 2 and 5.
pub fn decimal_string(r: &BigRational) -> Option<String> {
    let mut den = r.denom().clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while den.is_even() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if den != BigInt::from(1) {
        return None;
    }
    let k = twos.max(fives);
    let scale = num_traits::pow(BigInt::from(10), k as usize);
    let scaled = (r.numer() * &scale) / r.denom();
    let neg = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let k = k as usize;
    let (int_part, frac_part) = if k == 0 {
        (digits, "0".to_string())
    } else if digits.len() > k {
        let (i, f) = digits.split_at(digits.len() - k);
        (i.to_string(), f.to_string())
    } else {
        ("0".to_string(), format!("{}{}", "0".repeat(k - digits.len()), digits))
    };
    Some(format!("{}{}.{}", if neg { "-" } else { "" }, int_part, frac_part))
}

pub fn print_real(r: &BigRational) -> String {
    match decimal_string(r) {
        Some(d) => match d.strip_prefix('-') {
            Some(pos) => format!("-r{pos}"),
            None => format!("r{d}"),
        },
        // Not expressible as REALLIT; only arises for internal constants.
        None => format!("r{}/{}", r.numer(), r.denom()),
    }
}

fn write_var(out: &mut String, i: usize, style: VarStyle<'_>) {
    match style {
        VarStyle::Index => {
            let _ = write!(out, "{i}");
        }
        VarStyle::Names { names, aliases } => match (names.get(i), aliases.get(i)) {
            (Some(n), _) if is_bare_name(n) => out.push_str(n),
            (_, Some(a)) => {
                out.push('@');
                out.push_str(a);
            }
            _ => {
                let _ = write!(out, "{i}");
            }
        },
    }
}

fn write_expr(out: &mut String, e: &Expr, style: VarStyle<'_>) {
    match e {
        Expr::Bool(true) => out.push('t'),
        Expr::Bool(false) => out.push('f'),
        Expr::Int(n) => out.push_str(&print_int(n)),
        Expr::Real(r) => out.push_str(&print_real(r)),
        Expr::Var(i) => write_var(out, *i, style),
        Expr::Alias(a) => {
            out.push('@');
            out.push_str(a);
        }
        Expr::Unary(op, inner) => {
            out.push_str(op.symbol());
            if op.is_modality() {
                out.push(' ');
            }
            write_operand(out, inner, inner.precedence() < UNARY_PRECEDENCE, style);
        }
        Expr::Binary(op, l, r) => {
            let p = op.precedence();
            let lp = l.precedence();
            let rp = r.precedence();
            let paren_l = lp < p || (lp == p && op.right_assoc());
            let paren_r = rp < p || (rp == p && !op.right_assoc());
            write_operand(out, l, paren_l, style);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_operand(out, r, paren_r, style);
        }
    }
}

fn write_operand(out: &mut String, e: &Expr, paren: bool, style: VarStyle<'_>) {
    if paren {
        out.push('(');
        write_expr(out, e, style);
        out.push(')');
    } else {
        write_expr(out, e, style);
    }
}

/// Prints with HOA variable indices and minimal parentheses.
pub fn print_expr(e: &Expr) -> String {
    print_expr_styled(e, VarStyle::Index)
}

/// Prints with variable names (see [`VarStyle::Names`]), using the
/// auto-alias names for variables that cannot be printed bare.
pub fn print_expr_named(e: &Expr, names: &[String]) -> String {
    let aliases = super::alias::alias_names(names);
    print_expr_styled(
        e,
        VarStyle::Names {
            names,
            aliases: &aliases,
        },
    )
}

pub fn print_expr_styled(e: &Expr, style: VarStyle<'_>) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, style);
    s
}

pub fn print_assignment_styled(a: &Assignment, style: VarStyle<'_>) -> String {
    let mut s = String::new();
    match &a.lhs {
        VarRef::Index(i) => write_var(&mut s, *i, style),
        VarRef::Alias(n) => {
            s.push('@');
            s.push_str(n);
        }
    }
    s.push_str(if a.negated { " != " } else { " := " });
    write_expr(&mut s, &a.rhs, style);
    s
}

pub fn print_acceptance(c: &AcceptanceCond) -> String {
    fn go(c: &AcceptanceCond, out: &mut String, parent_and: bool) {
        match c {
            AcceptanceCond::True => out.push('t'),
            AcceptanceCond::False => out.push('f'),
            AcceptanceCond::Fin(k) => {
                let _ = write!(out, "Fin({k})");
            }
            AcceptanceCond::Inf(k) => {
                let _ = write!(out, "Inf({k})");
            }
            AcceptanceCond::And(l, r) => {
                go(l, out, true);
                out.push_str(" & ");
                // `&` is left-associative: a nested right conjunction keeps its parens.
                if matches!(**r, AcceptanceCond::And(..)) {
                    out.push('(');
                    go(r, out, true);
                    out.push(')');
                } else {
                    go(r, out, true);
                }
            }
            AcceptanceCond::Or(l, r) => {
                if parent_and {
                    out.push('(');
                }
                go(l, out, false);
                out.push_str(" | ");
                if matches!(**r, AcceptanceCond::Or(..)) {
                    out.push('(');
                    go(r, out, false);
                    out.push(')');
                } else {
                    go(r, out, false);
                }
                if parent_and {
                    out.push(')');
                }
            }
        }
    }
    let mut s = String::new();
    go(c, &mut s, false);
    s
}

pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn join_states(z: &[usize]) -> String {
    z.iter().map(|q| q.to_string()).collect::<Vec<_>>().join("&")
}

fn acc_sig(acc: &[usize]) -> String {
    format!(
        "{{{}}}",
        acc.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ")
    )
}

/// Serializes a document in canonical form: one item per line, one edge
/// per line, single spaces, minimal parentheses.
pub fn print_hoapp(a: &RawAutomaton) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "HOA: {}", a.version.as_str());
    for h in &a.header {
        match &h.kind {
            ItemKind::States(n) => {
                let _ = writeln!(out, "States: {n}");
            }
            ItemKind::Start(z) => {
                let _ = writeln!(out, "Start: {}", join_states(z));
            }
            ItemKind::Ap(names) => {
                out.push_str(&format!("AP: {}", names.len()));
                for n in names {
                    out.push(' ');
                    out.push_str(&quote(n));
                }
                out.push('\n');
            }
            ItemKind::ApType(types) => {
                out.push_str("AP-type:");
                for t in types {
                    out.push(' ');
                    out.push_str(t.name());
                }
                out.push('\n');
            }
            ItemKind::Acceptance(n, c) => {
                let _ = writeln!(out, "Acceptance: {n} {}", print_acceptance(c));
            }
            ItemKind::Alias(name, e) => {
                let _ = writeln!(out, "Alias: @{name} {}", print_expr(e));
            }
            ItemKind::ControllableAp(v) => {
                out.push_str("controllable-AP:");
                for i in v {
                    let _ = write!(out, " {i}");
                }
                out.push('\n');
            }
            ItemKind::Assume(e) => {
                let _ = writeln!(out, "assume: {}", print_expr(e));
            }
            ItemKind::Guarantee(e) => {
                let _ = writeln!(out, "guarantee: {}", print_expr(e));
            }
            ItemKind::Other(name, raw) => {
                if raw.is_empty() {
                    let _ = writeln!(out, "{name}:");
                } else {
                    let _ = writeln!(out, "{name}: {raw}");
                }
            }
        }
    }
    out.push_str("--BODY--\n");
    for s in &a.states {
        let _ = write!(out, "State: {}", s.index);
        if let Some(n) = &s.name {
            out.push(' ');
            out.push_str(&quote(n));
        }
        if !s.acc.is_empty() {
            out.push(' ');
            out.push_str(&acc_sig(&s.acc));
        }
        out.push('\n');
        for e in &s.edges {
            out.push('[');
            out.push_str(&print_expr(&e.label.guard));
            if !e.label.obligation.is_empty() {
                out.push_str(" $ ");
                let parts: Vec<String> = e
                    .label
                    .obligation
                    .iter()
                    .map(|a| print_assignment_styled(a, VarStyle::Index))
                    .collect();
                out.push_str(&parts.join(", "));
            }
            out.push_str("] ");
            out.push_str(&join_states(&e.target));
            if !e.acc.is_empty() {
                out.push(' ');
                out.push_str(&acc_sig(&e.acc));
            }
            out.push('\n');
        }
    }
    out.push_str("--END--\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expr, AliasEnv};

    fn rt(src: &str) -> String {
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        print_expr(&parse_expr(src, &names, &AliasEnv::new()).unwrap())
    }

    #[test]
    fn minimal_parentheses() {
        assert_eq!(rt("(a | b) & c"), "(0 | 1) & 2");
        assert_eq!(rt("a | (b & c)"), "0 | 1 & 2");
        assert_eq!(rt("a - (b + c)"), "0 - (1 + 2)");
        assert_eq!(rt("(a - b) + c"), "0 - 1 + 2");
        assert_eq!(rt("-(a * b)"), "-(0 * 1)");
        assert_eq!(rt("(-a) * b"), "-0 * 1");
        assert_eq!(rt("G (a == i0)"), "G (0 == i0)");
        assert_eq!(rt("a U (b U c)"), "0 U 1 U 2");
        assert_eq!(rt("(a U b) U c"), "(0 U 1) U 2");
    }

    #[test]
    fn reals() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(print_real(&r(5, 2)), "r2.5");
        assert_eq!(print_real(&r(3, 1)), "r3.0");
        assert_eq!(print_real(&r(1, 40)), "r0.025");
        assert_eq!(print_real(&r(-1, 4)), "-r0.25");
        assert_eq!(decimal_string(&r(1, 3)), None);
    }

    #[test]
    fn named_style_falls_back_to_aliases() {
        let names: Vec<String> = ["x", "a b", "t", "i1"].iter().map(|s| s.to_string()).collect();
        let e = Expr::conj((0..4).map(Expr::Var));
        assert_eq!(print_expr_named(&e, &names), "x & @a_b & @t & @i1");
    }

    #[test]
    fn acceptance_parens() {
        use AcceptanceCond::*;
        let c = And(
            Box::new(Fin(0)),
            Box::new(Or(Box::new(Inf(1)), Box::new(Inf(2)))),
        );
        assert_eq!(print_acceptance(&c), "Fin(0) & (Inf(1) | Inf(2))");
    }
}
