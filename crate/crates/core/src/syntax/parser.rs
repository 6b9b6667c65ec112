use std::collections::{BTreeMap, BTreeSet};

use crate::automaton::AcceptanceCond;
use crate::error::{Error, Pos, Result};
use crate::typesys::Type;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::AliasEnv;

/// Parser configuration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Accept `lhs != expr` entries in obligation lists.
    pub neg_obligations: bool,
}

/// How `@name` and bare identifiers are resolved.
enum Names<'a> {
    /// Document mode: `@name` stays an unexpanded alias, bare names are errors.
    Document,
    /// Standalone mode: resolve through an alias environment and a variable
    /// name table.
    Resolve {
        names: &'a [String],
        env: &'a AliasEnv,
    },
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    i: usize,
    opts: ParseOptions,
    names: Names<'a>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, opts: ParseOptions, names: Names<'a>) -> Result<Self> {
        Ok(Parser {
            src,
            toks: tokenize(src)?,
            i: 0,
            opts,
            names,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.unexpected(&t.describe()))
        }
    }

    fn unexpected(&self, wanted: &str) -> Error {
        Error::parse(
            self.pos(),
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    fn nat(&mut self) -> Result<usize> {
        match *self.peek() {
            Tok::Nat(n) => {
                self.advance();
                Ok(n)
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn at_item_boundary(&self) -> bool {
        matches!(self.peek(), Tok::Header(_) | Tok::Body | Tok::Eof)
    }

    // ---- documents ----

    fn document(&mut self) -> Result<RawAutomaton> {
        let pos = self.pos();
        match self.peek() {
            Tok::Header(h) if h == "HOA" => {
                self.advance();
            }
            _ => return Err(Error::parse(pos, "document must start with `HOA:`")),
        }
        let version = match self.peek() {
            Tok::Ident(v) if v == "v1" => Version::V1,
            Tok::Ident(v) if v == "v1pp" => Version::V1pp,
            _ => return Err(self.unexpected("`v1` or `v1pp`")),
        };
        self.advance();

        let mut header = Vec::new();
        let mut seen: BTreeSet<String> = BTreeSet::from(["HOA".to_string()]);
        let mut aliases: BTreeSet<String> = BTreeSet::new();
        while let Tok::Header(name) = self.peek().clone() {
            let pos = self.pos();
            let colon_end = self.toks[self.i].end;
            self.advance();
            let once = matches!(
                name.as_str(),
                "HOA" | "States" | "AP" | "AP-type" | "Acceptance" | "controllable-AP"
            );
            if once && !seen.insert(name.clone()) {
                return Err(Error::parse(pos, format!("duplicate header item `{name}:`")));
            }
            let kind = match name.as_str() {
                "States" => ItemKind::States(self.nat()?),
                "Start" => ItemKind::Start(self.conj_states()?),
                "AP" => {
                    let n = self.nat()?;
                    let mut names = Vec::new();
                    while let Tok::Str(s) = self.peek().clone() {
                        self.advance();
                        names.push(s);
                    }
                    if names.len() != n {
                        return Err(Error::parse(
                            pos,
                            format!("AP declares {n} propositions but lists {}", names.len()),
                        ));
                    }
                    ItemKind::Ap(names)
                }
                "AP-type" => {
                    let mut types = Vec::new();
                    while !self.at_item_boundary() {
                        let p = self.pos();
                        match self.advance().tok {
                            Tok::Ident(t) => types.push(match t.as_str() {
                                "bool" => Type::Bool,
                                "int" => Type::Int,
                                "real" => Type::Real,
                                _ => return Err(Error::parse(p, format!("unknown type `{t}`"))),
                            }),
                            other => {
                                return Err(Error::parse(
                                    p,
                                    format!("expected a type name, found {}", other.describe()),
                                ))
                            }
                        }
                    }
                    ItemKind::ApType(types)
                }
                "Acceptance" => {
                    let n = self.nat()?;
                    let cond = self.acc_cond()?;
                    ItemKind::Acceptance(n, cond)
                }
                "Alias" => {
                    let name = match self.peek().clone() {
                        Tok::Alias(a) => a,
                        _ => return Err(self.unexpected("an alias name")),
                    };
                    self.advance();
                    if !aliases.insert(name.clone()) {
                        return Err(Error::parse(pos, format!("duplicate alias `@{name}`")));
                    }
                    ItemKind::Alias(name, self.expr()?)
                }
                "controllable-AP" => {
                    let mut v = Vec::new();
                    while let Tok::Nat(n) = *self.peek() {
                        self.advance();
                        v.push(n);
                    }
                    ItemKind::ControllableAp(v)
                }
                "assume" => ItemKind::Assume(self.expr()?),
                "guarantee" => ItemKind::Guarantee(self.expr()?),
                "State" => return Err(Error::parse(pos, "`State:` before `--BODY--`")),
                n if n.starts_with(|c: char| c.is_ascii_uppercase()) => {
                    return Err(Error::parse(pos, format!("unknown header item `{n}:`")));
                }
                _ => {
                    while !self.at_item_boundary() {
                        self.advance();
                    }
                    let end = self.toks[self.i].start;
                    ItemKind::Other(name.clone(), self.src[colon_end..end].trim().to_string())
                }
            };
            if !self.at_item_boundary() {
                return Err(self.unexpected("a header item or `--BODY--`"));
            }
            header.push(HeaderItem { pos, kind });
        }
        self.expect(&Tok::Body)?;

        let mut states = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Header(h) if h == "State" => {
                    let pos = self.pos();
                    self.advance();
                    if *self.peek() == Tok::LBrack {
                        return Err(Error::parse(self.pos(), "state labels are not supported"));
                    }
                    let index = self.nat()?;
                    if *self.peek() == Tok::Amp {
                        return Err(Error::parse(
                            self.pos(),
                            "a `State:` line names a single state; and-states belong in `Start:` and edge targets",
                        ));
                    }
                    let name = match self.peek().clone() {
                        Tok::Str(s) => {
                            self.advance();
                            Some(s)
                        }
                        _ => None,
                    };
                    let acc = self.acc_sig()?;
                    let mut edges = Vec::new();
                    while *self.peek() == Tok::LBrack {
                        edges.push(self.edge()?);
                    }
                    if !matches!(self.peek(), Tok::Header(_) | Tok::End) {
                        return Err(self.unexpected("an edge, `State:` or `--END--`"));
                    }
                    states.push(RawState {
                        pos,
                        index,
                        name,
                        acc,
                        edges,
                    });
                }
                Tok::End => {
                    self.advance();
                    break;
                }
                Tok::Abort => return Err(Error::parse(self.pos(), "automaton aborted by `--ABORT--`")),
                _ => return Err(self.unexpected("`State:` or `--END--`")),
            }
        }
        if *self.peek() != Tok::Eof {
            return Err(self.unexpected("end of input"));
        }
        let aut = RawAutomaton {
            version,
            header,
            states,
        };
        validate(&aut)?;
        Ok(aut)
    }

    fn conj_states(&mut self) -> Result<Vec<usize>> {
        let mut v = vec![self.nat()?];
        while self.eat(&Tok::Amp) {
            v.push(self.nat()?);
        }
        Ok(v)
    }

    fn acc_sig(&mut self) -> Result<Vec<usize>> {
        let mut v = Vec::new();
        if self.eat(&Tok::LBrace) {
            while let Tok::Nat(n) = *self.peek() {
                self.advance();
                v.push(n);
            }
            self.expect(&Tok::RBrace)?;
        }
        Ok(v)
    }

    fn edge(&mut self) -> Result<RawEdge> {
        let pos = self.pos();
        self.expect(&Tok::LBrack)?;
        let guard = self.expr()?;
        let mut obligation = Vec::new();
        if self.eat(&Tok::Dollar) {
            obligation.push(self.assignment()?);
            while self.eat(&Tok::Comma) {
                obligation.push(self.assignment()?);
            }
        }
        self.expect(&Tok::RBrack)?;
        let target = self.conj_states()?;
        let acc = self.acc_sig()?;
        Ok(RawEdge {
            pos,
            label: EdgeLabel { guard, obligation },
            target,
            acc,
        })
    }

    fn assignment(&mut self) -> Result<Assignment> {
        let pos = self.pos();
        let lhs = match self.advance().tok {
            Tok::Nat(n) => VarRef::Index(n),
            Tok::Alias(a) => match &self.names {
                Names::Document => VarRef::Alias(a),
                Names::Resolve { .. } => match self.resolve_alias(&a, pos)? {
                    Expr::Var(i) => VarRef::Index(i),
                    _ => {
                        return Err(Error::parse(pos, format!("`@{a}` does not name a variable")))
                    }
                },
            },
            Tok::Ident(name) if matches!(self.names, Names::Resolve { .. }) => {
                VarRef::Index(self.resolve_bare(&name, pos)?)
            }
            other => {
                return Err(Error::parse(
                    pos,
                    format!("expected an assignment target, found {}", other.describe()),
                ))
            }
        };
        let negated = match self.peek() {
            Tok::Assign => false,
            Tok::Ne => {
                if !self.opts.neg_obligations {
                    return Err(Error::parse(
                        self.pos(),
                        "negative obligation `!=` requires the negative-obligation extension (--ext-neg-obligations)",
                    ));
                }
                true
            }
            _ => return Err(self.unexpected("`:=`")),
        };
        self.advance();
        let rhs = self.expr()?;
        Ok(Assignment { lhs, rhs, negated })
    }

    fn acc_cond(&mut self) -> Result<AcceptanceCond> {
        let mut l = self.acc_conj()?;
        while self.eat(&Tok::Bar) {
            let r = self.acc_conj()?;
            l = AcceptanceCond::Or(Box::new(l), Box::new(r));
        }
        Ok(l)
    }

    fn acc_conj(&mut self) -> Result<AcceptanceCond> {
        let mut l = self.acc_atom()?;
        while self.eat(&Tok::Amp) {
            let r = self.acc_atom()?;
            l = AcceptanceCond::And(Box::new(l), Box::new(r));
        }
        Ok(l)
    }

    fn acc_atom(&mut self) -> Result<AcceptanceCond> {
        let pos = self.pos();
        match self.advance().tok {
            Tok::LParen => {
                let c = self.acc_cond()?;
                self.expect(&Tok::RParen)?;
                Ok(c)
            }
            Tok::Ident(w) if w == "t" => Ok(AcceptanceCond::True),
            Tok::Ident(w) if w == "f" => Ok(AcceptanceCond::False),
            Tok::Ident(w) if w == "Fin" || w == "Inf" => {
                self.expect(&Tok::LParen)?;
                if *self.peek() == Tok::Bang {
                    return Err(Error::parse(self.pos(), "complemented acceptance sets are not supported"));
                }
                let k = self.nat()?;
                self.expect(&Tok::RParen)?;
                Ok(if w == "Fin" {
                    AcceptanceCond::Fin(k)
                } else {
                    AcceptanceCond::Inf(k)
                })
            }
            other => Err(Error::parse(
                pos,
                format!("expected an acceptance condition, found {}", other.describe()),
            )),
        }
    }

    // ---- expressions ----

    pub fn expr(&mut self) -> Result<Expr> {
        self.binary(0)
    }

    fn peek_binop(&self) -> Option<(Option<BinOp>, u8)> {
        let op = match self.peek() {
            Tok::Implies | Tok::Iff => return Some((None, 0)),
            Tok::Bar => BinOp::Or,
            Tok::Amp => BinOp::And,
            Tok::Ident(u) if u == "U" => BinOp::Until,
            Tok::EqEq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Star => BinOp::Mul,
            _ => return None,
        };
        Some((Some(op), op.precedence()))
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some((op, prec)) = self.peek_binop() {
            if prec < min_prec {
                break;
            }
            let tok = self.advance().tok;
            match op {
                Some(op) => {
                    let next = if op.right_assoc() { prec } else { prec + 1 };
                    let rhs = self.binary(next)?;
                    lhs = Expr::binary(op, lhs, rhs);
                }
                None if tok == Tok::Implies => {
                    // a -> b  ==  !a | b, right associative
                    let rhs = self.binary(prec)?;
                    lhs = Expr::binary(BinOp::Or, Expr::negation(lhs), rhs);
                }
                None => {
                    // a <-> b  ==  (a & b) | (!a & !b)
                    let rhs = self.binary(prec + 1)?;
                    lhs = Expr::binary(
                        BinOp::Or,
                        Expr::binary(BinOp::And, lhs.clone(), rhs.clone()),
                        Expr::binary(BinOp::And, Expr::negation(lhs), Expr::negation(rhs)),
                    );
                }
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        let op = match self.peek() {
            Tok::Bang => Some(UnOp::Not),
            Tok::Minus => Some(UnOp::Neg),
            Tok::Ident(m) if m == "X" => Some(UnOp::Next),
            Tok::Ident(m) if m == "F" => Some(UnOp::Finally),
            Tok::Ident(m) if m == "G" => Some(UnOp::Globally),
            _ => None,
        };
        match op {
            Some(op) => {
                self.advance();
                Ok(Expr::unary(op, self.unary()?))
            }
            None => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.advance().tok {
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(w) if w == "t" => Ok(Expr::Bool(true)),
            Tok::Ident(w) if w == "f" => Ok(Expr::Bool(false)),
            Tok::IntLit(n) => Ok(Expr::Int(n)),
            Tok::RealLit(r) => Ok(Expr::Real(r)),
            Tok::Nat(n) => Ok(Expr::Var(n)),
            Tok::Alias(a) => match self.names {
                Names::Document => Ok(Expr::Alias(a)),
                Names::Resolve { .. } => self.resolve_alias(&a, pos),
            },
            Tok::Ident(name) if matches!(self.names, Names::Resolve { .. }) => {
                Ok(Expr::Var(self.resolve_bare(&name, pos)?))
            }
            other => Err(Error::parse(
                pos,
                format!("expected an expression, found {}", other.describe()),
            )),
        }
    }

    fn resolve_alias(&self, name: &str, pos: Pos) -> Result<Expr> {
        let Names::Resolve { names, env } = &self.names else {
            unreachable!("document mode keeps aliases");
        };
        if let Some(e) = env.get(name) {
            return super::alias::expand_in(e, env).map_err(|e| Error::parse(pos, e.to_string()));
        }
        match names.iter().position(|n| n == name) {
            Some(i) => Ok(Expr::Var(i)),
            None => Err(Error::parse(pos, format!("unknown name `@{name}`"))),
        }
    }

    fn resolve_bare(&self, name: &str, pos: Pos) -> Result<usize> {
        let Names::Resolve { names, .. } = &self.names else {
            unreachable!("document mode rejects bare names");
        };
        names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::parse(pos, format!("unknown name `{name}`")))
    }

    fn finish(&mut self) -> Result<()> {
        if *self.peek() != Tok::Eof {
            return Err(self.unexpected("end of input"));
        }
        Ok(())
    }
}

/// Structural checks that need the whole document: counts, index ranges.
fn validate(a: &RawAutomaton) -> Result<()> {
    let nap = a.ap_names().len();
    let mut nsets = 0;
    let mut declared_states = None;
    for h in &a.header {
        let check_expr = |e: &Expr| -> Result<()> {
            match e.vars().into_iter().find(|&v| v >= nap) {
                Some(v) => Err(Error::parse(
                    h.pos,
                    format!("variable {v} out of range ({nap} declared)"),
                )),
                None => Ok(()),
            }
        };
        match &h.kind {
            ItemKind::Acceptance(n, _) => nsets = *n,
            ItemKind::States(n) => declared_states = Some(*n),
            ItemKind::Alias(_, e) | ItemKind::Assume(e) | ItemKind::Guarantee(e) => check_expr(e)?,
            _ => {}
        }
    }
    let mut indices = BTreeMap::new();
    for s in &a.states {
        if indices.insert(s.index, s.pos).is_some() {
            return Err(Error::parse(s.pos, format!("state {} described twice", s.index)));
        }
    }
    if let Some(n) = declared_states {
        if n != indices.len() || indices.keys().any(|&i| i >= n) {
            return Err(Error::parse(
                a.header.iter().find(|h| matches!(h.kind, ItemKind::States(_))).map(|h| h.pos).unwrap_or_default(),
                format!("`States: {n}` does not match the {} states described", indices.len()),
            ));
        }
    }
    for h in &a.header {
        if let ItemKind::Start(z) = &h.kind {
            if let Some(q) = z.iter().find(|q| !indices.contains_key(q)) {
                return Err(Error::parse(h.pos, format!("start state {q} is not declared")));
            }
        }
    }
    for s in &a.states {
        if let Some(k) = s.acc.iter().find(|&&k| k >= nsets) {
            return Err(Error::parse(s.pos, format!("acceptance set {k} out of range ({nsets} declared)")));
        }
        for e in &s.edges {
            if let Some(q) = e.target.iter().find(|q| !indices.contains_key(q)) {
                return Err(Error::parse(e.pos, format!("target state {q} is not declared")));
            }
            if let Some(k) = e.acc.iter().find(|&&k| k >= nsets) {
                return Err(Error::parse(e.pos, format!("acceptance set {k} out of range ({nsets} declared)")));
            }
            let mut exprs = vec![&e.label.guard];
            for asg in &e.label.obligation {
                exprs.push(&asg.rhs);
                if let VarRef::Index(v) = asg.lhs {
                    if v >= nap {
                        return Err(Error::parse(e.pos, format!("variable {v} out of range ({nap} declared)")));
                    }
                }
            }
            for x in exprs {
                if let Some(v) = x.vars().into_iter().find(|&v| v >= nap) {
                    return Err(Error::parse(e.pos, format!("variable {v} out of range ({nap} declared)")));
                }
            }
        }
    }
    Ok(())
}

/// Parses a HOApp (or plain HOA v1) document. Aliases are left unexpanded.
pub fn parse_hoapp(text: &str, opts: &ParseOptions) -> Result<RawAutomaton> {
    Parser::new(text, *opts, Names::Document)?.document()
}

/// Parses a standalone label expression. `@name` resolves through `env`
/// first and then through the variable names; bare identifiers resolve
/// through the variable names.
pub fn parse_expr(text: &str, names: &[String], env: &AliasEnv) -> Result<Expr> {
    let mut p = Parser::new(text, ParseOptions::default(), Names::Resolve { names, env })?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses a standalone assignment `lhs := expr` (or `lhs != expr` when
/// negative obligations are enabled).
pub fn parse_assignment(
    text: &str,
    names: &[String],
    env: &AliasEnv,
    opts: &ParseOptions,
) -> Result<Assignment> {
    let mut p = Parser::new(text, *opts, Names::Resolve { names, env })?;
    let a = p.assignment()?;
    p.finish()?;
    Ok(a)
}

/// Parses an acceptance condition on its own (`Fin(0) & Inf(1)`).
pub fn parse_acceptance(text: &str) -> Result<AcceptanceCond> {
    let mut p = Parser::new(text, ParseOptions::default(), Names::Document)?;
    let c = p.acc_cond()?;
    p.finish()?;
    Ok(c)
}
