use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Pos, Result};
use crate::typesys::Type;

use super::value::{parse_value, Valuation};

/// An ultimately periodic word `stem · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoWord {
    pub stem: Vec<Valuation>,
    /// The repeated part; never empty.
    pub cycle: Vec<Valuation>,
}

impl LassoWord {
    pub fn new(stem: Vec<Valuation>, cycle: Vec<Valuation>) -> Self {
        assert!(!cycle.is_empty(), "a lasso needs a non-empty loop");
        LassoWord { stem, cycle }
    }

    /// Number of distinct positions (`stem + loop`).
    pub fn positions(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    /// The valuation at position `i` of the infinite word.
    pub fn at(&self, i: usize) -> &Valuation {
        if i < self.stem.len() {
            &self.stem[i]
        } else {
            &self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }

    /// Successor position within `0..positions()`, wrapping the loop.
    pub fn next_pos(&self, i: usize) -> usize {
        if i + 1 < self.positions() {
            i + 1
        } else {
            self.stem.len()
        }
    }

    /// Renders in word-file syntax.
    pub fn format_with(&self, names: &[String]) -> String {
        let mut s = String::new();
        for v in &self.stem {
            let _ = writeln!(s, "{}", v.format_with(names));
        }
        s.push_str("---loop\n");
        for v in &self.cycle {
            let _ = writeln!(s, "{}", v.format_with(names));
        }
        s
    }
}

/// Contents of a word file: a finite prefix, or a lasso when a `---loop`
/// line is present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Word {
    Prefix(Vec<Valuation>),
    Lasso(LassoWord),
}

/// Parses a word file against the variable names and types of an automaton.
///
/// Each non-comment line assigns every variable exactly once with
/// space-separated `name=value` pairs.
pub fn parse_word(text: &str, names: &[String], types: &[Type]) -> Result<Word> {
    let index: BTreeMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let mut stem = Vec::new();
    let mut cycle = Vec::new();
    let mut in_loop = false;
    for (ln, line) in text.lines().enumerate() {
        let pos = Pos::new(ln + 1, 1);
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "---loop" {
            if in_loop {
                return Err(Error::parse(pos, "second `---loop` line"));
            }
            in_loop = true;
            continue;
        }
        let mut vals = vec![None; names.len()];
        for pair in line.split_whitespace() {
            let (name, val) = pair
                .split_once('=')
                .ok_or_else(|| Error::parse(pos, format!("expected `name=value`, found `{pair}`")))?;
            let &i = index
                .get(name)
                .ok_or_else(|| Error::parse(pos, format!("unknown variable `{name}`")))?;
            if vals[i].is_some() {
                return Err(Error::parse(pos, format!("variable `{name}` assigned twice")));
            }
            vals[i] = Some(parse_value(val, types[i]).ok_or_else(|| {
                Error::parse(pos, format!("`{val}` is not a {} value", types[i]))
            })?);
        }
        let vals: Option<Vec<_>> = vals.into_iter().collect();
        let vals = vals.ok_or_else(|| {
            Error::parse(pos, "every variable needs a value on every line")
        })?;
        if in_loop {
            cycle.push(Valuation::new(vals));
        } else {
            stem.push(Valuation::new(vals));
        }
    }
    if !in_loop {
        return Ok(Word::Prefix(stem));
    }
    if cycle.is_empty() {
        return Err(Error::parse(Pos::new(text.lines().count().max(1), 1), "empty loop"));
    }
    Ok(Word::Lasso(LassoWord::new(stem, cycle)))
}
