use std::fmt;

use thiserror::Error;

/// A 1-based line/column position in a source text.
///
/// Positions never take part in structural equality: two trees parsed from
/// differently formatted texts compare equal when their content does.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    pub fn new(line: usize, col: usize) -> Self {
        Pos { line, col }
    }
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl Eq for Pos {}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A single typing diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeError {
    pub pos: Pos,
    /// Printed form of the offending subterm.
    pub term: String,
    pub message: String,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} (in `{}`)", self.pos, self.message, self.term)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{pos}: {message}")]
    Parse { pos: Pos, message: String },
    #[error("alias error: {0}")]
    Alias(String),
    #[error("{}", join_type_errors(.0))]
    Type(Vec<TypeError>),
    #[error("{0}")]
    Semantic(String),
    #[error("lift error: {0}")]
    Lift(String),
}

fn join_type_errors(errs: &[TypeError]) -> String {
    errs.iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

impl Error {
    pub fn parse(pos: Pos, message: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            message: message.into(),
        }
    }

    pub fn semantic(message: impl Into<String>) -> Self {
        Error::Semantic(message.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
