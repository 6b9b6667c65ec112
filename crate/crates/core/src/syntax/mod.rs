//! Lexing, parsing, alias expansion and printing of HOApp documents.

use std::collections::BTreeMap;

mod alias;
pub mod ast;
mod lexer;
mod parser;
mod printer;

pub use alias::{alias_names, auto_alias, expand_aliases, expand_in, sanitize};
pub use ast::*;
pub use lexer::decimal_to_rational;
pub use parser::{parse_acceptance, parse_assignment, parse_expr, parse_hoapp, ParseOptions};
pub use printer::{
    decimal_string, is_bare_name, print_acceptance, print_assignment_styled, print_expr,
    print_expr_named, print_expr_styled, print_hoapp, print_int, print_real, quote, VarStyle,
};

/// Alias definitions by name (without the `@`).
pub type AliasEnv = BTreeMap<String, Expr>;
