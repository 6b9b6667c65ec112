//! Obligation automata toolkit.
//!
//! Obligation automata are symbolic omega-automata whose edges may carry
//! *obligations*: assignment-like maps `x := t` evaluated on the current
//! symbol that constrain the next symbol read. This crate parses and prints
//! the HOApp dialect of the Hanoi Omega-Automata format, type-checks
//! automata, evaluates runs over finite prefixes and lasso words, implements
//! product / sum / obligation erasure, translates LTL with theory atoms to
//! generalized Büchi automata, lowers to and lifts from plain HOA v1, and
//! searches for non-emptiness witnesses.
//!
//! The usual pipeline is
//!
//! ```
//! use hoapp::{syntax, typesys, semantics::{Valuation, Value}};
//!
//! let text = "HOA: v1pp\nStates: 1\nStart: 0\nAP: 1 \"x\"\nAP-type: int\n\
//!             Acceptance: 1 Inf(0)\n--BODY--\nState: 0\n[t $ 0 := 0 + i1] 0 {0}\n--END--\n";
//! let raw = syntax::parse_hoapp(text, &Default::default()).unwrap();
//! let aut = typesys::check_automaton(&syntax::expand_aliases(&raw).unwrap()).unwrap();
//! let prefix: Vec<Valuation> = (5..9).map(|x| Valuation::new(vec![Value::int(x)])).collect();
//! assert!(hoapp::semantics::check_prefix(&aut, &prefix).unwrap());
//! ```

pub mod automaton;
pub mod dot;
pub mod emptiness;
pub mod error;
pub mod interchange;
pub mod linsolve;
pub mod ltl;
pub mod semantics;
pub mod syntax;
pub mod typesys;

pub use automaton::{
    AcceptanceCond, AndState, Automaton, Edge, Obligation, Variable,
};
pub use error::{Error, Result};
pub use syntax::{Expr, ParseOptions, RawAutomaton};
pub use typesys::Type;
