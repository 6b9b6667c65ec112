use std::fmt::Write as _;
use std::path::Path;

use hoapp::automaton::{automaton_product, automaton_sum};
use hoapp::emptiness::{emit_vmt, lasso_search, LassoConfig, SearchResult};
use hoapp::interchange::{lift, lower};
use hoapp::linsolve::Limits;
use hoapp::ltl::{apply_assume_guarantee, parse_ltl, parse_type_mapping, translate};
use hoapp::semantics::{check_lasso, check_prefix, check_prefix_alternating, parse_word, Word};
use hoapp::syntax::{parse_hoapp, print_hoapp, ParseOptions, RawAutomaton};
use hoapp::typesys::check_automaton;
use hoapp::Automaton;

use crate::{Cli, Command, Engine, Failure, Outcome};

type CmdResult = Result<Outcome, Failure>;

fn ok(text: String) -> CmdResult {
    Ok(Outcome { text, code: 0 })
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new(4, format!("{}: {e}", path.display())))
}

struct Ctx {
    opts: ParseOptions,
}

impl Ctx {
    fn raw(&self, path: &Path) -> Result<RawAutomaton, Failure> {
        parse_hoapp(&read(path)?, &self.opts).map_err(|e| Failure::from_error(path, e))
    }

    fn load(&self, path: &Path) -> Result<Automaton, Failure> {
        check_automaton(&self.raw(path)?).map_err(|e| Failure::from_error(path, e))
    }

    /// The automaton with its assume/guarantee formulas composed in.
    fn load_composed(&self, path: &Path) -> Result<Automaton, Failure> {
        let a = self.load(path)?;
        apply_assume_guarantee(&a).map_err(|e| Failure::from_error(path, e))
    }
}

pub fn run(cli: &Cli) -> CmdResult {
    let ctx = Ctx {
        opts: ParseOptions {
            neg_obligations: cli.ext_neg_obligations,
        },
    };
    match &cli.command {
        Command::Validate { file } => {
            let a = ctx.load(file)?;
            ok(format!("{}: {}\n", file.display(), a.summary()))
        }
        Command::Lower { file } => ok(print_hoapp(&lower(&ctx.load(file)?))),
        Command::Lift { file, check_roundtrip } => {
            let a = lift(&ctx.raw(file)?).map_err(|e| Failure::from_error(file, e))?;
            if *check_roundtrip {
                let text = print_hoapp(&lower(&a));
                let again = parse_hoapp(&text, &ParseOptions::default())
                    .and_then(|r| lift(&r))
                    .map_err(|e| Failure::new(4, format!("{}: round trip failed: {e}", file.display())))?;
                if again != a {
                    return Err(Failure::new(
                        4,
                        format!("{}: round trip changed the automaton", file.display()),
                    ));
                }
            }
            ok(a.to_string())
        }
        Command::Product { left, right, apply_ltl } | Command::Sum { left, right, apply_ltl } => {
            let load = |p: &Path| if *apply_ltl { ctx.load_composed(p) } else { ctx.load(p) };
            let (a, b) = (load(left)?, load(right)?);
            let combined = if matches!(cli.command, Command::Product { .. }) {
                automaton_product(&a, &b)
            } else {
                automaton_sum(&a, &b)
            };
            let c = combined.map_err(|e| Failure::new(4, format!("error: {e}")))?;
            ok(c.to_string())
        }
        Command::Ltl { formula, types } => {
            let m = parse_type_mapping(&read(types)?).map_err(|e| Failure::from_error(types, e))?;
            let f = parse_ltl(formula, &m).map_err(|e| Failure::from_error(Path::new("<formula>"), e))?;
            ok(translate(&f, m.vars.clone()).to_string())
        }
        Command::Run { file, word } => {
            let a = ctx.load_composed(file)?;
            let w = parse_word(&read(word)?, &a.names(), &a.types())
                .map_err(|e| Failure::from_error(word, e))?;
            let accepted = match &w {
                Word::Prefix(p) if a.is_existential() => check_prefix(&a, p),
                Word::Prefix(p) => check_prefix_alternating(&a, p),
                Word::Lasso(l) => check_lasso(&a, l),
            }
            .map_err(|e| Failure::from_error(file, e))?;
            let kind = if matches!(w, Word::Prefix(_)) { "prefix" } else { "word" };
            Ok(Outcome {
                text: format!("{kind} {}\n", if accepted { "accepted" } else { "rejected" }),
                code: if accepted { 0 } else { 1 },
            })
        }
        Command::Empty {
            file,
            engine,
            stem,
            loop_len,
            split_bits,
            bb_depth,
        } => {
            let a = ctx.load_composed(file)?;
            match engine {
                Engine::Vmt => ok(emit_vmt(&a).map_err(|e| Failure::from_error(file, e))?),
                Engine::Lasso => {
                    let cfg = LassoConfig {
                        stem: *stem,
                        loop_len: *loop_len,
                        limits: Limits {
                            split_bits: *split_bits,
                            bb_depth: *bb_depth,
                            ..Limits::default()
                        },
                        ..LassoConfig::default()
                    };
                    match lasso_search(&a, &cfg).map_err(|e| Failure::from_error(file, e))? {
                        SearchResult::Witness(w) => {
                            let mut text = String::new();
                            writeln!(
                                text,
                                "# non-empty: accepted lasso with stem {} and loop {}",
                                w.stem.len(),
                                w.cycle.len()
                            )
                            .unwrap();
                            let edges = |ids: &[(usize, usize)]| {
                                ids.iter().map(|(q, i)| format!("{q}.{i}")).collect::<Vec<_>>().join(" ")
                            };
                            writeln!(text, "# run: [{}] then ({})", edges(&w.stem), edges(&w.cycle)).unwrap();
                            text.push_str(&w.word.format_with(&a.names()));
                            ok(text)
                        }
                        SearchResult::Unknown(why) => Ok(Outcome {
                            text: format!("unknown: {why}\n"),
                            code: 1,
                        }),
                    }
                }
            }
        }
        Command::Dot { file } => ok(hoapp::dot::to_dot(&ctx.load(file)?)),
    }
}
