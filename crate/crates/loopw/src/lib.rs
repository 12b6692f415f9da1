//! An interpreter and type checker for a small Ada-like imperative language
//! whose procedures are first-class values: procedures can be stored in
//! variables, passed as arguments and returned through `out` parameters.
//! Parameter passing is by substitution for `in` parameters and by explicit
//! per-step aliasing for `out` and `in out` parameters, so the operational
//! semantics needs no runtime renaming of store locations.
//!
//! The crate is organized as a pipeline: [`parser`] turns source text into
//! the [`syntax`] tree, [`typer`] checks it, and [`step`] implements the
//! small-step relation that [`driver`] iterates into whole runs and traces.
//! [`binding`] supplies the substitution machinery the stepper uses, and
//! [`batch`] runs many independent files, in parallel when the `parallel`
//! feature is enabled.

pub mod batch;
pub mod binding;
pub mod driver;
pub mod eval;
pub mod parser;
pub mod pretty;
pub mod step;
pub mod syntax;
pub mod typer;

pub use batch::map_batch;
pub use binding::{FreshSupply, Term};
pub use driver::{full_eval, report_top_level, run_program, RunOutcome, RunReport};
pub use eval::{eval_exp, fetch, EvalError};
pub use parser::{parse_exp, parse_program, ParseError, Program, SourceFile};
pub use step::{step_cmd, PopEvent, RuleName, RunCtx, StepOutcome};
pub use syntax::{Cmd, Config, Dcl, Env, Exp, Ident, Mode, Store, Type, Value};
pub use typer::{check_program, TypeError};
