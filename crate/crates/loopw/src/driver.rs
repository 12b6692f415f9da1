//! Iterated evaluation: bounded multi-step running, trace construction, and
//! reporting of a finished run.
//!
//! A program's observable result is defined through pop events: when the
//! top-level declarations finish, their bindings are discarded at scope
//! depth zero, and [`report_top_level`] lists those final values in
//! declaration order.

use crate::step::{step_cmd, PopEvent, RuleName, RunCtx, StepOutcome};
use crate::syntax::{Cmd, Config, Ident, Store, Trace, Value};
use crate::EvalError;

/// Default step budget for a run; large enough for every bundled program
/// while keeping non-terminating loops bounded.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Why a run ended.
#[derive(Clone, Debug, PartialEq)]
pub enum RunOutcome {
    /// The command reduced to `null`.
    Converged,
    /// The step budget ran out before the command reached `null`.
    StepBudgetExhausted,
    /// No rule applied. `context` names the attempted rule chain.
    Stuck { context: String, cause: Option<EvalError> },
}

/// Everything observable about one run.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub outcome: RunOutcome,
    pub steps_taken: u64,
    /// Command component of the last configuration: `null` when converged,
    /// otherwise wherever the run stopped.
    pub final_cmd: Cmd,
    pub final_store: Store,
    /// Bindings discarded on scope exit, in the order they popped.
    pub popped: Vec<PopEvent>,
    /// Every rule justification in firing order; one step contributes its
    /// whole chain, outermost rule first.
    pub rules_fired: Vec<RuleName>,
}

/// One entry of a trace: the configuration reached and the rule chain of
/// the step that reached it.
#[derive(Clone, Debug)]
pub struct TraceStep {
    pub config: Config,
    pub rules: Vec<RuleName>,
}

/// At most `k` steps. Zero steps returns the configuration unchanged, a
/// terminal `null` absorbs any remaining count, and a stuck configuration
/// is returned as is with the steps so far consumed.
pub fn many_steps(cfg: Config, k: u64) -> Config {
    let mut ctx = RunCtx::for_config(&cfg);
    let mut current = cfg;
    for _ in 0..k {
        if current.is_terminal() {
            return current;
        }
        match step_cmd(current, 0, &mut ctx) {
            StepOutcome::Stepped { next, .. } => current = next,
            StepOutcome::Terminal(c) => return c,
            StepOutcome::Stuck { cfg, .. } => return cfg,
        }
    }
    current
}

/// The successor configurations of up to `k` steps, paired with the rule
/// chains that produced them. Empty when `k` is zero or the command is
/// already `null`; a stuck configuration ends the trace early.
pub fn trace_with_rules(cfg: Config, k: u64) -> Vec<TraceStep> {
    let mut ctx = RunCtx::for_config(&cfg);
    let mut current = cfg;
    let mut out = Vec::new();
    for _ in 0..k {
        if current.is_terminal() {
            break;
        }
        match step_cmd(current, 0, &mut ctx) {
            StepOutcome::Stepped { next, rules } => {
                out.push(TraceStep { config: next.clone(), rules });
                current = next;
            }
            _ => break,
        }
    }
    out
}

/// The successor configurations of up to `k` steps.
pub fn trace(cfg: Config, k: u64) -> Trace {
    trace_with_rules(cfg, k).into_iter().map(|s| s.config).collect()
}

/// Step until `null`, a stuck state, or `budget` steps, whichever first.
pub fn full_eval(cfg: Config, budget: u64) -> RunReport {
    let mut ctx = RunCtx::for_config(&cfg);
    let mut current = cfg;
    let mut steps_taken = 0u64;
    let mut rules_fired = Vec::new();
    loop {
        if current.is_terminal() {
            return RunReport {
                outcome: RunOutcome::Converged,
                steps_taken,
                final_cmd: current.cmd,
                final_store: current.store,
                popped: ctx.pops,
                rules_fired,
            };
        }
        if steps_taken == budget {
            return RunReport {
                outcome: RunOutcome::StepBudgetExhausted,
                steps_taken,
                final_cmd: current.cmd,
                final_store: current.store,
                popped: ctx.pops,
                rules_fired,
            };
        }
        match step_cmd(current, 0, &mut ctx) {
            StepOutcome::Stepped { next, rules } => {
                rules_fired.extend(rules);
                steps_taken += 1;
                current = next;
            }
            StepOutcome::Terminal(_) => {
                unreachable!("terminal configurations are caught before stepping")
            }
            StepOutcome::Stuck { cfg, context, cause } => {
                return RunReport {
                    outcome: RunOutcome::Stuck { context, cause },
                    steps_taken,
                    final_cmd: cfg.cmd,
                    final_store: cfg.store,
                    popped: ctx.pops,
                    rules_fired,
                }
            }
        }
    }
}

/// Run a parsed program under an empty store.
pub fn run_program(program: &crate::parser::Program, budget: u64) -> RunReport {
    full_eval(Config::for_program(program.dcl.clone()), budget)
}

/// The program's top-level bindings with their final values, in
/// declaration order. Bindings whose value never became known (an
/// initializer discarded before it was evaluated) are omitted.
pub fn report_top_level(report: &RunReport) -> Vec<(Ident, Value)> {
    let mut out: Vec<(Ident, Value)> = report
        .popped
        .iter()
        .filter(|p| p.depth == 0)
        .filter_map(|p| p.value.clone().map(|v| (p.name.clone(), v)))
        .collect();
    // scopes exit innermost first, so reversing restores declaration order
    out.reverse();
    out
}
