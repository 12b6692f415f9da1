//! One-step evaluation of commands and declarations.
//!
//! Each call to [`step_cmd`] performs exactly one step of the outermost
//! relation and reports the chain of rules that justified it, outermost
//! first — `[EDecl2, EInitVar2, EBlock2, EAssign]` says an assignment fired
//! under a block under a variable declaration under `declare`.
//!
//! Declarations double as the runtime stack: stepping the continuation of
//! `x : t := e; d` pushes `x` onto the store, takes the inner step, pops the
//! (possibly updated) binding back off, and rewrites the declaration so the
//! current value is carried syntactically. Non-`in` aliases repeat the same
//! push/step/pop dance every step, copying the aliased variable in on entry
//! and out on exit, which is what stands in for aliasing under substitution.
//!
//! Scope exit discards bindings, so the stepper reports each discarded
//! binding as a [`PopEvent`]; the driver uses the depth-zero events to show
//! a program's top-level results.

use crate::binding::{FreshSupply, Term};
use crate::eval::{eval_exp, fetch, EvalError};
use crate::syntax::*;
use std::fmt;

/// The rules of the small-step relation, plus the two store-update rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleName {
    ENull,
    ESeq,
    EAssign,
    EIfThenElse1,
    EIfThenElse2,
    EWhile1,
    EWhile2,
    EDecl1,
    EDecl2,
    EFor1,
    EFor2,
    EProcCall,
    EBlock1,
    EBlock2,
    EInitVar1,
    EInitVar2,
    EConst1,
    EConst2,
    EProc,
    EAlias1,
    EAlias2,
    EAlias3,
    EAliases1,
    EAliases2,
    EAliases3,
    Update1,
    Update2,
}

impl RuleName {
    pub const ALL: [RuleName; 27] = [
        RuleName::ENull,
        RuleName::ESeq,
        RuleName::EAssign,
        RuleName::EIfThenElse1,
        RuleName::EIfThenElse2,
        RuleName::EWhile1,
        RuleName::EWhile2,
        RuleName::EDecl1,
        RuleName::EDecl2,
        RuleName::EFor1,
        RuleName::EFor2,
        RuleName::EProcCall,
        RuleName::EBlock1,
        RuleName::EBlock2,
        RuleName::EInitVar1,
        RuleName::EInitVar2,
        RuleName::EConst1,
        RuleName::EConst2,
        RuleName::EProc,
        RuleName::EAlias1,
        RuleName::EAlias2,
        RuleName::EAlias3,
        RuleName::EAliases1,
        RuleName::EAliases2,
        RuleName::EAliases3,
        RuleName::Update1,
        RuleName::Update2,
    ];

    pub fn label(self) -> &'static str {
        match self {
            RuleName::ENull => "E_Null",
            RuleName::ESeq => "E_Seq",
            RuleName::EAssign => "E_Assign",
            RuleName::EIfThenElse1 => "E_IfThenElse1",
            RuleName::EIfThenElse2 => "E_IfThenElse2",
            RuleName::EWhile1 => "E_While1",
            RuleName::EWhile2 => "E_While2",
            RuleName::EDecl1 => "E_Decl1",
            RuleName::EDecl2 => "E_Decl2",
            RuleName::EFor1 => "E_For1",
            RuleName::EFor2 => "E_For2",
            RuleName::EProcCall => "E_ProcCall",
            RuleName::EBlock1 => "E_Block1",
            RuleName::EBlock2 => "E_Block2",
            RuleName::EInitVar1 => "E_InitVar1",
            RuleName::EInitVar2 => "E_InitVar2",
            RuleName::EConst1 => "E_Const1",
            RuleName::EConst2 => "E_Const2",
            RuleName::EProc => "E_Proc",
            RuleName::EAlias1 => "E_Alias1",
            RuleName::EAlias2 => "E_Alias2",
            RuleName::EAlias3 => "E_Alias3",
            RuleName::EAliases1 => "E_Aliases1",
            RuleName::EAliases2 => "E_Aliases2",
            RuleName::EAliases3 => "E_Aliases3",
            RuleName::Update1 => "Update1",
            RuleName::Update2 => "Update2",
        }
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Render a rule chain as a nested path, e.g. `E_Decl2(E_InitVar2(E_Block1))`.
pub fn rule_path(rules: &[RuleName]) -> String {
    let mut out = String::new();
    for (i, r) in rules.iter().enumerate() {
        if i > 0 {
            out.push('(');
        }
        out.push_str(r.label());
    }
    for _ in 1..rules.len().max(1) {
        out.push(')');
    }
    out
}

/// A binding discarded on scope exit, reported for observability.
///
/// `value` is the value carried by the discarded form when it has one: the
/// numeral or literal of an initialized variable or constant, or the current
/// store value behind an alias. `depth` counts enclosing `declare`s, so
/// top-level program variables pop at depth zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PopEvent {
    pub name: Ident,
    pub value: Option<Value>,
    pub depth: u32,
}

/// Run-local state threaded through a whole evaluation: the fresh-name
/// supply shared by every substitution, and the log of popped bindings.
#[derive(Debug, Default)]
pub struct RunCtx {
    pub supply: FreshSupply,
    pub pops: Vec<PopEvent>,
}

impl RunCtx {
    pub fn new() -> RunCtx {
        RunCtx::default()
    }

    /// A context whose fresh names avoid every identifier reachable from
    /// the configuration. Parsed programs cannot contain `__` names, so
    /// this matters only for configurations built programmatically.
    pub fn for_config(cfg: &Config) -> RunCtx {
        let mut pool = cfg.cmd.all_idents();
        for (x, slot) in cfg.store.iter() {
            pool.insert(x.clone());
            if let Slot::Value(v) = slot {
                pool.extend(Exp::Val(v.clone()).all_idents());
            }
        }
        RunCtx { supply: FreshSupply::avoiding(pool), pops: Vec::new() }
    }
}

/// Result of attempting one step of a command configuration.
#[derive(Debug)]
pub enum StepOutcome {
    /// One step happened; `rules` is the justification, outermost first.
    Stepped { next: Config, rules: Vec<RuleName> },
    /// `null` — evaluation is complete.
    Terminal(Config),
    /// No rule applies. The configuration is returned unchanged; `context`
    /// names the rules whose premises failed, and `cause` carries the
    /// evaluation error when one was the obstacle.
    Stuck { cfg: Config, context: String, cause: Option<EvalError> },
}

/// Result of attempting one step of a declaration configuration.
#[derive(Debug)]
pub enum DclOutcome {
    Stepped { dcl: Dcl, store: Store, rules: Vec<RuleName> },
    /// `begin end` — the declaration is fully evaluated.
    Terminal { dcl: Dcl, store: Store },
    Stuck { dcl: Dcl, store: Store, context: String, cause: Option<EvalError> },
}

/// Replace the value of the rightmost binding of `x`, leaving every other
/// binding and the binding order untouched. `None` when `x` is unbound.
pub fn store_update(store: &Store, x: &Ident, v: Value) -> Option<Store> {
    let mut next = store.clone();
    if next.set(x, v) {
        Some(next)
    } else {
        None
    }
}

/// Zip parameters with arguments into an alias-binding list, positionally.
/// `None` when the lengths disagree.
pub fn compat_zip(params: &[Param], args: &[Exp]) -> Option<Vec<AliasBinding>> {
    if params.len() != args.len() {
        return None;
    }
    Some(
        params
            .iter()
            .zip(args)
            .map(|(p, a)| AliasBinding {
                name: p.name.clone(),
                mode: p.mode,
                ty: p.ty.clone(),
                rhs: a.clone(),
            })
            .collect(),
    )
}

fn chain(outer: &str, inner: &str) -> String {
    format!("{outer} / {inner}")
}

/// One step of a command configuration. `scope` is the number of enclosing
/// `declare`s, used to tag pop events.
pub fn step_cmd(cfg: Config, scope: u32, ctx: &mut RunCtx) -> StepOutcome {
    let Config { cmd, store } = cfg;
    match cmd {
        Cmd::Null => StepOutcome::Terminal(Config::new(Cmd::Null, store)),

        Cmd::Seq(c1, c2) => {
            if matches!(*c1, Cmd::Null) {
                return StepOutcome::Stepped {
                    next: Config::new(*c2, store),
                    rules: vec![RuleName::ENull],
                };
            }
            match step_cmd(Config::new(*c1, store), scope, ctx) {
                StepOutcome::Stepped { next, mut rules } => {
                    rules.insert(0, RuleName::ESeq);
                    StepOutcome::Stepped {
                        next: Config::new(Cmd::Seq(Box::new(next.cmd), c2), next.store),
                        rules,
                    }
                }
                StepOutcome::Terminal(_) => {
                    unreachable!("a command other than null cannot be terminal")
                }
                StepOutcome::Stuck { cfg, context, cause } => StepOutcome::Stuck {
                    cfg: Config::new(Cmd::Seq(Box::new(cfg.cmd), c2), cfg.store),
                    context: chain("E_Seq", &context),
                    cause,
                },
            }
        }

        Cmd::Assign(x, e) => match eval_exp(&store, &e) {
            Err(err) => StepOutcome::Stuck {
                cfg: Config::new(Cmd::Assign(x, e), store),
                context: "E_Assign: the right-hand side does not evaluate".to_string(),
                cause: Some(err),
            },
            Ok(v) => match store_update(&store, &x, v) {
                Some(next) => StepOutcome::Stepped {
                    next: Config::new(Cmd::Null, next),
                    rules: vec![RuleName::EAssign],
                },
                None => {
                    let context = format!("E_Assign: no binding for '{x}' to update");
                    StepOutcome::Stuck {
                        cfg: Config::new(Cmd::Assign(x, e), store),
                        context,
                        cause: None,
                    }
                }
            },
        },

        Cmd::If(e, c1, c2) => match eval_exp(&store, &e) {
            Ok(Value::Bool(true)) => StepOutcome::Stepped {
                next: Config::new(*c1, store),
                rules: vec![RuleName::EIfThenElse1],
            },
            Ok(Value::Bool(false)) => StepOutcome::Stepped {
                next: Config::new(*c2, store),
                rules: vec![RuleName::EIfThenElse2],
            },
            Ok(v) => {
                let context = format!(
                    "E_IfThenElse1/E_IfThenElse2: the condition evaluated to the {} value {v}, not a boolean",
                    v.kind()
                );
                StepOutcome::Stuck {
                    cfg: Config::new(Cmd::If(e, c1, c2), store),
                    context,
                    cause: None,
                }
            }
            Err(err) => StepOutcome::Stuck {
                cfg: Config::new(Cmd::If(e, c1, c2), store),
                context: "E_IfThenElse1/E_IfThenElse2: the condition does not evaluate".to_string(),
                cause: Some(err),
            },
        },

        Cmd::While(e, body) => match eval_exp(&store, &e) {
            Ok(Value::Bool(false)) => StepOutcome::Stepped {
                next: Config::new(Cmd::Null, store),
                rules: vec![RuleName::EWhile1],
            },
            Ok(Value::Bool(true)) => {
                let unrolled = Cmd::Seq(
                    body.clone(),
                    Box::new(Cmd::While(e, body)),
                );
                StepOutcome::Stepped {
                    next: Config::new(unrolled, store),
                    rules: vec![RuleName::EWhile2],
                }
            }
            Ok(v) => {
                let context = format!(
                    "E_While1/E_While2: the condition evaluated to the {} value {v}, not a boolean",
                    v.kind()
                );
                StepOutcome::Stuck {
                    cfg: Config::new(Cmd::While(e, body), store),
                    context,
                    cause: None,
                }
            }
            Err(err) => StepOutcome::Stuck {
                cfg: Config::new(Cmd::While(e, body), store),
                context: "E_While1/E_While2: the condition does not evaluate".to_string(),
                cause: Some(err),
            },
        },

        Cmd::For(x, lo, hi, body) => {
            let bounds = (eval_exp(&store, &lo), eval_exp(&store, &hi));
            match bounds {
                (Ok(Value::Int(k)), Ok(Value::Int(k2))) => {
                    if k > k2 {
                        StepOutcome::Stepped {
                            next: Config::new(Cmd::Null, store),
                            rules: vec![RuleName::EFor1],
                        }
                    } else {
                        let first = Dcl::ConstDecl(
                            x.clone(),
                            Type::Int,
                            Exp::Val(Value::Int(k.clone())),
                            Box::new(Dcl::Block(body.clone())),
                        );
                        let rest = Cmd::For(
                            x,
                            Exp::Val(Value::Int(k + 1)),
                            Exp::Val(Value::Int(k2)),
                            body,
                        );
                        StepOutcome::Stepped {
                            next: Config::new(
                                Cmd::Seq(
                                    Box::new(Cmd::Declare(Box::new(first))),
                                    Box::new(rest),
                                ),
                                store,
                            ),
                            rules: vec![RuleName::EFor2],
                        }
                    }
                }
                (Ok(v), Ok(w)) => {
                    let context = format!(
                        "E_For1/E_For2: the bounds evaluated to {} and {} values, not numerals",
                        v.kind(),
                        w.kind()
                    );
                    StepOutcome::Stuck {
                        cfg: Config::new(Cmd::For(x, lo, hi, body), store),
                        context,
                        cause: None,
                    }
                }
                (Err(err), _) | (_, Err(err)) => StepOutcome::Stuck {
                    cfg: Config::new(Cmd::For(x, lo, hi, body), store),
                    context: "E_For1/E_For2: a bound does not evaluate".to_string(),
                    cause: Some(err),
                },
            }
        }

        Cmd::Declare(d) => {
            if matches!(*d, Dcl::Empty) {
                return StepOutcome::Stepped {
                    next: Config::new(Cmd::Null, store),
                    rules: vec![RuleName::EDecl1],
                };
            }
            match step_dcl(*d, store, scope, ctx) {
                DclOutcome::Stepped { dcl, store, mut rules } => {
                    rules.insert(0, RuleName::EDecl2);
                    StepOutcome::Stepped {
                        next: Config::new(Cmd::Declare(Box::new(dcl)), store),
                        rules,
                    }
                }
                DclOutcome::Terminal { .. } => {
                    unreachable!("a declaration other than begin end cannot be terminal")
                }
                DclOutcome::Stuck { dcl, store, context, cause } => StepOutcome::Stuck {
                    cfg: Config::new(Cmd::Declare(Box::new(dcl)), store),
                    context: chain("E_Decl2", &context),
                    cause,
                },
            }
        }

        Cmd::Call(f, args) => match eval_exp(&store, &f) {
            Err(err) => StepOutcome::Stuck {
                cfg: Config::new(Cmd::Call(f, args), store),
                context: "E_ProcCall: the callee does not evaluate".to_string(),
                cause: Some(err),
            },
            Ok(Value::Proc(pv)) => match compat_zip(&pv.params, &args) {
                Some(bindings) => StepOutcome::Stepped {
                    next: Config::new(
                        Cmd::Declare(Box::new(Dcl::Aliases(bindings, pv.body))),
                        store,
                    ),
                    rules: vec![RuleName::EProcCall],
                },
                None => {
                    let context = format!(
                        "E_ProcCall: the procedure takes {} parameter(s) but the call passes {}",
                        pv.params.len(),
                        args.len()
                    );
                    StepOutcome::Stuck {
                        cfg: Config::new(Cmd::Call(f, args), store),
                        context,
                        cause: None,
                    }
                }
            },
            Ok(v) => {
                let context = format!(
                    "E_ProcCall: the callee evaluated to the {} value {v}, not a procedure",
                    v.kind()
                );
                StepOutcome::Stuck {
                    cfg: Config::new(Cmd::Call(f, args), store),
                    context,
                    cause: None,
                }
            }
        },
    }
}

/// One step of a declaration configuration.
pub fn step_dcl(d: Dcl, store: Store, scope: u32, ctx: &mut RunCtx) -> DclOutcome {
    match d {
        Dcl::Empty => DclOutcome::Terminal { dcl: Dcl::Empty, store },

        Dcl::Block(c) => {
            if matches!(*c, Cmd::Null) {
                return DclOutcome::Stepped {
                    dcl: Dcl::Empty,
                    store,
                    rules: vec![RuleName::EBlock1],
                };
            }
            match step_cmd(Config::new(*c, store), scope + 1, ctx) {
                StepOutcome::Stepped { next, mut rules } => {
                    rules.insert(0, RuleName::EBlock2);
                    DclOutcome::Stepped {
                        dcl: Dcl::Block(Box::new(next.cmd)),
                        store: next.store,
                        rules,
                    }
                }
                StepOutcome::Terminal(_) => {
                    unreachable!("a command other than null cannot be terminal")
                }
                StepOutcome::Stuck { cfg, context, cause } => DclOutcome::Stuck {
                    dcl: Dcl::Block(Box::new(cfg.cmd)),
                    store: cfg.store,
                    context: chain("E_Block2", &context),
                    cause,
                },
            }
        }

        Dcl::InitVar(x, ty, e, rest) => {
            if matches!(*rest, Dcl::Empty) {
                ctx.pops.push(PopEvent { name: x, value: exp_value(&e), depth: scope });
                return DclOutcome::Stepped {
                    dcl: Dcl::Empty,
                    store,
                    rules: vec![RuleName::EInitVar1],
                };
            }
            let v = match eval_exp(&store, &e) {
                Ok(v) => v,
                Err(err) => {
                    return DclOutcome::Stuck {
                        dcl: Dcl::InitVar(x, ty, e, rest),
                        store,
                        context: "E_InitVar2: the initializer does not evaluate".to_string(),
                        cause: Some(err),
                    }
                }
            };
            match step_under(*rest, store, &x, Slot::Value(v), scope, ctx) {
                Under::Stepped { rest: rest2, store, slot, rules } => {
                    let v2 = match slot {
                        Slot::Value(v2) => v2,
                        Slot::Uninit => unreachable!("a pushed value cannot become uninitialized"),
                    };
                    let mut all = vec![RuleName::EInitVar2];
                    all.extend(rules);
                    DclOutcome::Stepped {
                        dcl: Dcl::InitVar(x, ty, Exp::Val(v2), Box::new(rest2)),
                        store,
                        rules: all,
                    }
                }
                Under::Stuck { rest: rest2, store, context, cause } => DclOutcome::Stuck {
                    dcl: Dcl::InitVar(x, ty, e, Box::new(rest2)),
                    store,
                    context: chain("E_InitVar2", &context),
                    cause,
                },
            }
        }

        // An uninitialized variable has no evaluation rule of its own; it
        // runs like an initialized one whose binding starts at the
        // uninitialized marker, and becomes initialized at first write.
        Dcl::UninitVar(x, ty, rest) => {
            if matches!(*rest, Dcl::Empty) {
                ctx.pops.push(PopEvent { name: x, value: None, depth: scope });
                return DclOutcome::Stepped {
                    dcl: Dcl::Empty,
                    store,
                    rules: vec![RuleName::EInitVar1],
                };
            }
            match step_under(*rest, store, &x, Slot::Uninit, scope, ctx) {
                Under::Stepped { rest: rest2, store, slot, rules } => {
                    let dcl = match slot {
                        Slot::Uninit => Dcl::UninitVar(x, ty, Box::new(rest2)),
                        Slot::Value(v2) => {
                            Dcl::InitVar(x, ty, Exp::Val(v2), Box::new(rest2))
                        }
                    };
                    let mut all = vec![RuleName::EInitVar2];
                    all.extend(rules);
                    DclOutcome::Stepped { dcl, store, rules: all }
                }
                Under::Stuck { rest: rest2, store, context, cause } => DclOutcome::Stuck {
                    dcl: Dcl::UninitVar(x, ty, Box::new(rest2)),
                    store,
                    context: chain("E_InitVar2", &context),
                    cause,
                },
            }
        }

        Dcl::ConstDecl(x, ty, e, rest) => {
            if matches!(*rest, Dcl::Empty) {
                ctx.pops.push(PopEvent { name: x, value: exp_value(&e), depth: scope });
                return DclOutcome::Stepped {
                    dcl: Dcl::Empty,
                    store,
                    rules: vec![RuleName::EConst1],
                };
            }
            let v = match eval_exp(&store, &e) {
                Ok(v) => v,
                Err(err) => {
                    return DclOutcome::Stuck {
                        dcl: Dcl::ConstDecl(x, ty, e, rest),
                        store,
                        context: "E_Const2: the initializer does not evaluate".to_string(),
                        cause: Some(err),
                    }
                }
            };
            let substituted = rest.as_ref().subst(&v, &x, &mut ctx.supply);
            match step_dcl(substituted, store, scope, ctx) {
                DclOutcome::Stepped { dcl, store, rules } => {
                    let mut all = vec![RuleName::EConst2];
                    all.extend(rules);
                    DclOutcome::Stepped {
                        dcl: Dcl::ConstDecl(x, ty, Exp::Val(v), Box::new(dcl)),
                        store,
                        rules: all,
                    }
                }
                DclOutcome::Terminal { .. } => {
                    unreachable!("substitution cannot turn a continuation into begin end")
                }
                DclOutcome::Stuck { store, context, cause, .. } => DclOutcome::Stuck {
                    dcl: Dcl::ConstDecl(x, ty, e, rest),
                    store,
                    context: chain("E_Const2", &context),
                    cause,
                },
            }
        }

        Dcl::ProcDecl(p, params, body, rest) => {
            let pv = Value::Proc(ProcVal { params, body });
            let next = rest.as_ref().subst(&pv, &p, &mut ctx.supply);
            DclOutcome::Stepped { dcl: next, store, rules: vec![RuleName::EProc] }
        }

        Dcl::Alias(b, rest) => {
            if matches!(*rest, Dcl::Empty) {
                let value = alias_value(&b.rhs, &store);
                ctx.pops.push(PopEvent { name: b.name, value, depth: scope });
                return DclOutcome::Stepped {
                    dcl: Dcl::Empty,
                    store,
                    rules: vec![RuleName::EAlias1],
                };
            }
            match b.mode {
                Mode::In => {
                    let v = match eval_exp(&store, &b.rhs) {
                        Ok(v) => v,
                        Err(err) => {
                            return DclOutcome::Stuck {
                                dcl: Dcl::Alias(b, rest),
                                store,
                                context: "E_Alias2: the right-hand side does not evaluate"
                                    .to_string(),
                                cause: Some(err),
                            }
                        }
                    };
                    let substituted = rest.as_ref().subst(&v, &b.name, &mut ctx.supply);
                    match step_dcl(substituted, store, scope, ctx) {
                        DclOutcome::Stepped { dcl, store, rules } => {
                            let mut all = vec![RuleName::EAlias2];
                            all.extend(rules);
                            // the alias wrapper is gone: the substituted,
                            // stepped continuation is the whole result
                            DclOutcome::Stepped { dcl, store, rules: all }
                        }
                        DclOutcome::Terminal { .. } => {
                            unreachable!("substitution cannot turn a continuation into begin end")
                        }
                        DclOutcome::Stuck { store, context, cause, .. } => DclOutcome::Stuck {
                            dcl: Dcl::Alias(b, rest),
                            store,
                            context: chain("E_Alias2", &context),
                            cause,
                        },
                    }
                }
                Mode::Out | Mode::InOut => {
                    let Exp::Var(y) = &b.rhs else {
                        let context = format!(
                            "E_Alias3: the right-hand side of the {} alias '{}' must be a variable",
                            b.mode, b.name
                        );
                        return DclOutcome::Stuck {
                            dcl: Dcl::Alias(b, rest),
                            store,
                            context,
                            cause: None,
                        };
                    };
                    let y = y.clone();
                    let v = match fetch(&store, &y) {
                        Ok(v) => v,
                        Err(err) => {
                            return DclOutcome::Stuck {
                                dcl: Dcl::Alias(b, rest),
                                store,
                                context: format!("E_Alias3: cannot copy '{y}' in"),
                                cause: Some(err),
                            }
                        }
                    };
                    match step_under(*rest, store, &b.name, Slot::Value(v), scope, ctx) {
                        Under::Stepped { rest: rest2, store, slot, rules } => {
                            let v2 = match slot {
                                Slot::Value(v2) => v2,
                                Slot::Uninit => {
                                    unreachable!("a pushed value cannot become uninitialized")
                                }
                            };
                            let store = store_update(&store, &y, v2)
                                .expect("an aliased variable cannot disappear from the store");
                            let mut all = vec![RuleName::EAlias3];
                            all.extend(rules);
                            DclOutcome::Stepped {
                                dcl: Dcl::Alias(b, Box::new(rest2)),
                                store,
                                rules: all,
                            }
                        }
                        Under::Stuck { rest: rest2, store, context, cause } => DclOutcome::Stuck {
                            dcl: Dcl::Alias(b, Box::new(rest2)),
                            store,
                            context: chain("E_Alias3", &context),
                            cause,
                        },
                    }
                }
            }
        }

        Dcl::Aliases(bindings, rest) => {
            if bindings.is_empty() {
                return DclOutcome::Stepped {
                    dcl: *rest,
                    store,
                    rules: vec![RuleName::EAliases1],
                };
            }
            if matches!(*rest, Dcl::Empty) {
                for b in bindings {
                    let value = alias_value(&b.rhs, &store);
                    ctx.pops.push(PopEvent { name: b.name, value, depth: scope });
                }
                return DclOutcome::Stepped {
                    dcl: Dcl::Empty,
                    store,
                    rules: vec![RuleName::EAliases2],
                };
            }
            // view the list as head alias over tail list and step that
            let mut iter = bindings.into_iter();
            let head = iter.next().expect("nonempty");
            let tail: Vec<AliasBinding> = iter.collect();
            let nested = Dcl::Alias(head, Box::new(Dcl::Aliases(tail, rest)));
            match step_dcl(nested, store, scope, ctx) {
                DclOutcome::Stepped { dcl, store, rules } => {
                    let mut all = vec![RuleName::EAliases3];
                    all.extend(rules);
                    DclOutcome::Stepped { dcl, store, rules: all }
                }
                DclOutcome::Terminal { .. } => unreachable!("an alias cannot be terminal"),
                DclOutcome::Stuck { dcl, store, context, cause } => {
                    // refold the nested view so the reported configuration
                    // matches what failed to step
                    let refolded = match dcl {
                        Dcl::Alias(h, boxed) => match *boxed {
                            Dcl::Aliases(t, r) => {
                                let mut all = vec![h];
                                all.extend(t);
                                Dcl::Aliases(all, r)
                            }
                            other => Dcl::Alias(h, Box::new(other)),
                        },
                        other => other,
                    };
                    DclOutcome::Stuck {
                        dcl: refolded,
                        store,
                        context: chain("E_Aliases3", &context),
                        cause,
                    }
                }
            }
        }
    }
}

/// Outcome of stepping a continuation under a pushed binding.
enum Under {
    Stepped { rest: Dcl, store: Store, slot: Slot, rules: Vec<RuleName> },
    Stuck { rest: Dcl, store: Store, context: String, cause: Option<EvalError> },
}

/// Push `x` with `slot`, take one step of `rest`, check that the store came
/// back with `x` still on top and the same length, and pop it off again.
fn step_under(
    rest: Dcl,
    store: Store,
    x: &Ident,
    slot: Slot,
    scope: u32,
    ctx: &mut RunCtx,
) -> Under {
    let outer_len = store.len();
    let mut inner = store;
    inner.push(x.clone(), slot);
    match step_dcl(rest, inner, scope, ctx) {
        DclOutcome::Stepped { dcl, store: mut s2, rules } => {
            assert_eq!(
                s2.len(),
                outer_len + 1,
                "stepping a continuation must preserve the store length"
            );
            let (top, slot) = s2.pop().expect("nonempty store");
            assert_eq!(
                &top, x,
                "stepping a continuation must keep the pushed binding on top"
            );
            Under::Stepped { rest: dcl, store: s2, slot, rules }
        }
        DclOutcome::Terminal { .. } => {
            unreachable!("a continuation other than begin end cannot be terminal")
        }
        DclOutcome::Stuck { dcl, store: mut s2, context, cause } => {
            let _ = s2.pop();
            Under::Stuck { rest: dcl, store: s2, context, cause }
        }
    }
}

fn exp_value(e: &Exp) -> Option<Value> {
    match e {
        Exp::Val(v) => Some(v.clone()),
        _ => None,
    }
}

fn alias_value(rhs: &Exp, store: &Store) -> Option<Value> {
    match rhs {
        Exp::Val(v) => Some(v.clone()),
        Exp::Var(y) => fetch(store, y).ok(),
        _ => None,
    }
}

// ---- rule-by-rule applicability, for auditing determinism ----

/// The command-level rules whose premises hold for this configuration,
/// checked one rule at a time from each rule's own guard. Determinism says
/// the result never has more than one element.
pub fn applicable_cmd_rules(cfg: &Config) -> Vec<RuleName> {
    RuleName::ALL
        .iter()
        .copied()
        .filter(|r| cmd_rule_applies(*r, cfg))
        .collect()
}

/// The declaration-level rules whose premises hold for this configuration.
pub fn applicable_dcl_rules(d: &Dcl, store: &Store) -> Vec<RuleName> {
    RuleName::ALL
        .iter()
        .copied()
        .filter(|r| dcl_rule_applies(*r, d, store))
        .collect()
}

fn scratch_for(pool_holder: &Dcl, store: &Store) -> RunCtx {
    let mut pool = pool_holder.all_idents();
    for (x, slot) in store.iter() {
        pool.insert(x.clone());
        if let Slot::Value(v) = slot {
            pool.extend(Exp::Val(v.clone()).all_idents());
        }
    }
    RunCtx { supply: FreshSupply::avoiding(pool), pops: Vec::new() }
}

fn cmd_steps(c: &Cmd, store: &Store) -> bool {
    let mut ctx = scratch_for(&Dcl::Block(Box::new(c.clone())), store);
    matches!(
        step_cmd(Config::new(c.clone(), store.clone()), 0, &mut ctx),
        StepOutcome::Stepped { .. }
    )
}

fn dcl_steps(d: &Dcl, store: &Store) -> bool {
    let mut ctx = scratch_for(d, store);
    matches!(
        step_dcl(d.clone(), store.clone(), 0, &mut ctx),
        DclOutcome::Stepped { .. }
    )
}

fn evals_to_bool(store: &Store, e: &Exp, want: bool) -> bool {
    matches!(eval_exp(store, e), Ok(Value::Bool(b)) if b == want)
}

fn cmd_rule_applies(rule: RuleName, cfg: &Config) -> bool {
    let store = &cfg.store;
    match rule {
        RuleName::ENull => matches!(&cfg.cmd, Cmd::Seq(c1, _) if matches!(**c1, Cmd::Null)),
        RuleName::ESeq => match &cfg.cmd {
            Cmd::Seq(c1, _) => cmd_steps(c1, store),
            _ => false,
        },
        RuleName::EAssign => match &cfg.cmd {
            Cmd::Assign(x, e) => match eval_exp(store, e) {
                Ok(v) => store_update(store, x, v).is_some(),
                Err(_) => false,
            },
            _ => false,
        },
        RuleName::EIfThenElse1 => {
            matches!(&cfg.cmd, Cmd::If(e, _, _) if evals_to_bool(store, e, true))
        }
        RuleName::EIfThenElse2 => {
            matches!(&cfg.cmd, Cmd::If(e, _, _) if evals_to_bool(store, e, false))
        }
        RuleName::EWhile1 => {
            matches!(&cfg.cmd, Cmd::While(e, _) if evals_to_bool(store, e, false))
        }
        RuleName::EWhile2 => {
            matches!(&cfg.cmd, Cmd::While(e, _) if evals_to_bool(store, e, true))
        }
        RuleName::EDecl1 => matches!(&cfg.cmd, Cmd::Declare(d) if matches!(**d, Dcl::Empty)),
        RuleName::EDecl2 => match &cfg.cmd {
            Cmd::Declare(d) => dcl_steps(d, store),
            _ => false,
        },
        RuleName::EFor1 => match &cfg.cmd {
            Cmd::For(_, lo, hi, _) => {
                matches!(
                    (eval_exp(store, lo), eval_exp(store, hi)),
                    (Ok(Value::Int(k)), Ok(Value::Int(k2))) if k > k2
                )
            }
            _ => false,
        },
        RuleName::EFor2 => match &cfg.cmd {
            Cmd::For(_, lo, hi, _) => {
                matches!(
                    (eval_exp(store, lo), eval_exp(store, hi)),
                    (Ok(Value::Int(k)), Ok(Value::Int(k2))) if k <= k2
                )
            }
            _ => false,
        },
        RuleName::EProcCall => match &cfg.cmd {
            Cmd::Call(f, args) => match eval_exp(store, f) {
                Ok(Value::Proc(pv)) => compat_zip(&pv.params, args).is_some(),
                _ => false,
            },
            _ => false,
        },
        _ => false,
    }
}

fn dcl_rule_applies(rule: RuleName, d: &Dcl, store: &Store) -> bool {
    match rule {
        RuleName::EBlock1 => matches!(d, Dcl::Block(c) if matches!(**c, Cmd::Null)),
        RuleName::EBlock2 => match d {
            Dcl::Block(c) => cmd_steps(c, store),
            _ => false,
        },
        RuleName::EInitVar1 => matches!(
            d,
            Dcl::InitVar(_, _, _, rest) | Dcl::UninitVar(_, _, rest)
                if matches!(**rest, Dcl::Empty)
        ),
        RuleName::EInitVar2 => match d {
            Dcl::InitVar(x, _, e, rest) if !matches!(**rest, Dcl::Empty) => {
                match eval_exp(store, e) {
                    Ok(v) => {
                        let mut inner = store.clone();
                        inner.push(x.clone(), Slot::Value(v));
                        dcl_steps(rest, &inner)
                    }
                    Err(_) => false,
                }
            }
            Dcl::UninitVar(x, _, rest) if !matches!(**rest, Dcl::Empty) => {
                let mut inner = store.clone();
                inner.push(x.clone(), Slot::Uninit);
                dcl_steps(rest, &inner)
            }
            _ => false,
        },
        RuleName::EConst1 => {
            matches!(d, Dcl::ConstDecl(_, _, _, rest) if matches!(**rest, Dcl::Empty))
        }
        RuleName::EConst2 => match d {
            Dcl::ConstDecl(x, _, e, rest) if !matches!(**rest, Dcl::Empty) => {
                match eval_exp(store, e) {
                    Ok(v) => {
                        let mut supply = scratch_for(d, store).supply;
                        let substituted = rest.as_ref().subst(&v, x, &mut supply);
                        dcl_steps(&substituted, store)
                    }
                    Err(_) => false,
                }
            }
            _ => false,
        },
        RuleName::EProc => matches!(d, Dcl::ProcDecl(..)),
        RuleName::EAlias1 => matches!(d, Dcl::Alias(_, rest) if matches!(**rest, Dcl::Empty)),
        RuleName::EAlias2 => match d {
            Dcl::Alias(b, rest) if b.mode == Mode::In && !matches!(**rest, Dcl::Empty) => {
                match eval_exp(store, &b.rhs) {
                    Ok(v) => {
                        let mut supply = scratch_for(d, store).supply;
                        let substituted = rest.as_ref().subst(&v, &b.name, &mut supply);
                        dcl_steps(&substituted, store)
                    }
                    Err(_) => false,
                }
            }
            _ => false,
        },
        RuleName::EAlias3 => match d {
            Dcl::Alias(b, rest) if b.mode != Mode::In && !matches!(**rest, Dcl::Empty) => {
                match &b.rhs {
                    Exp::Var(y) => match fetch(store, y) {
                        Ok(v) => {
                            let mut inner = store.clone();
                            inner.push(b.name.clone(), Slot::Value(v));
                            dcl_steps(rest, &inner)
                        }
                        Err(_) => false,
                    },
                    _ => false,
                }
            }
            _ => false,
        },
        RuleName::EAliases1 => matches!(d, Dcl::Aliases(bs, _) if bs.is_empty()),
        RuleName::EAliases2 => matches!(
            d,
            Dcl::Aliases(bs, rest) if !bs.is_empty() && matches!(**rest, Dcl::Empty)
        ),
        RuleName::EAliases3 => match d {
            Dcl::Aliases(bs, rest) if !bs.is_empty() && !matches!(**rest, Dcl::Empty) => {
                let head = bs[0].clone();
                let tail = bs[1..].to_vec();
                let nested = Dcl::Alias(head, Box::new(Dcl::Aliases(tail, rest.clone())));
                dcl_steps(&nested, store)
            }
            _ => false,
        },
        _ => false,
    }
}
