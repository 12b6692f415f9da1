//! The type checker. Every judgment is syntax directed, so checking never
//! backtracks; when a premise fails the error names the rule that was being
//! applied, which the ill-typed-program tests key on.
//!
//! Reading restrictions live here, not in the evaluator: an `out` variable
//! cannot be read as an expression, an `in` variable cannot be assigned or
//! passed writably, and an `in out` argument must itself be declared
//! `in out`. Equality is type generic (both operands must share one type),
//! while the other comparisons are integer only. Procedure literals and the
//! alias declaration forms are runtime constructs with no typing rules.

use crate::parser::{Program, Span, SpanTree};
use crate::syntax::*;
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug)]
pub struct TypeError {
    /// Name of the judgment or rule whose premise failed (e.g. `Match2`).
    pub rule: &'static str,
    pub message: String,
    pub span: Option<Span>,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.message, self.rule)
    }
}

impl std::error::Error for TypeError {}

/// Check a parsed program under the empty context, with positions.
pub fn check_program(prog: &Program) -> Result<(), TypeError> {
    let mut ck = Ck { spans: Some(&prog.spans), path: Vec::new() };
    ck.dcl(&Env::new(), &prog.dcl)
}

/// Type of an expression under a context.
pub fn type_exp(env: &Env, e: &Exp) -> Result<Type, TypeError> {
    Ck::bare().exp(env, e)
}

/// Check one argument against a parameter mode and type.
pub fn match_arg(env: &Env, e: &Exp, mode: Mode, ty: &Type) -> Result<(), TypeError> {
    Ck::bare().match_arg(env, e, mode, ty)
}

/// Check an argument list against a procedure signature, positionally.
pub fn match_args(env: &Env, args: &[Exp], sig: &[(Mode, Type)]) -> Result<(), TypeError> {
    Ck::bare().match_args(env, args, sig, false)
}

/// Check a command under a context.
pub fn type_cmd(env: &Env, c: &Cmd) -> Result<(), TypeError> {
    Ck::bare().cmd(env, c)
}

/// Check a declaration under a context.
pub fn type_dcl(env: &Env, d: &Dcl) -> Result<(), TypeError> {
    Ck::bare().dcl(env, d)
}

struct Ck<'a> {
    spans: Option<&'a SpanTree>,
    path: Vec<u32>,
}

impl<'a> Ck<'a> {
    fn bare() -> Ck<'static> {
        Ck { spans: None, path: Vec::new() }
    }

    fn at<T>(&mut self, i: u32, f: impl FnOnce(&mut Self) -> T) -> T {
        self.path.push(i);
        let r = f(self);
        self.path.pop();
        r
    }

    fn err<T>(&self, rule: &'static str, message: String) -> Result<T, TypeError> {
        Err(TypeError {
            rule,
            message,
            span: self.spans.map(|t| t.at(&self.path)),
        })
    }

    // ---- expressions ----

    fn exp(&mut self, env: &Env, e: &Exp) -> Result<Type, TypeError> {
        match e {
            Exp::Var(x) => match env.lookup(x) {
                None => self.err("Lookup", format!("unbound identifier '{x}'")),
                Some(b) if b.mode == Mode::Out => self.err(
                    "Var",
                    format!("'{x}' has mode out and cannot be read"),
                ),
                Some(b) => Ok(b.ty.clone()),
            },
            Exp::Val(Value::Int(_)) => Ok(Type::Int),
            Exp::Val(Value::Bool(_)) => Ok(Type::Bool),
            Exp::Val(Value::Proc(_)) => self.err(
                "Expression",
                "a procedure literal has no typing rule in expression position".to_string(),
            ),
            Exp::Bin(op, l, r) => {
                let lt = self.at(0, |s| s.exp(env, l))?;
                let rt = self.at(1, |s| s.exp(env, r))?;
                self.bin(*op, lt, rt)
            }
            Exp::Not(inner) => {
                let t = self.at(0, |s| s.exp(env, inner))?;
                if t == Type::Bool {
                    Ok(Type::Bool)
                } else {
                    self.err("Not", format!("operand has type {t}, expected bool"))
                }
            }
        }
    }

    fn bin(&self, op: BinOp, lt: Type, rt: Type) -> Result<Type, TypeError> {
        let rule = rule_for(op);
        match op {
            BinOp::Plus | BinOp::Minus | BinOp::Times => {
                self.operands(rule, &lt, &rt, Type::Int)?;
                Ok(Type::Int)
            }
            BinOp::Gt | BinOp::Lt => {
                self.operands(rule, &lt, &rt, Type::Int)?;
                Ok(Type::Bool)
            }
            BinOp::And | BinOp::Or => {
                self.operands(rule, &lt, &rt, Type::Bool)?;
                Ok(Type::Bool)
            }
            BinOp::Eq => {
                if lt == rt {
                    Ok(Type::Bool)
                } else {
                    self.err(rule, format!("operands have types {lt} and {rt}"))
                }
            }
        }
    }

    fn operands(
        &self,
        rule: &'static str,
        lt: &Type,
        rt: &Type,
        want: Type,
    ) -> Result<(), TypeError> {
        if *lt != want {
            return self.err(rule, format!("left operand has type {lt}, expected {want}"));
        }
        if *rt != want {
            return self.err(rule, format!("right operand has type {rt}, expected {want}"));
        }
        Ok(())
    }

    // ---- argument matching ----

    fn match_arg(&mut self, env: &Env, e: &Exp, mode: Mode, ty: &Type) -> Result<(), TypeError> {
        match mode {
            Mode::In => {
                let t = self.exp(env, e)?;
                if &t == ty {
                    Ok(())
                } else {
                    self.err("Match1", format!("argument has type {t}, expected {ty}"))
                }
            }
            Mode::Out => {
                let Exp::Var(x) = e else {
                    return self.err(
                        "Match2",
                        "an out argument must be a variable name".to_string(),
                    );
                };
                let Some(b) = env.lookup(x) else {
                    return self.err("Lookup", format!("unbound identifier '{x}'"));
                };
                if b.mode == Mode::In {
                    return self.err(
                        "Match2",
                        format!("'{x}' has mode in and cannot receive an out result"),
                    );
                }
                if &b.ty != ty {
                    return self.err(
                        "Match2",
                        format!("'{x}' has type {}, expected {ty}", b.ty),
                    );
                }
                Ok(())
            }
            Mode::InOut => {
                let Exp::Var(x) = e else {
                    return self.err(
                        "Match3",
                        "an in out argument must be a variable name".to_string(),
                    );
                };
                let Some(b) = env.lookup(x) else {
                    return self.err("Lookup", format!("unbound identifier '{x}'"));
                };
                if b.mode != Mode::InOut {
                    return self.err(
                        "Match3",
                        format!("'{x}' has mode {}, expected in out", b.mode),
                    );
                }
                if &b.ty != ty {
                    return self.err(
                        "Match3",
                        format!("'{x}' has type {}, expected {ty}", b.ty),
                    );
                }
                Ok(())
            }
        }
    }

    fn match_args(
        &mut self,
        env: &Env,
        args: &[Exp],
        sig: &[(Mode, Type)],
        spanned_call: bool,
    ) -> Result<(), TypeError> {
        if args.len() != sig.len() {
            return self.err(
                "MatchList",
                format!(
                    "call passes {} argument(s) but the procedure type lists {}",
                    args.len(),
                    sig.len()
                ),
            );
        }
        for (i, (a, (m, t))) in args.iter().zip(sig).enumerate() {
            if spanned_call {
                // in a call node, argument i sits at child i + 1
                self.at(i as u32 + 1, |s| s.match_arg(env, a, *m, t))?;
            } else {
                self.match_arg(env, a, *m, t)?;
            }
        }
        Ok(())
    }

    // ---- commands ----

    fn cmd(&mut self, env: &Env, c: &Cmd) -> Result<(), TypeError> {
        match c {
            Cmd::Null => Ok(()),
            Cmd::Assign(x, e) => {
                let Some(b) = env.lookup(x) else {
                    return self.err("Lookup", format!("unbound identifier '{x}'"));
                };
                if b.mode == Mode::In {
                    return self.err(
                        "Assign",
                        format!("cannot assign to '{x}', which has mode in"),
                    );
                }
                let expect = b.ty.clone();
                let t = self.at(0, |s| s.exp(env, e))?;
                if t != expect {
                    return self.err(
                        "Assign",
                        format!("'{x}' has type {expect} but the expression has type {t}"),
                    );
                }
                Ok(())
            }
            Cmd::Seq(a, b) => {
                self.at(0, |s| s.cmd(env, a))?;
                self.at(1, |s| s.cmd(env, b))
            }
            Cmd::If(e, c1, c2) => {
                let t = self.at(0, |s| s.exp(env, e))?;
                if t != Type::Bool {
                    return self.err(
                        "IfThenElse",
                        format!("condition has type {t}, expected bool"),
                    );
                }
                self.at(1, |s| s.cmd(env, c1))?;
                self.at(2, |s| s.cmd(env, c2))
            }
            Cmd::While(e, body) => {
                let t = self.at(0, |s| s.exp(env, e))?;
                if t != Type::Bool {
                    return self.err(
                        "While",
                        format!("condition has type {t}, expected bool"),
                    );
                }
                self.at(1, |s| s.cmd(env, body))
            }
            Cmd::For(x, lo, hi, body) => {
                let lt = self.at(0, |s| s.exp(env, lo))?;
                if lt != Type::Int {
                    return self.err(
                        "For",
                        format!("lower bound has type {lt}, expected int"),
                    );
                }
                let ht = self.at(1, |s| s.exp(env, hi))?;
                if ht != Type::Int {
                    return self.err(
                        "For",
                        format!("upper bound has type {ht}, expected int"),
                    );
                }
                let inner = env.pushed(x.clone(), Mode::In, Type::Int);
                self.at(2, |s| s.cmd(&inner, body))
            }
            Cmd::Declare(d) => self.at(0, |s| s.dcl(env, d)),
            Cmd::Call(f, args) => {
                let t = self.at(0, |s| s.exp(env, f))?;
                let Type::Proc(sig) = t else {
                    return self.err(
                        "ProcCall",
                        format!("callee has type {t}, not a procedure type"),
                    );
                };
                self.match_args(env, args, &sig, true)
            }
        }
    }

    // ---- declarations ----

    fn dcl(&mut self, env: &Env, d: &Dcl) -> Result<(), TypeError> {
        match d {
            Dcl::Empty => Ok(()),
            Dcl::Block(c) => self.at(0, |s| s.cmd(env, c)),
            Dcl::UninitVar(x, ty, rest) => {
                let inner = env.pushed(x.clone(), Mode::InOut, ty.clone());
                self.at(0, |s| s.dcl(&inner, rest))
            }
            Dcl::InitVar(x, ty, e, rest) => {
                let t = self.at(0, |s| s.exp(env, e))?;
                if &t != ty {
                    return self.err(
                        "InitVar",
                        format!("initializer has type {t}, expected {ty}"),
                    );
                }
                let inner = env.pushed(x.clone(), Mode::InOut, ty.clone());
                self.at(1, |s| s.dcl(&inner, rest))
            }
            Dcl::ConstDecl(x, ty, e, rest) => {
                let t = self.at(0, |s| s.exp(env, e))?;
                if &t != ty {
                    return self.err(
                        "Constant",
                        format!("initializer has type {t}, expected {ty}"),
                    );
                }
                let inner = env.pushed(x.clone(), Mode::In, ty.clone());
                self.at(1, |s| s.dcl(&inner, rest))
            }
            Dcl::ProcDecl(p, params, body, rest) => {
                let mut seen = BTreeSet::new();
                for q in params {
                    if !seen.insert(&q.name) {
                        return self.err(
                            "Proc",
                            format!("duplicate parameter name '{}'", q.name),
                        );
                    }
                }
                let mut body_env = env.clone();
                for q in params {
                    body_env.push(q.name.clone(), q.mode, q.ty.clone());
                }
                self.at(0, |s| s.dcl(&body_env, body))?;
                let sig = params.iter().map(|q| (q.mode, q.ty.clone())).collect();
                let rest_env = env.pushed(p.clone(), Mode::In, Type::Proc(sig));
                self.at(1, |s| s.dcl(&rest_env, rest))
            }
            Dcl::Aliases(..) | Dcl::Alias(..) => self.err(
                "Declaration",
                "alias declarations are runtime forms and cannot appear in source".to_string(),
            ),
        }
    }
}

fn rule_for(op: BinOp) -> &'static str {
    match op {
        BinOp::Plus => "Plus",
        BinOp::Minus => "Minus",
        BinOp::Times => "Times",
        BinOp::Eq => "Equal",
        BinOp::Gt => "Greater",
        BinOp::Lt => "Less",
        BinOp::And => "And",
        BinOp::Or => "Or",
    }
}
