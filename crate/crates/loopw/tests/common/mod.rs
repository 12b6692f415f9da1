//! Shared test support: a seeded generator of well-typed terminating
//! programs, a generator of arbitrary (not necessarily well-typed) terms
//! for exercising substitution, an independent reference substitution
//! with its own capture-avoidance scheme, a canonical binder renaming for
//! alpha-comparison, and a reference Ackermann function.
//!
//! Everything here is deliberately written from first principles rather
//! than through the library's own binding machinery, so that agreement
//! between the two is evidence and not tautology.

#![allow(dead_code)]

use loopw::syntax::{AliasBinding, BinOp, Cmd, Dcl, Exp, Ident, Mode, Param, ProcVal, Type, Value};
use rand::Rng;
use std::collections::BTreeSet;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Reference Ackermann function.

/// Three-clause recursive Ackermann, computed with plain integers.
pub fn ack(m: u64, n: u64) -> u64 {
    if m == 0 {
        n + 1
    } else if n == 0 {
        ack(m - 1, 1)
    } else {
        ack(m - 1, ack(m, n - 1))
    }
}

// ---------------------------------------------------------------------------
// Generator of well-typed, terminating programs.
//
// Every binder receives a globally unique name, so no run of a generated
// program ever needs a capture-avoiding rename; step counts and traces are
// therefore exactly reproducible across split runs. Loops are bounded
// (`for` over literal bounds, `while` only over `false`) and procedure
// values are snapshots, so every generated program terminates.

#[derive(Clone)]
struct ScopeVar {
    name: Ident,
    mode: Mode,
    ty: Type,
}

pub struct ProgramGen {
    rng: ChaCha8Rng,
    next: u32,
}

impl ProgramGen {
    pub fn new(seed: u64) -> ProgramGen {
        ProgramGen { rng: ChaCha8Rng::seed_from_u64(seed), next: 0 }
    }

    /// A closed, well-typed program of the given nesting depth.
    pub fn program(&mut self, depth: u32) -> Dcl {
        let mut scope = Vec::new();
        self.dcl(depth, &mut scope)
    }

    fn fresh(&mut self, prefix: &str) -> Ident {
        let n = self.next;
        self.next += 1;
        Ident::new(format!("{prefix}{n}"))
    }

    fn base_ty(&mut self) -> Type {
        if self.rng.gen_bool(0.5) { Type::Int } else { Type::Bool }
    }

    fn readable<'s>(&mut self, scope: &'s [ScopeVar], ty: &Type) -> Option<&'s ScopeVar> {
        let candidates: Vec<&ScopeVar> = scope
            .iter()
            .filter(|v| v.ty == *ty && matches!(v.mode, Mode::In | Mode::InOut))
            .collect();
        if candidates.is_empty() {
            return None;
        }
        let i = self.rng.gen_range(0..candidates.len());
        Some(candidates[i])
    }

    fn writable<'s>(&mut self, scope: &'s [ScopeVar]) -> Option<&'s ScopeVar> {
        let candidates: Vec<&ScopeVar> = scope
            .iter()
            .filter(|v| matches!(v.mode, Mode::Out | Mode::InOut))
            .collect();
        if candidates.is_empty() {
            return None;
        }
        let i = self.rng.gen_range(0..candidates.len());
        Some(candidates[i])
    }

    fn exp(&mut self, depth: u32, scope: &[ScopeVar], ty: &Type) -> Exp {
        assert!(
            matches!(ty, Type::Int | Type::Bool),
            "expression positions have no procedure literal rule; procedure \
             values must come from variables"
        );
        let leaf = depth == 0 || self.rng.gen_bool(0.4);
        if leaf {
            if self.rng.gen_bool(0.5) {
                if let Some(v) = self.readable(scope, ty) {
                    return Exp::Var(v.name.clone());
                }
            }
            return match ty {
                Type::Int => Exp::int(self.rng.gen_range(-3..10)),
                Type::Bool => Exp::bool(self.rng.gen_bool(0.5)),
                _ => unreachable!("leaves are int or bool"),
            };
        }
        match ty {
            Type::Int => {
                let op = [BinOp::Plus, BinOp::Minus, BinOp::Times][self.rng.gen_range(0..3)];
                let a = self.exp(depth - 1, scope, &Type::Int);
                let b = self.exp(depth - 1, scope, &Type::Int);
                Exp::bin(op, a, b)
            }
            Type::Bool => match self.rng.gen_range(0..4) {
                0 => Exp::Not(Box::new(self.exp(depth - 1, scope, &Type::Bool))),
                1 => {
                    let op = if self.rng.gen_bool(0.5) { BinOp::And } else { BinOp::Or };
                    let a = self.exp(depth - 1, scope, &Type::Bool);
                    let b = self.exp(depth - 1, scope, &Type::Bool);
                    Exp::bin(op, a, b)
                }
                _ => {
                    // comparisons only over ints: equality over other types
                    // does not reduce at runtime
                    let op = [BinOp::Eq, BinOp::Gt, BinOp::Lt][self.rng.gen_range(0..3)];
                    let a = self.exp(depth - 1, scope, &Type::Int);
                    let b = self.exp(depth - 1, scope, &Type::Int);
                    Exp::bin(op, a, b)
                }
            },
            _ => unreachable!(),
        }
    }

    /// A readable procedure-typed variable, if the scope has one.
    fn proc_var(&mut self, scope: &[ScopeVar]) -> Option<(Ident, Vec<(Mode, Type)>)> {
        let candidates: Vec<(Ident, Vec<(Mode, Type)>)> = scope
            .iter()
            .filter_map(|v| match (&v.mode, &v.ty) {
                (Mode::In | Mode::InOut, Type::Proc(sig)) => Some((v.name.clone(), sig.clone())),
                _ => None,
            })
            .collect();
        if candidates.is_empty() {
            return None;
        }
        Some(candidates[self.rng.gen_range(0..candidates.len())].clone())
    }

    fn proc_literal(&mut self, depth: u32, scope: &[ScopeVar], sig: &[(Mode, Type)]) -> ProcVal {
        let params: Vec<Param> = sig
            .iter()
            .map(|(m, t)| Param { name: self.fresh("A"), mode: *m, ty: t.clone() })
            .collect();
        let mut inner: Vec<ScopeVar> = scope.to_vec();
        for p in &params {
            inner.push(ScopeVar { name: p.name.clone(), mode: p.mode, ty: p.ty.clone() });
        }
        let body = if depth == 0 {
            Dcl::Empty
        } else {
            let mut cmds = Vec::new();
            // write each out-mode parameter so callers observe the call
            for p in &params {
                if matches!(p.mode, Mode::Out | Mode::InOut) {
                    let e = self.exp(depth - 1, &inner, &p.ty.clone());
                    cmds.push(Cmd::Assign(p.name.clone(), e));
                }
            }
            cmds.push(self.cmd(depth - 1, &inner));
            Dcl::block(seq_all(cmds))
        };
        ProcVal { params, body: Box::new(body) }
    }

    fn random_sig(&mut self) -> Vec<(Mode, Type)> {
        let n = self.rng.gen_range(1..=2);
        (0..n)
            .map(|_| {
                let mode = match self.rng.gen_range(0..3) {
                    0 => Mode::In,
                    1 => Mode::Out,
                    _ => Mode::InOut,
                };
                (mode, self.base_ty())
            })
            .collect()
    }

    fn call(&mut self, depth: u32, scope: &[ScopeVar]) -> Option<Cmd> {
        let procs: Vec<(Ident, Vec<(Mode, Type)>)> = scope
            .iter()
            .filter_map(|v| match (&v.mode, &v.ty) {
                (Mode::In | Mode::InOut, Type::Proc(sig)) => Some((v.name.clone(), sig.clone())),
                _ => None,
            })
            .collect();
        if procs.is_empty() {
            return None;
        }
        let (name, sig) = procs[self.rng.gen_range(0..procs.len())].clone();
        let mut args = Vec::new();
        for (mode, ty) in &sig {
            match mode {
                Mode::In => args.push(self.exp(depth.min(1), scope, ty)),
                Mode::Out => {
                    let v = scope
                        .iter()
                        .filter(|v| v.ty == *ty && matches!(v.mode, Mode::Out | Mode::InOut))
                        .map(|v| v.name.clone())
                        .collect::<Vec<_>>();
                    if v.is_empty() {
                        return None;
                    }
                    let i = self.rng.gen_range(0..v.len());
                    args.push(Exp::Var(v[i].clone()));
                }
                Mode::InOut => {
                    let v = scope
                        .iter()
                        .filter(|v| v.ty == *ty && v.mode == Mode::InOut)
                        .map(|v| v.name.clone())
                        .collect::<Vec<_>>();
                    if v.is_empty() {
                        return None;
                    }
                    let i = self.rng.gen_range(0..v.len());
                    args.push(Exp::Var(v[i].clone()));
                }
            }
        }
        Some(Cmd::Call(Exp::Var(name), args))
    }

    fn cmd(&mut self, depth: u32, scope: &[ScopeVar]) -> Cmd {
        if depth == 0 {
            return match self.rng.gen_range(0..4) {
                0 => Cmd::Null,
                1 => match self.call(0, scope) {
                    Some(c) => c,
                    None => Cmd::Null,
                },
                _ => match self.writable_assign(0, scope) {
                    Some(c) => c,
                    None => Cmd::Null,
                },
            };
        }
        let mut cmds = Vec::new();
        let n = self.rng.gen_range(1..=3);
        for _ in 0..n {
            let c = match self.rng.gen_range(0..10) {
                0 => Cmd::Null,
                1 | 2 => match self.writable_assign(depth - 1, scope) {
                    Some(c) => c,
                    None => Cmd::Null,
                },
                3 => Cmd::If(
                    self.exp(1, scope, &Type::Bool),
                    Box::new(self.cmd(depth - 1, scope)),
                    Box::new(self.cmd(depth - 1, scope)),
                ),
                4 => Cmd::While(Exp::bool(false), Box::new(self.cmd(depth - 1, scope))),
                5 => {
                    let x = self.fresh("I");
                    let lo = self.rng.gen_range(0..3);
                    let hi = self.rng.gen_range(0..6);
                    let mut inner = scope.to_vec();
                    inner.push(ScopeVar { name: x.clone(), mode: Mode::In, ty: Type::Int });
                    let body = self.cmd(depth - 1, &inner);
                    Cmd::For(x, Exp::int(lo), Exp::int(hi), Box::new(body))
                }
                6 | 7 => {
                    let mut inner = scope.to_vec();
                    Cmd::Declare(Box::new(self.dcl(depth - 1, &mut inner)))
                }
                _ => match self.call(depth - 1, scope) {
                    Some(c) => c,
                    None => Cmd::Null,
                },
            };
            cmds.push(c);
        }
        seq_all(cmds)
    }

    fn writable_assign(&mut self, depth: u32, scope: &[ScopeVar]) -> Option<Cmd> {
        let (name, ty) = {
            let v = self.writable(scope)?;
            (v.name.clone(), v.ty.clone())
        };
        let e = match &ty {
            Type::Proc(sig) => {
                let want = Type::Proc(sig.clone());
                let source = self.readable(scope, &want)?.name.clone();
                Exp::Var(source)
            }
            t => self.exp(depth, scope, &t.clone()),
        };
        Some(Cmd::Assign(name, e))
    }

    fn dcl(&mut self, depth: u32, scope: &mut Vec<ScopeVar>) -> Dcl {
        if depth == 0 {
            return if self.rng.gen_bool(0.3) {
                Dcl::Empty
            } else {
                Dcl::block(self.cmd(1, scope))
            };
        }
        match self.rng.gen_range(0..10) {
            0..=3 => {
                let x = self.fresh("X");
                let proc_source = if self.rng.gen_bool(0.3) {
                    self.proc_var(scope)
                } else {
                    None
                };
                let (ty, e) = match proc_source {
                    Some((source, sig)) => (Type::Proc(sig), Exp::Var(source)),
                    None => {
                        let ty = self.base_ty();
                        let e = self.exp(depth - 1, scope, &ty);
                        (ty, e)
                    }
                };
                scope.push(ScopeVar { name: x.clone(), mode: Mode::InOut, ty: ty.clone() });
                let rest = self.dcl(depth - 1, scope);
                scope.pop();
                Dcl::InitVar(x, ty, e, Box::new(rest))
            }
            4 | 5 => {
                let k = self.fresh("K");
                let proc_source = if self.rng.gen_bool(0.3) {
                    self.proc_var(scope)
                } else {
                    None
                };
                let (ty, e) = match proc_source {
                    Some((source, sig)) => (Type::Proc(sig), Exp::Var(source)),
                    None => {
                        let ty = self.base_ty();
                        let e = self.exp(depth - 1, scope, &ty);
                        (ty, e)
                    }
                };
                scope.push(ScopeVar { name: k.clone(), mode: Mode::In, ty: ty.clone() });
                let rest = self.dcl(depth - 1, scope);
                scope.pop();
                Dcl::ConstDecl(k, ty, e, Box::new(rest))
            }
            6 | 7 => {
                let p = self.fresh("P");
                let sig = self.random_sig();
                let literal = self.proc_literal(depth - 1, scope, &sig);
                scope.push(ScopeVar {
                    name: p.clone(),
                    mode: Mode::In,
                    ty: Type::Proc(sig),
                });
                let rest = self.dcl(depth - 1, scope);
                scope.pop();
                Dcl::ProcDecl(p, literal.params, literal.body, Box::new(rest))
            }
            _ => Dcl::block(self.cmd(depth, scope)),
        }
    }
}

fn seq_all(cmds: Vec<Cmd>) -> Cmd {
    let mut out = Cmd::Null;
    for c in cmds.into_iter().rev() {
        out = if matches!(out, Cmd::Null) { c } else { Cmd::seq(c, out) };
    }
    out
}

// ---------------------------------------------------------------------------
// Generator of arbitrary terms over a tiny colliding name pool.
//
// These are intentionally not well typed and reuse the same few names as
// binders and free variables, to force the substitution machinery into its
// capture-avoidance corners.

const POOL: [&str; 4] = ["x", "y", "z", "w"];

pub fn pool_name(rng: &mut ChaCha8Rng) -> Ident {
    Ident::new(POOL[rng.gen_range(0..POOL.len())])
}

pub fn arb_value(rng: &mut ChaCha8Rng, depth: u32) -> Value {
    match rng.gen_range(0..4) {
        0 => Value::int(rng.gen_range(-5..6)),
        1 => Value::Bool(rng.gen_bool(0.5)),
        _ => {
            let params = (0..rng.gen_range(0..=2))
                .map(|_| Param { name: pool_name(rng), mode: Mode::In, ty: Type::Int })
                .collect();
            let body = if depth == 0 {
                Dcl::Empty
            } else {
                arb_dcl(rng, depth - 1)
            };
            Value::Proc(ProcVal { params, body: Box::new(body) })
        }
    }
}

pub fn arb_exp(rng: &mut ChaCha8Rng, depth: u32) -> Exp {
    if depth == 0 || rng.gen_bool(0.4) {
        return match rng.gen_range(0..3) {
            0 => Exp::Var(pool_name(rng)),
            1 => Exp::int(rng.gen_range(-5..6)),
            _ => Exp::bool(rng.gen_bool(0.5)),
        };
    }
    match rng.gen_range(0..3) {
        0 => Exp::Not(Box::new(arb_exp(rng, depth - 1))),
        1 => {
            let op = [
                BinOp::Plus,
                BinOp::Minus,
                BinOp::Times,
                BinOp::Eq,
                BinOp::Gt,
                BinOp::Lt,
                BinOp::And,
                BinOp::Or,
            ][rng.gen_range(0..8)];
            Exp::bin(op, arb_exp(rng, depth - 1), arb_exp(rng, depth - 1))
        }
        _ => Exp::Val(arb_value(rng, depth - 1)),
    }
}

pub fn arb_cmd(rng: &mut ChaCha8Rng, depth: u32) -> Cmd {
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => Cmd::Null,
            1 => Cmd::Assign(pool_name(rng), arb_exp(rng, 0)),
            _ => Cmd::Call(arb_exp(rng, 0), vec![]),
        };
    }
    match rng.gen_range(0..8) {
        0 => Cmd::Null,
        1 => Cmd::Assign(pool_name(rng), arb_exp(rng, depth - 1)),
        2 => Cmd::seq(arb_cmd(rng, depth - 1), arb_cmd(rng, depth - 1)),
        3 => Cmd::If(
            arb_exp(rng, depth - 1),
            Box::new(arb_cmd(rng, depth - 1)),
            Box::new(arb_cmd(rng, depth - 1)),
        ),
        4 => Cmd::While(arb_exp(rng, depth - 1), Box::new(arb_cmd(rng, depth - 1))),
        5 => Cmd::For(
            pool_name(rng),
            arb_exp(rng, depth - 1),
            arb_exp(rng, depth - 1),
            Box::new(arb_cmd(rng, depth - 1)),
        ),
        6 => Cmd::Declare(Box::new(arb_dcl(rng, depth - 1))),
        _ => {
            let n = rng.gen_range(0..=2);
            let args = (0..n).map(|_| arb_exp(rng, depth - 1)).collect();
            Cmd::Call(arb_exp(rng, depth - 1), args)
        }
    }
}

pub fn arb_dcl(rng: &mut ChaCha8Rng, depth: u32) -> Dcl {
    if depth == 0 {
        return if rng.gen_bool(0.5) {
            Dcl::Empty
        } else {
            Dcl::block(arb_cmd(rng, 0))
        };
    }
    match rng.gen_range(0..8) {
        0 => Dcl::Empty,
        1 => Dcl::block(arb_cmd(rng, depth - 1)),
        2 => Dcl::UninitVar(pool_name(rng), Type::Int, Box::new(arb_dcl(rng, depth - 1))),
        3 => Dcl::InitVar(
            pool_name(rng),
            Type::Int,
            arb_exp(rng, depth - 1),
            Box::new(arb_dcl(rng, depth - 1)),
        ),
        4 => Dcl::ConstDecl(
            pool_name(rng),
            Type::Int,
            arb_exp(rng, depth - 1),
            Box::new(arb_dcl(rng, depth - 1)),
        ),
        5 => {
            let params = (0..rng.gen_range(0..=2))
                .map(|_| Param { name: pool_name(rng), mode: Mode::In, ty: Type::Int })
                .collect();
            Dcl::ProcDecl(
                pool_name(rng),
                params,
                Box::new(arb_dcl(rng, depth - 1)),
                Box::new(arb_dcl(rng, depth - 1)),
            )
        }
        6 => {
            let n = rng.gen_range(0..=2);
            let bindings = (0..n)
                .map(|_| AliasBinding {
                    name: pool_name(rng),
                    mode: Mode::Out,
                    ty: Type::Int,
                    rhs: arb_exp(rng, depth - 1),
                })
                .collect();
            Dcl::Aliases(bindings, Box::new(arb_dcl(rng, depth - 1)))
        }
        _ => Dcl::Alias(
            AliasBinding {
                name: pool_name(rng),
                mode: Mode::InOut,
                ty: Type::Int,
                rhs: arb_exp(rng, depth - 1),
            },
            Box::new(arb_dcl(rng, depth - 1)),
        ),
    }
}

// ---------------------------------------------------------------------------
// Sequencing has no grouping syntax, so `c1; c2; c3` reparses right-nested
// regardless of how the tree was built. These normalize for comparison.

pub fn reassoc_cmd(c: Cmd) -> Cmd {
    match c {
        Cmd::Seq(a, b) => match *a {
            Cmd::Seq(a1, a2) => reassoc_cmd(Cmd::Seq(a1, Box::new(Cmd::Seq(a2, b)))),
            other => Cmd::seq(reassoc_cmd(other), reassoc_cmd(*b)),
        },
        Cmd::If(e, a, b) => Cmd::If(e, Box::new(reassoc_cmd(*a)), Box::new(reassoc_cmd(*b))),
        Cmd::While(e, a) => Cmd::While(e, Box::new(reassoc_cmd(*a))),
        Cmd::For(x, lo, hi, body) => Cmd::For(x, lo, hi, Box::new(reassoc_cmd(*body))),
        Cmd::Declare(d) => Cmd::Declare(Box::new(reassoc_dcl(*d))),
        other => other,
    }
}

pub fn reassoc_dcl(d: Dcl) -> Dcl {
    match d {
        Dcl::Block(c) => Dcl::block(reassoc_cmd(*c)),
        Dcl::UninitVar(x, t, rest) => Dcl::UninitVar(x, t, Box::new(reassoc_dcl(*rest))),
        Dcl::InitVar(x, t, e, rest) => Dcl::InitVar(x, t, e, Box::new(reassoc_dcl(*rest))),
        Dcl::ConstDecl(x, t, e, rest) => Dcl::ConstDecl(x, t, e, Box::new(reassoc_dcl(*rest))),
        Dcl::ProcDecl(p, params, body, rest) => Dcl::ProcDecl(
            p,
            params,
            Box::new(reassoc_dcl(*body)),
            Box::new(reassoc_dcl(*rest)),
        ),
        Dcl::Aliases(bs, rest) => Dcl::Aliases(bs, Box::new(reassoc_dcl(*rest))),
        Dcl::Alias(b, rest) => Dcl::Alias(b, Box::new(reassoc_dcl(*rest))),
        other => other,
    }
}

// ---------------------------------------------------------------------------
// Reference substitution.
//
// A direct scope walk: free occurrences of the target become the value,
// binders named like the target stop the walk, and a binder whose name is
// free in the value is renamed (rightmost namesake first, since that is the
// one in scope over its region) before descending. Assignment targets are
// store references, not expression positions: they are never replaced, do
// not count as free, and may end up referring to a namesake binder of the
// surrounding term once a value is spliced under it -- exactly as a write
// resolves against the innermost store binding at execution time.
//
// Freshening (used below to build alpha-variants) deliberately cannot serve
// as the first half of a substitution oracle here: renaming every binder up
// front erases the name coincidences that store references depend on.

pub struct RefFresh {
    next: u32,
}

impl RefFresh {
    pub fn new() -> RefFresh {
        RefFresh { next: 0 }
    }
    fn take(&mut self) -> Ident {
        let n = self.next;
        self.next += 1;
        Ident::new(format!("ref_{n}"))
    }
}

fn rename_exp(e: &Exp, from: &Ident, to: &Ident) -> Exp {
    match e {
        Exp::Var(x) if x == from => Exp::Var(to.clone()),
        Exp::Var(x) => Exp::Var(x.clone()),
        Exp::Val(Value::Proc(p)) => {
            if p.params.iter().any(|q| &q.name == from) {
                Exp::Val(Value::Proc(p.clone()))
            } else {
                Exp::Val(Value::Proc(ProcVal {
                    params: p.params.clone(),
                    body: Box::new(rename_dcl(&p.body, from, to)),
                }))
            }
        }
        Exp::Val(v) => Exp::Val(v.clone()),
        Exp::Bin(op, a, b) => Exp::Bin(
            *op,
            Box::new(rename_exp(a, from, to)),
            Box::new(rename_exp(b, from, to)),
        ),
        Exp::Not(a) => Exp::Not(Box::new(rename_exp(a, from, to))),
    }
}

fn rename_cmd(c: &Cmd, from: &Ident, to: &Ident) -> Cmd {
    match c {
        Cmd::Null => Cmd::Null,
        Cmd::Assign(x, e) => {
            let x = if x == from { to.clone() } else { x.clone() };
            Cmd::Assign(x, rename_exp(e, from, to))
        }
        Cmd::Seq(a, b) => Cmd::seq(rename_cmd(a, from, to), rename_cmd(b, from, to)),
        Cmd::If(e, a, b) => Cmd::If(
            rename_exp(e, from, to),
            Box::new(rename_cmd(a, from, to)),
            Box::new(rename_cmd(b, from, to)),
        ),
        Cmd::While(e, a) => Cmd::While(rename_exp(e, from, to), Box::new(rename_cmd(a, from, to))),
        Cmd::For(x, lo, hi, body) => {
            let lo = rename_exp(lo, from, to);
            let hi = rename_exp(hi, from, to);
            if x == from {
                Cmd::For(x.clone(), lo, hi, body.as_ref().clone().into())
            } else {
                Cmd::For(x.clone(), lo, hi, Box::new(rename_cmd(body, from, to)))
            }
        }
        Cmd::Declare(d) => Cmd::Declare(Box::new(rename_dcl(d, from, to))),
        Cmd::Call(f, args) => Cmd::Call(
            rename_exp(f, from, to),
            args.iter().map(|a| rename_exp(a, from, to)).collect(),
        ),
    }
}

fn rename_dcl(d: &Dcl, from: &Ident, to: &Ident) -> Dcl {
    match d {
        Dcl::Empty => Dcl::Empty,
        Dcl::Block(c) => Dcl::block(rename_cmd(c, from, to)),
        Dcl::UninitVar(x, t, rest) => {
            if x == from {
                d.clone()
            } else {
                Dcl::UninitVar(x.clone(), t.clone(), Box::new(rename_dcl(rest, from, to)))
            }
        }
        Dcl::InitVar(x, t, e, rest) => {
            let e = rename_exp(e, from, to);
            let rest = if x == from {
                rest.as_ref().clone()
            } else {
                rename_dcl(rest, from, to)
            };
            Dcl::InitVar(x.clone(), t.clone(), e, Box::new(rest))
        }
        Dcl::ConstDecl(x, t, e, rest) => {
            let e = rename_exp(e, from, to);
            let rest = if x == from {
                rest.as_ref().clone()
            } else {
                rename_dcl(rest, from, to)
            };
            Dcl::ConstDecl(x.clone(), t.clone(), e, Box::new(rest))
        }
        Dcl::ProcDecl(p, params, body, rest) => {
            let body = if params.iter().any(|q| &q.name == from) {
                body.as_ref().clone()
            } else {
                rename_dcl(body, from, to)
            };
            let rest = if p == from {
                rest.as_ref().clone()
            } else {
                rename_dcl(rest, from, to)
            };
            Dcl::ProcDecl(p.clone(), params.clone(), Box::new(body), Box::new(rest))
        }
        Dcl::Aliases(bindings, rest) => {
            let bindings: Vec<AliasBinding> = bindings
                .iter()
                .map(|b| AliasBinding {
                    name: b.name.clone(),
                    mode: b.mode,
                    ty: b.ty.clone(),
                    rhs: rename_exp(&b.rhs, from, to),
                })
                .collect();
            let rest = if bindings.iter().any(|b| &b.name == from) {
                rest.as_ref().clone()
            } else {
                rename_dcl(rest, from, to)
            };
            Dcl::Aliases(bindings, Box::new(rest))
        }
        Dcl::Alias(b, rest) => {
            let binding = AliasBinding {
                name: b.name.clone(),
                mode: b.mode,
                ty: b.ty.clone(),
                rhs: rename_exp(&b.rhs, from, to),
            };
            let rest = if b.name == *from {
                rest.as_ref().clone()
            } else {
                rename_dcl(rest, from, to)
            };
            Dcl::Alias(binding, Box::new(rest))
        }
    }
}

/// Rename every binder (and its bound occurrences) to a fresh `ref_N` name.
pub fn freshen_dcl(d: &Dcl, supply: &mut RefFresh) -> Dcl {
    match d {
        Dcl::Empty => Dcl::Empty,
        Dcl::Block(c) => Dcl::block(freshen_cmd(c, supply)),
        Dcl::UninitVar(x, t, rest) => {
            let r = supply.take();
            let rest = rename_dcl(rest, x, &r);
            Dcl::UninitVar(r, t.clone(), Box::new(freshen_dcl(&rest, supply)))
        }
        Dcl::InitVar(x, t, e, rest) => {
            let r = supply.take();
            let rest = rename_dcl(rest, x, &r);
            Dcl::InitVar(r, t.clone(), freshen_exp(e, supply), Box::new(freshen_dcl(&rest, supply)))
        }
        Dcl::ConstDecl(x, t, e, rest) => {
            let r = supply.take();
            let rest = rename_dcl(rest, x, &r);
            Dcl::ConstDecl(
                r,
                t.clone(),
                freshen_exp(e, supply),
                Box::new(freshen_dcl(&rest, supply)),
            )
        }
        Dcl::ProcDecl(p, params, body, rest) => {
            let mut body = body.as_ref().clone();
            let mut fresh_params = params.clone();
            // rename from the right: with duplicate names, the rightmost
            // binder is the one in scope over the body
            for q in fresh_params.iter_mut().rev() {
                let r = supply.take();
                body = rename_dcl(&body, &q.name, &r);
                q.name = r;
            }
            let rp = supply.take();
            let rest = rename_dcl(rest, p, &rp);
            Dcl::ProcDecl(
                rp,
                fresh_params,
                Box::new(freshen_dcl(&body, supply)),
                Box::new(freshen_dcl(&rest, supply)),
            )
        }
        Dcl::Aliases(bindings, rest) => {
            let mut rest = rest.as_ref().clone();
            let mut fresh_bindings: Vec<AliasBinding> = bindings
                .iter()
                .map(|b| AliasBinding {
                    name: b.name.clone(),
                    mode: b.mode,
                    ty: b.ty.clone(),
                    rhs: freshen_exp(&b.rhs, supply),
                })
                .collect();
            // rename from the right: with duplicate names, the rightmost
            // binder is the one in scope over the rest
            for b in fresh_bindings.iter_mut().rev() {
                let r = supply.take();
                rest = rename_dcl(&rest, &b.name, &r);
                b.name = r;
            }
            Dcl::Aliases(fresh_bindings, Box::new(freshen_dcl(&rest, supply)))
        }
        Dcl::Alias(b, rest) => {
            let r = supply.take();
            let rest = rename_dcl(rest, &b.name, &r);
            Dcl::Alias(
                AliasBinding {
                    name: r,
                    mode: b.mode,
                    ty: b.ty.clone(),
                    rhs: freshen_exp(&b.rhs, supply),
                },
                Box::new(freshen_dcl(&rest, supply)),
            )
        }
    }
}

pub fn freshen_cmd(c: &Cmd, supply: &mut RefFresh) -> Cmd {
    match c {
        Cmd::Null => Cmd::Null,
        Cmd::Assign(x, e) => Cmd::Assign(x.clone(), freshen_exp(e, supply)),
        Cmd::Seq(a, b) => Cmd::seq(freshen_cmd(a, supply), freshen_cmd(b, supply)),
        Cmd::If(e, a, b) => Cmd::If(
            freshen_exp(e, supply),
            Box::new(freshen_cmd(a, supply)),
            Box::new(freshen_cmd(b, supply)),
        ),
        Cmd::While(e, a) => Cmd::While(freshen_exp(e, supply), Box::new(freshen_cmd(a, supply))),
        Cmd::For(x, lo, hi, body) => {
            let r = supply.take();
            let body = rename_cmd(body, x, &r);
            Cmd::For(
                r,
                freshen_exp(lo, supply),
                freshen_exp(hi, supply),
                Box::new(freshen_cmd(&body, supply)),
            )
        }
        Cmd::Declare(d) => Cmd::Declare(Box::new(freshen_dcl(d, supply))),
        Cmd::Call(f, args) => Cmd::Call(
            freshen_exp(f, supply),
            args.iter().map(|a| freshen_exp(a, supply)).collect(),
        ),
    }
}

pub fn freshen_exp(e: &Exp, supply: &mut RefFresh) -> Exp {
    match e {
        Exp::Var(x) => Exp::Var(x.clone()),
        Exp::Val(Value::Proc(p)) => {
            let mut body = p.body.as_ref().clone();
            let mut params = p.params.clone();
            for q in params.iter_mut().rev() {
                let r = supply.take();
                body = rename_dcl(&body, &q.name, &r);
                q.name = r;
            }
            Exp::Val(Value::Proc(ProcVal {
                params,
                body: Box::new(freshen_dcl(&body, supply)),
            }))
        }
        Exp::Val(v) => Exp::Val(v.clone()),
        Exp::Bin(op, a, b) => Exp::Bin(
            *op,
            Box::new(freshen_exp(a, supply)),
            Box::new(freshen_exp(b, supply)),
        ),
        Exp::Not(a) => Exp::Not(Box::new(freshen_exp(a, supply))),
    }
}

// ---- free identifiers, against a scope stack ----

fn ref_free_exp(e: &Exp, scope: &mut Vec<Ident>, acc: &mut BTreeSet<Ident>) {
    match e {
        Exp::Var(y) => {
            if !scope.contains(y) {
                acc.insert(y.clone());
            }
        }
        Exp::Val(Value::Proc(p)) => {
            let depth = scope.len();
            scope.extend(p.params.iter().map(|q| q.name.clone()));
            ref_free_dcl(&p.body, scope, acc);
            scope.truncate(depth);
        }
        Exp::Val(_) => {}
        Exp::Bin(_, a, b) => {
            ref_free_exp(a, scope, acc);
            ref_free_exp(b, scope, acc);
        }
        Exp::Not(a) => ref_free_exp(a, scope, acc),
    }
}

fn ref_free_cmd(c: &Cmd, scope: &mut Vec<Ident>, acc: &mut BTreeSet<Ident>) {
    match c {
        Cmd::Null => {}
        Cmd::Assign(_, e) => ref_free_exp(e, scope, acc),
        Cmd::Seq(a, b) => {
            ref_free_cmd(a, scope, acc);
            ref_free_cmd(b, scope, acc);
        }
        Cmd::If(e, a, b) => {
            ref_free_exp(e, scope, acc);
            ref_free_cmd(a, scope, acc);
            ref_free_cmd(b, scope, acc);
        }
        Cmd::While(e, a) => {
            ref_free_exp(e, scope, acc);
            ref_free_cmd(a, scope, acc);
        }
        Cmd::For(i, lo, hi, body) => {
            ref_free_exp(lo, scope, acc);
            ref_free_exp(hi, scope, acc);
            scope.push(i.clone());
            ref_free_cmd(body, scope, acc);
            scope.pop();
        }
        Cmd::Declare(d) => ref_free_dcl(d, scope, acc),
        Cmd::Call(f, args) => {
            ref_free_exp(f, scope, acc);
            for a in args {
                ref_free_exp(a, scope, acc);
            }
        }
    }
}

fn ref_free_dcl(d: &Dcl, scope: &mut Vec<Ident>, acc: &mut BTreeSet<Ident>) {
    match d {
        Dcl::Empty => {}
        Dcl::Block(c) => ref_free_cmd(c, scope, acc),
        Dcl::UninitVar(y, _, rest) => {
            scope.push(y.clone());
            ref_free_dcl(rest, scope, acc);
            scope.pop();
        }
        Dcl::InitVar(y, _, e, rest) | Dcl::ConstDecl(y, _, e, rest) => {
            ref_free_exp(e, scope, acc);
            scope.push(y.clone());
            ref_free_dcl(rest, scope, acc);
            scope.pop();
        }
        Dcl::ProcDecl(p, params, body, rest) => {
            let depth = scope.len();
            scope.extend(params.iter().map(|q| q.name.clone()));
            ref_free_dcl(body, scope, acc);
            scope.truncate(depth);
            scope.push(p.clone());
            ref_free_dcl(rest, scope, acc);
            scope.pop();
        }
        Dcl::Aliases(bindings, rest) => {
            for b in bindings {
                ref_free_exp(&b.rhs, scope, acc);
            }
            let depth = scope.len();
            scope.extend(bindings.iter().map(|b| b.name.clone()));
            ref_free_dcl(rest, scope, acc);
            scope.truncate(depth);
        }
        Dcl::Alias(b, rest) => {
            ref_free_exp(&b.rhs, scope, acc);
            scope.push(b.name.clone());
            ref_free_dcl(rest, scope, acc);
            scope.pop();
        }
    }
}

pub fn ref_free_value(v: &Value) -> BTreeSet<Ident> {
    let mut acc = BTreeSet::new();
    if let Value::Proc(p) = v {
        let mut scope: Vec<Ident> = p.params.iter().map(|q| q.name.clone()).collect();
        ref_free_dcl(&p.body, &mut scope, &mut acc);
    }
    acc
}

// ---- the substitution walk ----

struct RefSubst<'a> {
    v: &'a Value,
    x: &'a Ident,
    v_free: BTreeSet<Ident>,
    supply: RefFresh,
}

impl RefSubst<'_> {
    /// Rename `name` over `region` if keeping it would capture a free
    /// identifier of the value.
    fn unclash(&mut self, name: &Ident, region: Dcl) -> (Ident, Dcl) {
        if self.v_free.contains(name) {
            let fresh = self.supply.take();
            let region = rename_dcl(&region, name, &fresh);
            (fresh, region)
        } else {
            (name.clone(), region)
        }
    }

    fn unclash_params(&mut self, params: &[Param], mut region: Dcl) -> (Vec<Param>, Dcl) {
        let mut out: Vec<Param> = Vec::with_capacity(params.len());
        for p in params.iter().rev() {
            let (name, renamed) = self.unclash(&p.name, region);
            region = renamed;
            out.push(Param { name, mode: p.mode, ty: p.ty.clone() });
        }
        out.reverse();
        (out, region)
    }

    fn exp(&mut self, e: &Exp) -> Exp {
        match e {
            Exp::Var(y) if y == self.x => Exp::Val(self.v.clone()),
            Exp::Var(y) => Exp::Var(y.clone()),
            Exp::Val(Value::Proc(p)) => {
                if p.params.iter().any(|q| &q.name == self.x) {
                    return e.clone();
                }
                let (params, body) = self.unclash_params(&p.params, p.body.as_ref().clone());
                let body = self.dcl(&body);
                Exp::Val(Value::Proc(ProcVal { params, body: Box::new(body) }))
            }
            Exp::Val(v) => Exp::Val(v.clone()),
            Exp::Bin(op, a, b) => Exp::Bin(*op, Box::new(self.exp(a)), Box::new(self.exp(b))),
            Exp::Not(a) => Exp::Not(Box::new(self.exp(a))),
        }
    }

    fn cmd(&mut self, c: &Cmd) -> Cmd {
        match c {
            Cmd::Null => Cmd::Null,
            Cmd::Assign(y, e) => Cmd::Assign(y.clone(), self.exp(e)),
            Cmd::Seq(a, b) => Cmd::seq(self.cmd(a), self.cmd(b)),
            Cmd::If(e, a, b) => {
                Cmd::If(self.exp(e), Box::new(self.cmd(a)), Box::new(self.cmd(b)))
            }
            Cmd::While(e, a) => Cmd::While(self.exp(e), Box::new(self.cmd(a))),
            Cmd::For(i, lo, hi, body) => {
                let lo = self.exp(lo);
                let hi = self.exp(hi);
                if i == self.x {
                    return Cmd::For(i.clone(), lo, hi, body.clone());
                }
                let (i, body) = if self.v_free.contains(i) {
                    let fresh = self.supply.take();
                    (fresh.clone(), rename_cmd(body, i, &fresh))
                } else {
                    (i.clone(), body.as_ref().clone())
                };
                Cmd::For(i, lo, hi, Box::new(self.cmd(&body)))
            }
            Cmd::Declare(d) => Cmd::Declare(Box::new(self.dcl(d))),
            Cmd::Call(f, args) => {
                Cmd::Call(self.exp(f), args.iter().map(|a| self.exp(a)).collect())
            }
        }
    }

    fn dcl(&mut self, d: &Dcl) -> Dcl {
        match d {
            Dcl::Empty => Dcl::Empty,
            Dcl::Block(c) => Dcl::block(self.cmd(c)),
            Dcl::UninitVar(y, t, rest) => {
                if y == self.x {
                    return d.clone();
                }
                let (y, rest) = self.unclash(y, rest.as_ref().clone());
                Dcl::UninitVar(y, t.clone(), Box::new(self.dcl(&rest)))
            }
            Dcl::InitVar(y, t, e, rest) => {
                let e = self.exp(e);
                if y == self.x {
                    return Dcl::InitVar(y.clone(), t.clone(), e, rest.clone());
                }
                let (y, rest) = self.unclash(y, rest.as_ref().clone());
                Dcl::InitVar(y, t.clone(), e, Box::new(self.dcl(&rest)))
            }
            Dcl::ConstDecl(y, t, e, rest) => {
                let e = self.exp(e);
                if y == self.x {
                    return Dcl::ConstDecl(y.clone(), t.clone(), e, rest.clone());
                }
                let (y, rest) = self.unclash(y, rest.as_ref().clone());
                Dcl::ConstDecl(y, t.clone(), e, Box::new(self.dcl(&rest)))
            }
            Dcl::ProcDecl(p, params, body, rest) => {
                let (params, body) = if params.iter().any(|q| &q.name == self.x) {
                    (params.clone(), body.as_ref().clone())
                } else {
                    let (params, body) = self.unclash_params(params, body.as_ref().clone());
                    let body = self.dcl(&body);
                    (params, body)
                };
                if p == self.x {
                    return Dcl::ProcDecl(p.clone(), params, Box::new(body), rest.clone());
                }
                let (p, rest) = self.unclash(p, rest.as_ref().clone());
                Dcl::ProcDecl(p, params, Box::new(body), Box::new(self.dcl(&rest)))
            }
            Dcl::Aliases(bindings, rest) => {
                let shadowed = bindings.iter().any(|b| &b.name == self.x);
                let bindings: Vec<AliasBinding> = bindings
                    .iter()
                    .map(|b| AliasBinding {
                        name: b.name.clone(),
                        mode: b.mode,
                        ty: b.ty.clone(),
                        rhs: self.exp(&b.rhs),
                    })
                    .collect();
                if shadowed {
                    return Dcl::Aliases(bindings, rest.clone());
                }
                let mut rest = rest.as_ref().clone();
                let mut out: Vec<AliasBinding> = Vec::with_capacity(bindings.len());
                for b in bindings.into_iter().rev() {
                    let (name, renamed) = self.unclash(&b.name, rest);
                    rest = renamed;
                    out.push(AliasBinding { name, ..b });
                }
                out.reverse();
                Dcl::Aliases(out, Box::new(self.dcl(&rest)))
            }
            Dcl::Alias(b, rest) => {
                let b = AliasBinding {
                    name: b.name.clone(),
                    mode: b.mode,
                    ty: b.ty.clone(),
                    rhs: self.exp(&b.rhs),
                };
                if b.name == *self.x {
                    return Dcl::Alias(b, rest.clone());
                }
                let (name, rest) = self.unclash(&b.name, rest.as_ref().clone());
                Dcl::Alias(AliasBinding { name, ..b }, Box::new(self.dcl(&rest)))
            }
        }
    }
}

fn ref_subst<'a>(v: &'a Value, x: &'a Ident) -> RefSubst<'a> {
    RefSubst { v, x, v_free: ref_free_value(v), supply: RefFresh::new() }
}

pub fn ref_subst_cmd(c: &Cmd, v: &Value, x: &Ident) -> Cmd {
    ref_subst(v, x).cmd(c)
}

pub fn ref_subst_dcl(d: &Dcl, v: &Value, x: &Ident) -> Dcl {
    ref_subst(v, x).dcl(d)
}

pub fn ref_subst_exp(e: &Exp, v: &Value, x: &Ident) -> Exp {
    ref_subst(v, x).exp(e)
}

// ---------------------------------------------------------------------------
// Canonical renaming for alpha-comparison.
//
// Binders are renamed to `c0`, `c1`, ... in traversal order; free variables
// keep their names. Two terms are alpha-equivalent exactly when their
// canonical forms are structurally equal.

pub struct Canon {
    next: u32,
    scope: Vec<(Ident, Ident)>,
}

impl Canon {
    pub fn new() -> Canon {
        Canon { next: 0, scope: Vec::new() }
    }

    fn bind(&mut self, x: &Ident) -> Ident {
        let c = Ident::new(format!("c{}", self.next));
        self.next += 1;
        self.scope.push((x.clone(), c.clone()));
        c
    }

    fn unbind(&mut self, n: usize) {
        for _ in 0..n {
            self.scope.pop();
        }
    }

    fn resolve(&self, x: &Ident) -> Ident {
        for (orig, canon) in self.scope.iter().rev() {
            if orig == x {
                return canon.clone();
            }
        }
        x.clone()
    }

    pub fn exp(&mut self, e: &Exp) -> Exp {
        match e {
            Exp::Var(x) => Exp::Var(self.resolve(x)),
            Exp::Val(Value::Proc(p)) => {
                let params: Vec<Param> = p
                    .params
                    .iter()
                    .map(|q| Param { name: self.bind(&q.name), mode: q.mode, ty: q.ty.clone() })
                    .collect();
                let body = self.dcl(&p.body);
                self.unbind(params.len());
                Exp::Val(Value::Proc(ProcVal { params, body: Box::new(body) }))
            }
            Exp::Val(v) => Exp::Val(v.clone()),
            Exp::Bin(op, a, b) => {
                let a = self.exp(a);
                let b = self.exp(b);
                Exp::Bin(*op, Box::new(a), Box::new(b))
            }
            Exp::Not(a) => Exp::Not(Box::new(self.exp(a))),
        }
    }

    pub fn cmd(&mut self, c: &Cmd) -> Cmd {
        match c {
            Cmd::Null => Cmd::Null,
            Cmd::Assign(x, e) => Cmd::Assign(self.resolve(x), self.exp(e)),
            Cmd::Seq(a, b) => {
                let a = self.cmd(a);
                let b = self.cmd(b);
                Cmd::seq(a, b)
            }
            Cmd::If(e, a, b) => {
                let e = self.exp(e);
                let a = self.cmd(a);
                let b = self.cmd(b);
                Cmd::If(e, Box::new(a), Box::new(b))
            }
            Cmd::While(e, a) => {
                let e = self.exp(e);
                let a = self.cmd(a);
                Cmd::While(e, Box::new(a))
            }
            Cmd::For(x, lo, hi, body) => {
                let lo = self.exp(lo);
                let hi = self.exp(hi);
                let cx = self.bind(x);
                let body = self.cmd(body);
                self.unbind(1);
                Cmd::For(cx, lo, hi, Box::new(body))
            }
            Cmd::Declare(d) => Cmd::Declare(Box::new(self.dcl(d))),
            Cmd::Call(f, args) => {
                let f = self.exp(f);
                let args = args.iter().map(|a| self.exp(a)).collect();
                Cmd::Call(f, args)
            }
        }
    }

    pub fn dcl(&mut self, d: &Dcl) -> Dcl {
        match d {
            Dcl::Empty => Dcl::Empty,
            Dcl::Block(c) => Dcl::block(self.cmd(c)),
            Dcl::UninitVar(x, t, rest) => {
                let cx = self.bind(x);
                let rest = self.dcl(rest);
                self.unbind(1);
                Dcl::UninitVar(cx, t.clone(), Box::new(rest))
            }
            Dcl::InitVar(x, t, e, rest) => {
                let e = self.exp(e);
                let cx = self.bind(x);
                let rest = self.dcl(rest);
                self.unbind(1);
                Dcl::InitVar(cx, t.clone(), e, Box::new(rest))
            }
            Dcl::ConstDecl(x, t, e, rest) => {
                let e = self.exp(e);
                let cx = self.bind(x);
                let rest = self.dcl(rest);
                self.unbind(1);
                Dcl::ConstDecl(cx, t.clone(), e, Box::new(rest))
            }
            Dcl::ProcDecl(p, params, body, rest) => {
                let cparams: Vec<Param> = params
                    .iter()
                    .map(|q| Param { name: self.bind(&q.name), mode: q.mode, ty: q.ty.clone() })
                    .collect();
                let body = self.dcl(body);
                self.unbind(cparams.len());
                let cp = self.bind(p);
                let rest = self.dcl(rest);
                self.unbind(1);
                Dcl::ProcDecl(cp, cparams, Box::new(body), Box::new(rest))
            }
            Dcl::Aliases(bindings, rest) => {
                let rhss: Vec<Exp> = bindings.iter().map(|b| self.exp(&b.rhs)).collect();
                let mut cbindings = Vec::new();
                for (b, rhs) in bindings.iter().zip(rhss) {
                    cbindings.push(AliasBinding {
                        name: self.bind(&b.name),
                        mode: b.mode,
                        ty: b.ty.clone(),
                        rhs,
                    });
                }
                let rest = self.dcl(rest);
                self.unbind(cbindings.len());
                Dcl::Aliases(cbindings, Box::new(rest))
            }
            Dcl::Alias(b, rest) => {
                let rhs = self.exp(&b.rhs);
                let cb = AliasBinding {
                    name: self.bind(&b.name),
                    mode: b.mode,
                    ty: b.ty.clone(),
                    rhs,
                };
                let rest = self.dcl(rest);
                self.unbind(1);
                Dcl::Alias(cb, Box::new(rest))
            }
        }
    }
}

pub fn canon_exp(e: &Exp) -> Exp {
    Canon::new().exp(e)
}

pub fn canon_cmd(c: &Cmd) -> Cmd {
    Canon::new().cmd(c)
}

pub fn canon_dcl(d: &Dcl) -> Dcl {
    Canon::new().dcl(d)
}
