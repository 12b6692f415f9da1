//! Free identifiers, capture-avoiding substitution of values for
//! identifiers, and alpha equivalence.
//!
//! Binding structure: `for` binds its index in the loop body; variable,
//! constant and alias declarations bind their name in the continuation but
//! not in their own initializer; procedure declarations bind the parameters
//! in the body and the procedure name in the continuation; procedure
//! literals bind their parameters in the body; an alias group binds all its
//! names in the continuation, while every right-hand side stays outside.
//!
//! Assignment targets and call-site out arguments refer to store locations,
//! not substitutable expression positions, so substitution leaves them in
//! place and `free_idents` does not report a bare assignment target.

use crate::syntax::*;
use std::collections::BTreeSet;

/// Source of fresh identifiers for capture avoidance. Emitted names have the
/// shape `<base>__<n>`; the lexer rejects `__` in source identifiers, so a
/// fresh name can never collide with one the programmer wrote. The pool
/// additionally guards against names constructed programmatically.
#[derive(Clone, Debug, Default)]
pub struct FreshSupply {
    counter: u64,
    used: BTreeSet<Ident>,
}

impl FreshSupply {
    pub fn new() -> FreshSupply {
        FreshSupply::default()
    }

    /// A supply that will avoid every identifier in `pool`.
    pub fn avoiding(pool: impl IntoIterator<Item = Ident>) -> FreshSupply {
        FreshSupply { counter: 0, used: pool.into_iter().collect() }
    }

    pub fn fresh(&mut self, base: &Ident) -> Ident {
        loop {
            self.counter += 1;
            let candidate = Ident::new(format!("{base}__{}", self.counter));
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
        }
    }
}

/// Binding-aware operations shared by the three syntax categories.
pub trait Term: Sized + Clone {
    /// Identifiers with at least one free occurrence.
    fn free_idents(&self) -> BTreeSet<Ident>;

    /// Every identifier appearing anywhere: free, bound or binding.
    fn all_idents(&self) -> BTreeSet<Ident>;

    /// Replace free occurrences of `target` by the value `v`.
    fn subst(&self, v: &Value, target: &Ident, supply: &mut FreshSupply) -> Self;

    /// Structural equality modulo consistent renaming of bound names.
    fn alpha_eq(&self, other: &Self) -> bool;
}

impl Term for Exp {
    fn free_idents(&self) -> BTreeSet<Ident> {
        let mut acc = BTreeSet::new();
        free_exp(self, &mut acc);
        acc
    }

    fn all_idents(&self) -> BTreeSet<Ident> {
        let mut acc = BTreeSet::new();
        all_exp(self, &mut acc);
        acc
    }

    fn subst(&self, v: &Value, target: &Ident, supply: &mut FreshSupply) -> Exp {
        subst_exp(self.clone(), v, target, supply)
    }

    fn alpha_eq(&self, other: &Self) -> bool {
        let mut cmp = AlphaCmp::new();
        cmp.exp(self, other)
    }
}

impl Term for Cmd {
    fn free_idents(&self) -> BTreeSet<Ident> {
        let mut acc = BTreeSet::new();
        free_cmd(self, &mut acc);
        acc
    }

    fn all_idents(&self) -> BTreeSet<Ident> {
        let mut acc = BTreeSet::new();
        all_cmd(self, &mut acc);
        acc
    }

    fn subst(&self, v: &Value, target: &Ident, supply: &mut FreshSupply) -> Cmd {
        subst_cmd(self.clone(), v, target, supply)
    }

    fn alpha_eq(&self, other: &Self) -> bool {
        let mut cmp = AlphaCmp::new();
        cmp.cmd(self, other)
    }
}

impl Term for Dcl {
    fn free_idents(&self) -> BTreeSet<Ident> {
        let mut acc = BTreeSet::new();
        free_dcl(self, &mut acc);
        acc
    }

    fn all_idents(&self) -> BTreeSet<Ident> {
        let mut acc = BTreeSet::new();
        all_dcl(self, &mut acc);
        acc
    }

    fn subst(&self, v: &Value, target: &Ident, supply: &mut FreshSupply) -> Dcl {
        subst_dcl(self.clone(), v, target, supply)
    }

    fn alpha_eq(&self, other: &Self) -> bool {
        let mut cmp = AlphaCmp::new();
        cmp.dcl(self, other)
    }
}

// ---- free identifiers ----

fn free_exp(e: &Exp, acc: &mut BTreeSet<Ident>) {
    match e {
        Exp::Var(x) => {
            acc.insert(x.clone());
        }
        Exp::Val(Value::Proc(p)) => {
            let mut inner = BTreeSet::new();
            free_dcl(&p.body, &mut inner);
            for param in &p.params {
                inner.remove(&param.name);
            }
            acc.extend(inner);
        }
        Exp::Val(_) => {}
        Exp::Bin(_, l, r) => {
            free_exp(l, acc);
            free_exp(r, acc);
        }
        Exp::Not(inner) => free_exp(inner, acc),
    }
}

fn free_cmd(c: &Cmd, acc: &mut BTreeSet<Ident>) {
    match c {
        Cmd::Null => {}
        Cmd::Assign(_, e) => free_exp(e, acc),
        Cmd::Seq(a, b) => {
            free_cmd(a, acc);
            free_cmd(b, acc);
        }
        Cmd::If(e, c1, c2) => {
            free_exp(e, acc);
            free_cmd(c1, acc);
            free_cmd(c2, acc);
        }
        Cmd::While(e, body) => {
            free_exp(e, acc);
            free_cmd(body, acc);
        }
        Cmd::For(x, lo, hi, body) => {
            free_exp(lo, acc);
            free_exp(hi, acc);
            let mut inner = BTreeSet::new();
            free_cmd(body, &mut inner);
            inner.remove(x);
            acc.extend(inner);
        }
        Cmd::Declare(d) => free_dcl(d, acc),
        Cmd::Call(f, args) => {
            free_exp(f, acc);
            for a in args {
                free_exp(a, acc);
            }
        }
    }
}

fn free_dcl(d: &Dcl, acc: &mut BTreeSet<Ident>) {
    match d {
        Dcl::Empty => {}
        Dcl::Block(c) => free_cmd(c, acc),
        Dcl::UninitVar(x, _, rest) => {
            let mut inner = BTreeSet::new();
            free_dcl(rest, &mut inner);
            inner.remove(x);
            acc.extend(inner);
        }
        Dcl::InitVar(x, _, e, rest) | Dcl::ConstDecl(x, _, e, rest) => {
            free_exp(e, acc);
            let mut inner = BTreeSet::new();
            free_dcl(rest, &mut inner);
            inner.remove(x);
            acc.extend(inner);
        }
        Dcl::ProcDecl(p, params, body, rest) => {
            let mut inner = BTreeSet::new();
            free_dcl(body, &mut inner);
            for param in params {
                inner.remove(&param.name);
            }
            acc.extend(inner);
            let mut after = BTreeSet::new();
            free_dcl(rest, &mut after);
            after.remove(p);
            acc.extend(after);
        }
        Dcl::Aliases(bindings, rest) => {
            for b in bindings {
                free_exp(&b.rhs, acc);
            }
            let mut inner = BTreeSet::new();
            free_dcl(rest, &mut inner);
            for b in bindings {
                inner.remove(&b.name);
            }
            acc.extend(inner);
        }
        Dcl::Alias(b, rest) => {
            free_exp(&b.rhs, acc);
            let mut inner = BTreeSet::new();
            free_dcl(rest, &mut inner);
            inner.remove(&b.name);
            acc.extend(inner);
        }
    }
}

// ---- every identifier, bound or not ----

fn all_exp(e: &Exp, acc: &mut BTreeSet<Ident>) {
    match e {
        Exp::Var(x) => {
            acc.insert(x.clone());
        }
        Exp::Val(Value::Proc(p)) => {
            for param in &p.params {
                acc.insert(param.name.clone());
            }
            all_dcl(&p.body, acc);
        }
        Exp::Val(_) => {}
        Exp::Bin(_, l, r) => {
            all_exp(l, acc);
            all_exp(r, acc);
        }
        Exp::Not(inner) => all_exp(inner, acc),
    }
}

fn all_cmd(c: &Cmd, acc: &mut BTreeSet<Ident>) {
    match c {
        Cmd::Null => {}
        Cmd::Assign(x, e) => {
            acc.insert(x.clone());
            all_exp(e, acc);
        }
        Cmd::Seq(a, b) => {
            all_cmd(a, acc);
            all_cmd(b, acc);
        }
        Cmd::If(e, c1, c2) => {
            all_exp(e, acc);
            all_cmd(c1, acc);
            all_cmd(c2, acc);
        }
        Cmd::While(e, body) => {
            all_exp(e, acc);
            all_cmd(body, acc);
        }
        Cmd::For(x, lo, hi, body) => {
            acc.insert(x.clone());
            all_exp(lo, acc);
            all_exp(hi, acc);
            all_cmd(body, acc);
        }
        Cmd::Declare(d) => all_dcl(d, acc),
        Cmd::Call(f, args) => {
            all_exp(f, acc);
            for a in args {
                all_exp(a, acc);
            }
        }
    }
}

fn all_dcl(d: &Dcl, acc: &mut BTreeSet<Ident>) {
    match d {
        Dcl::Empty => {}
        Dcl::Block(c) => all_cmd(c, acc),
        Dcl::UninitVar(x, _, rest) => {
            acc.insert(x.clone());
            all_dcl(rest, acc);
        }
        Dcl::InitVar(x, _, e, rest) | Dcl::ConstDecl(x, _, e, rest) => {
            acc.insert(x.clone());
            all_exp(e, acc);
            all_dcl(rest, acc);
        }
        Dcl::ProcDecl(p, params, body, rest) => {
            acc.insert(p.clone());
            for param in params {
                acc.insert(param.name.clone());
            }
            all_dcl(body, acc);
            all_dcl(rest, acc);
        }
        Dcl::Aliases(bindings, rest) => {
            for b in bindings {
                acc.insert(b.name.clone());
                all_exp(&b.rhs, acc);
            }
            all_dcl(rest, acc);
        }
        Dcl::Alias(b, rest) => {
            acc.insert(b.name.clone());
            all_exp(&b.rhs, acc);
            all_dcl(rest, acc);
        }
    }
}

// ---- renaming of a free identifier (used for capture avoidance) ----
// `new` is always a fresh name, so renaming itself cannot capture.

fn rename_exp(e: Exp, old: &Ident, new: &Ident) -> Exp {
    match e {
        Exp::Var(x) => {
            if &x == old {
                Exp::Var(new.clone())
            } else {
                Exp::Var(x)
            }
        }
        Exp::Val(Value::Proc(p)) => {
            if p.params.iter().any(|q| &q.name == old) {
                Exp::Val(Value::Proc(p))
            } else {
                let body = rename_dcl(*p.body, old, new);
                Exp::Val(Value::Proc(ProcVal { params: p.params, body: Box::new(body) }))
            }
        }
        Exp::Val(v) => Exp::Val(v),
        Exp::Bin(op, l, r) => Exp::Bin(
            op,
            Box::new(rename_exp(*l, old, new)),
            Box::new(rename_exp(*r, old, new)),
        ),
        Exp::Not(inner) => Exp::Not(Box::new(rename_exp(*inner, old, new))),
    }
}

fn rename_cmd(c: Cmd, old: &Ident, new: &Ident) -> Cmd {
    match c {
        Cmd::Null => Cmd::Null,
        Cmd::Assign(x, e) => {
            let x = if &x == old { new.clone() } else { x };
            Cmd::Assign(x, rename_exp(e, old, new))
        }
        Cmd::Seq(a, b) => Cmd::Seq(
            Box::new(rename_cmd(*a, old, new)),
            Box::new(rename_cmd(*b, old, new)),
        ),
        Cmd::If(e, c1, c2) => Cmd::If(
            rename_exp(e, old, new),
            Box::new(rename_cmd(*c1, old, new)),
            Box::new(rename_cmd(*c2, old, new)),
        ),
        Cmd::While(e, body) => Cmd::While(
            rename_exp(e, old, new),
            Box::new(rename_cmd(*body, old, new)),
        ),
        Cmd::For(x, lo, hi, body) => {
            let lo = rename_exp(lo, old, new);
            let hi = rename_exp(hi, old, new);
            let body = if &x == old { *body } else { rename_cmd(*body, old, new) };
            Cmd::For(x, lo, hi, Box::new(body))
        }
        Cmd::Declare(d) => Cmd::Declare(Box::new(rename_dcl(*d, old, new))),
        Cmd::Call(f, args) => Cmd::Call(
            rename_exp(f, old, new),
            args.into_iter().map(|a| rename_exp(a, old, new)).collect(),
        ),
    }
}

fn rename_dcl(d: Dcl, old: &Ident, new: &Ident) -> Dcl {
    match d {
        Dcl::Empty => Dcl::Empty,
        Dcl::Block(c) => Dcl::Block(Box::new(rename_cmd(*c, old, new))),
        Dcl::UninitVar(x, t, rest) => {
            let rest = if &x == old { *rest } else { rename_dcl(*rest, old, new) };
            Dcl::UninitVar(x, t, Box::new(rest))
        }
        Dcl::InitVar(x, t, e, rest) => {
            let e = rename_exp(e, old, new);
            let rest = if &x == old { *rest } else { rename_dcl(*rest, old, new) };
            Dcl::InitVar(x, t, e, Box::new(rest))
        }
        Dcl::ConstDecl(x, t, e, rest) => {
            let e = rename_exp(e, old, new);
            let rest = if &x == old { *rest } else { rename_dcl(*rest, old, new) };
            Dcl::ConstDecl(x, t, e, Box::new(rest))
        }
        Dcl::ProcDecl(p, params, body, rest) => {
            let body = if params.iter().any(|q| &q.name == old) {
                *body
            } else {
                rename_dcl(*body, old, new)
            };
            let rest = if &p == old { *rest } else { rename_dcl(*rest, old, new) };
            Dcl::ProcDecl(p, params, Box::new(body), Box::new(rest))
        }
        Dcl::Aliases(bindings, rest) => {
            let shadowed = bindings.iter().any(|b| &b.name == old);
            let bindings = bindings
                .into_iter()
                .map(|b| AliasBinding { rhs: rename_exp(b.rhs, old, new), ..b })
                .collect();
            let rest = if shadowed { *rest } else { rename_dcl(*rest, old, new) };
            Dcl::Aliases(bindings, Box::new(rest))
        }
        Dcl::Alias(b, rest) => {
            let shadowed = &b.name == old;
            let b = AliasBinding { rhs: rename_exp(b.rhs, old, new), ..b };
            let rest = if shadowed { *rest } else { rename_dcl(*rest, old, new) };
            Dcl::Alias(b, Box::new(rest))
        }
    }
}

// ---- substitution ----

/// Rename the given binder if it would capture a free identifier of the
/// substituted value. Returns the possibly renamed name and scoped part.
fn unclash_dcl(
    name: Ident,
    scoped: Dcl,
    v_free: &BTreeSet<Ident>,
    supply: &mut FreshSupply,
) -> (Ident, Dcl) {
    if v_free.contains(&name) {
        let fresh = supply.fresh(&name);
        let scoped = rename_dcl(scoped, &name, &fresh);
        (fresh, scoped)
    } else {
        (name, scoped)
    }
}

// Renaming walks the binder list from the right: with duplicate names the
// rightmost binder is the one in scope over the body, so it must be renamed
// first or its occurrences would be re-bound to an earlier namesake.
fn unclash_params_dcl(
    params: Vec<Param>,
    body: Dcl,
    v_free: &BTreeSet<Ident>,
    supply: &mut FreshSupply,
) -> (Vec<Param>, Dcl) {
    let mut body = body;
    let mut out = Vec::with_capacity(params.len());
    for p in params.into_iter().rev() {
        if v_free.contains(&p.name) {
            let fresh = supply.fresh(&p.name);
            body = rename_dcl(body, &p.name, &fresh);
            out.push(Param { name: fresh, ..p });
        } else {
            out.push(p);
        }
    }
    out.reverse();
    (out, body)
}

fn subst_exp(e: Exp, v: &Value, x: &Ident, supply: &mut FreshSupply) -> Exp {
    match e {
        Exp::Var(y) => {
            if &y == x {
                Exp::Val(v.clone())
            } else {
                Exp::Var(y)
            }
        }
        Exp::Val(Value::Proc(p)) => {
            if p.params.iter().any(|q| &q.name == x) {
                return Exp::Val(Value::Proc(p));
            }
            let v_free = value_free_idents(v);
            let (params, body) = unclash_params_dcl(p.params, *p.body, &v_free, supply);
            let body = subst_dcl(body, v, x, supply);
            Exp::Val(Value::Proc(ProcVal { params, body: Box::new(body) }))
        }
        Exp::Val(k) => Exp::Val(k),
        Exp::Bin(op, l, r) => Exp::Bin(
            op,
            Box::new(subst_exp(*l, v, x, supply)),
            Box::new(subst_exp(*r, v, x, supply)),
        ),
        Exp::Not(inner) => Exp::Not(Box::new(subst_exp(*inner, v, x, supply))),
    }
}

fn subst_cmd(c: Cmd, v: &Value, x: &Ident, supply: &mut FreshSupply) -> Cmd {
    match c {
        Cmd::Null => Cmd::Null,
        Cmd::Assign(y, e) => Cmd::Assign(y, subst_exp(e, v, x, supply)),
        Cmd::Seq(a, b) => Cmd::Seq(
            Box::new(subst_cmd(*a, v, x, supply)),
            Box::new(subst_cmd(*b, v, x, supply)),
        ),
        Cmd::If(e, c1, c2) => Cmd::If(
            subst_exp(e, v, x, supply),
            Box::new(subst_cmd(*c1, v, x, supply)),
            Box::new(subst_cmd(*c2, v, x, supply)),
        ),
        Cmd::While(e, body) => Cmd::While(
            subst_exp(e, v, x, supply),
            Box::new(subst_cmd(*body, v, x, supply)),
        ),
        Cmd::For(i, lo, hi, body) => {
            let lo = subst_exp(lo, v, x, supply);
            let hi = subst_exp(hi, v, x, supply);
            if &i == x {
                return Cmd::For(i, lo, hi, body);
            }
            let v_free = value_free_idents(v);
            let (i, body) = if v_free.contains(&i) {
                let fresh = supply.fresh(&i);
                (fresh.clone(), rename_cmd(*body, &i, &fresh))
            } else {
                (i, *body)
            };
            Cmd::For(i, lo, hi, Box::new(subst_cmd(body, v, x, supply)))
        }
        Cmd::Declare(d) => Cmd::Declare(Box::new(subst_dcl(*d, v, x, supply))),
        Cmd::Call(f, args) => Cmd::Call(
            subst_exp(f, v, x, supply),
            args.into_iter().map(|a| subst_exp(a, v, x, supply)).collect(),
        ),
    }
}

fn subst_dcl(d: Dcl, v: &Value, x: &Ident, supply: &mut FreshSupply) -> Dcl {
    match d {
        Dcl::Empty => Dcl::Empty,
        Dcl::Block(c) => Dcl::Block(Box::new(subst_cmd(*c, v, x, supply))),
        Dcl::UninitVar(y, t, rest) => {
            if &y == x {
                return Dcl::UninitVar(y, t, rest);
            }
            let (y, rest) = unclash_dcl(y, *rest, &value_free_idents(v), supply);
            Dcl::UninitVar(y, t, Box::new(subst_dcl(rest, v, x, supply)))
        }
        Dcl::InitVar(y, t, e, rest) => {
            let e = subst_exp(e, v, x, supply);
            if &y == x {
                return Dcl::InitVar(y, t, e, rest);
            }
            let (y, rest) = unclash_dcl(y, *rest, &value_free_idents(v), supply);
            Dcl::InitVar(y, t, e, Box::new(subst_dcl(rest, v, x, supply)))
        }
        Dcl::ConstDecl(y, t, e, rest) => {
            let e = subst_exp(e, v, x, supply);
            if &y == x {
                return Dcl::ConstDecl(y, t, e, rest);
            }
            let (y, rest) = unclash_dcl(y, *rest, &value_free_idents(v), supply);
            Dcl::ConstDecl(y, t, e, Box::new(subst_dcl(rest, v, x, supply)))
        }
        Dcl::ProcDecl(p, params, body, rest) => {
            let v_free = value_free_idents(v);
            let (params, body) = if params.iter().any(|q| &q.name == x) {
                (params, *body)
            } else {
                let (params, body) = unclash_params_dcl(params, *body, &v_free, supply);
                (params, subst_dcl(body, v, x, supply))
            };
            if &p == x {
                return Dcl::ProcDecl(p, params, Box::new(body), rest);
            }
            let (p, rest) = unclash_dcl(p, *rest, &v_free, supply);
            Dcl::ProcDecl(p, params, Box::new(body), Box::new(subst_dcl(rest, v, x, supply)))
        }
        Dcl::Aliases(bindings, rest) => {
            let shadowed = bindings.iter().any(|b| &b.name == x);
            let bindings: Vec<AliasBinding> = bindings
                .into_iter()
                .map(|b| AliasBinding { rhs: subst_exp(b.rhs, v, x, supply), ..b })
                .collect();
            if shadowed {
                return Dcl::Aliases(bindings, rest);
            }
            // Right to left, as in unclash_params_dcl: the rightmost of two
            // namesake bindings is the one the continuation sees.
            let v_free = value_free_idents(v);
            let mut rest = *rest;
            let mut out = Vec::with_capacity(bindings.len());
            for b in bindings.into_iter().rev() {
                if v_free.contains(&b.name) {
                    let fresh = supply.fresh(&b.name);
                    rest = rename_dcl(rest, &b.name, &fresh);
                    out.push(AliasBinding { name: fresh, ..b });
                } else {
                    out.push(b);
                }
            }
            out.reverse();
            Dcl::Aliases(out, Box::new(subst_dcl(rest, v, x, supply)))
        }
        Dcl::Alias(b, rest) => {
            let b = AliasBinding { rhs: subst_exp(b.rhs, v, x, supply), ..b };
            if &b.name == x {
                return Dcl::Alias(b, rest);
            }
            let (name, rest) = unclash_dcl(b.name.clone(), *rest, &value_free_idents(v), supply);
            let b = AliasBinding { name, ..b };
            Dcl::Alias(b, Box::new(subst_dcl(rest, v, x, supply)))
        }
    }
}

fn value_free_idents(v: &Value) -> BTreeSet<Ident> {
    match v {
        Value::Proc(p) => {
            let mut inner = BTreeSet::new();
            free_dcl(&p.body, &mut inner);
            for param in &p.params {
                inner.remove(&param.name);
            }
            inner
        }
        _ => BTreeSet::new(),
    }
}

// ---- alpha equivalence ----

/// Pairwise comparison under two binder stacks: an occurrence matches when
/// both sides resolve to the same binder depth, or both are free with the
/// same name.
struct AlphaCmp {
    left: Vec<Ident>,
    right: Vec<Ident>,
}

impl AlphaCmp {
    fn new() -> AlphaCmp {
        AlphaCmp { left: Vec::new(), right: Vec::new() }
    }

    fn occurrence(&self, a: &Ident, b: &Ident) -> bool {
        let ia = self.left.iter().rev().position(|n| n == a);
        let ib = self.right.iter().rev().position(|n| n == b);
        match (ia, ib) {
            (Some(i), Some(j)) => i == j,
            (None, None) => a == b,
            _ => false,
        }
    }

    fn scoped<R>(&mut self, a: &[Ident], b: &[Ident], f: impl FnOnce(&mut Self) -> R) -> R {
        self.left.extend_from_slice(a);
        self.right.extend_from_slice(b);
        let r = f(self);
        self.left.truncate(self.left.len() - a.len());
        self.right.truncate(self.right.len() - b.len());
        r
    }

    fn exp(&mut self, a: &Exp, b: &Exp) -> bool {
        match (a, b) {
            (Exp::Var(x), Exp::Var(y)) => self.occurrence(x, y),
            (Exp::Val(u), Exp::Val(w)) => self.value(u, w),
            (Exp::Bin(op1, l1, r1), Exp::Bin(op2, l2, r2)) => {
                op1 == op2 && self.exp(l1, l2) && self.exp(r1, r2)
            }
            (Exp::Not(x), Exp::Not(y)) => self.exp(x, y),
            _ => false,
        }
    }

    fn value(&mut self, a: &Value, b: &Value) -> bool {
        match (a, b) {
            (Value::Int(x), Value::Int(y)) => x == y,
            (Value::Bool(x), Value::Bool(y)) => x == y,
            (Value::Proc(p), Value::Proc(q)) => {
                if p.params.len() != q.params.len() {
                    return false;
                }
                let sig_eq = p
                    .params
                    .iter()
                    .zip(&q.params)
                    .all(|(x, y)| x.mode == y.mode && x.ty == y.ty);
                if !sig_eq {
                    return false;
                }
                let pa: Vec<Ident> = p.params.iter().map(|x| x.name.clone()).collect();
                let pb: Vec<Ident> = q.params.iter().map(|x| x.name.clone()).collect();
                self.scoped(&pa, &pb, |s| s.dcl(&p.body, &q.body))
            }
            _ => false,
        }
    }

    fn cmd(&mut self, a: &Cmd, b: &Cmd) -> bool {
        match (a, b) {
            (Cmd::Null, Cmd::Null) => true,
            (Cmd::Assign(x, e1), Cmd::Assign(y, e2)) => {
                self.occurrence(x, y) && self.exp(e1, e2)
            }
            (Cmd::Seq(a1, b1), Cmd::Seq(a2, b2)) => self.cmd(a1, a2) && self.cmd(b1, b2),
            (Cmd::If(e1, t1, f1), Cmd::If(e2, t2, f2)) => {
                self.exp(e1, e2) && self.cmd(t1, t2) && self.cmd(f1, f2)
            }
            (Cmd::While(e1, c1), Cmd::While(e2, c2)) => {
                self.exp(e1, e2) && self.cmd(c1, c2)
            }
            (Cmd::For(x, lo1, hi1, c1), Cmd::For(y, lo2, hi2, c2)) => {
                self.exp(lo1, lo2)
                    && self.exp(hi1, hi2)
                    && self.scoped(&[x.clone()], &[y.clone()], |s| s.cmd(c1, c2))
            }
            (Cmd::Declare(d1), Cmd::Declare(d2)) => self.dcl(d1, d2),
            (Cmd::Call(f1, a1), Cmd::Call(f2, a2)) => {
                self.exp(f1, f2)
                    && a1.len() == a2.len()
                    && a1.iter().zip(a2).all(|(x, y)| self.exp(x, y))
            }
            _ => false,
        }
    }

    fn dcl(&mut self, a: &Dcl, b: &Dcl) -> bool {
        match (a, b) {
            (Dcl::Empty, Dcl::Empty) => true,
            (Dcl::Block(c1), Dcl::Block(c2)) => self.cmd(c1, c2),
            (Dcl::UninitVar(x, t1, d1), Dcl::UninitVar(y, t2, d2)) => {
                t1 == t2 && self.scoped(&[x.clone()], &[y.clone()], |s| s.dcl(d1, d2))
            }
            (Dcl::InitVar(x, t1, e1, d1), Dcl::InitVar(y, t2, e2, d2))
            | (Dcl::ConstDecl(x, t1, e1, d1), Dcl::ConstDecl(y, t2, e2, d2)) => {
                std::mem::discriminant(a) == std::mem::discriminant(b)
                    && t1 == t2
                    && self.exp(e1, e2)
                    && self.scoped(&[x.clone()], &[y.clone()], |s| s.dcl(d1, d2))
            }
            (Dcl::ProcDecl(p, ps1, b1, d1), Dcl::ProcDecl(q, ps2, b2, d2)) => {
                if ps1.len() != ps2.len() {
                    return false;
                }
                let sig_eq = ps1
                    .iter()
                    .zip(ps2)
                    .all(|(x, y)| x.mode == y.mode && x.ty == y.ty);
                if !sig_eq {
                    return false;
                }
                let pa: Vec<Ident> = ps1.iter().map(|x| x.name.clone()).collect();
                let pb: Vec<Ident> = ps2.iter().map(|x| x.name.clone()).collect();
                self.scoped(&pa, &pb, |s| s.dcl(b1, b2))
                    && self.scoped(&[p.clone()], &[q.clone()], |s| s.dcl(d1, d2))
            }
            (Dcl::Aliases(bs1, d1), Dcl::Aliases(bs2, d2)) => {
                if bs1.len() != bs2.len() {
                    return false;
                }
                for (x, y) in bs1.iter().zip(bs2) {
                    if x.mode != y.mode || x.ty != y.ty || !self.exp(&x.rhs, &y.rhs) {
                        return false;
                    }
                }
                let na: Vec<Ident> = bs1.iter().map(|x| x.name.clone()).collect();
                let nb: Vec<Ident> = bs2.iter().map(|x| x.name.clone()).collect();
                self.scoped(&na, &nb, |s| s.dcl(d1, d2))
            }
            (Dcl::Alias(b1, d1), Dcl::Alias(b2, d2)) => {
                b1.mode == b2.mode
                    && b1.ty == b2.ty
                    && self.exp(&b1.rhs, &b2.rhs)
                    && self.scoped(&[b1.name.clone()], &[b2.name.clone()], |s| {
                        s.dcl(d1, d2)
                    })
            }
            _ => false,
        }
    }
}
