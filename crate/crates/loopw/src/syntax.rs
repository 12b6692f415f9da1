//! Abstract syntax: expressions, commands, declarations, values, stores.
//!
//! Declarations double as runtime stack frames: a block under execution keeps
//! its enclosing variable declarations around, and their initializers are
//! rewritten to the current values as the block runs. This is what lets the
//! small-step relation model push/pop without a separate frame structure.

use num_bigint::BigInt;
use std::fmt;

/// An identifier. User programs may not contain `__`; generated fresh names
/// always do, so renamed binders can never collide with source identifiers.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ident(String);

impl Ident {
    pub fn new(name: impl Into<String>) -> Ident {
        Ident(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ident({})", self.0)
    }
}

impl From<&str> for Ident {
    fn from(s: &str) -> Ident {
        Ident::new(s)
    }
}

/// Parameter passing mode.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Mode {
    In,
    Out,
    InOut,
}

/// Types. `Void` exists as a parseable type constant but no rule produces or
/// consumes it, so `void`-typed programs are rejected wherever a concrete
/// type is demanded.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub enum Type {
    Int,
    Bool,
    Proc(Vec<(Mode, Type)>),
    Void,
}

/// Binary operators on expressions.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum BinOp {
    Plus,
    Minus,
    Times,
    Eq,
    Gt,
    Lt,
    And,
    Or,
}

/// Expressions. Pure: evaluation reads the store but never writes it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Exp {
    Var(Ident),
    Val(Value),
    Bin(BinOp, Box<Exp>, Box<Exp>),
    Not(Box<Exp>),
}

impl Exp {
    pub fn var(name: impl Into<String>) -> Exp {
        Exp::Var(Ident::new(name))
    }

    pub fn int(n: impl Into<BigInt>) -> Exp {
        Exp::Val(Value::Int(n.into()))
    }

    pub fn bool(b: bool) -> Exp {
        Exp::Val(Value::Bool(b))
    }

    pub fn bin(op: BinOp, lhs: Exp, rhs: Exp) -> Exp {
        Exp::Bin(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn not(e: Exp) -> Exp {
        Exp::Not(Box::new(e))
    }
}

/// A procedure parameter: name, mode and type.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Param {
    pub name: Ident,
    pub mode: Mode,
    pub ty: Type,
}

impl Param {
    pub fn new(name: impl Into<String>, mode: Mode, ty: Type) -> Param {
        Param { name: Ident::new(name), mode, ty }
    }
}

/// Values. Integers are arbitrary precision. Procedure values are first
/// class and need not be closed: a stored procedure may refer to outer
/// variables that are substituted or aliased in at call time.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Value {
    Int(BigInt),
    Bool(bool),
    Proc(ProcVal),
}

impl Value {
    pub fn int(n: impl Into<BigInt>) -> Value {
        Value::Int(n.into())
    }

    /// Short kind name for diagnostics ("int", "bool", "proc").
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Int(_) => "int",
            Value::Bool(_) => "bool",
            Value::Proc(_) => "proc",
        }
    }
}

/// A procedure value: `proc (x1 : m1 t1; ...) is d`. Parameter names bind
/// inside the body and must be pairwise distinct.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProcVal {
    pub params: Vec<Param>,
    pub body: Box<Dcl>,
}

/// Commands.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Cmd {
    Null,
    Assign(Ident, Exp),
    Seq(Box<Cmd>, Box<Cmd>),
    If(Exp, Box<Cmd>, Box<Cmd>),
    While(Exp, Box<Cmd>),
    For(Ident, Exp, Exp, Box<Cmd>),
    Declare(Box<Dcl>),
    /// Procedure call: the callee is an arbitrary expression of proc type.
    Call(Exp, Vec<Exp>),
}

impl Cmd {
    pub fn seq(a: Cmd, b: Cmd) -> Cmd {
        Cmd::Seq(Box::new(a), Box::new(b))
    }

    pub fn assign(x: impl Into<String>, e: Exp) -> Cmd {
        Cmd::Assign(Ident::new(x), e)
    }
}

/// One aliasing binding `x : m t = e`, either written by the programmer (not
/// typeable) or produced by a procedure call step.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AliasBinding {
    pub name: Ident,
    pub mode: Mode,
    pub ty: Type,
    pub rhs: Exp,
}

/// Declarations. `Alias` and `Aliases` are runtime forms produced by calls;
/// the type checker rejects them in source programs.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Dcl {
    /// `begin end`
    Empty,
    /// `begin c; end`
    Block(Box<Cmd>),
    /// `x : t; d`
    UninitVar(Ident, Type, Box<Dcl>),
    /// `x : t := e; d`
    InitVar(Ident, Type, Exp, Box<Dcl>),
    /// `x : constant t := e; d`
    ConstDecl(Ident, Type, Exp, Box<Dcl>),
    /// `procedure p (params) is body; d`
    ProcDecl(Ident, Vec<Param>, Box<Dcl>, Box<Dcl>),
    /// `[x1 : m1 t1 = e1, ...] d`
    Aliases(Vec<AliasBinding>, Box<Dcl>),
    /// `(x : m t = e) d`
    Alias(AliasBinding, Box<Dcl>),
}

impl Dcl {
    pub fn block(c: Cmd) -> Dcl {
        Dcl::Block(Box::new(c))
    }
}

/// A store cell: initialized with a value, or reserved but not yet written.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Slot {
    Value(Value),
    Uninit,
}

/// The store: an ordered association list. Duplicate names are meaningful,
/// the rightmost binding for a name is the visible one (inner scopes and
/// aliases shadow by pushing on the right).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Store(Vec<(Ident, Slot)>);

impl Store {
    pub fn new() -> Store {
        Store(Vec::new())
    }

    pub fn from_bindings(bindings: Vec<(Ident, Slot)>) -> Store {
        Store(bindings)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Push a binding on the right (entering a scope).
    pub fn push(&mut self, x: Ident, slot: Slot) {
        self.0.push((x, slot));
    }

    /// Pop the rightmost binding (leaving a scope).
    pub fn pop(&mut self) -> Option<(Ident, Slot)> {
        self.0.pop()
    }

    /// Rightmost slot bound to `x`, if any.
    pub fn get(&self, x: &Ident) -> Option<&Slot> {
        self.0.iter().rev().find(|(y, _)| y == x).map(|(_, s)| s)
    }

    /// Overwrite the rightmost binding of `x` in place. False if unbound.
    pub fn set(&mut self, x: &Ident, v: Value) -> bool {
        match self.0.iter_mut().rev().find(|(y, _)| y == x) {
            Some((_, slot)) => {
                *slot = Slot::Value(v);
                true
            }
            None => false,
        }
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &(Ident, Slot)> {
        self.0.iter()
    }

    /// The identifier sequence, in binding order. Steps never reorder it.
    pub fn idents(&self) -> Vec<Ident> {
        self.0.iter().map(|(x, _)| x.clone()).collect()
    }
}

/// A typing assumption `: m t` for one identifier.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Binding {
    pub mode: Mode,
    pub ty: Type,
}

/// The typing context: ordered like the store, rightmost binding shadows.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Env(Vec<(Ident, Binding)>);

impl Env {
    pub fn new() -> Env {
        Env(Vec::new())
    }

    pub fn push(&mut self, x: Ident, mode: Mode, ty: Type) {
        self.0.push((x, Binding { mode, ty }));
    }

    pub fn pushed(&self, x: Ident, mode: Mode, ty: Type) -> Env {
        let mut env = self.clone();
        env.push(x, mode, ty);
        env
    }

    /// Rightmost assumption for `x`, if any.
    pub fn lookup(&self, x: &Ident) -> Option<&Binding> {
        self.0.iter().rev().find(|(y, _)| y == x).map(|(_, b)| b)
    }

    /// Whether some identifier carries exactly this assumption.
    pub fn lookup_anon(&self, delta: &Binding) -> bool {
        self.0.iter().any(|(_, b)| b == delta)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Ident, Binding)> {
        self.0.iter()
    }
}

/// A machine configuration: a command paired with a store.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Config {
    pub cmd: Cmd,
    pub store: Store,
}

impl Config {
    pub fn new(cmd: Cmd, store: Store) -> Config {
        Config { cmd, store }
    }

    /// Initial configuration for a whole program.
    pub fn for_program(program: Dcl) -> Config {
        Config { cmd: Cmd::Declare(Box::new(program)), store: Store::new() }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self.cmd, Cmd::Null)
    }
}

/// A run prefix: the configurations reached after each step.
pub type Trace = Vec<Config>;
