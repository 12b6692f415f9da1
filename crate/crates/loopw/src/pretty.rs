//! Display impls for every syntax category. Rendering is single-line and
//! reparses to the identical tree; parentheses are inserted only where the
//! operator precedence requires them.

use crate::syntax::*;
use std::fmt;

/// Precedence levels, loosest binding first. Comparisons do not associate,
/// so both of their operands must render at least as tight as additive.
const PREC_OR: u8 = 0;
const PREC_AND: u8 = 1;
const PREC_NOT: u8 = 2;
const PREC_CMP: u8 = 3;
const PREC_ADD: u8 = 4;
const PREC_MUL: u8 = 5;
const PREC_ATOM: u8 = 6;

fn prec(e: &Exp) -> u8 {
    match e {
        Exp::Var(_) | Exp::Val(_) => PREC_ATOM,
        Exp::Not(_) => PREC_NOT,
        Exp::Bin(op, _, _) => match op {
            BinOp::Or => PREC_OR,
            BinOp::And => PREC_AND,
            BinOp::Eq | BinOp::Gt | BinOp::Lt => PREC_CMP,
            BinOp::Plus | BinOp::Minus => PREC_ADD,
            BinOp::Times => PREC_MUL,
        },
    }
}

fn write_exp(f: &mut fmt::Formatter<'_>, e: &Exp, min: u8) -> fmt::Result {
    let p = prec(e);
    if p < min {
        f.write_str("(")?;
        write_exp(f, e, 0)?;
        return f.write_str(")");
    }
    match e {
        Exp::Var(x) => write!(f, "{x}"),
        Exp::Val(v) => write!(f, "{v}"),
        Exp::Not(inner) => {
            f.write_str("not ")?;
            write_exp(f, inner, PREC_NOT)
        }
        Exp::Bin(op, lhs, rhs) => {
            let (sym, lmin, rmin) = match op {
                BinOp::Or => ("or", PREC_OR, PREC_AND),
                BinOp::And => ("and", PREC_AND, PREC_NOT),
                BinOp::Eq => ("=", PREC_ADD, PREC_ADD),
                BinOp::Gt => (">", PREC_ADD, PREC_ADD),
                BinOp::Lt => ("<", PREC_ADD, PREC_ADD),
                BinOp::Plus => ("+", PREC_ADD, PREC_MUL),
                BinOp::Minus => ("-", PREC_ADD, PREC_MUL),
                BinOp::Times => ("*", PREC_MUL, PREC_ATOM),
            };
            write_exp(f, lhs, lmin)?;
            write!(f, " {sym} ")?;
            write_exp(f, rhs, rmin)
        }
    }
}

impl fmt::Display for Exp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_exp(f, self, 0)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::In => f.write_str("in"),
            Mode::Out => f.write_str("out"),
            Mode::InOut => f.write_str("in out"),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => f.write_str("int"),
            Type::Bool => f.write_str("bool"),
            Type::Void => f.write_str("void"),
            Type::Proc(params) => {
                f.write_str("proc(")?;
                for (i, (m, t)) in params.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{m} {t}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = match self {
            BinOp::Plus => "+",
            BinOp::Minus => "-",
            BinOp::Times => "*",
            BinOp::Eq => "=",
            BinOp::Gt => ">",
            BinOp::Lt => "<",
            BinOp::And => "and",
            BinOp::Or => "or",
        };
        f.write_str(sym)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Proc(p) => write!(f, "{p}"),
        }
    }
}

impl fmt::Display for ProcVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("proc (")?;
        write_params(f, &self.params)?;
        write!(f, ") is {}", self.body)
    }
}

fn write_params(f: &mut fmt::Formatter<'_>, params: &[Param]) -> fmt::Result {
    for (i, p) in params.iter().enumerate() {
        if i > 0 {
            f.write_str("; ")?;
        }
        write!(f, "{} : {} {}", p.name, p.mode, p.ty)?;
    }
    Ok(())
}

impl fmt::Display for Cmd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cmd::Null => f.write_str("null"),
            Cmd::Assign(x, e) => write!(f, "{x} := {e}"),
            Cmd::Seq(a, b) => write!(f, "{a}; {b}"),
            Cmd::If(e, c1, c2) => write!(f, "if {e} then {c1}; else {c2}; end if"),
            Cmd::While(e, c) => write!(f, "while {e} loop {c}; end loop"),
            Cmd::For(x, lo, hi, c) => {
                write!(f, "for {x} in {lo} .. {hi} loop {c}; end loop")
            }
            Cmd::Declare(d) => write!(f, "declare {d}"),
            Cmd::Call(callee, args) => {
                match callee {
                    Exp::Var(_) | Exp::Val(Value::Int(_)) | Exp::Val(Value::Bool(_)) => {
                        write!(f, "{callee}")?
                    }
                    _ => write!(f, "({callee})")?,
                }
                f.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for AliasBinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {} {} = {}", self.name, self.mode, self.ty, self.rhs)
    }
}

impl fmt::Display for Dcl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dcl::Empty => f.write_str("begin end"),
            Dcl::Block(c) => write!(f, "begin {c}; end"),
            Dcl::UninitVar(x, t, d) => write!(f, "{x} : {t}; {d}"),
            Dcl::InitVar(x, t, e, d) => write!(f, "{x} : {t} := {e}; {d}"),
            Dcl::ConstDecl(x, t, e, d) => {
                write!(f, "{x} : constant {t} := {e}; {d}")
            }
            Dcl::ProcDecl(p, params, body, rest) => {
                write!(f, "procedure {p} (")?;
                write_params(f, params)?;
                write!(f, ") is {body}; {rest}")
            }
            Dcl::Aliases(bindings, d) => {
                f.write_str("[")?;
                for (i, b) in bindings.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{b}")?;
                }
                write!(f, "] {d}")
            }
            Dcl::Alias(b, d) => write!(f, "({b}) {d}"),
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Value(v) => write!(f, "{v}"),
            Slot::Uninit => f.write_str("?"),
        }
    }
}

impl fmt::Display for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (x, slot)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} <- {slot}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.mode, self.ty)
    }
}

impl fmt::Display for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (x, b)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} : {b}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} | {}", self.cmd, self.store)
    }
}
