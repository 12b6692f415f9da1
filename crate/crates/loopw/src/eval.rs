//! Big-step evaluation of expressions against a store. Expressions are pure;
//! the arithmetic and logical operators are defined on matching operand
//! kinds only, and `=` is defined on integer constants only, so anything
//! else reports which rule was missing. Conjunction and disjunction evaluate
//! both operands; there is no short-circuiting.

use crate::syntax::*;
use num_bigint::BigInt;
use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EvalError {
    UnboundVariable(Ident),
    UninitializedRead(Ident),
    NoRuleApplies(String),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::UnboundVariable(x) => write!(f, "unbound variable '{x}'"),
            EvalError::UninitializedRead(x) => {
                write!(f, "read of uninitialized variable '{x}'")
            }
            EvalError::NoRuleApplies(detail) => write!(f, "no rule applies: {detail}"),
        }
    }
}

impl std::error::Error for EvalError {}

/// Rightmost value bound to `x` in the store.
pub fn fetch(store: &Store, x: &Ident) -> Result<Value, EvalError> {
    match store.get(x) {
        None => Err(EvalError::UnboundVariable(x.clone())),
        Some(Slot::Uninit) => Err(EvalError::UninitializedRead(x.clone())),
        Some(Slot::Value(v)) => Ok(v.clone()),
    }
}

fn no_rule_bin(op: BinOp, l: &Value, r: &Value) -> EvalError {
    EvalError::NoRuleApplies(format!(
        "no evaluation rule for '{op}' on {} and {}",
        l.kind(),
        r.kind()
    ))
}

/// Evaluate an expression to a value.
pub fn eval_exp(store: &Store, e: &Exp) -> Result<Value, EvalError> {
    match e {
        Exp::Var(x) => fetch(store, x),
        Exp::Val(v) => Ok(v.clone()),
        Exp::Bin(op, l, r) => {
            let lv = eval_exp(store, l)?;
            let rv = eval_exp(store, r)?;
            match (op, &lv, &rv) {
                (BinOp::Plus, Value::Int(a), Value::Int(b)) => Ok(Value::Int(a + b)),
                (BinOp::Minus, Value::Int(a), Value::Int(b)) => Ok(Value::Int(a - b)),
                (BinOp::Times, Value::Int(a), Value::Int(b)) => Ok(Value::Int(a * b)),
                (BinOp::Eq, Value::Int(a), Value::Int(b)) => Ok(Value::Bool(a == b)),
                (BinOp::Gt, Value::Int(a), Value::Int(b)) => Ok(Value::Bool(a > b)),
                (BinOp::Lt, Value::Int(a), Value::Int(b)) => Ok(Value::Bool(a < b)),
                (BinOp::And, Value::Bool(a), Value::Bool(b)) => Ok(Value::Bool(*a && *b)),
                (BinOp::Or, Value::Bool(a), Value::Bool(b)) => Ok(Value::Bool(*a || *b)),
                _ => Err(no_rule_bin(*op, &lv, &rv)),
            }
        }
        Exp::Not(inner) => match eval_exp(store, inner)? {
            Value::Bool(b) => Ok(Value::Bool(!b)),
            v => Err(EvalError::NoRuleApplies(format!(
                "no evaluation rule for 'not' on {}",
                v.kind()
            ))),
        },
    }
}

/// Comparison on integer constants, as used by the for-loop bounds test.
pub fn const_compare(k: &BigInt, k2: &BigInt) -> Ordering {
    k.cmp(k2)
}
