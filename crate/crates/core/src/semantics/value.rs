use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::syntax::{self, BinOp, Expr, UnOp};

/// A data value. Integers and rationals compare numerically.
#[derive(Debug, Clone)]
pub enum Value {
    Bool(bool),
    Int(BigInt),
    Real(BigRational),
}

impl Value {
    pub fn int(v: i64) -> Value {
        Value::Int(BigInt::from(v))
    }

    pub fn real(num: i64, den: i64) -> Value {
        Value::Real(BigRational::new(num.into(), den.into()))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Value::Bool(_) => None,
            Value::Int(n) => Some(BigRational::from_integer(n.clone())),
            Value::Real(r) => Some(r.clone()),
        }
    }

    /// The value as a literal expression.
    pub fn to_expr(&self) -> Expr {
        match self {
            Value::Bool(b) => Expr::Bool(*b),
            Value::Int(n) => Expr::Int(n.clone()),
            Value::Real(r) => Expr::Real(r.clone()),
        }
    }

    fn numeric_cmp(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => Some(a.cmp(b)),
            _ => Some(self.as_rational()?.cmp(&other.as_rational()?)),
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Bool(_), _) | (_, Value::Bool(_)) => false,
            _ => self.numeric_cmp(other) == Some(Ordering::Equal),
        }
    }
}

impl Eq for Value {}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Real(r) => match syntax::decimal_string(r) {
                Some(d) => f.write_str(&d),
                None => write!(f, "{}/{}", r.numer(), r.denom()),
            },
        }
    }
}

/// A total assignment of values to variables, indexed like the AP list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation(pub Vec<Value>);

impl Valuation {
    pub fn new(values: Vec<Value>) -> Self {
        Valuation(values)
    }

    pub fn ints(values: &[i64]) -> Self {
        Valuation(values.iter().map(|&v| Value::int(v)).collect())
    }

    pub fn bools(values: &[bool]) -> Self {
        Valuation(values.iter().map(|&v| Value::Bool(v)).collect())
    }

    pub fn get(&self, i: usize) -> Option<&Value> {
        self.0.get(i)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `name=value` pairs separated by spaces, as in word files.
    pub fn format_with(&self, names: &[String]) -> String {
        self.0
            .iter()
            .zip(names)
            .map(|(v, n)| format!("{n}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn bad(e: &Expr, msg: &str) -> Error {
    Error::semantic(format!("cannot evaluate `{}`: {msg}", syntax::print_expr(e)))
}

fn arith(op: BinOp, a: &Value, b: &Value) -> Option<Value> {
    if let (Value::Int(x), Value::Int(y)) = (a, b) {
        return Some(Value::Int(match op {
            BinOp::Add => x + y,
            BinOp::Sub => x - y,
            _ => x * y,
        }));
    }
    let (x, y) = (a.as_rational()?, b.as_rational()?);
    Some(Value::Real(match op {
        BinOp::Add => x + y,
        BinOp::Sub => x - y,
        _ => x * y,
    }))
}

/// Evaluates a modality-free expression under `v`.
pub fn eval_expr(e: &Expr, v: &Valuation) -> Result<Value> {
    match e {
        Expr::Bool(b) => Ok(Value::Bool(*b)),
        Expr::Int(n) => Ok(Value::Int(n.clone())),
        Expr::Real(r) => Ok(Value::Real(r.clone())),
        Expr::Var(i) => v
            .get(*i)
            .cloned()
            .ok_or_else(|| bad(e, "variable not in valuation")),
        Expr::Alias(_) => Err(bad(e, "unexpanded alias")),
        Expr::Unary(op, x) => {
            let val = eval_expr(x, v)?;
            match (op, val) {
                (UnOp::Neg, Value::Int(n)) => Ok(Value::Int(-n)),
                (UnOp::Neg, Value::Real(r)) => Ok(Value::Real(-r)),
                (UnOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
                (op, _) if op.is_modality() => Err(bad(e, "LTL modality")),
                _ => Err(bad(e, "ill-typed operand")),
            }
        }
        Expr::Binary(op, l, r) => match op {
            BinOp::And | BinOp::Or => {
                let lv = eval_bool(l, v)?;
                if lv == (*op == BinOp::Or) {
                    return Ok(Value::Bool(lv));
                }
                Ok(Value::Bool(eval_bool(r, v)?))
            }
            BinOp::Until => Err(bad(e, "LTL modality")),
            _ => {
                let a = eval_expr(l, v)?;
                let b = eval_expr(r, v)?;
                let res = match op {
                    BinOp::Add | BinOp::Sub | BinOp::Mul => arith(*op, &a, &b),
                    BinOp::Eq | BinOp::Ne => match (&a, &b) {
                        (Value::Bool(x), Value::Bool(y)) => Some(Value::Bool((x == y) == (*op == BinOp::Eq))),
                        _ => a
                            .numeric_cmp(&b)
                            .map(|o| Value::Bool((o == Ordering::Equal) == (*op == BinOp::Eq))),
                    },
                    _ => a.numeric_cmp(&b).map(|o| {
                        Value::Bool(match op {
                            BinOp::Lt => o == Ordering::Less,
                            BinOp::Le => o != Ordering::Greater,
                            BinOp::Gt => o == Ordering::Greater,
                            _ => o != Ordering::Less,
                        })
                    }),
                };
                res.ok_or_else(|| bad(e, "ill-typed operands"))
            }
        },
    }
}

pub fn eval_bool(e: &Expr, v: &Valuation) -> Result<bool> {
    eval_expr(e, v)?
        .as_bool()
        .ok_or_else(|| bad(e, "expected a bool value"))
}

/// Parses a word-file value for a variable of type `ty`.
pub(crate) fn parse_value(s: &str, ty: crate::typesys::Type) -> Option<Value> {
    use crate::typesys::Type;
    let int_like = |s: &str| {
        let d = s.strip_prefix('-').unwrap_or(s);
        !d.is_empty() && d.bytes().all(|c| c.is_ascii_digit())
    };
    match ty {
        Type::Bool => match s {
            "true" => Some(Value::Bool(true)),
            "false" => Some(Value::Bool(false)),
            _ => None,
        },
        Type::Int if int_like(s) => s.parse().ok().map(Value::Int),
        Type::Real if int_like(s) => s.parse().ok().map(Value::Int),
        Type::Real => {
            let (neg, body) = match s.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, s),
            };
            let (i, f) = body.split_once('.')?;
            if !int_like(i) || !int_like(f) || i.starts_with('-') || f.starts_with('-') {
                return None;
            }
            let r = syntax::decimal_to_rational(i, f);
            Some(Value::Real(if neg { -r } else { r }))
        }
        _ => None,
    }
}
