use std::collections::BTreeMap;
use std::fmt;

use num_traits::ToPrimitive;

use super::{Expr, Func, PI};

/// Symbol values for evaluation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bindings(BTreeMap<String, f64>);

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, value: f64) -> Option<f64> {
        self.0.insert(name.into(), value)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn extend_from(&mut self, other: &Bindings) {
        for (k, v) in other.iter() {
            self.insert(k, v);
        }
    }
}

impl<S: Into<String>, const N: usize> From<[(S, f64); N]> for Bindings {
    fn from(pairs: [(S, f64); N]) -> Self {
        pairs.into_iter().collect()
    }
}

impl<S: Into<String>> FromIterator<(S, f64)> for Bindings {
    fn from_iter<I: IntoIterator<Item = (S, f64)>>(iter: I) -> Self {
        Bindings(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

impl fmt::Display for Bindings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    LogOfNonPositive,
    SqrtOfNegative,
    DivisionByZero,
    FractionalPowerOfNegative,
    NonFinite,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainKind::LogOfNonPositive => "logarithm of non-positive value",
            DomainKind::SqrtOfNegative => "square root of negative value",
            DomainKind::DivisionByZero => "division by zero",
            DomainKind::FractionalPowerOfNegative => "fractional power of negative value",
            DomainKind::NonFinite => "non-finite result",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound symbol {0:?}")]
    Unbound(String),
    #[error("{kind} in `{subtree}`")]
    Domain { kind: DomainKind, subtree: String },
}

fn domain(kind: DomainKind, e: &Expr) -> EvalError {
    EvalError::Domain {
        kind,
        subtree: e.to_string(),
    }
}

/// Evaluates `e` in double precision with symbols bound by `point`.
pub fn evaluate(e: &Expr, point: &Bindings) -> Result<f64, EvalError> {
    let v = eval_node(e, point)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(DomainKind::NonFinite, e))
    }
}

fn eval_node(e: &Expr, point: &Bindings) -> Result<f64, EvalError> {
    Ok(match e {
        Expr::Const(c) => c.to_f64().unwrap_or(f64::NAN),
        Expr::Symbol(s) => match point.get(s) {
            Some(v) => v,
            None if s == PI => std::f64::consts::PI,
            None => return Err(EvalError::Unbound(s.clone())),
        },
        Expr::Sum(xs) => {
            let mut acc = 0.0;
            for x in xs {
                acc += eval_node(x, point)?;
            }
            acc
        }
        Expr::Product(xs) => {
            let mut acc = 1.0;
            for x in xs {
                acc *= eval_node(x, point)?;
            }
            acc
        }
        Expr::Neg(a) => -eval_node(a, point)?,
        Expr::Pow(b, x) => {
            let base = eval_node(b, point)?;
            let exp = eval_node(x, point)?;
            let integral = exp.fract() == 0.0;
            if base == 0.0 && exp < 0.0 {
                return Err(domain(DomainKind::DivisionByZero, e));
            }
            if base < 0.0 && !integral {
                return Err(domain(DomainKind::FractionalPowerOfNegative, e));
            }
            if integral && exp.abs() <= i32::MAX as f64 {
                base.powi(exp as i32)
            } else {
                base.powf(exp)
            }
        }
        Expr::Func(f, a) => {
            let v = eval_node(a, point)?;
            match f {
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Tan => v.tan(),
                Func::Exp => v.exp(),
                Func::Ln => {
                    if v <= 0.0 {
                        return Err(domain(DomainKind::LogOfNonPositive, e));
                    }
                    v.ln()
                }
                Func::Sqrt => {
                    if v < 0.0 {
                        return Err(domain(DomainKind::SqrtOfNegative, e));
                    }
                    v.sqrt()
                }
                Func::Sinh => v.sinh(),
                Func::Cosh => v.cosh(),
            }
        }
    })
}
