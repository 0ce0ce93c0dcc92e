//! Scalar expression engine.
//!
//! Expressions are immutable trees over named real coordinates. Constants are
//! exact rationals until [`evaluate`] is called, so cancellations in metric
//! derivatives come out as literal zeros rather than floating-point residue.
//!
//! The text grammar accepted by [`parse`] is also the format used to embed
//! expressions in scenario files:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          right-associative
//! primary := number | symbol | 'pi' | func '(' expr ')' | '(' expr ')'
//! ```

mod diff;
mod equiv;
mod eval;
mod parse;
mod print;
mod simplify;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use diff::differentiate;
pub use equiv::{numeric_equiv, EquivError, EquivReport, EquivSettings, Probe, SamplePoint};
pub use eval::{evaluate, Bindings, DomainKind, EvalError};
pub use parse::{parse, ParseError};
pub use simplify::simplify;

/// Exact rational constant.
pub type Rational = num_rational::BigRational;

/// Reserved symbol that evaluates to π.
pub const PI: &str = "pi";

/// Elementary functions understood by the engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Sinh,
    Cosh,
}

impl Func {
    pub const ALL: [Func; 8] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Sinh,
        Func::Cosh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Symbolic scalar expression.
///
/// `a - b` is represented as `Sum([a, Neg(b)])` and `a / b` as
/// `Product([a, Pow(b, -1)])`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Const(Rational),
    Symbol(String),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Func(Func, Box<Expr>),
    Neg(Box<Expr>),
}

impl Expr {
    pub fn int(value: i64) -> Expr {
        Expr::Const(Rational::from_integer(BigInt::from(value)))
    }

    pub fn ratio(numer: i64, denom: i64) -> Expr {
        Expr::Const(Rational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn sym(name: impl Into<String>) -> Expr {
        Expr::Symbol(name.into())
    }

    pub fn pi() -> Expr {
        Expr::Symbol(PI.to_string())
    }

    pub fn pow(base: Expr, exponent: Expr) -> Expr {
        Expr::Pow(Box::new(base), Box::new(exponent))
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        Expr::Func(f, Box::new(arg))
    }

    pub fn recip(self) -> Expr {
        Expr::pow(self, Expr::int(-1))
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(One::is_one)
    }

    pub fn is_negative_const(&self) -> bool {
        self.as_const().is_some_and(Signed::is_negative)
    }

    /// Free symbols, excluding the reserved constant `pi`.
    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Symbol(s) => {
                if s != PI {
                    out.insert(s.clone());
                }
            }
            Expr::Sum(xs) | Expr::Product(xs) => xs.iter().for_each(|x| x.collect_symbols(out)),
            Expr::Pow(b, e) => {
                b.collect_symbols(out);
                e.collect_symbols(out);
            }
            Expr::Func(_, a) | Expr::Neg(a) => a.collect_symbols(out),
        }
    }

    pub fn contains_symbol(&self, name: &str) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Symbol(s) => s == name,
            Expr::Sum(xs) | Expr::Product(xs) => xs.iter().any(|x| x.contains_symbol(name)),
            Expr::Pow(b, e) => b.contains_symbol(name) || e.contains_symbol(name),
            Expr::Func(_, a) | Expr::Neg(a) => a.contains_symbol(name),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + match self {
            Expr::Const(_) | Expr::Symbol(_) => 0,
            Expr::Sum(xs) | Expr::Product(xs) => xs.iter().map(Expr::size).sum(),
            Expr::Pow(b, e) => b.size() + e.size(),
            Expr::Func(_, a) | Expr::Neg(a) => a.size(),
        }
    }
}

impl From<i64> for Expr {
    fn from(value: i64) -> Self {
        Expr::int(value)
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Sum(vec![self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sum(vec![self, Expr::Neg(Box::new(rhs))])
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Product(vec![self, rhs])
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChartError {
    #[error("coordinate chart needs at least one coordinate")]
    Empty,
    #[error("invalid coordinate name {0:?}")]
    InvalidName(String),
    #[error("duplicate coordinate name {0:?}")]
    Duplicate(String),
}

/// Ordered list of distinct coordinate names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoordinateChart {
    names: Vec<String>,
}

impl CoordinateChart {
    pub fn new<I, S>(names: I) -> Result<Self, ChartError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(ChartError::Empty);
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !is_identifier(n) || n == PI || Func::from_name(n).is_some() {
                return Err(ChartError::InvalidName(n.clone()));
            }
            if !seen.insert(n.as_str()) {
                return Err(ChartError::Duplicate(n.clone()));
            }
        }
        Ok(CoordinateChart { names })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    /// Chart with one more coordinate appended.
    pub fn extended(&self, name: &str) -> Result<Self, ChartError> {
        CoordinateChart::new(self.names.iter().cloned().chain(std::iter::once(name.to_string())))
    }
}

impl fmt::Display for CoordinateChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.names.join(", "))
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
