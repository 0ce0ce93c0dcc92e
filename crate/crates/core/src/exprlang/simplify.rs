//! Canonicalizing rewriter.
//!
//! Normal form:
//! - sums and products are flat, have at least two children, and are sorted;
//! - a product carries at most one rational coefficient, first, never 1;
//! - like terms are collected (`2*x + 3*x -> 5*x`) and repeated factors
//!   merge exponents (`x*x^2 -> x^3`);
//! - integer powers distribute over products and nested powers;
//! - negation is rewritten as multiplication by -1.
//!
//! No distribution of products over sums and no trigonometric identities.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Expr, Func, Rational};

const MAX_PASSES: usize = 8;
const MAX_FOLD_EXPONENT: u64 = 256;
const MAX_FOLD_BITS: u64 = 8192;

/// Rewrites `e` to its canonical form. The result is a fixed point:
/// `simplify(simplify(e)) == simplify(e)`.
pub fn simplify(e: &Expr) -> Expr {
    let mut cur = canon(e);
    for _ in 0..MAX_PASSES {
        let next = canon(&cur);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

fn canon(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Symbol(_) => e.clone(),
        Expr::Neg(a) => mk_product(vec![Expr::int(-1), canon(a)]),
        Expr::Sum(xs) => mk_sum(xs.iter().map(canon).collect()),
        Expr::Product(xs) => mk_product(xs.iter().map(canon).collect()),
        Expr::Pow(b, x) => mk_pow(canon(b), canon(x)),
        Expr::Func(f, a) => mk_func(*f, canon(a)),
    }
}

fn int_value(c: &Rational) -> Option<i64> {
    if c.is_integer() {
        c.numer().to_i64()
    } else {
        None
    }
}

fn fold_const_pow(base: &Rational, n: i64) -> Option<Rational> {
    if base.is_zero() && n < 0 {
        return None;
    }
    let mag = n.unsigned_abs();
    let bits = base.numer().bits().max(base.denom().bits());
    if mag > MAX_FOLD_EXPONENT || bits.saturating_mul(mag) > MAX_FOLD_BITS {
        return None;
    }
    let m = mag as u32;
    let raised = Rational::new(
        num_traits::Pow::pow(base.numer(), m),
        num_traits::Pow::pow(base.denom(), m),
    );
    Some(if n < 0 { raised.recip() } else { raised })
}

fn exact_sqrt(c: &Rational) -> Option<Rational> {
    if c.is_negative() {
        return None;
    }
    let (n, d) = (c.numer(), c.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| Rational::new(rn, rd))
}

pub(crate) fn mk_func(f: Func, arg: Expr) -> Expr {
    if let Some(c) = arg.as_const() {
        let zero = c.is_zero();
        let folded = match f {
            Func::Sin | Func::Tan | Func::Sinh if zero => Some(Expr::zero()),
            Func::Cos | Func::Cosh | Func::Exp if zero => Some(Expr::one()),
            Func::Ln if c.is_one() => Some(Expr::zero()),
            Func::Sqrt => exact_sqrt(c).map(Expr::Const),
            _ => None,
        };
        if let Some(v) = folded {
            return v;
        }
    }
    Expr::func(f, arg)
}

pub(crate) fn mk_pow(base: Expr, exp: Expr) -> Expr {
    if exp.is_zero() {
        // x^0 -> 1 unconditionally, including the 0^0 corner.
        return Expr::one();
    }
    if exp.is_one() {
        return base;
    }
    if base.is_one() {
        return Expr::one();
    }
    let exp_int = exp.as_const().and_then(int_value);
    if let (Some(b), Some(n)) = (base.as_const(), exp_int) {
        if let Some(v) = fold_const_pow(b, n) {
            return Expr::Const(v);
        }
    }
    if base.is_zero() && exp.as_const().is_some_and(Signed::is_positive) {
        return Expr::zero();
    }
    if let Some(n) = exp_int {
        match base {
            Expr::Pow(inner, e1) => {
                return mk_pow(*inner, mk_product(vec![*e1, Expr::int(n)]));
            }
            Expr::Product(fs) => {
                let raised = fs.into_iter().map(|f| mk_pow(f, Expr::int(n))).collect();
                return mk_product(raised);
            }
            Expr::Func(Func::Sqrt, a) if n % 2 == 0 => {
                return mk_pow(*a, Expr::int(n / 2));
            }
            other => return Expr::pow(other, exp),
        }
    }
    Expr::pow(base, exp)
}

pub(crate) fn mk_product(factors: Vec<Expr>) -> Expr {
    let mut pending = factors;
    let mut coeff = Rational::one();
    let mut out: Vec<Expr> = Vec::new();
    for _ in 0..=MAX_PASSES {
        let mut groups: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
        let mut stack = std::mem::take(&mut pending);
        stack.append(&mut out);
        stack.reverse();
        while let Some(f) = stack.pop() {
            match f {
                Expr::Const(c) => coeff *= c,
                Expr::Product(fs) => stack.extend(fs.into_iter().rev()),
                Expr::Neg(a) => {
                    coeff = -coeff;
                    stack.push(*a);
                }
                Expr::Pow(b, x) => groups.entry(*b).or_default().push(*x),
                other => groups.entry(other).or_default().push(Expr::one()),
            }
            if coeff.is_zero() {
                return Expr::zero();
            }
        }
        let mut again = false;
        for (base, mut exps) in groups {
            let exp = if exps.len() == 1 {
                exps.pop().expect("one exponent")
            } else {
                mk_sum(exps)
            };
            match mk_pow(base, exp) {
                Expr::Const(c) => {
                    coeff *= c;
                    if coeff.is_zero() {
                        return Expr::zero();
                    }
                }
                p @ Expr::Product(_) => {
                    pending.push(p);
                    again = true;
                }
                p => out.push(p),
            }
        }
        if !again {
            break;
        }
    }
    out.extend(pending);
    out.sort();
    if out.is_empty() {
        return Expr::Const(coeff);
    }
    if coeff.is_one() {
        if out.len() == 1 {
            return out.pop().expect("one factor");
        }
        return Expr::Product(out);
    }
    out.insert(0, Expr::Const(coeff));
    Expr::Product(out)
}

/// Splits a canonical term into its rational coefficient and the rest.
fn split_coefficient(t: Expr) -> (Rational, Option<Expr>) {
    match t {
        Expr::Const(c) => (c, None),
        Expr::Product(mut fs) if matches!(fs.first(), Some(Expr::Const(_))) => {
            let c = match fs.remove(0) {
                Expr::Const(c) => c,
                _ => unreachable!("matched const head"),
            };
            let rest = if fs.len() == 1 {
                fs.pop().expect("one factor")
            } else {
                Expr::Product(fs)
            };
            (c, Some(rest))
        }
        other => (Rational::one(), Some(other)),
    }
}

pub(crate) fn mk_sum(terms: Vec<Expr>) -> Expr {
    let mut constant = Rational::zero();
    let mut groups: BTreeMap<Expr, Rational> = BTreeMap::new();
    let mut stack = terms;
    stack.reverse();
    while let Some(t) = stack.pop() {
        let t = match t {
            Expr::Sum(xs) => {
                stack.extend(xs.into_iter().rev());
                continue;
            }
            Expr::Neg(a) => mk_product(vec![Expr::int(-1), *a]),
            other => other,
        };
        match split_coefficient(t) {
            (c, None) => constant += c,
            (c, Some(rest)) => *groups.entry(rest).or_insert_with(Rational::zero) += c,
        }
    }
    let mut out: Vec<Expr> = Vec::new();
    for (rest, c) in groups {
        if c.is_zero() {
            continue;
        }
        if c.is_one() {
            out.push(rest);
            continue;
        }
        match rest {
            Expr::Product(mut fs) => {
                fs.insert(0, Expr::Const(c));
                out.push(Expr::Product(fs));
            }
            other => out.push(Expr::Product(vec![Expr::Const(c), other])),
        }
    }
    if !constant.is_zero() {
        out.push(Expr::Const(constant));
    }
    out.sort();
    match out.len() {
        0 => Expr::zero(),
        1 => out.pop().expect("one term"),
        _ => Expr::Sum(out),
    }
}
