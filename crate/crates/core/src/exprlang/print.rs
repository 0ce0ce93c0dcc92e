use std::fmt::{self, Write};

use num_traits::{One, Signed};

use super::{Expr, Rational};

// Binding levels, loosest first. A child printed below the level its
// position requires gets parentheses.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn const_text(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Const(c) => {
            if !c.is_integer() {
                PRODUCT
            } else if c.is_negative() {
                UNARY
            } else {
                ATOM
            }
        }
        Expr::Symbol(_) | Expr::Func(..) => ATOM,
        Expr::Pow(..) if divisor(e).is_some() => PRODUCT,
        Expr::Pow(..) => POWER,
        Expr::Neg(inner) => match level(inner) {
            SUM => UNARY,
            l if l >= UNARY => UNARY,
            _ => PRODUCT,
        },
        Expr::Product(_) => PRODUCT,
        Expr::Sum(_) => SUM,
    }
}

fn write_at(out: &mut String, e: &Expr, min_level: u8) {
    if level(e) < min_level {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}

/// Positive integer exponent `n` when `e` is `base^-n`.
fn divisor(e: &Expr) -> Option<(&Expr, Rational)> {
    if let Expr::Pow(b, x) = e {
        if let Some(c) = x.as_const() {
            if c.is_integer() && c.is_negative() {
                return Some((b, -c));
            }
        }
    }
    None
}

fn write_product(out: &mut String, factors: &[Expr]) {
    let mut numers: Vec<Expr> = Vec::new();
    let mut denoms: Vec<(Expr, Rational)> = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        match (i, f) {
            // A fractional coefficient p/q prints as p*.../q.
            (0, Expr::Const(c)) if !c.is_integer() => {
                numers.push(Expr::Const(Rational::from_integer(c.numer().clone())));
                denoms.push((Expr::Const(Rational::from_integer(c.denom().clone())), Rational::one()));
            }
            _ => match divisor(f) {
                Some((b, n)) => denoms.push((b.clone(), n)),
                None => numers.push(f.clone()),
            },
        }
    }
    let has_rest = numers.len() > 1;
    match numers.first() {
        None => out.push('1'),
        Some(Expr::Const(c)) if has_rest && c.abs().is_one() => {
            if c.is_negative() {
                out.push('-');
            }
            numers.remove(0);
        }
        _ => {}
    }
    for (i, f) in numers.iter().enumerate() {
        if i > 0 {
            out.push('*');
        }
        write_at(out, f, if i == 0 { PRODUCT } else { UNARY });
    }
    if denoms.is_empty() {
        return;
    }
    out.push('/');
    let grouped = denoms.len() > 1;
    if grouped {
        out.push('(');
    }
    for (i, (base, n)) in denoms.iter().enumerate() {
        if i > 0 {
            out.push('*');
        }
        if n.is_one() {
            write_at(out, base, if grouped { UNARY } else { POWER });
        } else {
            write_at(out, base, ATOM);
            out.push('^');
            out.push_str(&const_text(n));
        }
    }
    if grouped {
        out.push(')');
    }
}

/// Splits a sum term into (is_negative, magnitude) for `a - b` rendering.
fn signed_term(t: &Expr) -> (bool, Expr) {
    match t {
        Expr::Neg(inner) => (true, (**inner).clone()),
        Expr::Const(c) if c.is_negative() => (true, Expr::Const(-c)),
        Expr::Product(fs) if fs.first().is_some_and(Expr::is_negative_const) => {
            let c = -fs[0].as_const().expect("checked").clone();
            let mut rest: Vec<Expr> = fs[1..].to_vec();
            if !c.is_one() {
                rest.insert(0, Expr::Const(c));
            }
            let mag = if rest.len() == 1 {
                rest.pop().expect("one")
            } else {
                Expr::Product(rest)
            };
            (true, mag)
        }
        other => (false, other.clone()),
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Const(c) => out.push_str(&const_text(c)),
        Expr::Symbol(s) => out.push_str(s),
        Expr::Func(f, a) => {
            out.push_str(f.name());
            out.push('(');
            write_expr(out, a);
            out.push(')');
        }
        Expr::Pow(..) if divisor(e).is_some() => write_product(out, std::slice::from_ref(e)),
        Expr::Pow(b, x) => {
            write_at(out, b, ATOM);
            out.push('^');
            write_at(out, x, UNARY);
        }
        Expr::Neg(inner) => {
            out.push('-');
            let min = if level(inner) == PRODUCT { PRODUCT } else { UNARY };
            write_at(out, inner, min);
        }
        Expr::Product(fs) => write_product(out, fs),
        Expr::Sum(ts) => {
            for (i, t) in ts.iter().enumerate() {
                if i == 0 {
                    write_at(out, t, PRODUCT);
                    continue;
                }
                let (neg, mag) = signed_term(t);
                out.push_str(if neg { " - " } else { " + " });
                write_at(out, &mag, PRODUCT);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(&mut s, self);
        f.write_str(&s)
    }
}

impl Expr {
    /// Text form in the parse grammar.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        // Infallible for String.
        let _ = write!(s, "{self}");
        s
    }
}
