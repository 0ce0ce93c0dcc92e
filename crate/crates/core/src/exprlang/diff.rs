use super::simplify::simplify;
use super::{Expr, Func};

/// Exact partial derivative of `e` with respect to `symbol`, simplified.
pub fn differentiate(e: &Expr, symbol: &str) -> Expr {
    simplify(&derive(e, symbol))
}

fn derive(e: &Expr, s: &str) -> Expr {
    if !e.contains_symbol(s) {
        return Expr::zero();
    }
    match e {
        Expr::Const(_) => Expr::zero(),
        Expr::Symbol(name) => {
            if name == s {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Neg(a) => -derive(a, s),
        Expr::Sum(xs) => Expr::Sum(xs.iter().map(|x| derive(x, s)).collect()),
        Expr::Product(xs) => {
            let terms = (0..xs.len())
                .filter(|&i| xs[i].contains_symbol(s))
                .map(|i| {
                    let mut fs = xs.clone();
                    fs[i] = derive(&xs[i], s);
                    Expr::Product(fs)
                })
                .collect();
            Expr::Sum(terms)
        }
        Expr::Pow(b, x) => {
            let (b, x) = (b.as_ref(), x.as_ref());
            let power = Expr::pow(b.clone(), x.clone());
            if !x.contains_symbol(s) {
                // x * b^(x-1) * b'
                let lowered = Expr::pow(b.clone(), x.clone() - Expr::one());
                Expr::Product(vec![x.clone(), lowered, derive(b, s)])
            } else if !b.contains_symbol(s) {
                Expr::Product(vec![power, Expr::func(Func::Ln, b.clone()), derive(x, s)])
            } else {
                let inner = Expr::Sum(vec![
                    Expr::Product(vec![derive(x, s), Expr::func(Func::Ln, b.clone())]),
                    Expr::Product(vec![x.clone(), derive(b, s), b.clone().recip()]),
                ]);
                Expr::Product(vec![power, inner])
            }
        }
        Expr::Func(f, a) => {
            let a = a.as_ref();
            let outer = match f {
                Func::Sin => Expr::func(Func::Cos, a.clone()),
                Func::Cos => -Expr::func(Func::Sin, a.clone()),
                Func::Tan => Expr::pow(Expr::func(Func::Cos, a.clone()), Expr::int(-2)),
                Func::Exp => Expr::func(Func::Exp, a.clone()),
                Func::Ln => a.clone().recip(),
                Func::Sqrt => Expr::Product(vec![Expr::ratio(1, 2), Expr::func(Func::Sqrt, a.clone()).recip()]),
                Func::Sinh => Expr::func(Func::Cosh, a.clone()),
                Func::Cosh => Expr::func(Func::Sinh, a.clone()),
            };
            Expr::Product(vec![outer, derive(a, s)])
        }
    }
}
