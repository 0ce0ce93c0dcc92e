//! Independent oracles shared by the integration tests. Nothing here calls
//! the symbolic differentiator or the Christoffel builder.

#![allow(dead_code)]

use std::path::PathBuf;

use kkverify::cli::Scenario;
use kkverify::exprlang::{parse, simplify, Bindings, CoordinateChart, Expr, Probe};
use kkverify::geometry::MetricField;
use nalgebra::DMatrix;

pub fn p(text: &str) -> Expr {
    simplify(&parse(text).unwrap())
}

pub fn chart(names: &[&str]) -> CoordinateChart {
    CoordinateChart::new(names.iter().copied()).unwrap()
}

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

pub fn bundled(name: &str) -> Scenario {
    Scenario::load(&scenario_path(name)).unwrap()
}

pub fn flat4() -> MetricField {
    MetricField::identity(chart(&["x1", "x2", "x3", "x4"]))
}

pub fn polar() -> MetricField {
    MetricField::diagonal(chart(&["r", "theta"]), vec![p("1"), p("r^2")]).unwrap()
}

/// Round 2-sphere of radius 2.
pub fn sphere() -> MetricField {
    MetricField::diagonal(chart(&["theta", "phi"]), vec![p("4"), p("4*sin(theta)^2")]).unwrap()
}

pub fn probe(domains: &[(&str, f64, f64)], seed: u64) -> Probe {
    domains
        .iter()
        .fold(Probe::new(seed), |pr, &(s, lo, hi)| pr.with_domain(s, lo, hi))
}

pub fn points(probe: &Probe, count: usize) -> Vec<Bindings> {
    probe
        .sample_valid(count, |b| Ok(b.clone()))
        .unwrap()
        .into_iter()
        .map(|(b, _)| b)
        .collect()
}

/// Γ^a_{bc} at `point` from central differences of the evaluated metric,
/// indexed `[a][b][c]` as `a * n * n + b * n + c`.
pub fn fd_christoffel(g: &MetricField, point: &Bindings, h: f64) -> Vec<f64> {
    let n = g.dim();
    let names = g.chart().names().to_vec();
    let at = |shift: Option<(usize, f64)>| -> DMatrix<f64> {
        let mut q = point.clone();
        if let Some((i, d)) = shift {
            q.insert(names[i].clone(), point.get(&names[i]).unwrap() + d);
        }
        g.evaluate(&q).unwrap()
    };
    // dg[c] = ∂g/∂x^c
    let dg: Vec<DMatrix<f64>> = (0..n)
        .map(|c| (at(Some((c, h))) - at(Some((c, -h)))) / (2.0 * h))
        .collect();
    let ginv = at(None).try_inverse().unwrap();
    let mut out = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut s = 0.0;
                for d in 0..n {
                    s += 0.5 * ginv[(a, d)] * (dg[c][(d, b)] + dg[b][(c, d)] - dg[d][(b, c)]);
                }
                out[(a * n + b) * n + c] = s;
            }
        }
    }
    out
}

/// Adaptive Simpson quadrature of a plain closure.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 40)
}
