//! Metric fields, symbolic inversion, and Christoffel symbols of the second
//! kind on charts of arbitrary dimension.
//!
//! Indices are 0-based here; reports convert to 1-based.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::exprlang::{differentiate, evaluate, simplify, Bindings, ChartError, CoordinateChart, EvalError, Expr};

/// Largest dimension accepted by [`invert_metric`].
pub const MAX_SYMBOLIC_DIM: usize = 6;

/// Smallest |det g| accepted at a probe point.
pub const NONDEGENERACY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error("metric must be {expected}x{expected}, got {rows} rows")]
    Shape { expected: usize, rows: usize },
    #[error("metric is not symmetric at ({row}, {col})")]
    Asymmetric { row: usize, col: usize },
    #[error("metric determinant simplifies to zero")]
    Singular,
    #[error("symbolic inversion supports at most {MAX_SYMBOLIC_DIM} dimensions, got {0}")]
    TooLarge(usize),
    #[error("|det g| = {det:e} at {point} is below {NONDEGENERACY_FLOOR:e}")]
    Degenerate { det: f64, point: Bindings },
    #[error("evaluating component {indices:?}: {source}")]
    Eval {
        indices: Vec<usize>,
        #[source]
        source: EvalError,
    },
}

/// Dense rank-3 array indexed `[i][j][k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank3<T> {
    n: usize,
    data: Vec<T>,
}

impl<T> Rank3<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    data.push(f(i, j, k));
                }
            }
        }
        Rank3 { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &T {
        &self.data[(i * self.n + j) * self.n + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: T) {
        let n = self.n;
        self.data[(i * n + j) * n + k] = value;
    }

    /// Entries with their index triples, in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize, usize), &T)> {
        let n = self.n;
        self.data
            .iter()
            .enumerate()
            .map(move |(idx, v)| ((idx / (n * n), (idx / n) % n, idx % n), v))
    }
}

impl Rank3<f64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn upper_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

/// Symmetric N×N matrix of expressions on a chart; stores the upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField {
    chart: CoordinateChart,
    upper: Vec<Expr>,
}

impl MetricField {
    /// Builds from a full matrix; entries are simplified and the two
    /// triangles must agree structurally.
    pub fn new(chart: CoordinateChart, rows: Vec<Vec<Expr>>) -> Result<Self, GeometryError> {
        let n = chart.dim();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(GeometryError::Shape {
                expected: n,
                rows: rows.len(),
            });
        }
        let canon: Vec<Vec<Expr>> = rows.iter().map(|r| r.iter().map(simplify).collect()).collect();
        if let Some((i, j)) = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| canon[i][j] != canon[j][i])
        {
            return Err(GeometryError::Asymmetric { row: i, col: j });
        }
        Ok(Self::from_upper(chart, |i, j| canon[i][j].clone()))
    }

    /// Builds from a function evaluated on the upper triangle `i <= j`.
    pub fn from_upper(chart: CoordinateChart, mut f: impl FnMut(usize, usize) -> Expr) -> Self {
        let n = chart.dim();
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                upper.push(simplify(&f(i, j)));
            }
        }
        MetricField { chart, upper }
    }

    pub fn identity(chart: CoordinateChart) -> Self {
        Self::from_upper(chart, |i, j| if i == j { Expr::one() } else { Expr::zero() })
    }

    pub fn diagonal(chart: CoordinateChart, diag: Vec<Expr>) -> Result<Self, GeometryError> {
        if diag.len() != chart.dim() {
            return Err(GeometryError::Shape {
                expected: chart.dim(),
                rows: diag.len(),
            });
        }
        Ok(Self::from_upper(chart, |i, j| {
            if i == j {
                diag[i].clone()
            } else {
                Expr::zero()
            }
        }))
    }

    pub fn chart(&self) -> &CoordinateChart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.upper[upper_index(self.dim(), i, j)]
    }

    pub fn rows(&self) -> Vec<Vec<Expr>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).clone()).collect())
            .collect()
    }

    /// Replaces one component (and its mirror).
    pub fn with_component(&self, i: usize, j: usize, value: Expr) -> Self {
        let mut out = self.clone();
        out.upper[upper_index(self.dim(), i, j)] = simplify(&value);
        out
    }

    pub fn is_constant(&self) -> bool {
        self.upper
            .iter()
            .all(|e| self.chart.names().iter().all(|s| !e.contains_symbol(s)))
    }

    pub fn evaluate(&self, point: &Bindings) -> Result<DMatrix<f64>, GeometryError> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = evaluate(self.get(i, j), point).map_err(|source| GeometryError::Eval {
                    indices: vec![i, j],
                    source,
                })?;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }

    /// Checks |det g| > 1e-12 at every point.
    pub fn check_nondegenerate(&self, points: &[Bindings]) -> Result<(), GeometryError> {
        for p in points {
            let det = self.evaluate(p)?.determinant();
            if det.abs() <= NONDEGENERACY_FLOOR {
                return Err(GeometryError::Degenerate { det, point: p.clone() });
            }
        }
        Ok(())
    }
}

/// Symbolic inverse metric g^{ab}.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseMetric {
    chart: CoordinateChart,
    comps: Vec<Expr>,
}

impl InverseMetric {
    pub fn chart(&self) -> &CoordinateChart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.comps[i * self.dim() + j]
    }

    pub fn evaluate(&self, point: &Bindings) -> Result<DMatrix<f64>, GeometryError> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = evaluate(self.get(i, j), point).map_err(|source| GeometryError::Eval {
                    indices: vec![i, j],
                    source,
                })?;
            }
        }
        Ok(m)
    }
}

/// Laplace expansion along rows, memoized on the set of remaining columns.
fn symbolic_det(m: &[Vec<Expr>]) -> Expr {
    fn expand(m: &[Vec<Expr>], mask: u32, memo: &mut HashMap<u32, Expr>) -> Expr {
        if mask == 0 {
            return Expr::one();
        }
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let row = m.len() - mask.count_ones() as usize;
        let mut terms = Vec::new();
        let mut sign_pos = 0;
        for col in 0..m.len() {
            if mask & (1 << col) == 0 {
                continue;
            }
            let entry = &m[row][col];
            if !entry.is_zero() {
                let minor = expand(m, mask & !(1 << col), memo);
                if !minor.is_zero() {
                    let sign = if sign_pos % 2 == 0 { 1 } else { -1 };
                    terms.push(Expr::Product(vec![Expr::int(sign), entry.clone(), minor]));
                }
            }
            sign_pos += 1;
        }
        let v = simplify(&Expr::Sum(terms));
        memo.insert(mask, v.clone());
        v
    }
    let full = (1u32 << m.len()) - 1;
    expand(m, full, &mut HashMap::new())
}

fn minor(m: &[Vec<Expr>], skip_row: usize, skip_col: usize) -> Vec<Vec<Expr>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != skip_row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != skip_col)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect()
}

/// Symbolic determinant of the metric.
pub fn determinant(g: &MetricField) -> Expr {
    symbolic_det(&g.rows())
}

/// Inverse by cofactors over the simplified determinant.
pub fn invert_metric(g: &MetricField) -> Result<InverseMetric, GeometryError> {
    let n = g.dim();
    if n > MAX_SYMBOLIC_DIM {
        return Err(GeometryError::TooLarge(n));
    }
    let rows = g.rows();
    let det = symbolic_det(&rows);
    if det.is_zero() {
        return Err(GeometryError::Singular);
    }
    let inv_det = det.recip();
    let mut comps = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            // (g^-1)_ij = C_ji / det
            let cof = if n == 1 {
                Expr::one()
            } else {
                symbolic_det(&minor(&rows, j, i))
            };
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            comps.push(simplify(&Expr::Product(vec![Expr::int(sign), cof, inv_det.clone()])));
        }
    }
    Ok(InverseMetric {
        chart: g.chart().clone(),
        comps,
    })
}

/// Christoffel symbols Γ^a_{bc}, stored at `[a][b][c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelField {
    chart: CoordinateChart,
    comps: Rank3<Expr>,
}

impl ChristoffelField {
    pub fn chart(&self) -> &CoordinateChart {
        &self.chart
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> &Expr {
        self.comps.get(a, b, c)
    }

    pub fn components(&self) -> &Rank3<Expr> {
        &self.comps
    }

    /// Copy with one component replaced, no symmetry enforced.
    pub fn with_component(&self, a: usize, b: usize, c: usize, value: Expr) -> Self {
        let mut out = self.clone();
        out.comps.set(a, b, c, value);
        out
    }

    pub fn is_identically_zero(&self) -> bool {
        self.comps.iter().all(|(_, e)| e.is_zero())
    }

    /// Components that are not literally zero, as 0-based triples.
    pub fn nonzero(&self) -> Vec<((usize, usize, usize), &Expr)> {
        self.comps.iter().filter(|(_, e)| !e.is_zero()).collect()
    }

    /// Index triples where Γ^a_{bc} and Γ^a_{cb} differ structurally.
    pub fn asymmetric_entries(&self) -> Vec<(usize, usize, usize)> {
        let n = self.comps.dim();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in b + 1..n {
                    if self.get(a, b, c) != self.get(a, c, b) {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out
    }

    pub fn evaluate(&self, point: &Bindings) -> Result<Rank3<f64>, GeometryError> {
        let n = self.comps.dim();
        let mut out = Rank3::from_fn(n, |_, _, _| 0.0);
        for ((a, b, c), e) in self.comps.iter() {
            let v = evaluate(e, point).map_err(|source| GeometryError::Eval {
                indices: vec![a, b, c],
                source,
            })?;
            out.set(a, b, c, v);
        }
        Ok(out)
    }
}

/// First derivatives ∂_c g_{ab}, stored at `[c][a][b]`.
pub fn metric_derivatives(g: &MetricField) -> Rank3<Expr> {
    let n = g.dim();
    let mut cache: HashMap<(usize, usize, usize), Expr> = HashMap::new();
    Rank3::from_fn(n, |c, a, b| {
        let key = (c, a.min(b), a.max(b));
        cache
            .entry(key)
            .or_insert_with(|| differentiate(g.get(a, b), g.chart().name(c)))
            .clone()
    })
}

/// Γ^a_{bc} = (g^{ad}/2)(∂_c g_{db} + ∂_b g_{cd} − ∂_d g_{bc}), summed over d.
pub fn christoffel(g: &MetricField) -> Result<ChristoffelField, GeometryError> {
    let inv = invert_metric(g)?;
    let n = g.dim();
    let dg = metric_derivatives(g);
    let comps = Rank3::from_fn(n, |a, b, c| {
        let mut terms = Vec::new();
        for d in 0..n {
            let ginv = inv.get(a, d);
            if ginv.is_zero() {
                continue;
            }
            let bracket = simplify(&Expr::Sum(vec![
                dg.get(c, d, b).clone(),
                dg.get(b, c, d).clone(),
                -dg.get(d, b, c).clone(),
            ]));
            if bracket.is_zero() {
                continue;
            }
            terms.push(Expr::Product(vec![Expr::ratio(1, 2), ginv.clone(), bracket]));
        }
        simplify(&Expr::Sum(terms))
    });
    Ok(ChristoffelField {
        chart: g.chart().clone(),
        comps,
    })
}

/// Covariant derivative of the metric evaluated at `point`:
/// `∇_c g_{ab} = ∂_c g_{ab} − Γ^d_{ca} g_{db} − Γ^d_{cb} g_{ad}`, stored at
/// `[c][a][b]`. Vanishes when `gamma` is the Levi-Civita connection of `g`.
pub fn compatibility_residual(
    g: &MetricField,
    gamma: &ChristoffelField,
    point: &Bindings,
) -> Result<Rank3<f64>, GeometryError> {
    let n = g.dim();
    let gm = g.evaluate(point)?;
    let gam = gamma.evaluate(point)?;
    let dg = metric_derivatives(g);
    let mut out = Rank3::from_fn(n, |_, _, _| 0.0);
    for c in 0..n {
        for a in 0..n {
            for b in 0..n {
                let mut r = evaluate(dg.get(c, a, b), point).map_err(|source| GeometryError::Eval {
                    indices: vec![c, a, b],
                    source,
                })?;
                for d in 0..n {
                    r -= gam.get(d, c, a) * gm[(d, b)];
                    r -= gam.get(d, c, b) * gm[(a, d)];
                }
                out.set(c, a, b, r);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprlang::{numeric_equiv, parse, Probe};

    fn p(t: &str) -> Expr {
        simplify(&parse(t).unwrap())
    }

    fn chart(names: &[&str]) -> CoordinateChart {
        CoordinateChart::new(names.iter().copied()).unwrap()
    }

    fn polar() -> MetricField {
        MetricField::diagonal(chart(&["r", "theta"]), vec![p("1"), p("r^2")]).unwrap()
    }

    fn sphere() -> MetricField {
        MetricField::diagonal(chart(&["theta", "phi"]), vec![p("1"), p("sin(theta)^2")]).unwrap()
    }

    #[test]
    fn identity_inverts_to_identity() {
        let g = MetricField::identity(chart(&["a", "b", "c", "d"]));
        let inv = invert_metric(&g).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { Expr::one() } else { Expr::zero() };
                assert_eq!(inv.get(i, j), &expected);
            }
        }
    }

    #[test]
    fn diagonal_inversion() {
        let inv = invert_metric(&polar()).unwrap();
        assert_eq!(inv.get(0, 0), &Expr::one());
        assert_eq!(inv.get(1, 1), &p("r^-2"));
        assert_eq!(inv.get(0, 1), &Expr::zero());
    }

    #[test]
    fn sphere_inverse_times_metric_is_identity() {
        let g = sphere();
        let inv = invert_metric(&g).unwrap();
        assert_eq!(inv.get(1, 1), &p("sin(theta)^-2"));
        let probe = Probe::new(5).with_domain("theta", 0.2, 2.9);
        for a in 0..2 {
            for c in 0..2 {
                let prod = Expr::Sum((0..2).map(|b| inv.get(a, b).clone() * g.get(b, c).clone()).collect());
                let delta = if a == c { Expr::one() } else { Expr::zero() };
                let r = numeric_equiv(&prod, &delta, &probe, 20, 1e-8).unwrap();
                assert!(r.equivalent);
            }
        }
    }

    #[test]
    fn off_diagonal_inverse() {
        let g = MetricField::new(
            chart(&["x", "y"]),
            vec![vec![p("1"), p("x")], vec![p("x"), p("1 + x^2 + y^2")]],
        )
        .unwrap();
        let inv = invert_metric(&g).unwrap();
        let probe = Probe::new(6).with_domain("x", -1.0, 1.0).with_domain("y", -1.0, 1.0);
        let pts = probe.sample_valid(10, |b| Ok(b.clone())).unwrap();
        for (pt, _) in pts {
            let prod = g.evaluate(&pt).unwrap() * inv.evaluate(&pt).unwrap();
            assert!((prod - DMatrix::identity(2, 2)).amax() < 1e-12);
        }
    }

    #[test]
    fn singular_and_oversized_rejected() {
        let g = MetricField::new(chart(&["x", "y"]), vec![vec![p("x"), p("x")], vec![p("x"), p("x")]]).unwrap();
        assert_eq!(invert_metric(&g).unwrap_err(), GeometryError::Singular);
        let big = MetricField::identity(chart(&["a", "b", "c", "d", "e", "f", "h"]));
        assert_eq!(invert_metric(&big).unwrap_err(), GeometryError::TooLarge(7));
    }

    #[test]
    fn asymmetric_input_rejected() {
        let err = MetricField::new(chart(&["x", "y"]), vec![vec![p("1"), p("x")], vec![p("y"), p("1")]]).unwrap_err();
        assert_eq!(err, GeometryError::Asymmetric { row: 0, col: 1 });
    }

    #[test]
    fn flat_christoffels_are_literal_zero() {
        for n in 1..=5 {
            let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
            let g = MetricField::identity(CoordinateChart::new(names).unwrap());
            assert!(christoffel(&g).unwrap().is_identically_zero());
        }
    }

    #[test]
    fn polar_christoffels() {
        let gam = christoffel(&polar()).unwrap();
        assert_eq!(gam.get(0, 1, 1), &p("-r"));
        assert_eq!(gam.get(1, 0, 1), &p("1/r"));
        assert_eq!(gam.get(1, 1, 0), &p("1/r"));
        assert_eq!(gam.nonzero().len(), 3);
        assert!(gam.asymmetric_entries().is_empty());
    }

    #[test]
    fn sphere_christoffels() {
        let gam = christoffel(&sphere()).unwrap();
        let probe = Probe::new(8).with_domain("theta", 0.2, 2.9);
        let check = |e: &Expr, t: &str| {
            assert!(
                numeric_equiv(e, &p(t), &probe, 20, 1e-12).unwrap().equivalent,
                "{e} vs {t}"
            );
        };
        check(gam.get(0, 1, 1), "-sin(theta)*cos(theta)");
        check(gam.get(1, 0, 1), "cos(theta)/sin(theta)");
        check(gam.get(1, 1, 0), "cos(theta)/sin(theta)");
        assert_eq!(gam.nonzero().len(), 3);
    }

    #[test]
    fn compatibility_holds_and_detects_corruption() {
        let g = polar();
        let gam = christoffel(&g).unwrap();
        let at = Bindings::from([("r", 2.0), ("theta", 1.0)]);
        assert!(compatibility_residual(&g, &gam, &at).unwrap().max_abs() < 1e-10);

        let flat = MetricField::identity(chart(&["x", "y", "z"]));
        let res = compatibility_residual(
            &flat,
            &christoffel(&flat).unwrap(),
            &Bindings::from([("x", 0.3), ("y", 0.1), ("z", 9.0)]),
        )
        .unwrap();
        assert_eq!(res.max_abs(), 0.0);

        let bad = gam.with_component(0, 1, 1, gam.get(0, 1, 1).clone() + p("1/10"));
        assert!(compatibility_residual(&g, &bad, &at).unwrap().max_abs() > 1e-3);
    }

    #[test]
    fn eval_errors_carry_indices() {
        let g = MetricField::diagonal(chart(&["x"]), vec![p("ln(x)")]).unwrap();
        let err = g.evaluate(&Bindings::from([("x", -1.0)])).unwrap_err();
        assert!(matches!(err, GeometryError::Eval { ref indices, .. } if indices == &vec![0, 0]));
    }

    #[test]
    fn nondegeneracy() {
        let g = polar();
        assert!(g
            .check_nondegenerate(&[Bindings::from([("r", 1.0), ("theta", 0.0)])])
            .is_ok());
        assert!(matches!(
            g.check_nondegenerate(&[Bindings::from([("r", 0.0), ("theta", 0.0)])]),
            Err(GeometryError::Degenerate { .. })
        ));
    }
}
