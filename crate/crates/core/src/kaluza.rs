//! Five-dimensional metrics over a four-dimensional chart, the cylinder
//! condition, the mixed connection components Γ^μ_{ν5}, and the field
//! tensor they reduce to.
//!
//! The fifth coordinate always sits at index 4 of the assembled metric, so
//! `g_{5μ}` is `metric.get(4, mu)`.

use nalgebra::DMatrix;

use crate::exprlang::{
    differentiate, evaluate, simplify, Bindings, ChartError, CoordinateChart, EquivError, EquivSettings, EvalError,
    Expr,
};
use crate::geometry::{invert_metric, GeometryError, InverseMetric, MetricField};

pub const SPACETIME_DIM: usize = 4;

/// Independent index triples (λ, μ, ν) of the cyclic identity on a 4-chart.
pub const BIANCHI_TRIPLES: [(usize, usize, usize); 4] = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KaluzaError {
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
    #[error("expected a {SPACETIME_DIM}-dimensional chart, got {0}")]
    Dimension(usize),
    #[error("expected {SPACETIME_DIM} potential components, got {0}")]
    ComponentCount(usize),
    #[error("charts do not match: {0} vs {1}")]
    ChartMismatch(CoordinateChart, CoordinateChart),
    #[error("fifth coordinate {0:?} collides with a spacetime coordinate")]
    FifthCollision(String),
    #[error("{what} depends on the fifth coordinate {fifth:?}")]
    FifthDependence { what: String, fifth: String },
    #[error("metric is not cylindrical")]
    NotCylindrical,
    #[error("fifth shift requires g55 = 1, found {0}")]
    G55NotOne(Expr),
    #[error("evaluating {what}: {source}")]
    Eval {
        what: String,
        #[source]
        source: EvalError,
    },
}

fn require_4d(chart: &CoordinateChart) -> Result<(), KaluzaError> {
    if chart.dim() != SPACETIME_DIM {
        return Err(KaluzaError::Dimension(chart.dim()));
    }
    Ok(())
}

fn free_of_fifth(e: &Expr, fifth: &str, what: impl FnOnce() -> String) -> Result<(), KaluzaError> {
    if e.contains_symbol(fifth) {
        return Err(KaluzaError::FifthDependence {
            what: what(),
            fifth: fifth.to_string(),
        });
    }
    Ok(())
}

/// Mixed metric components A_μ = g_{5μ}.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugePotential {
    chart: CoordinateChart,
    fifth: String,
    comps: Vec<Expr>,
}

impl GaugePotential {
    pub fn new(chart: CoordinateChart, fifth: &str, comps: Vec<Expr>) -> Result<Self, KaluzaError> {
        require_4d(&chart)?;
        if chart.contains(fifth) {
            return Err(KaluzaError::FifthCollision(fifth.to_string()));
        }
        if comps.len() != SPACETIME_DIM {
            return Err(KaluzaError::ComponentCount(comps.len()));
        }
        let comps: Vec<Expr> = comps.iter().map(simplify).collect();
        for (mu, c) in comps.iter().enumerate() {
            free_of_fifth(c, fifth, || format!("A_{}", mu + 1))?;
        }
        Ok(GaugePotential {
            chart,
            fifth: fifth.to_string(),
            comps,
        })
    }

    pub fn zero(chart: CoordinateChart, fifth: &str) -> Result<Self, KaluzaError> {
        Self::new(chart, fifth, vec![Expr::zero(); SPACETIME_DIM])
    }

    pub fn chart(&self) -> &CoordinateChart {
        &self.chart
    }

    pub fn fifth(&self) -> &str {
        &self.fifth
    }

    pub fn get(&self, mu: usize) -> &Expr {
        &self.comps[mu]
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }
}

/// Five-dimensional metric with the fifth coordinate last.
#[derive(Debug, Clone, PartialEq)]
pub struct FiveMetric {
    chart4: CoordinateChart,
    fifth: String,
    metric: MetricField,
    cylindrical: bool,
}

impl FiveMetric {
    /// Wraps an arbitrary 5×5 metric whose last coordinate is the fifth.
    /// Unlike [`assemble_five_metric`] this accepts fifth-dependent blocks.
    pub fn from_metric(metric: MetricField) -> Result<Self, KaluzaError> {
        let names = metric.chart().names();
        if names.len() != SPACETIME_DIM + 1 {
            return Err(KaluzaError::Dimension(names.len()));
        }
        let chart4 = CoordinateChart::new(names[..SPACETIME_DIM].iter().cloned())?;
        let fifth = names[SPACETIME_DIM].clone();
        let n = SPACETIME_DIM + 1;
        let cylindrical = (0..n).all(|i| (i..n).all(|j| !metric.get(i, j).contains_symbol(&fifth)));
        Ok(FiveMetric {
            chart4,
            fifth,
            metric,
            cylindrical,
        })
    }

    pub fn chart4(&self) -> &CoordinateChart {
        &self.chart4
    }

    pub fn fifth(&self) -> &str {
        &self.fifth
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    /// True when no component mentions the fifth coordinate.
    pub fn is_cylindrical(&self) -> bool {
        self.cylindrical
    }

    pub fn g4(&self) -> MetricField {
        MetricField::from_upper(self.chart4.clone(), |i, j| self.metric.get(i, j).clone())
    }

    pub fn g55(&self) -> &Expr {
        self.metric.get(SPACETIME_DIM, SPACETIME_DIM)
    }

    /// The g_{5μ} row, whatever it depends on.
    pub fn mixed_row(&self) -> Vec<Expr> {
        (0..SPACETIME_DIM)
            .map(|mu| self.metric.get(SPACETIME_DIM, mu).clone())
            .collect()
    }

    pub fn potential(&self) -> Result<GaugePotential, KaluzaError> {
        GaugePotential::new(self.chart4.clone(), &self.fifth, self.mixed_row())
    }
}

/// Places `g4`, `A`, and `g55` into one symmetric 5×5 metric.
pub fn assemble_five_metric(
    g4: &MetricField,
    potential: &GaugePotential,
    g55: &Expr,
) -> Result<FiveMetric, KaluzaError> {
    require_4d(g4.chart())?;
    if g4.chart() != potential.chart() {
        return Err(KaluzaError::ChartMismatch(
            g4.chart().clone(),
            potential.chart().clone(),
        ));
    }
    let fifth = potential.fifth();
    free_of_fifth(g55, fifth, || "g55".into())?;
    let chart5 = g4.chart().extended(fifth).map_err(|e| match e {
        ChartError::Duplicate(n) => KaluzaError::FifthCollision(n),
        other => other.into(),
    })?;
    let metric = MetricField::from_upper(chart5, |i, j| match (i < SPACETIME_DIM, j < SPACETIME_DIM) {
        (true, true) => g4.get(i, j).clone(),
        (true, false) => potential.get(i).clone(),
        (false, true) => potential.get(j).clone(),
        (false, false) => g55.clone(),
    });
    FiveMetric::from_metric(metric)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CylinderViolation {
    /// 1-based (row, col).
    pub component: (usize, usize),
    /// ∂g/∂x⁵ after simplification.
    pub derivative: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CylinderReport {
    pub violations: Vec<CylinderViolation>,
}

impl CylinderReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Tests ∂g_{MN}/∂x⁵ ≡ 0 for every component: literal zero after
/// simplification, otherwise numerically zero at the probe points.
pub fn cylinder_check(g: &FiveMetric, numeric: &EquivSettings) -> Result<CylinderReport, KaluzaError> {
    let n = SPACETIME_DIM + 1;
    let mut violations = Vec::new();
    for i in 0..n {
        for j in i..n {
            let d = differentiate(g.metric.get(i, j), &g.fifth);
            if d.is_zero() {
                continue;
            }
            if !numeric.check(&d, &Expr::zero())?.equivalent {
                violations.push(CylinderViolation {
                    component: (i + 1, j + 1),
                    derivative: d,
                });
            }
        }
    }
    Ok(CylinderReport { violations })
}

/// Square grid of expressions on a 4-chart, indexed `[row][col]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor2 {
    chart: CoordinateChart,
    comps: Vec<Expr>,
}

/// F^μ_ν, row index raised.
pub type MixedFieldTensor = Tensor2;
/// Γ^μ_{ν5} at `[μ][ν]`.
pub type MixedConnection = Tensor2;
/// f_{μν}, both indices lowered.
pub type FieldStrength = Tensor2;

impl Tensor2 {
    pub fn from_fn(chart: CoordinateChart, mut f: impl FnMut(usize, usize) -> Expr) -> Self {
        let n = chart.dim();
        let mut comps = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                comps.push(simplify(&f(r, c)));
            }
        }
        Tensor2 { chart, comps }
    }

    pub fn chart(&self) -> &CoordinateChart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn get(&self, r: usize, c: usize) -> &Expr {
        &self.comps[r * self.dim() + c]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Expr::is_zero)
    }

    pub fn evaluate(&self, point: &Bindings) -> Result<DMatrix<f64>, KaluzaError> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                m[(r, c)] = evaluate(self.get(r, c), point).map_err(|source| KaluzaError::Eval {
                    what: format!("component ({}, {})", r + 1, c + 1),
                    source,
                })?;
            }
        }
        Ok(m)
    }
}

fn half_raised(inv: &InverseMetric, mu: usize, bracket: impl Fn(usize) -> Expr) -> Expr {
    let terms = (0..SPACETIME_DIM)
        .filter(|&alpha| !inv.get(mu, alpha).is_zero())
        .map(|alpha| Expr::Product(vec![Expr::ratio(1, 2), inv.get(mu, alpha).clone(), bracket(alpha)]))
        .collect();
    Expr::Sum(terms)
}

/// Γ^μ_{ν5} = (g^{μα}/2)(∂g_{αν}/∂x⁵ + ∂g_{5α}/∂x^ν − ∂g_{ν5}/∂x^α), with
/// g^{μα} the inverse of the 4×4 block. The x⁵ term is kept.
pub fn mixed_connection(g: &FiveMetric) -> Result<MixedConnection, KaluzaError> {
    let inv = invert_metric(&g.g4())?;
    let m = &g.metric;
    let five = SPACETIME_DIM;
    let x = |i: usize| g.chart4.name(i).to_string();
    Ok(Tensor2::from_fn(g.chart4.clone(), |mu, nu| {
        half_raised(&inv, mu, |alpha| {
            Expr::Sum(vec![
                differentiate(m.get(alpha, nu), &g.fifth),
                differentiate(m.get(five, alpha), &x(nu)),
                -differentiate(m.get(nu, five), &x(alpha)),
            ])
        })
    }))
}

/// F^μ_ν = (g^{μα}/2)(∂g_{5α}/∂x^ν − ∂g_{ν5}/∂x^α), including the factor 1/2.
pub fn field_tensor(g4: &MetricField, potential: &GaugePotential) -> Result<MixedFieldTensor, KaluzaError> {
    require_4d(g4.chart())?;
    if g4.chart() != potential.chart() {
        return Err(KaluzaError::ChartMismatch(
            g4.chart().clone(),
            potential.chart().clone(),
        ));
    }
    let inv = invert_metric(g4)?;
    let chart = g4.chart();
    Ok(Tensor2::from_fn(chart.clone(), |mu, nu| {
        half_raised(&inv, mu, |alpha| {
            Expr::Sum(vec![
                differentiate(potential.get(alpha), chart.name(nu)),
                -differentiate(potential.get(nu), chart.name(alpha)),
            ])
        })
    }))
}

/// f_{μν} = ∂_μ A_ν − ∂_ν A_μ.
pub fn standard_curl(potential: &GaugePotential) -> FieldStrength {
    let chart = potential.chart();
    Tensor2::from_fn(chart.clone(), |mu, nu| {
        differentiate(potential.get(nu), chart.name(mu)) - differentiate(potential.get(mu), chart.name(nu))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentCheck {
    /// 1-based (μ, ν).
    pub component: (usize, usize),
    pub equivalent: bool,
    pub scaled_error: f64,
    pub witness: Bindings,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReductionReport {
    Skipped { reason: String },
    Checked { components: Vec<ComponentCheck> },
}

impl ReductionReport {
    pub fn passed(&self) -> bool {
        match self {
            ReductionReport::Skipped { .. } => false,
            ReductionReport::Checked { components } => components.iter().all(|c| c.equivalent),
        }
    }
}

/// Componentwise numeric comparison of two 4×4 grids.
pub fn compare_tensors(
    lhs: &Tensor2,
    rhs: &Tensor2,
    numeric: &EquivSettings,
) -> Result<Vec<ComponentCheck>, KaluzaError> {
    let n = lhs.dim();
    let mut out = Vec::with_capacity(n * n);
    for mu in 0..n {
        for nu in 0..n {
            let r = numeric.check(lhs.get(mu, nu), rhs.get(mu, nu))?;
            out.push(ComponentCheck {
                component: (mu + 1, nu + 1),
                equivalent: r.equivalent,
                scaled_error: r.worst.scaled_error,
                witness: r.worst.point,
            });
        }
    }
    Ok(out)
}

/// Under the cylinder condition the mixed connection must equal the field
/// tensor. Skipped, never passed, when the gate fails.
pub fn reduction_identity_check(g: &FiveMetric, numeric: &EquivSettings) -> Result<ReductionReport, KaluzaError> {
    let cyl = cylinder_check(g, numeric)?;
    if !cyl.passed() {
        let comps: Vec<String> = cyl
            .violations
            .iter()
            .map(|v| format!("g{}{}", v.component.0, v.component.1))
            .collect();
        return Ok(ReductionReport::Skipped {
            reason: format!("cylinder condition fails for {}", comps.join(", ")),
        });
    }
    let lhs = mixed_connection(g)?;
    let rhs = field_tensor(&g.g4(), &g.potential()?)?;
    Ok(ReductionReport::Checked {
        components: compare_tensors(&lhs, &rhs, numeric)?,
    })
}

/// A_μ → A_μ + ∂λ/∂x^μ.
pub fn gauge_transform(potential: &GaugePotential, lambda: &Expr) -> Result<GaugePotential, KaluzaError> {
    free_of_fifth(lambda, potential.fifth(), || "gauge function".into())?;
    let chart = potential.chart();
    let comps = (0..SPACETIME_DIM)
        .map(|mu| potential.get(mu).clone() + differentiate(lambda, chart.name(mu)))
        .collect();
    GaugePotential::new(chart.clone(), potential.fifth(), comps)
}

/// Coordinate change x⁵ → x⁵ + λ(x^μ) applied to the mixed row by pulling
/// back with the Jacobian J^A_M = ∂x^A/∂x'^M. The 4×4 block and g55 carry
/// over unchanged.
pub fn fifth_shift(g: &FiveMetric, lambda: &Expr) -> Result<FiveMetric, KaluzaError> {
    if !g.is_cylindrical() {
        return Err(KaluzaError::NotCylindrical);
    }
    if !g.g55().is_one() {
        return Err(KaluzaError::G55NotOne(g.g55().clone()));
    }
    free_of_fifth(lambda, &g.fifth, || "gauge function".into())?;
    let n = SPACETIME_DIM + 1;
    let five = SPACETIME_DIM;
    let jacobian = |a: usize, m: usize| -> Expr {
        if a == five && m < five {
            differentiate(lambda, g.chart4.name(m))
        } else if a == m {
            Expr::one()
        } else {
            Expr::zero()
        }
    };
    let shifted_row: Vec<Expr> = (0..SPACETIME_DIM)
        .map(|mu| {
            let mut terms = Vec::new();
            for a in 0..n {
                let ja = jacobian(a, five);
                if ja.is_zero() {
                    continue;
                }
                for b in 0..n {
                    let jb = jacobian(b, mu);
                    if jb.is_zero() {
                        continue;
                    }
                    terms.push(Expr::Product(vec![ja.clone(), jb, g.metric.get(a, b).clone()]));
                }
            }
            Expr::Sum(terms)
        })
        .collect();
    let potential = GaugePotential::new(g.chart4.clone(), &g.fifth, shifted_row)?;
    assemble_five_metric(&g.g4(), &potential, g.g55())
}

/// Cyclic sums ∂_λ f_{μν} + ∂_μ f_{νλ} + ∂_ν f_{λμ} at `point`, one per
/// entry of [`BIANCHI_TRIPLES`].
pub fn bianchi_residual_of(f: &FieldStrength, point: &Bindings) -> Result<[f64; 4], KaluzaError> {
    require_4d(f.chart())?;
    let x = |i: usize| f.chart().name(i).to_string();
    let mut out = [0.0; 4];
    for (slot, &(l, m, n)) in BIANCHI_TRIPLES.iter().enumerate() {
        let cyclic = Expr::Sum(vec![
            differentiate(f.get(m, n), &x(l)),
            differentiate(f.get(n, l), &x(m)),
            differentiate(f.get(l, m), &x(n)),
        ]);
        out[slot] = evaluate(&cyclic, point).map_err(|source| KaluzaError::Eval {
            what: format!("cyclic sum ({}, {}, {})", l + 1, m + 1, n + 1),
            source,
        })?;
    }
    Ok(out)
}

/// Homogeneous Maxwell residuals of f = dA at `point`.
pub fn bianchi_residual(potential: &GaugePotential, point: &Bindings) -> Result<[f64; 4], KaluzaError> {
    bianchi_residual_of(&standard_curl(potential), point)
}
