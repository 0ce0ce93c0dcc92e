//! Continuous groups near the identity: generator sets, first-order and
//! exponential elements, numeric group-axiom checks, and the U(1) phase.
//!
//! [`parameter_count`] returns N(N−1)/2, the dimension of the rotation group
//! on N axes, even where the surrounding text speaks of GL(N) (whose
//! dimension would be N²).

use nalgebra::DMatrix;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymmetryError {
    #[error("dimension must be at least 1, got {0}")]
    Dimension(i64),
    #[error("generator set is empty")]
    NoGenerators,
    #[error("generator {index} is {rows}x{cols}, expected {n}x{n}")]
    Shape {
        index: usize,
        rows: usize,
        cols: usize,
        n: usize,
    },
    #[error("generator {0} has a non-finite entry")]
    NonFinite(usize),
    #[error("expected {expected} parameters, got {got}")]
    ParamCount { expected: usize, got: usize },
    #[error("truncation order must be at least 1")]
    Order,
    #[error("sample {index} is not invertible (det = {det})")]
    Singular { index: usize, det: f64 },
    #[error("sample {0} has a non-finite entry")]
    NonFiniteSample(usize),
    #[error("samples have mismatched dimensions")]
    SampleShape,
    #[error("k must be nonzero")]
    ZeroK,
}

/// N(N−1)/2.
pub fn parameter_count(n: i64) -> Result<i64, SymmetryError> {
    if n < 1 {
        return Err(SymmetryError::Dimension(n));
    }
    Ok(n * (n - 1) / 2)
}

/// Square generator matrices G_α, one parameter u^α each.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    n: usize,
    generators: Vec<DMatrix<f64>>,
}

impl GeneratorSet {
    pub fn new(generators: Vec<DMatrix<f64>>) -> Result<Self, SymmetryError> {
        let first = generators.first().ok_or(SymmetryError::NoGenerators)?;
        let n = first.nrows();
        for (index, g) in generators.iter().enumerate() {
            if g.nrows() != n || g.ncols() != n || n == 0 {
                return Err(SymmetryError::Shape {
                    index,
                    rows: g.nrows(),
                    cols: g.ncols(),
                    n,
                });
            }
            if g.iter().any(|v| !v.is_finite()) {
                return Err(SymmetryError::NonFinite(index));
            }
        }
        Ok(GeneratorSet { n, generators })
    }

    /// Builds from row-major nested rows.
    pub fn from_rows(mats: &[Vec<Vec<f64>>]) -> Result<Self, SymmetryError> {
        let mut out = Vec::with_capacity(mats.len());
        for (index, rows) in mats.iter().enumerate() {
            let r = rows.len();
            let c = rows.first().map_or(0, Vec::len);
            if rows.iter().any(|row| row.len() != c) {
                return Err(SymmetryError::Shape {
                    index,
                    rows: r,
                    cols: c,
                    n: r,
                });
            }
            out.push(DMatrix::from_fn(r, c, |i, j| rows[i][j]));
        }
        Self::new(out)
    }

    /// The generators of rotations in each coordinate plane (i, j), i < j.
    pub fn rotations(n: usize) -> Result<Self, SymmetryError> {
        let mut gens = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let mut g = DMatrix::zeros(n, n);
                g[(i, j)] = -1.0;
                g[(j, i)] = 1.0;
                gens.push(g);
            }
        }
        Self::new(gens)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[DMatrix<f64>] {
        &self.generators
    }

    /// Σ_α u^α G_α.
    pub fn argument(&self, params: &[f64]) -> Result<DMatrix<f64>, SymmetryError> {
        if params.len() != self.len() {
            return Err(SymmetryError::ParamCount {
                expected: self.len(),
                got: params.len(),
            });
        }
        let mut sum = DMatrix::zeros(self.n, self.n);
        for (u, g) in params.iter().zip(&self.generators) {
            sum += g * *u;
        }
        Ok(sum)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    FirstOrder,
    Exponential,
    Product,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::FirstOrder => "first-order",
            Provenance::Exponential => "exponential",
            Provenance::Product => "product",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupElementSample {
    pub matrix: DMatrix<f64>,
    pub provenance: Provenance,
}

impl GroupElementSample {
    /// Product of two samples, tagged [`Provenance::Product`].
    pub fn compose(&self, other: &GroupElementSample) -> GroupElementSample {
        GroupElementSample {
            matrix: &self.matrix * &other.matrix,
            provenance: Provenance::Product,
        }
    }
}

/// Max-row-sum norm ‖M‖∞.
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// I + Σ_α u^α G_α.
pub fn first_order_element(gens: &GeneratorSet, params: &[f64]) -> Result<GroupElementSample, SymmetryError> {
    let arg = gens.argument(params)?;
    Ok(GroupElementSample {
        matrix: DMatrix::identity(gens.dim(), gens.dim()) + arg,
        provenance: Provenance::FirstOrder,
    })
}

/// Σ_{k=0}^{order} X^k / k! with X = Σ_α u^α G_α.
pub fn exp_element(gens: &GeneratorSet, params: &[f64], order: usize) -> Result<GroupElementSample, SymmetryError> {
    if order < 1 {
        return Err(SymmetryError::Order);
    }
    let x = gens.argument(params)?;
    let n = gens.dim();
    let mut term = DMatrix::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=order {
        term = &term * &x / k as f64;
        sum += &term;
    }
    Ok(GroupElementSample {
        matrix: sum,
        provenance: Provenance::Exponential,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    /// max ‖(AB)C − A(BC)‖∞ over ordered triples.
    pub associativity: f64,
    /// max ‖AI − A‖∞ and ‖IA − A‖∞.
    pub identity: f64,
    /// max ‖A·A⁻¹ − I‖∞.
    pub inverse: f64,
    /// ‖AB − BA‖∞ for each pair i < j.
    pub commutators: Vec<((usize, usize), f64)>,
    /// Largest ‖A‖∞ among the samples.
    pub max_norm: f64,
}

impl AxiomReport {
    pub fn max_commutator(&self) -> f64 {
        self.commutators.iter().map(|c| c.1).fold(0.0, f64::max)
    }

    /// Informational only.
    pub fn is_abelian(&self, tol: f64) -> bool {
        self.max_commutator() <= tol
    }
}

/// Numeric group axioms over all ordered triples and pairs of samples.
pub fn axiom_report(samples: &[GroupElementSample], tol: f64) -> Result<AxiomReport, SymmetryError> {
    let n = samples.first().map_or(0, |s| s.matrix.nrows());
    for (index, s) in samples.iter().enumerate() {
        if s.matrix.nrows() != n || s.matrix.ncols() != n {
            return Err(SymmetryError::SampleShape);
        }
        if s.matrix.iter().any(|v| !v.is_finite()) {
            return Err(SymmetryError::NonFiniteSample(index));
        }
    }
    let id = DMatrix::<f64>::identity(n, n);
    let mut inverses = Vec::with_capacity(samples.len());
    for (index, s) in samples.iter().enumerate() {
        let det = s.matrix.determinant();
        if det.abs() <= tol {
            return Err(SymmetryError::Singular { index, det });
        }
        let inv = s
            .matrix
            .clone()
            .try_inverse()
            .ok_or(SymmetryError::Singular { index, det })?;
        inverses.push(inv);
    }
    let m: Vec<&DMatrix<f64>> = samples.iter().map(|s| &s.matrix).collect();
    let mut report = AxiomReport {
        associativity: 0.0,
        identity: 0.0,
        inverse: 0.0,
        commutators: Vec::new(),
        max_norm: m.iter().map(|a| inf_norm(a)).fold(0.0, f64::max),
    };
    for a in &m {
        for b in &m {
            let ab = *a * *b;
            for c in &m {
                let d = inf_norm(&(&ab * *c - *a * (*b * *c)));
                report.associativity = report.associativity.max(d);
            }
        }
    }
    for (a, inv) in m.iter().zip(&inverses) {
        let d = inf_norm(&(*a * &id - *a)).max(inf_norm(&(&id * *a - *a)));
        report.identity = report.identity.max(d);
        report.inverse = report.inverse.max(inf_norm(&(*a * inv - &id)));
    }
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            let c = inf_norm(&(m[i] * m[j] - m[j] * m[i]));
            report.commutators.push(((i, j), c));
        }
    }
    Ok(report)
}

/// exp(i·u/k).
pub fn u1_element(u: f64, k: f64) -> Result<Complex64, SymmetryError> {
    if k == 0.0 {
        return Err(SymmetryError::ZeroK);
    }
    Ok(Complex64::from_polar(1.0, u / k))
}
