//! Line integrals of one-forms along parametric worldlines, the U(1) phase
//! they induce, integer quantization of that phase, and the per-axis action
//! bound S_μ ≥ 2πk.
//!
//! Everything is real. The imaginary-time convention x⁴ = ict pairs with
//! P_4 = E/ic, so P_4 dx⁴ = E dt and the factors of i cancel before any
//! number is computed.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::exprlang::{differentiate, evaluate, simplify, Bindings, CoordinateChart, EvalError, Expr};
use crate::kaluza::SPACETIME_DIM;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HolonomyError {
    #[error("expected a {SPACETIME_DIM}-dimensional chart, got {0}")]
    Dimension(usize),
    #[error("expected {SPACETIME_DIM} components, got {0}")]
    ComponentCount(usize),
    #[error("{what} depends on the fifth coordinate {fifth:?}")]
    FifthDependence { what: String, fifth: String },
    #[error("path range must satisfy t0 < t1, got [{0}, {1}]")]
    Range(f64, f64),
    #[error("path needs at least 2 samples, got {0}")]
    Samples(usize),
    #[error("path coordinate x{index} depends on {symbol:?}, not only on {param:?}")]
    PathSymbol {
        index: usize,
        symbol: String,
        param: String,
    },
    #[error("path parameter {0:?} collides with a chart coordinate")]
    ParamCollision(String),
    #[error("hbar must be positive and finite, got {0}")]
    Hbar(f64),
    #[error("k must be positive and finite, got {0}")]
    K(f64),
    #[error("phase tolerance must be positive and finite, got {0}")]
    PhaseTol(f64),
    #[error("at t = {t}: {source}")]
    Eval {
        t: f64,
        #[source]
        source: EvalError,
    },
}

/// The four components u_μ of u = u_μ dx^μ.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm {
    chart: CoordinateChart,
    comps: Vec<Expr>,
}

impl OneForm {
    /// Components may mention chart coordinates and free parameters, but
    /// not `fifth`.
    pub fn new(chart: CoordinateChart, comps: Vec<Expr>, fifth: &str) -> Result<Self, HolonomyError> {
        if chart.dim() != SPACETIME_DIM {
            return Err(HolonomyError::Dimension(chart.dim()));
        }
        if comps.len() != SPACETIME_DIM {
            return Err(HolonomyError::ComponentCount(comps.len()));
        }
        let comps: Vec<Expr> = comps.iter().map(simplify).collect();
        if let Some(mu) = comps.iter().position(|c| c.contains_symbol(fifth)) {
            return Err(HolonomyError::FifthDependence {
                what: format!("u_{}", mu + 1),
                fifth: fifth.to_string(),
            });
        }
        Ok(OneForm { chart, comps })
    }

    pub fn chart(&self) -> &CoordinateChart {
        &self.chart
    }

    pub fn get(&self, mu: usize) -> &Expr {
        &self.comps[mu]
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    Midpoint,
    Simpson,
}

impl QuadratureRule {
    pub fn as_str(self) -> &'static str {
        match self {
            QuadratureRule::Midpoint => "midpoint",
            QuadratureRule::Simpson => "simpson",
        }
    }
}

/// x^μ(t) for t in [t0, t1], integrated with `samples` subintervals.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    param: String,
    t0: f64,
    t1: f64,
    coords: Vec<Expr>,
    velocity: Vec<Expr>,
    samples: usize,
}

impl PathSpec {
    pub fn new(param: &str, range: (f64, f64), coords: Vec<Expr>, samples: usize) -> Result<Self, HolonomyError> {
        let (t0, t1) = range;
        if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
            return Err(HolonomyError::Range(t0, t1));
        }
        if samples < 2 {
            return Err(HolonomyError::Samples(samples));
        }
        if coords.len() != SPACETIME_DIM {
            return Err(HolonomyError::ComponentCount(coords.len()));
        }
        let coords: Vec<Expr> = coords.iter().map(simplify).collect();
        for (i, c) in coords.iter().enumerate() {
            if let Some(s) = c.free_symbols().into_iter().find(|s| s != param) {
                return Err(HolonomyError::PathSymbol {
                    index: i + 1,
                    symbol: s,
                    param: param.to_string(),
                });
            }
        }
        let velocity = coords.iter().map(|c| differentiate(c, param)).collect();
        Ok(PathSpec {
            param: param.to_string(),
            t0,
            t1,
            coords,
            velocity,
            samples,
        })
    }

    pub fn param(&self) -> &str {
        &self.param
    }

    pub fn range(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    pub fn coords(&self) -> &[Expr] {
        &self.coords
    }

    /// dx^μ/dt, simplified.
    pub fn velocity(&self) -> &[Expr] {
        &self.velocity
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Axes along which the path moves: dx^μ/dt is not literally zero.
    pub fn moving_axes(&self) -> [bool; SPACETIME_DIM] {
        std::array::from_fn(|mu| !self.velocity[mu].is_zero())
    }

    /// The single axis of motion, if there is exactly one.
    pub fn aligned_axis(&self) -> Option<usize> {
        let moving = self.moving_axes();
        match moving.iter().filter(|m| **m).count() {
            1 => moving.iter().position(|m| *m),
            _ => None,
        }
    }

    /// Same path restricted to [a, b] with `samples` subintervals.
    pub fn restricted(&self, a: f64, b: f64, samples: usize) -> Result<Self, HolonomyError> {
        PathSpec::new(&self.param, (a, b), self.coords.clone(), samples)
    }

    pub fn with_samples(&self, samples: usize) -> Result<Self, HolonomyError> {
        self.restricted(self.t0, self.t1, samples)
    }
}

/// ħ, k, and the phase window used to call a phase an integer multiple of 2π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionConstants {
    hbar: f64,
    k: f64,
    phase_tol: f64,
}

impl Default for ActionConstants {
    fn default() -> Self {
        ActionConstants {
            hbar: 1.0,
            k: 1.0 / (4.0 * PI),
            phase_tol: 1e-6,
        }
    }
}

impl ActionConstants {
    /// `k` defaults to ħ/4π.
    pub fn new(hbar: f64, k: Option<f64>, phase_tol: f64) -> Result<Self, HolonomyError> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(HolonomyError::Hbar(hbar));
        }
        let k = k.unwrap_or(hbar / (4.0 * PI));
        if !(k.is_finite() && k > 0.0) {
            return Err(HolonomyError::K(k));
        }
        if !(phase_tol.is_finite() && phase_tol > 0.0) {
            return Err(HolonomyError::PhaseTol(phase_tol));
        }
        Ok(ActionConstants { hbar, k, phase_tol })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn phase_tol(&self) -> f64 {
        self.phase_tol
    }

    /// Phase window converted to units of action.
    pub fn action_tol(&self) -> f64 {
        self.phase_tol * self.k
    }
}

/// Line-integral results along one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathAction {
    pub total: f64,
    /// ∫ u_μ (dx^μ/dt) dt with no sum over μ.
    pub per_axis: [f64; SPACETIME_DIM],
}

/// Evaluates ∫ u_μ dx^μ along `path`. `extra` binds parameters other than
/// the chart coordinates and the path parameter.
pub fn integrate_one_form(
    u: &OneForm,
    path: &PathSpec,
    rule: QuadratureRule,
    extra: &Bindings,
) -> Result<PathAction, HolonomyError> {
    let chart = u.chart();
    let integrand = |t: f64| -> Result<[f64; SPACETIME_DIM], HolonomyError> {
        let err = |source| HolonomyError::Eval { t, source };
        let mut at = extra.clone();
        at.insert(path.param(), t);
        let mut point = at.clone();
        for mu in 0..SPACETIME_DIM {
            point.insert(chart.name(mu), evaluate(&path.coords[mu], &at).map_err(err)?);
        }
        let mut out = [0.0; SPACETIME_DIM];
        for (mu, slot) in out.iter_mut().enumerate() {
            if path.velocity[mu].is_zero() {
                continue;
            }
            let v = evaluate(&path.velocity[mu], &point).map_err(err)?;
            *slot = evaluate(u.get(mu), &point).map_err(err)? * v;
        }
        Ok(out)
    };
    let n = path.samples;
    let h = (path.t1 - path.t0) / n as f64;
    let mut per_axis = [0.0; SPACETIME_DIM];
    let node = |i: usize| if i == n { path.t1 } else { path.t0 + h * i as f64 };
    let mut left = match rule {
        QuadratureRule::Simpson => Some(integrand(path.t0)?),
        QuadratureRule::Midpoint => None,
    };
    for i in 0..n {
        let (a, b) = (node(i), node(i + 1));
        let mid = integrand(0.5 * (a + b))?;
        match rule {
            QuadratureRule::Midpoint => {
                for mu in 0..SPACETIME_DIM {
                    per_axis[mu] += (b - a) * mid[mu];
                }
            }
            QuadratureRule::Simpson => {
                let fa = left.expect("simpson keeps the left node");
                let fb = integrand(b)?;
                for mu in 0..SPACETIME_DIM {
                    per_axis[mu] += (b - a) / 6.0 * (fa[mu] + 4.0 * mid[mu] + fb[mu]);
                }
                left = Some(fb);
            }
        }
    }
    Ok(PathAction {
        total: per_axis.iter().sum(),
        per_axis,
    })
}

/// Multiplies every component by exp(i·S/k).
pub fn phase_transform(psi: &[Complex64], action: f64, k: f64) -> Result<Vec<Complex64>, HolonomyError> {
    if !(k.is_finite() && k > 0.0) {
        return Err(HolonomyError::K(k));
    }
    let phase = Complex64::from_polar(1.0, action / k);
    Ok(psi.iter().map(|z| z * phase).collect())
}

/// True when `phase_transform` moves no component by more than the chord of
/// an arc of `phase_tol` radians.
pub fn phase_fixes(psi: &[Complex64], action: f64, c: &ActionConstants) -> Result<bool, HolonomyError> {
    let out = phase_transform(psi, action, c.k)?;
    let chord = 2.0 * (0.5 * c.phase_tol).sin();
    Ok(psi
        .iter()
        .zip(&out)
        .all(|(a, b)| (a - b).norm() <= chord * a.norm() * (1.0 + 1e-12)))
}

/// n with |S/k − 2πn| ≤ phase_tol, if any.
pub fn quantization_check(action: f64, c: &ActionConstants) -> Option<i64> {
    let phase = action / c.k;
    let n = (phase / (2.0 * PI)).round();
    if (phase - 2.0 * PI * n).abs() <= c.phase_tol {
        Some(n as i64)
    } else {
        None
    }
}

/// (p₁Δx₁, p₂Δx₂, p₃Δx₃, E·Δt).
pub fn momentum_action(energy: f64, dt: f64, p: [f64; 3], dx: [f64; 3]) -> [f64; SPACETIME_DIM] {
    [p[0] * dx[0], p[1] * dx[1], p[2] * dx[2], energy * dt]
}

/// 2πk; ħ/2 when k = ħ/4π.
pub fn min_action(c: &ActionConstants) -> f64 {
    2.0 * PI * c.k
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundVerdict {
    pub action: f64,
    /// action − threshold.
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub threshold: f64,
    /// `None` for axes not aligned with the motion.
    pub axes: [Option<BoundVerdict>; SPACETIME_DIM],
}

impl BoundReport {
    /// All judged axes pass. Vacuously true when none are judged.
    pub fn passed(&self) -> bool {
        self.axes.iter().flatten().all(|v| v.pass)
    }
}

fn verdict(action: f64, c: &ActionConstants) -> BoundVerdict {
    let threshold = min_action(c);
    BoundVerdict {
        action,
        margin: action - threshold,
        pass: action >= threshold - c.action_tol(),
    }
}

/// S_μ ≥ 2πk − tolerance on every supplied axis.
pub fn heisenberg_bound_check(per_axis: &[Option<f64>; SPACETIME_DIM], c: &ActionConstants) -> BoundReport {
    BoundReport {
        threshold: min_action(c),
        axes: per_axis.map(|a| a.map(|s| verdict(s, c))),
    }
}

/// The bound applied to the summed action.
pub fn summed_bound_check(total: f64, c: &ActionConstants) -> BoundVerdict {
    verdict(total, c)
}
