//! The fixed sequence of checks run on a scenario.
//!
//! Every id in [`CHECK_IDS`] appears exactly once in every report. A check
//! whose gate is not met is a skip with the reason recorded; a check that
//! cannot be computed is a failure carrying the error text.

use std::f64::consts::PI;
use std::fmt::Display;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use super::report::{num, Check, Report, Status};
use super::scenario::Scenario;
use crate::exprlang::{Bindings, EquivSettings};
use crate::geometry::{
    christoffel, compatibility_residual, invert_metric, ChristoffelField, MetricField, NONDEGENERACY_FLOOR,
};
use crate::holonomy::{
    heisenberg_bound_check, integrate_one_form, min_action, phase_fixes, quantization_check, summed_bound_check,
    ActionConstants, PathAction,
};
use crate::kaluza::{
    bianchi_residual, compare_tensors, cylinder_check, field_tensor, fifth_shift, gauge_transform,
    reduction_identity_check, standard_curl, FiveMetric, GaugePotential, ReductionReport, SPACETIME_DIM,
};
use crate::symmetry::{
    axiom_report, exp_element, first_order_element, inf_norm, parameter_count, u1_element, GeneratorSet,
};

pub const CHECK_IDS: [&str; 21] = [
    "geometry.metric_nondegenerate",
    "geometry.inverse_identity",
    "geometry.christoffel_symmetry",
    "geometry.compatibility_4d",
    "geometry.compatibility_5d",
    "kaluza.cylinder",
    "kaluza.reduction_identity",
    "kaluza.field_antisymmetry",
    "kaluza.factor_audit",
    "kaluza.gauge_invariance",
    "kaluza.fifth_shift",
    "kaluza.bianchi",
    "symmetry.parameter_count",
    "symmetry.expansion_remainder",
    "symmetry.group_axioms",
    "symmetry.u1",
    "holonomy.quantization",
    "holonomy.phase_consistency",
    "holonomy.heisenberg_bound",
    "holonomy.axis_bound",
    "holonomy.min_action",
];

/// Seeded points per pointwise check.
pub const PROBE_POINTS: usize = 20;
pub const COMPATIBILITY_TOL: f64 = 1e-8;
pub const INVERSE_TOL: f64 = 1e-9;
pub const BIANCHI_TOL: f64 = 1e-8;
pub const U1_TOL: f64 = 1e-12;
pub const EXP_ORDER: usize = 30;
pub const REMAINDER_NORMS: [f64; 3] = [0.1, 0.05, 0.01];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    /// Multiplies every tolerance.
    pub tolerance_scale: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options { tolerance_scale: 1.0 }
    }
}

type CheckResult = Result<Check, String>;

fn err(e: impl Display) -> String {
    e.to_string()
}

struct Ctx<'a> {
    s: &'a Scenario,
    scale: f64,
    numeric: EquivSettings,
    points: Vec<Bindings>,
    constants: ActionConstants,
    five: Result<FiveMetric, String>,
    field: Result<crate::kaluza::MixedFieldTensor, String>,
}

impl Ctx<'_> {
    fn num_tol(&self) -> f64 {
        self.s.num_tol * self.scale
    }

    fn five(&self) -> Result<&FiveMetric, String> {
        self.five.as_ref().map_err(Clone::clone)
    }
}

/// Largest `f` over the probe points and the point attaining it.
fn worst<E: Display>(
    points: &[Bindings],
    mut f: impl FnMut(&Bindings) -> Result<f64, E>,
) -> Result<(f64, Bindings), String> {
    let mut best = (f64::NEG_INFINITY, Bindings::new());
    for p in points {
        let v = f(p).map_err(|e| format!("at {p}: {e}"))?;
        if v > best.0 || v.is_nan() {
            best = (v, p.clone());
        }
    }
    Ok(best)
}

fn five_metric(s: &Scenario) -> Result<FiveMetric, String> {
    let chart5 = s.chart.extended(&s.fifth).map_err(err)?;
    let metric = MetricField::from_upper(chart5, |i, j| match (i < SPACETIME_DIM, j < SPACETIME_DIM) {
        (true, true) => s.g4.get(i, j).clone(),
        (true, false) => s.potential.get(i).clone(),
        (false, true) => s.potential.get(j).clone(),
        (false, false) => s.g55.clone(),
    });
    FiveMetric::from_metric(metric).map_err(err)
}

pub fn run_pipeline(s: &Scenario, opts: &Options) -> Report {
    let scale = opts.tolerance_scale;
    let probe = s.probe();
    let c = s.constants;
    let constants = ActionConstants::new(c.hbar(), Some(c.k()), c.phase_tol() * scale).unwrap_or(c);
    let points = probe
        .sample_valid(PROBE_POINTS, |b| Ok(b.clone()))
        .map(|v| v.into_iter().map(|(p, _)| p).collect())
        .unwrap_or_default();
    let ctx = Ctx {
        s,
        scale,
        numeric: EquivSettings::new(probe, PROBE_POINTS, s.num_tol * scale),
        points,
        constants,
        five: five_metric(s),
        field: field_tensor(&s.g4, &s.potential).map_err(err),
    };
    let paths: Vec<Result<PathAction, String>> = s
        .paths
        .iter()
        .map(|p| {
            let extra = Bindings::from([("hbar", constants.hbar()), ("k", constants.k())]);
            integrate_one_form(&s.one_forms[p.form], &p.spec, p.rule, &extra).map_err(err)
        })
        .collect();

    type Runner<'a> = Box<dyn Fn(&Ctx) -> CheckResult + 'a>;
    let runners: [(&'static str, &'static str, Runner); 21] = [
        ("geometry.metric_nondegenerate", "det g != 0", Box::new(nondegenerate)),
        ("geometry.inverse_identity", "g g^-1 = I", Box::new(inverse_identity)),
        (
            "geometry.christoffel_symmetry",
            "Christoffel symbols of the second kind",
            Box::new(christoffel_symmetry),
        ),
        (
            "geometry.compatibility_4d",
            "metric compatibility of the connection",
            Box::new(|c: &Ctx| compatibility(c, false)),
        ),
        (
            "geometry.compatibility_5d",
            "metric compatibility of the connection",
            Box::new(|c: &Ctx| compatibility(c, true)),
        ),
        ("kaluza.cylinder", "cylinder condition", Box::new(cylinder)),
        (
            "kaluza.reduction_identity",
            "mixed connection = field tensor",
            Box::new(reduction),
        ),
        (
            "kaluza.field_antisymmetry",
            "antisymmetry of the lowered field tensor",
            Box::new(antisymmetry),
        ),
        (
            "kaluza.factor_audit",
            "field tensor = half the raised curl",
            Box::new(factor_audit),
        ),
        (
            "kaluza.gauge_invariance",
            "field tensor under A -> A + d lambda",
            Box::new(gauge_invariance),
        ),
        (
            "kaluza.fifth_shift",
            "x5 -> x5 + lambda acts as a gauge transformation",
            Box::new(shift),
        ),
        ("kaluza.bianchi", "homogeneous Maxwell equations", Box::new(bianchi)),
        (
            "symmetry.parameter_count",
            "N(N-1)/2 parameters",
            Box::new(|_: &Ctx| count()),
        ),
        (
            "symmetry.expansion_remainder",
            "first-order expansion about the identity",
            Box::new(remainder),
        ),
        ("symmetry.group_axioms", "group axioms", Box::new(axioms)),
        ("symmetry.u1", "U(1) phase factor exp(i u/k)", Box::new(u1)),
        (
            "holonomy.quantization",
            "integral of u = 2 pi n k",
            Box::new(|c: &Ctx| quantization(c, &paths)),
        ),
        (
            "holonomy.phase_consistency",
            "single-valued phase",
            Box::new(|c: &Ctx| consistency(c, &paths)),
        ),
        (
            "holonomy.heisenberg_bound",
            "P dx >= hbar/2, summed over axes",
            Box::new(|c: &Ctx| summed_bound(c, &paths)),
        ),
        (
            "holonomy.axis_bound",
            "P_mu dx^mu >= hbar/2 on an aligned axis",
            Box::new(|c: &Ctx| axis_bound(c, &paths)),
        ),
        ("holonomy.min_action", "2 pi k = hbar/2", Box::new(minimum)),
    ];
    let checks = runners
        .iter()
        .map(|(id, eq, run)| match run(&ctx) {
            Ok(mut c) => {
                c.id = id;
                c.eq = eq;
                c
            }
            Err(e) => Check::new(id, eq, Status::Fail).value("error", e),
        })
        .collect();
    Report {
        scenario: s.name.clone(),
        seed: s.seed,
        checks,
    }
}

fn blank(status: Status) -> Check {
    Check::new("", "", status)
}

fn skip(reason: &str) -> CheckResult {
    Ok(Check::skip("", "", reason))
}

fn nondegenerate(c: &Ctx) -> CheckResult {
    let five = c.five()?;
    let (neg4, p4) = worst(&c.points, |p| c.s.g4.evaluate(p).map(|m| -m.determinant().abs()))?;
    let (neg5, p5) = worst(&c.points, |p| five.metric().evaluate(p).map(|m| -m.determinant().abs()))?;
    let (d4, d5) = (-neg4, -neg5);
    let witness = if d4 <= d5 { p4 } else { p5 };
    Ok(
        blank(Status::from_bool(d4 > NONDEGENERACY_FLOOR && d5 > NONDEGENERACY_FLOOR))
            .value("min_abs_det_4", num(d4))
            .value("min_abs_det_5", num(d5))
            .tol(NONDEGENERACY_FLOOR)
            .witness(Some(witness)),
    )
}

fn inverse_defect(g: &MetricField, points: &[Bindings]) -> Result<(f64, Bindings), String> {
    let inv = invert_metric(g).map_err(err)?;
    let n = g.dim();
    worst(points, |p| -> Result<f64, String> {
        let m = g.evaluate(p).map_err(err)? * inv.evaluate(p).map_err(err)? - DMatrix::identity(n, n);
        Ok(inf_norm(&m))
    })
}

fn inverse_identity(c: &Ctx) -> CheckResult {
    let tol = INVERSE_TOL * c.scale;
    let (d4, p4) = inverse_defect(&c.s.g4, &c.points)?;
    let (d5, p5) = inverse_defect(c.five()?.metric(), &c.points)?;
    Ok(blank(Status::from_bool(d4 <= tol && d5 <= tol))
        .value("max_defect_4", num(d4))
        .value("max_defect_5", num(d5))
        .tol(tol)
        .witness(Some(if d4 >= d5 { p4 } else { p5 })))
}

fn christoffel_symmetry(c: &Ctx) -> CheckResult {
    let g4 = christoffel(&c.s.g4).map_err(err)?;
    let g5 = christoffel(c.five()?.metric()).map_err(err)?;
    let a4 = g4.asymmetric_entries().len();
    let a5 = g5.asymmetric_entries().len();
    Ok(blank(Status::from_bool(a4 == 0 && a5 == 0))
        .value("asymmetric_4", a4)
        .value("asymmetric_5", a5)
        .value("nonzero_4", nonzero_components(&g4))
        .value("nonzero_5_count", g5.nonzero().len())
        .value("identically_zero_4", g4.is_identically_zero())
        .value("identically_zero_5", g5.is_identically_zero()))
}

fn nonzero_components(g: &ChristoffelField) -> Value {
    Value::Object(
        g.nonzero()
            .into_iter()
            .map(|((a, b, c), e)| (format!("G^{}_{}{}", a + 1, b + 1, c + 1), Value::from(e.to_string())))
            .collect(),
    )
}

fn compatibility(c: &Ctx, five: bool) -> CheckResult {
    let g = if five {
        c.five()?.metric().clone()
    } else {
        c.s.g4.clone()
    };
    let gamma = christoffel(&g).map_err(err)?;
    let tol = COMPATIBILITY_TOL * c.scale;
    let (r, p) = worst(&c.points, |p| {
        compatibility_residual(&g, &gamma, p).map(|r| r.max_abs())
    })?;
    Ok(blank(Status::from_bool(r <= tol))
        .value("max_residual", num(r))
        .tol(tol)
        .witness(Some(p)))
}

fn cylinder(c: &Ctx) -> CheckResult {
    let report = cylinder_check(c.five()?, &c.numeric).map_err(err)?;
    let violations: Map<String, Value> = report
        .violations
        .iter()
        .map(|v| {
            (
                format!("g{}{}", v.component.0, v.component.1),
                Value::from(v.derivative.to_string()),
            )
        })
        .collect();
    Ok(blank(Status::from_bool(report.passed()))
        .value("violations", Value::Object(violations))
        .tol(c.num_tol()))
}

fn reduction(c: &Ctx) -> CheckResult {
    match reduction_identity_check(c.five()?, &c.numeric).map_err(err)? {
        ReductionReport::Skipped { reason } => skip(&reason),
        ReductionReport::Checked { components } => {
            let worst = components
                .iter()
                .max_by(|a, b| a.scaled_error.total_cmp(&b.scaled_error))
                .expect("16 components");
            let failing: Vec<Value> = components
                .iter()
                .filter(|x| !x.equivalent)
                .map(|x| Value::from(format!("{}{}", x.component.0, x.component.1)))
                .collect();
            Ok(blank(Status::from_bool(failing.is_empty()))
                .value("components", components.len())
                .value("failing", failing)
                .value("max_scaled_error", num(worst.scaled_error))
                .tol(c.num_tol())
                .witness(Some(worst.witness.clone())))
        }
    }
}

fn field_components(f: &crate::kaluza::MixedFieldTensor) -> Value {
    let mut m = Map::new();
    for mu in 0..SPACETIME_DIM {
        for nu in 0..SPACETIME_DIM {
            let e = f.get(mu, nu);
            if !e.is_zero() {
                m.insert(format!("F^{}_{}", mu + 1, nu + 1), e.to_string().into());
            }
        }
    }
    Value::Object(m)
}

fn antisymmetry(c: &Ctx) -> CheckResult {
    let f = c.field.as_ref().map_err(Clone::clone)?;
    let tol = c.num_tol();
    let (d, p) = worst(&c.points, |p| -> Result<f64, String> {
        let lowered = c.s.g4.evaluate(p).map_err(err)? * f.evaluate(p).map_err(err)?;
        let sym = &lowered + lowered.transpose();
        Ok(sym.amax() / (1.0 + lowered.amax()))
    })?;
    Ok(blank(Status::from_bool(d <= tol))
        .value("max_scaled_defect", num(d))
        .value("field_tensor", field_components(f))
        .tol(tol)
        .witness(Some(p)))
}

fn factor_audit(c: &Ctx) -> CheckResult {
    let f = c.field.as_ref().map_err(Clone::clone)?;
    let curl = standard_curl(&c.s.potential);
    let tol = c.num_tol();
    let (d, p) = worst(&c.points, |p| -> Result<f64, String> {
        let ginv =
            c.s.g4
                .evaluate(p)
                .map_err(err)?
                .try_inverse()
                .ok_or_else(|| "metric not invertible".to_string())?;
        let expected = ginv * curl.evaluate(p).map_err(err)?.transpose() * 0.5;
        let got = f.evaluate(p).map_err(err)?;
        Ok((&got - &expected).amax() / (1.0 + got.amax().max(expected.amax())))
    })?;
    Ok(blank(Status::from_bool(d <= tol))
        .value("factor", "1/2")
        .value("max_scaled_error", num(d))
        .tol(tol)
        .witness(Some(p)))
}

fn gauge_invariance(c: &Ctx) -> CheckResult {
    if c.s.lambdas.is_empty() {
        return skip("no gauge functions declared");
    }
    let f = c.field.as_ref().map_err(Clone::clone)?;
    let mut max = (0.0, None);
    let mut failing = Vec::new();
    for (i, lam) in c.s.lambdas.iter().enumerate() {
        let moved = gauge_transform(&c.s.potential, lam).map_err(err)?;
        let g = field_tensor(&c.s.g4, &moved).map_err(err)?;
        for cmp in compare_tensors(f, &g, &c.numeric).map_err(err)? {
            if !cmp.equivalent {
                failing.push(json!({"lambda": i, "component": format!("{}{}", cmp.component.0, cmp.component.1)}));
            }
            if cmp.scaled_error > max.0 || max.1.is_none() {
                max = (cmp.scaled_error, Some(cmp.witness));
            }
        }
    }
    Ok(blank(Status::from_bool(failing.is_empty()))
        .value("lambdas", c.s.lambdas.len())
        .value("failing", failing)
        .value("max_scaled_error", num(max.0))
        .tol(c.num_tol())
        .witness(max.1))
}

fn shift(c: &Ctx) -> CheckResult {
    if c.s.lambdas.is_empty() {
        return skip("no gauge functions declared");
    }
    let five = c.five()?;
    if !five.is_cylindrical() {
        return skip("metric is not cylindrical");
    }
    if !five.g55().is_one() {
        return skip("g55 is not 1");
    }
    let mut structural = 0;
    let mut numeric_ok = true;
    let mut max = 0.0f64;
    for lam in &c.s.lambdas {
        let shifted = fifth_shift(five, lam).map_err(err)?.potential().map_err(err)?;
        let expected = gauge_transform(&c.s.potential, lam).map_err(err)?;
        if shifted == expected {
            structural += 1;
            continue;
        }
        for mu in 0..SPACETIME_DIM {
            let r = c.numeric.check(shifted.get(mu), expected.get(mu)).map_err(err)?;
            numeric_ok &= r.equivalent;
            max = max.max(r.worst.scaled_error);
        }
    }
    Ok(blank(Status::from_bool(numeric_ok))
        .value("lambdas", c.s.lambdas.len())
        .value("structural_matches", structural)
        .value("max_scaled_error", num(max))
        .tol(c.num_tol()))
}

fn bianchi(c: &Ctx) -> CheckResult {
    let tol = BIANCHI_TOL * c.scale;
    let mut potentials: Vec<GaugePotential> = vec![c.s.potential.clone()];
    for lam in &c.s.lambdas {
        potentials.push(gauge_transform(&c.s.potential, lam).map_err(err)?);
    }
    let mut max = (f64::NEG_INFINITY, Bindings::new());
    for a in &potentials {
        let r = worst(&c.points, |p| {
            bianchi_residual(a, p).map(|r| r.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        })?;
        if r.0 > max.0 {
            max = r;
        }
    }
    Ok(blank(Status::from_bool(max.0 <= tol))
        .value("potentials", potentials.len())
        .value("max_residual", num(max.0))
        .tol(tol)
        .witness(Some(max.1)))
}

fn count() -> CheckResult {
    let mut ok = true;
    let mut check = blank(Status::Pass);
    for n in [4i64, 5] {
        let p = parameter_count(n).map_err(err)?;
        let rotations = GeneratorSet::rotations(n as usize).map_err(err)?.len() as i64;
        ok &= p == rotations;
        check = check
            .value(&format!("parameter_count_{n}"), p)
            .value(&format!("rotation_generators_{n}"), rotations);
    }
    check.status = Status::from_bool(ok);
    Ok(check)
}

fn remainder(c: &Ctx) -> CheckResult {
    if c.s.generators.is_empty() {
        return skip("no generators declared");
    }
    let mut worst_ratio = 0.0f64;
    let mut cases = 0;
    for g in &c.s.generators {
        for params in &g.params {
            let norm = inf_norm(&g.set.argument(params).map_err(err)?);
            if norm == 0.0 {
                continue;
            }
            for target in REMAINDER_NORMS {
                let scaled: Vec<f64> = params.iter().map(|u| u * target / norm).collect();
                let full = exp_element(&g.set, &scaled, EXP_ORDER).map_err(err)?;
                let first = first_order_element(&g.set, &scaled).map_err(err)?;
                let d = inf_norm(&(full.matrix - first.matrix));
                worst_ratio = worst_ratio.max(d / (target * target));
                cases += 1;
            }
        }
    }
    if cases == 0 {
        return skip("every parameter vector gives a zero argument");
    }
    Ok(blank(Status::from_bool(worst_ratio <= c.scale))
        .value("cases", cases)
        .value("max_remainder_over_norm_squared", num(worst_ratio))
        .value("norms", REMAINDER_NORMS.to_vec())
        .tol(c.scale))
}

fn axioms(c: &Ctx) -> CheckResult {
    if c.s.generators.is_empty() {
        return skip("no generators declared");
    }
    let mut assoc_ok = true;
    let mut check = blank(Status::Pass);
    let mut sets = Vec::new();
    for g in &c.s.generators {
        let mut samples = Vec::new();
        for p in &g.params {
            samples.push(exp_element(&g.set, p, EXP_ORDER).map_err(err)?);
        }
        let products: Vec<_> = samples.windows(2).map(|w| w[0].compose(&w[1])).collect();
        samples.extend(products);
        let r = axiom_report(&samples, NONDEGENERACY_FLOOR).map_err(err)?;
        let assoc_tol = 100.0 * f64::EPSILON * r.max_norm.powi(3) * c.scale;
        let inverse_tol = 100.0 * f64::EPSILON * r.max_norm.powi(2) * c.scale;
        let ok = r.associativity <= assoc_tol && r.identity <= f64::EPSILON && r.inverse <= inverse_tol;
        assoc_ok &= ok;
        sets.push(json!({
            "samples": samples.len(),
            "associativity": num(r.associativity),
            "associativity_tol": num(assoc_tol),
            "identity": num(r.identity),
            "inverse": num(r.inverse),
            "inverse_tol": num(inverse_tol),
            "max_commutator": num(r.max_commutator()),
            "abelian": r.is_abelian(1e-12),
        }));
    }
    check.status = Status::from_bool(assoc_ok);
    Ok(check.value("sets", sets))
}

fn u1(c: &Ctx) -> CheckResult {
    let k = c.constants.k();
    let tol = U1_TOL * c.scale;
    let full = (u1_element(2.0 * PI * k, k).map_err(err)? - 1.0).norm();
    let half = (u1_element(PI * k, k).map_err(err)? + 1.0).norm();
    let mut homomorphism = 0.0f64;
    let mut modulus = 0.0f64;
    for (a, b) in [(0.3, 1.7), (-2.5, 0.4), (5.0, 7.5)] {
        let (ua, ub) = (a * k, b * k);
        let lhs = u1_element(ua + ub, k).map_err(err)?;
        let rhs: Complex64 = u1_element(ua, k).map_err(err)? * u1_element(ub, k).map_err(err)?;
        homomorphism = homomorphism.max((lhs - rhs).norm());
        modulus = modulus.max((lhs.norm() - 1.0).abs());
    }
    let ok = full <= tol && half <= tol && homomorphism <= tol && modulus <= tol;
    Ok(blank(Status::from_bool(ok))
        .value("full_turn_defect", num(full))
        .value("half_turn_defect", num(half))
        .value("homomorphism_defect", num(homomorphism))
        .value("modulus_defect", num(modulus))
        .tol(tol))
}

fn path_actions(paths: &[Result<PathAction, String>]) -> Result<Vec<PathAction>, String> {
    paths
        .iter()
        .enumerate()
        .map(|(i, p)| p.clone().map_err(|e| format!("path {i}: {e}")))
        .collect()
}

fn quantization(c: &Ctx, paths: &[Result<PathAction, String>]) -> CheckResult {
    if paths.is_empty() {
        return skip("no paths declared");
    }
    let actions = path_actions(paths)?;
    let k = c.constants.k();
    let mut all = true;
    let rows: Vec<Value> = actions
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let n = quantization_check(a.total, &c.constants);
            all &= n.is_some();
            json!({"path": i, "action": num(a.total), "phase": num(a.total / k), "n": n})
        })
        .collect();
    Ok(blank(Status::from_bool(all))
        .value("paths", rows)
        .value("k", num(k))
        .tol(c.constants.phase_tol()))
}

/// Unit-free test vector for phase checks.
pub fn test_vector() -> [Complex64; 3] {
    [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.6, -0.8),
        Complex64::new(0.0, -2.0),
    ]
}

fn consistency(c: &Ctx, paths: &[Result<PathAction, String>]) -> CheckResult {
    if paths.is_empty() {
        return skip("no paths declared");
    }
    let actions = path_actions(paths)?;
    let psi = test_vector();
    let mut ok = true;
    let mut rows = Vec::new();
    for (i, a) in actions.iter().enumerate() {
        let quantized = quantization_check(a.total, &c.constants).is_some();
        let fixed = phase_fixes(&psi, a.total, &c.constants).map_err(err)?;
        ok &= quantized == fixed;
        rows.push(json!({"path": i, "quantized": quantized, "phase_fixes_vector": fixed}));
    }
    Ok(blank(Status::from_bool(ok))
        .value("paths", rows)
        .tol(c.constants.phase_tol()))
}

fn summed_bound(c: &Ctx, paths: &[Result<PathAction, String>]) -> CheckResult {
    if paths.is_empty() {
        return skip("no paths declared");
    }
    let actions = path_actions(paths)?;
    let mut ok = true;
    let rows: Vec<Value> = actions
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let v = summed_bound_check(a.total, &c.constants);
            ok &= v.pass;
            json!({"path": i, "action": num(v.action), "margin": num(v.margin), "pass": v.pass})
        })
        .collect();
    Ok(blank(Status::from_bool(ok))
        .value("threshold", num(min_action(&c.constants)))
        .value("paths", rows)
        .tol(c.constants.action_tol()))
}

fn axis_bound(c: &Ctx, paths: &[Result<PathAction, String>]) -> CheckResult {
    let aligned: Vec<(usize, usize)> =
        c.s.paths
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.spec.aligned_axis().map(|axis| (i, axis)))
            .collect();
    if aligned.is_empty() {
        return skip("no path moves along a single axis");
    }
    let mut ok = true;
    let mut rows = Vec::new();
    for (i, axis) in aligned {
        let a = paths[i].clone().map_err(|e| format!("path {i}: {e}"))?;
        let mut per_axis = [None; SPACETIME_DIM];
        per_axis[axis] = Some(a.per_axis[axis]);
        let report = heisenberg_bound_check(&per_axis, &c.constants);
        let v = report.axes[axis].expect("aligned axis is judged");
        ok &= report.passed();
        rows.push(
            json!({"path": i, "axis": axis + 1, "action": num(v.action), "margin": num(v.margin), "pass": v.pass}),
        );
    }
    Ok(blank(Status::from_bool(ok))
        .value("threshold", num(min_action(&c.constants)))
        .value("paths", rows)
        .tol(c.constants.action_tol()))
}

fn minimum(c: &Ctx) -> CheckResult {
    let m = min_action(&c.constants);
    let hbar = c.constants.hbar();
    let check = blank(Status::Pass)
        .value("min_action", num(m))
        .value("hbar", num(hbar))
        .value("k", num(c.constants.k()));
    if c.constants.k() != hbar / (4.0 * PI) {
        return Ok(Check {
            status: Status::Skip,
            ..check.value("reason", "k is set explicitly")
        });
    }
    let tol = 4.0 * f64::EPSILON * hbar;
    let mut check = check.value("hbar_over_2", num(hbar / 2.0)).tol(tol);
    check.status = Status::from_bool((m - hbar / 2.0).abs() <= tol);
    Ok(check)
}
