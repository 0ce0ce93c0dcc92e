//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Built with `harness = false` so the
//! lines are always visible under `cargo test`.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;

use common::{bundled, chart, fd_christoffel, flat4, p, points, polar, probe, scenario_path, sphere};
use kkverify::exprlang::{Bindings, EquivSettings, Expr, Func, Probe};
use kkverify::geometry::{christoffel, MetricField};
use kkverify::holonomy::{
    heisenberg_bound_check, integrate_one_form, min_action, phase_fixes, quantization_check, ActionConstants, OneForm,
    PathSpec, QuadratureRule,
};
use kkverify::kaluza::{
    assemble_five_metric, bianchi_residual, bianchi_residual_of, compare_tensors, field_tensor, fifth_shift,
    gauge_transform, reduction_identity_check, FieldStrength, FiveMetric, GaugePotential, ReductionReport, Tensor2,
};
use kkverify::symmetry::{exp_element, first_order_element, inf_norm, parameter_count, GeneratorSet};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const X: [&str; 4] = ["x1", "x2", "x3", "x4"];
const SCENARIOS: [&str; 5] = [
    "flat.json",
    "uniform_field.json",
    "winding.json",
    "nonlinear.json",
    "curved.json",
];

type Outcome = Result<String, String>;

/// Name, pinned tolerance, check.
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn christoffel_oracle() -> Outcome {
    const TOL: f64 = 1e-6;
    let cases: [(&str, MetricField, Probe); 3] = [
        (
            "flat",
            flat4(),
            probe(
                &[
                    ("x1", -2.0, 2.0),
                    ("x2", -2.0, 2.0),
                    ("x3", -2.0, 2.0),
                    ("x4", -2.0, 2.0),
                ],
                101,
            ),
        ),
        ("polar", polar(), probe(&[("r", 0.3, 3.0), ("theta", -3.0, 3.0)], 102)),
        (
            "sphere",
            sphere(),
            probe(&[("theta", 0.2, 2.9), ("phi", 0.0, 6.2)], 103),
        ),
    ];
    let mut worst = 0.0f64;
    for (name, g, pr) in &cases {
        let gamma = christoffel(g).map_err(|e| e.to_string())?;
        let n = g.dim();
        let pts = points(pr, 20);
        ensure(pts.len() == 20, || format!("{name}: only {} points", pts.len()))?;
        for pt in &pts {
            let sym = gamma.evaluate(pt).map_err(|e| e.to_string())?;
            let fd = fd_christoffel(g, pt, 1e-5);
            for ((a, b, c), v) in sym.iter() {
                let err = (v - fd[(a * n + b) * n + c]).abs();
                worst = worst.max(err);
                ensure(err <= TOL, || format!("{name} Γ^{a}_{b}{c} off by {err:e} at {pt}"))?;
            }
        }
    }
    ensure(christoffel(&flat4()).unwrap().is_identically_zero(), || {
        "flat Γ not literally zero".into()
    })?;
    Ok(format!("max |sym - fd| = {worst:.2e}; flat Γ literally zero"))
}

fn five_metric(name: &str) -> (FiveMetric, EquivSettings) {
    let s = bundled(name);
    let g = assemble_five_metric(&s.g4, &s.potential, &s.g55).unwrap();
    (g, EquivSettings::new(s.probe(), 20, 1e-9))
}

fn reduction_identity() -> Outcome {
    let mut worst = 0.0f64;
    for name in ["uniform_field.json", "nonlinear.json", "curved.json"] {
        let (g, numeric) = five_metric(name);
        match reduction_identity_check(&g, &numeric).map_err(|e| e.to_string())? {
            ReductionReport::Skipped { reason } => return Err(format!("{name}: skipped ({reason})")),
            ReductionReport::Checked { components } => {
                for c in components {
                    worst = worst.max(c.scaled_error);
                    ensure(c.equivalent, || {
                        format!("{name} {:?}: {:e} at {}", c.component, c.scaled_error, c.witness)
                    })?;
                }
            }
        }
    }
    Ok(format!(
        "3 scenarios, 16 components each, worst scaled error {worst:.2e}"
    ))
}

/// Random smooth expression in x1..x4.
fn random_field(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 || rng.random_bool(0.3) {
        return if rng.random_bool(0.5) {
            Expr::int(rng.random_range(-3..=3))
        } else {
            Expr::sym(X[rng.random_range(0..4)])
        };
    }
    match rng.random_range(0..5) {
        0 => random_field(rng, depth - 1) + random_field(rng, depth - 1),
        1 => random_field(rng, depth - 1) * random_field(rng, depth - 1),
        2 => Expr::func(Func::Sin, random_field(rng, depth - 1)),
        3 => Expr::func(Func::Cos, random_field(rng, depth - 1)),
        _ => Expr::pow(random_field(rng, depth - 1), Expr::int(2)),
    }
}

fn gauge_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a09e667);
    let flat = MetricField::identity(chart(&X));
    let pr = probe(
        &[
            ("x1", -1.0, 1.0),
            ("x2", -1.0, 1.0),
            ("x3", -1.0, 1.0),
            ("x4", -1.0, 1.0),
        ],
        17,
    );
    let numeric = EquivSettings::new(pr, 20, 1e-9);
    let mut worst = 0.0f64;
    for pair in 0..10 {
        let comps = (0..4).map(|_| random_field(&mut rng, 3)).collect();
        let a = GaugePotential::new(chart(&X), "x5", comps).map_err(|e| e.to_string())?;
        let lam = random_field(&mut rng, 3);
        let shifted = gauge_transform(&a, &lam).map_err(|e| e.to_string())?;
        let before = field_tensor(&flat, &a).map_err(|e| e.to_string())?;
        let after = field_tensor(&flat, &shifted).map_err(|e| e.to_string())?;
        for c in compare_tensors(&before, &after, &numeric).map_err(|e| e.to_string())? {
            worst = worst.max(c.scaled_error);
            ensure(c.equivalent, || {
                format!("pair {pair} {:?}: {:e}", c.component, c.scaled_error)
            })?;
        }
        let g = assemble_five_metric(&flat, &a, &Expr::one()).map_err(|e| e.to_string())?;
        let via_shift = fifth_shift(&g, &lam)
            .and_then(|g| g.potential())
            .map_err(|e| e.to_string())?;
        ensure(via_shift == shifted, || {
            format!("pair {pair}: fifth_shift and gauge_transform differ")
        })?;
    }
    Ok(format!(
        "10 pairs, worst scaled error {worst:.2e}; fifth_shift == gauge_transform structurally"
    ))
}

fn bianchi() -> Outcome {
    const TOL: f64 = 1e-8;
    let mut worst = 0.0f64;
    for name in SCENARIOS {
        let s = bundled(name);
        let pts = points(&s.probe(), 20);
        for pt in &pts {
            for r in bianchi_residual(&s.potential, pt).map_err(|e| e.to_string())? {
                worst = worst.max(r.abs());
                ensure(r.abs() <= TOL, || format!("{name}: residual {r:e} at {pt}"))?;
            }
        }
    }
    // f_12 = x3 alone is antisymmetric but not closed: ∂_3 f_12 = 1.
    let control: FieldStrength = Tensor2::from_fn(chart(&X), |mu, nu| match (mu, nu) {
        (0, 1) => p("x3"),
        (1, 0) => p("-x3"),
        _ => Expr::zero(),
    });
    let at = Bindings::from([("x1", 0.2), ("x2", -0.4), ("x3", 0.7), ("x4", 0.1)]);
    let control_max = bianchi_residual_of(&control, &at)
        .map_err(|e| e.to_string())?
        .iter()
        .fold(0.0f64, |m, r| m.max(r.abs()));
    ensure(control_max > 1e-3, || format!("control residual only {control_max:e}"))?;
    Ok(format!(
        "5 scenarios x 20 points, max residual {worst:.2e}; control {control_max:.3}"
    ))
}

fn parameter_counts() -> Outcome {
    let (four, five) = (parameter_count(4), parameter_count(5));
    ensure(four == Ok(6) && five == Ok(10), || format!("got {four:?}, {five:?}"))?;
    Ok("N=4 -> 6, N=5 -> 10".into())
}

fn expansion_remainder() -> Outcome {
    let mut sets: Vec<(GeneratorSet, Vec<Vec<f64>>)> = vec![
        (
            GeneratorSet::rotations(4).unwrap(),
            vec![vec![0.3, -1.0, 0.5, 0.2, 0.9, -0.4]],
        ),
        (
            GeneratorSet::rotations(5).unwrap(),
            vec![(1..=10).map(|i| (i as f64).sin()).collect()],
        ),
    ];
    for name in ["flat.json", "uniform_field.json"] {
        sets.extend(bundled(name).generators.into_iter().map(|g| (g.set, g.params)));
    }
    let mut checked = 0;
    let mut worst_ratio = 0.0f64;
    for (gens, params) in &sets {
        for raw in params {
            let norm = inf_norm(&gens.argument(raw).map_err(|e| e.to_string())?);
            if norm == 0.0 {
                continue;
            }
            for target in [0.1, 0.05, 0.01] {
                let u: Vec<f64> = raw.iter().map(|x| x * target / norm).collect();
                let full = exp_element(gens, &u, 30).map_err(|e| e.to_string())?.matrix;
                let first = first_order_element(gens, &u).map_err(|e| e.to_string())?.matrix;
                let rem = inf_norm(&(full - first));
                worst_ratio = worst_ratio.max(rem / (target * target));
                ensure(rem <= target * target, || format!("norm {target}: remainder {rem:e}"))?;
                checked += 1;
            }
        }
    }
    ensure(checked > 0, || "no parameter vectors checked".into())?;
    Ok(format!(
        "{checked} cases at norms 0.1/0.05/0.01, max remainder/norm^2 = {worst_ratio:.3}"
    ))
}

fn unit_circle() -> PathSpec {
    PathSpec::new(
        "t",
        (0.0, 2.0 * PI),
        vec![p("cos(t)"), p("sin(t)"), p("0"), p("0")],
        2000,
    )
    .unwrap()
}

fn quantization_chain() -> Outcome {
    let c = ActionConstants::new(1.0, None, 1e-6).map_err(|e| e.to_string())?;
    let consts = Bindings::from([("hbar", c.hbar()), ("k", c.k())]);
    let mut found = Vec::new();
    for n in [1i64, 2, 5] {
        let u = OneForm::new(
            chart(&X),
            vec![
                p(&format!("-{n}*k*x2/(x1^2 + x2^2)")),
                p(&format!("{n}*k*x1/(x1^2 + x2^2)")),
                p("0"),
                p("0"),
            ],
            "x5",
        )
        .map_err(|e| e.to_string())?;
        let s = integrate_one_form(&u, &unit_circle(), QuadratureRule::Simpson, &consts).map_err(|e| e.to_string())?;
        let q = quantization_check(s.total, &c);
        ensure(q == Some(n), || {
            format!("n = {n}: classified {q:?} (action {})", s.total)
        })?;
        found.push(n);
    }
    let psi = [
        Complex64::new(0.6, -0.8),
        Complex64::new(-1.5, 0.25),
        Complex64::new(0.0, 2.0),
    ];
    let mut cases = 0;
    for n in -4i64..=4 {
        for off in [
            -5e-6, -1.01e-6, -0.99e-6, -3e-7, 0.0, 3e-7, 0.99e-6, 1.01e-6, 5e-6, 0.5, PI,
        ] {
            let action = (2.0 * PI * n as f64 + off) * c.k();
            let quantized = quantization_check(action, &c).is_some();
            let fixed = phase_fixes(&psi, action, &c).map_err(|e| e.to_string())?;
            ensure(quantized == fixed, || {
                format!("n = {n}, offset {off:e}: quantized {quantized}, fixed {fixed}")
            })?;
            cases += 1;
        }
    }
    Ok(format!(
        "winding n = {found:?} recovered; quantized iff fixed on {cases} actions"
    ))
}

fn heisenberg_constant() -> Outcome {
    let c = ActionConstants::default();
    let m = min_action(&c);
    ensure(c.hbar() == 1.0 && c.k() == 1.0 / (4.0 * PI), || {
        "unexpected default constants".into()
    })?;
    ensure(m == 0.5, || format!("min_action = {m:.17}"))?;
    let u = OneForm::new(chart(&X), vec![p("0"), p("0"), p("0"), p("hbar/2")], "x5").map_err(|e| e.to_string())?;
    let path = PathSpec::new("t", (0.0, 1.0), vec![p("0"), p("0"), p("0"), p("t")], 2).map_err(|e| e.to_string())?;
    let consts = Bindings::from([("hbar", c.hbar()), ("k", c.k())]);
    let s = integrate_one_form(&u, &path, QuadratureRule::Simpson, &consts).map_err(|e| e.to_string())?;
    ensure(quantization_check(s.total, &c) == Some(1), || {
        format!("path action {} not n = 1", s.total)
    })?;
    let axis = path.aligned_axis().ok_or("path not axis aligned")?;
    let mut per_axis = [None; 4];
    per_axis[axis] = Some(s.per_axis[axis]);
    let report = heisenberg_bound_check(&per_axis, &c);
    let v = report.axes[axis].unwrap();
    ensure(report.passed(), || format!("bound fails with margin {:e}", v.margin))?;
    Ok(format!(
        "min_action = {m:?}; n = 1 path S_4 = {} margin {:e}",
        v.action, v.margin
    ))
}

fn kkverify(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_kkverify"))
        .args(args)
        .output()
        .expect("running kkverify")
}

fn determinism() -> Outcome {
    for name in SCENARIOS {
        let path = scenario_path(name);
        let path = path.to_str().unwrap();
        let a = kkverify(&["verify", path, "--format", "json"]);
        let b = kkverify(&["verify", path, "--format", "json"]);
        ensure(!a.stdout.is_empty(), || format!("{name}: empty report"))?;
        ensure(a.stdout == b.stdout, || format!("{name}: reports differ"))?;
    }
    Ok("5 scenarios, byte-identical JSON across two runs".into())
}

fn cli_end_to_end() -> Outcome {
    let mut summary = Vec::new();
    for name in ["flat.json", "uniform_field.json", "winding.json"] {
        let out = kkverify(&["verify", scenario_path(name).to_str().unwrap(), "--format", "json"]);
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| format!("{name}: {e}"))?;
        let fails = &v["summary"]["fail"];
        ensure(out.status.code() == Some(0) && *fails == 0, || {
            format!("{name}: exit {:?}, {fails} failed", out.status.code())
        })?;
        summary.push(format!("{name} {}p/{}s", v["summary"]["pass"], v["summary"]["skip"]));
    }
    Ok(format!("exit 0, zero failures: {}", summary.join(", ")))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("christoffel_oracle", "abs 1e-6, 20 points", christoffel_oracle),
        ("reduction_identity", "tol 1e-9", reduction_identity),
        ("gauge_invariance", "tol 1e-9, 10 pairs", gauge_invariance),
        ("bianchi", "<= 1e-8, control > 1e-3", bianchi),
        ("parameter_count", "exact", parameter_counts),
        ("expansion_remainder", "<= norm^2", expansion_remainder),
        ("quantization_chain", "phase tol 1e-6", quantization_chain),
        ("heisenberg_constant", "exact 0.5", heisenberg_constant),
        ("determinism", "byte-identical", determinism),
        ("cli_end_to_end", "exit 0, 0 fail", cli_end_to_end),
    ];
    let mut failed = 0;
    for (i, (name, tol, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name} [{tol}] {detail}", i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
