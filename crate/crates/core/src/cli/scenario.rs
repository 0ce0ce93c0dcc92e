//! Scenario files: JSON with every expression embedded as text.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Deserialize;

use crate::exprlang::{parse, simplify, CoordinateChart, Expr, ParseError, Probe};
use crate::geometry::MetricField;
use crate::holonomy::{ActionConstants, OneForm, PathSpec, QuadratureRule};
use crate::kaluza::{GaugePotential, SPACETIME_DIM};
use crate::symmetry::GeneratorSet;

/// Symbols that one-forms may use besides the chart coordinates.
pub const CONSTANT_SYMBOLS: [&str; 2] = ["hbar", "k"];

pub const DEFAULT_NUM_TOL: f64 = 1e-9;

/// JSON Schema for scenario files.
pub const SCENARIO_SCHEMA: &str = include_str!("scenario.schema.json");

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid scenario JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: cannot parse {text:?}: {source}")]
    Expr {
        field: String,
        text: String,
        #[source]
        source: ParseError,
    },
    #[error("{field}: symbol {symbol:?} is neither a coordinate nor a declared domain")]
    Undeclared { field: String, symbol: String },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl ToString) -> ScenarioError {
    ScenarioError::Invalid {
        field: field.into(),
        message: message.to_string(),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    coordinates: Vec<String>,
    fifth: String,
    metric: BTreeMap<String, String>,
    potential: Vec<String>,
    #[serde(default)]
    g55: Option<String>,
    #[serde(default)]
    lambdas: Vec<String>,
    #[serde(default)]
    generators: Vec<RawGenerators>,
    #[serde(default)]
    paths: Vec<RawPath>,
    #[serde(default)]
    one_forms: Vec<Vec<String>>,
    #[serde(default)]
    constants: RawConstants,
    domains: BTreeMap<String, [f64; 2]>,
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerators {
    matrices: Vec<Vec<Vec<f64>>>,
    params: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumberOrExpr {
    Number(f64),
    Expr(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPath {
    param: String,
    range: [NumberOrExpr; 2],
    coords: Vec<String>,
    samples: usize,
    #[serde(default)]
    rule: Option<String>,
    #[serde(default)]
    form: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawConstants {
    hbar: Option<f64>,
    k: Option<f64>,
    phase_tol: Option<f64>,
    num_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub set: GeneratorSet,
    /// One parameter vector per group element to sample.
    pub params: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathEntry {
    pub spec: PathSpec,
    pub rule: QuadratureRule,
    /// Index into [`Scenario::one_forms`].
    pub form: usize,
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub chart: CoordinateChart,
    pub fifth: String,
    pub g4: MetricField,
    pub potential: GaugePotential,
    pub g55: Expr,
    pub lambdas: Vec<Expr>,
    pub generators: Vec<GeneratorSpec>,
    pub paths: Vec<PathEntry>,
    pub one_forms: Vec<OneForm>,
    pub constants: ActionConstants,
    pub num_tol: f64,
    pub domains: BTreeMap<String, (f64, f64)>,
    pub seed: u64,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Scenario::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Scenario, ScenarioError> {
        let raw: RawScenario = serde_json::from_str(text)?;
        build(raw)
    }

    /// Sampling probe over the declared domains.
    pub fn probe(&self) -> Probe {
        self.domains
            .iter()
            .fold(Probe::new(self.seed), |p, (s, &(lo, hi))| p.with_domain(s, lo, hi))
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

fn parse_field(field: &str, text: &str) -> Result<Expr, ScenarioError> {
    parse(text).map(|e| simplify(&e)).map_err(|source| ScenarioError::Expr {
        field: field.to_string(),
        text: text.to_string(),
        source,
    })
}

fn require_declared(field: &str, e: &Expr, allowed: &BTreeSet<String>) -> Result<(), ScenarioError> {
    match e.free_symbols().into_iter().find(|s| !allowed.contains(s)) {
        Some(symbol) => Err(ScenarioError::Undeclared {
            field: field.to_string(),
            symbol,
        }),
        None => Ok(()),
    }
}

/// "gIJ" with 1 ≤ I ≤ J ≤ 4, as 0-based indices.
fn metric_key(key: &str) -> Option<(usize, usize)> {
    let digits = key.strip_prefix('g')?.as_bytes();
    if digits.len() != 2 {
        return None;
    }
    let i = (digits[0] as char).to_digit(10)? as usize;
    let j = (digits[1] as char).to_digit(10)? as usize;
    if i < 1 || j < i || j > SPACETIME_DIM {
        return None;
    }
    Some((i - 1, j - 1))
}

fn build(raw: RawScenario) -> Result<Scenario, ScenarioError> {
    if raw.coordinates.len() != SPACETIME_DIM {
        return Err(invalid(
            "coordinates",
            format!("expected {SPACETIME_DIM} names, got {}", raw.coordinates.len()),
        ));
    }
    let chart = CoordinateChart::new(raw.coordinates.iter().cloned()).map_err(|e| invalid("coordinates", e))?;
    chart.extended(&raw.fifth).map_err(|e| invalid("fifth", e))?;

    let mut domains = BTreeMap::new();
    for (s, [lo, hi]) in &raw.domains {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid(
                format!("domains.{s}"),
                format!("need lo < hi, got [{lo}, {hi}]"),
            ));
        }
        domains.insert(s.clone(), (*lo, *hi));
    }
    for c in chart.names().iter().chain(std::iter::once(&raw.fifth)) {
        if !domains.contains_key(c) {
            return Err(invalid("domains", format!("missing domain for coordinate {c:?}")));
        }
    }
    let declared: BTreeSet<String> = domains.keys().cloned().collect();

    let mut rows = vec![vec![Expr::zero(); SPACETIME_DIM]; SPACETIME_DIM];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = Expr::one();
    }
    for (key, text) in &raw.metric {
        let field = format!("metric.{key}");
        let (i, j) = metric_key(key).ok_or_else(|| invalid(&field, "keys are g11..g44 with row <= column"))?;
        let e = parse_field(&field, text)?;
        require_declared(&field, &e, &declared)?;
        rows[i][j] = e.clone();
        rows[j][i] = e;
    }
    let g4 = MetricField::new(chart.clone(), rows).map_err(|e| invalid("metric", e))?;

    if raw.potential.len() != SPACETIME_DIM {
        return Err(invalid(
            "potential",
            format!("expected {SPACETIME_DIM} expressions, got {}", raw.potential.len()),
        ));
    }
    let mut comps = Vec::with_capacity(SPACETIME_DIM);
    for (mu, text) in raw.potential.iter().enumerate() {
        let field = format!("potential[{mu}]");
        let e = parse_field(&field, text)?;
        require_declared(&field, &e, &declared)?;
        comps.push(e);
    }
    let potential = GaugePotential::new(chart.clone(), &raw.fifth, comps).map_err(|e| invalid("potential", e))?;

    let g55 = parse_field("g55", raw.g55.as_deref().unwrap_or("1"))?;
    require_declared("g55", &g55, &declared)?;

    let mut lambdas = Vec::with_capacity(raw.lambdas.len());
    for (i, text) in raw.lambdas.iter().enumerate() {
        let field = format!("lambdas[{i}]");
        let e = parse_field(&field, text)?;
        require_declared(&field, &e, &declared)?;
        if e.contains_symbol(&raw.fifth) {
            return Err(invalid(
                field,
                format!("depends on the fifth coordinate {:?}", raw.fifth),
            ));
        }
        lambdas.push(e);
    }

    let mut generators = Vec::with_capacity(raw.generators.len());
    for (i, g) in raw.generators.iter().enumerate() {
        let field = format!("generators[{i}]");
        let set = GeneratorSet::from_rows(&g.matrices).map_err(|e| invalid(&field, e))?;
        if g.params.is_empty() {
            return Err(invalid(&field, "params must list at least one parameter vector"));
        }
        for p in &g.params {
            if p.len() != set.len() {
                return Err(invalid(
                    &field,
                    format!("each parameter vector needs {} entries, got {}", set.len(), p.len()),
                ));
            }
        }
        generators.push(GeneratorSpec {
            set,
            params: g.params.clone(),
        });
    }

    let c = &raw.constants;
    let constants = ActionConstants::new(c.hbar.unwrap_or(1.0), c.k, c.phase_tol.unwrap_or(1e-6))
        .map_err(|e| invalid("constants", e))?;
    let num_tol = c.num_tol.unwrap_or(DEFAULT_NUM_TOL);
    if !(num_tol.is_finite() && num_tol > 0.0) {
        return Err(invalid("constants.num_tol", format!("must be positive, got {num_tol}")));
    }

    let form_symbols: BTreeSet<String> = chart
        .names()
        .iter()
        .cloned()
        .chain(CONSTANT_SYMBOLS.iter().map(|s| s.to_string()))
        .collect();
    let mut one_forms = Vec::with_capacity(raw.one_forms.len());
    for (i, comps) in raw.one_forms.iter().enumerate() {
        let field = format!("one_forms[{i}]");
        if comps.len() != SPACETIME_DIM {
            return Err(invalid(
                &field,
                format!("expected {SPACETIME_DIM} expressions, got {}", comps.len()),
            ));
        }
        let mut exprs = Vec::with_capacity(SPACETIME_DIM);
        for (mu, text) in comps.iter().enumerate() {
            let f = format!("{field}[{mu}]");
            let e = parse_field(&f, text)?;
            require_declared(&f, &e, &form_symbols)?;
            exprs.push(e);
        }
        one_forms.push(OneForm::new(chart.clone(), exprs, &raw.fifth).map_err(|e| invalid(&field, e))?);
    }

    let mut paths = Vec::with_capacity(raw.paths.len());
    for (i, p) in raw.paths.iter().enumerate() {
        let field = format!("paths[{i}]");
        if chart.contains(&p.param) || p.param == raw.fifth {
            return Err(invalid(
                &field,
                format!("parameter {:?} collides with a coordinate", p.param),
            ));
        }
        let mut range = [0.0; 2];
        for (slot, end) in range.iter_mut().zip(&p.range) {
            *slot = match end {
                NumberOrExpr::Number(v) => *v,
                NumberOrExpr::Expr(text) => {
                    let f = format!("{field}.range");
                    let e = parse_field(&f, text)?;
                    crate::exprlang::evaluate(&e, &crate::exprlang::Bindings::new()).map_err(|err| invalid(&f, err))?
                }
            };
        }
        let mut coords = Vec::with_capacity(p.coords.len());
        for (mu, text) in p.coords.iter().enumerate() {
            coords.push(parse_field(&format!("{field}.coords[{mu}]"), text)?);
        }
        let spec = PathSpec::new(&p.param, (range[0], range[1]), coords, p.samples).map_err(|e| invalid(&field, e))?;
        let rule = match p.rule.as_deref() {
            None | Some("simpson") => QuadratureRule::Simpson,
            Some("midpoint") => QuadratureRule::Midpoint,
            Some(other) => return Err(invalid(format!("{field}.rule"), format!("unknown rule {other:?}"))),
        };
        let form = p.form.unwrap_or(0);
        if form >= one_forms.len() {
            return Err(invalid(
                format!("{field}.form"),
                format!("refers to one_forms[{form}], but {} are declared", one_forms.len()),
            ));
        }
        paths.push(PathEntry { spec, rule, form });
    }

    Ok(Scenario {
        name: raw.name,
        chart,
        fifth: raw.fifth,
        g4,
        potential,
        g55,
        lambdas,
        generators,
        paths,
        one_forms,
        constants,
        num_tol,
        domains,
        seed: raw.seed,
    })
}
