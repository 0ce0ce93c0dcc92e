//! Check records and their text and JSON renderings.

use std::fmt::Write as _;

use serde_json::{Map, Number, Value};

use crate::exprlang::Bindings;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Significant digits kept for every float in a report.
pub const REPORT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }

    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: &'static str,
    /// Name of the relation under test.
    pub eq: &'static str,
    pub status: Status,
    pub values: Map<String, Value>,
    pub tol: Option<f64>,
    pub witness: Option<Bindings>,
}

impl Check {
    pub fn new(id: &'static str, eq: &'static str, status: Status) -> Self {
        Check {
            id,
            eq,
            status,
            values: Map::new(),
            tol: None,
            witness: None,
        }
    }

    pub fn skip(id: &'static str, eq: &'static str, reason: impl Into<String>) -> Self {
        Check::new(id, eq, Status::Skip).value("reason", reason.into())
    }

    pub fn value(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.values.insert(key.to_string(), v.into());
        self
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = Some(tol);
        self
    }

    pub fn witness(mut self, point: Option<Bindings>) -> Self {
        self.witness = point;
        self
    }

    pub fn stage(&self) -> &'static str {
        self.id.split('.').next().unwrap_or(self.id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn summary(&self) -> Summary {
        let mut s = Summary::default();
        for c in &self.checks {
            match c.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Skip => s.skip += 1,
            }
        }
        s
    }

    /// 0 when nothing failed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.summary().fail == 0 {
            0
        } else {
            1
        }
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_value(&self) -> Value {
        let s = self.summary();
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                let mut m = Map::new();
                m.insert("id".into(), c.id.into());
                m.insert("eq".into(), c.eq.into());
                m.insert("status".into(), c.status.as_str().into());
                m.insert("values".into(), Value::Object(c.values.clone()));
                m.insert("tol".into(), c.tol.map_or(Value::Null, Value::from));
                m.insert("witness".into(), c.witness.as_ref().map_or(Value::Null, bindings_value));
                Value::Object(m)
            })
            .collect();
        let mut summary = Map::new();
        summary.insert("pass".into(), s.pass.into());
        summary.insert("fail".into(), s.fail.into());
        summary.insert("skip".into(), s.skip.into());
        let mut root = Map::new();
        root.insert("schema_version".into(), SCHEMA_VERSION.into());
        root.insert("tool_version".into(), TOOL_VERSION.into());
        root.insert("scenario".into(), self.scenario.clone().into());
        root.insert("seed".into(), self.seed.into());
        root.insert("checks".into(), Value::Array(checks));
        root.insert("summary".into(), Value::Object(summary));
        normalize(Value::Object(root))
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("report values are serializable");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "kkverify {TOOL_VERSION} (report schema {SCHEMA_VERSION})");
        let _ = writeln!(out, "scenario {} seed {}", self.scenario, self.seed);
        let mut stage = "";
        for c in &self.checks {
            if c.stage() != stage {
                stage = c.stage();
                let _ = writeln!(out, "\n[{stage}]");
            }
            let status = c.status.as_str().to_uppercase();
            let _ = writeln!(out, "{status:<4}  {}  ({})", c.id, c.eq);
            if let Some(t) = c.tol {
                let _ = writeln!(out, "      tol = {}", render(&normalize(Value::from(t))));
            }
            for (k, v) in &c.values {
                let _ = writeln!(out, "      {k} = {}", render(&normalize(v.clone())));
            }
            if let Some(w) = &c.witness {
                let _ = writeln!(out, "      witness = {}", render(&normalize(bindings_value(w))));
            }
        }
        let s = self.summary();
        let _ = writeln!(out, "\nsummary: {} pass, {} fail, {} skip", s.pass, s.fail, s.skip);
        out
    }
}

fn render(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn bindings_value(b: &Bindings) -> Value {
    Value::Object(b.iter().map(|(k, v)| (k.to_string(), Value::from(v))).collect())
}

/// Rounds to [`REPORT_DIGITS`] significant digits and maps −0 to 0.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let r: f64 = format!("{:.*e}", REPORT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Rounds every float; non-finite floats become strings.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            Number::from_f64(round_sig(x)).map_or_else(|| Value::String(x.to_string()), Value::Number)
        }
        Value::Array(xs) => Value::Array(xs.into_iter().map(normalize).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

/// Non-finite floats, which JSON cannot hold, as strings.
pub fn num(x: f64) -> Value {
    Number::from_f64(x).map_or_else(|| Value::String(x.to_string()), Value::Number)
}
