use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{evaluate, Bindings, EvalError, Expr};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EquivError {
    #[error("no sampling domain declared for symbol {0:?}")]
    MissingDomain(String),
    #[error("invalid sampling domain for {symbol:?}: [{lo}, {hi}]")]
    InvalidDomain { symbol: String, lo: f64, hi: f64 },
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("gave up after {attempts} sample points failed to evaluate; last error: {last}")]
    Exhausted { attempts: usize, last: EvalError },
}

/// Seeded sampler over per-symbol intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    domains: BTreeMap<String, (f64, f64)>,
    seed: u64,
}

impl Probe {
    pub fn new(seed: u64) -> Self {
        Probe {
            domains: BTreeMap::new(),
            seed,
        }
    }

    pub fn with_domain(mut self, symbol: impl Into<String>, lo: f64, hi: f64) -> Self {
        self.domains.insert(symbol.into(), (lo, hi));
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Probe {
            domains: self.domains.clone(),
            seed,
        }
    }

    pub fn domains(&self) -> &BTreeMap<String, (f64, f64)> {
        &self.domains
    }

    /// Checks that every symbol has a usable interval.
    pub fn covers<'a>(&self, symbols: impl IntoIterator<Item = &'a String>) -> Result<(), EquivError> {
        for s in symbols {
            match self.domains.get(s) {
                None => return Err(EquivError::MissingDomain(s.clone())),
                Some(&(lo, hi)) if !(lo.is_finite() && hi.is_finite() && lo < hi) => {
                    return Err(EquivError::InvalidDomain {
                        symbol: s.clone(),
                        lo,
                        hi,
                    })
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Bindings {
        self.domains
            .iter()
            .map(|(s, &(lo, hi))| {
                let u: f64 = rng.random();
                (s.clone(), lo + (hi - lo) * u)
            })
            .collect()
    }

    /// Draws `count` points at which `f` succeeds, retrying points where it
    /// reports an evaluation error. The retry budget is `max(10 * count, 100)`
    /// failed attempts.
    pub fn sample_valid<T, F>(&self, count: usize, mut f: F) -> Result<Vec<(Bindings, T)>, EquivError>
    where
        F: FnMut(&Bindings) -> Result<T, EvalError>,
    {
        if count == 0 {
            return Err(EquivError::NoSamples);
        }
        let budget = (10 * count).max(100);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(count);
        let mut failures = 0;
        while out.len() < count {
            let point = self.draw(&mut rng);
            match f(&point) {
                Ok(v) => out.push((point, v)),
                Err(e) => {
                    failures += 1;
                    if failures >= budget {
                        return Err(EquivError::Exhausted {
                            attempts: failures,
                            last: e,
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}

/// One evaluated comparison point.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePoint {
    pub point: Bindings,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / (1 + max(|lhs|, |rhs|))`
    pub scaled_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivReport {
    pub equivalent: bool,
    pub samples: usize,
    pub tol: f64,
    /// Point with the largest scaled error.
    pub worst: SamplePoint,
}

pub(crate) fn scaled_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}

/// Compares two expressions at seeded sample points.
///
/// Passes iff `|a - b| <= tol * (1 + max(|a|, |b|))` at every point.
pub fn numeric_equiv(a: &Expr, b: &Expr, probe: &Probe, samples: usize, tol: f64) -> Result<EquivReport, EquivError> {
    let symbols: BTreeSet<String> = a.free_symbols().union(&b.free_symbols()).cloned().collect();
    probe.covers(&symbols)?;
    let points = probe.sample_valid(samples, |p| Ok((evaluate(a, p)?, evaluate(b, p)?)))?;
    let mut worst: Option<SamplePoint> = None;
    for (point, (lhs, rhs)) in points {
        let err = scaled_error(lhs, rhs);
        if worst.as_ref().is_none_or(|w| err > w.scaled_error) {
            worst = Some(SamplePoint {
                point,
                lhs,
                rhs,
                scaled_error: err,
            });
        }
    }
    let worst = worst.expect("at least one sample");
    Ok(EquivReport {
        equivalent: worst.scaled_error <= tol,
        samples,
        tol,
        worst,
    })
}

/// Probe, sample count, and tolerance bundled for repeated comparisons.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivSettings {
    pub probe: Probe,
    pub samples: usize,
    pub tol: f64,
}

impl EquivSettings {
    pub fn new(probe: Probe, samples: usize, tol: f64) -> Self {
        EquivSettings { probe, samples, tol }
    }

    pub fn check(&self, a: &Expr, b: &Expr) -> Result<EquivReport, EquivError> {
        numeric_equiv(a, b, &self.probe, self.samples, self.tol)
    }
}
