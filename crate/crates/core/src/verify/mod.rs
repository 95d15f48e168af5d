//! Seeded verification suites and their reports.
//!
//! Every claim draws trial `t` from `GaussianStream::for_trial(seed, s, t)`
//! where `s` is a hash of the claim id, so claims are independent of each
//! other and of execution order. Trials run on the rayon pool and are
//! collected in index order; everything after that is sequential.

mod report;
mod suites;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::GaussianStream;

pub use report::{emit_report, Format};

/// Largest `p + q` any suite accepts.
pub const MAX_N: usize = 4;

/// The suite registry, in the order `all` runs it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Killing,
    Index,
    Metric14,
    Spectrum,
    Integrability,
    Weyl,
    Conformal,
    SphereCurvature,
    DomegaThreeway,
    DomegaBundle,
    Tstar,
    DvarpiType,
    SigmaHolo,
    S64NearlyKahler,
    All,
}

impl Suite {
    pub const REGISTRY: [Suite; 14] = [
        Suite::Killing,
        Suite::Index,
        Suite::Metric14,
        Suite::Spectrum,
        Suite::Integrability,
        Suite::Weyl,
        Suite::Conformal,
        Suite::SphereCurvature,
        Suite::DomegaThreeway,
        Suite::DomegaBundle,
        Suite::Tstar,
        Suite::DvarpiType,
        Suite::SigmaHolo,
        Suite::S64NearlyKahler,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Killing => "killing",
            Suite::Index => "index",
            Suite::Metric14 => "metric14",
            Suite::Spectrum => "spectrum",
            Suite::Integrability => "integrability",
            Suite::Weyl => "weyl",
            Suite::Conformal => "conformal",
            Suite::SphereCurvature => "sphere_curvature",
            Suite::DomegaThreeway => "domega_threeway",
            Suite::DomegaBundle => "domega_bundle",
            Suite::Tstar => "tstar",
            Suite::DvarpiType => "dvarpi_type",
            Suite::SigmaHolo => "sigma_holo",
            Suite::S64NearlyKahler => "s64_nearly_kahler",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::REGISTRY
            .iter()
            .chain(&[Suite::All])
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

/// One harness invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub suite: Suite,
    /// Restricts signature-indexed suites to one `(p, q)`; `None` runs each
    /// suite's default list.
    pub signature: Option<(usize, usize)>,
    pub trials: usize,
    pub seed: u64,
    pub fd_step: f64,
    /// Overrides the pinned tolerance of every exact-arithmetic claim.
    pub tol_exact: Option<f64>,
    /// Overrides the pinned tolerance of every finite-difference claim.
    pub tol_fd: Option<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            suite: Suite::All,
            signature: None,
            trials: 100,
            seed: 42,
            fd_step: 1e-3,
            tol_exact: None,
            tol_fd: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if !(self.fd_step.is_finite() && self.fd_step > 0.0 && self.fd_step < 0.05) {
            return Err(Error::InvalidConfig(format!(
                "fd step must lie in (0, 0.05), got {}",
                self.fd_step
            )));
        }
        for (name, tol) in [("tol", self.tol_exact), ("tol-fd", self.tol_fd)] {
            if let Some(t) = tol {
                if !(t.is_finite() && t > 0.0) {
                    return Err(Error::InvalidConfig(format!("{name} must be positive, got {t}")));
                }
            }
        }
        if let Some((p, q)) = self.signature {
            if p + q == 0 || p + q > MAX_N {
                return Err(Error::UnsupportedDimension(format!(
                    "p + q must lie in 1..={MAX_N}, got ({p},{q})"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
        }
    }
}

/// A scalar in a report's `params` or `extra` map.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
    Text(String),
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Real(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClaimReport {
    pub claim_id: String,
    pub paper_anchor: String,
    pub params: Vec<(String, Value)>,
    pub trials: usize,
    pub max_residual: f64,
    /// `None` for info claims.
    pub tolerance: Option<f64>,
    pub extra: Vec<(String, Value)>,
    pub status: Status,
}

impl ClaimReport {
    pub fn param(&self, key: &str) -> Option<&Value> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn extra_value(&self, key: &str) -> Option<&Value> {
        self.extra.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn extra_real(&self, key: &str) -> Option<f64> {
        match self.extra_value(key)? {
            Value::Real(x) => Some(*x),
            Value::Int(i) => Some(*i as f64),
            Value::Text(_) => None,
        }
    }
}

/// Which flag, if any, may override a claim's pinned tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum TolKind {
    Exact,
    Fd,
    /// Integer comparisons and lower bounds; never overridden.
    Fixed,
}

/// Static description of a claim before it runs.
pub(crate) struct Claim {
    pub id: &'static str,
    pub anchor: &'static str,
    pub params: Vec<(String, Value)>,
    pub kind: TolKind,
    pub tol: f64,
}

impl Claim {
    pub fn new(id: &'static str, anchor: &'static str, kind: TolKind, tol: f64) -> Self {
        Self {
            id,
            anchor,
            params: Vec::new(),
            kind,
            tol,
        }
    }

    pub fn pq(mut self, p: usize, q: usize) -> Self {
        self.params.push(("p".into(), p.into()));
        self.params.push(("q".into(), q.into()));
        self
    }

    pub fn param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.params.push((key.into(), v.into()));
        self
    }

    fn stream(&self) -> u64 {
        // FNV-1a over the id and parameters
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        eat(self.id.as_bytes());
        for (k, v) in &self.params {
            eat(k.as_bytes());
            eat(format!("{v:?}").as_bytes());
        }
        h
    }

    fn tolerance(&self, cfg: &SuiteConfig) -> f64 {
        match self.kind {
            TolKind::Exact => cfg.tol_exact.unwrap_or(self.tol),
            TolKind::Fd => cfg.tol_fd.unwrap_or(self.tol),
            TolKind::Fixed => self.tol,
        }
    }

    /// Runs `f` once per trial and returns the per-trial outputs in order.
    pub fn trials<T: Send>(
        &self,
        cfg: &SuiteConfig,
        n: usize,
        f: impl Fn(usize, &mut GaussianStream) -> Result<T> + Sync + Send,
    ) -> Result<Vec<T>> {
        let stream = self.stream();
        (0..n)
            .into_par_iter()
            .map(|t| {
                let mut rng = GaussianStream::for_trial(cfg.seed, stream, t as u64);
                f(t, &mut rng)
            })
            .collect()
    }

    /// A single deterministic stream for claims that are not trial-shaped.
    pub fn rng(&self, cfg: &SuiteConfig) -> GaussianStream {
        GaussianStream::for_trial(cfg.seed, self.stream(), 0)
    }

    /// `pass` iff `residual ≤ tol`.
    pub fn judged(
        self,
        cfg: &SuiteConfig,
        trials: usize,
        residual: Result<f64>,
        extra: Vec<(String, Value)>,
    ) -> ClaimReport {
        let tol = self.tolerance(cfg);
        let (residual, extra) = with_error(residual, extra);
        let status = if residual <= tol { Status::Pass } else { Status::Fail };
        self.report(trials, residual, Some(tol), extra, status)
    }

    /// A lower bound: `observed ≥ threshold`, reported as the shortfall
    /// `max(0, threshold − observed)` against tolerance 0.
    pub fn at_least(
        self,
        cfg: &SuiteConfig,
        trials: usize,
        observed: Result<f64>,
        threshold: f64,
        mut extra: Vec<(String, Value)>,
    ) -> ClaimReport {
        debug_assert_eq!(self.kind, TolKind::Fixed);
        let shortfall = observed.map(|o| {
            extra.insert(0, ("observed".into(), o.into()));
            extra.insert(1, ("threshold".into(), threshold.into()));
            if o >= threshold {
                0.0
            } else {
                threshold - o
            }
        });
        self.judged(cfg, trials, shortfall, extra)
    }

    /// Empirical determinations: never pass or fail unless they error.
    pub fn info(self, trials: usize, residual: Result<f64>, extra: Vec<(String, Value)>) -> ClaimReport {
        let failed = residual.is_err();
        let (residual, extra) = with_error(residual, extra);
        let status = if failed { Status::Fail } else { Status::Info };
        self.report(trials, residual, None, extra, status)
    }

    fn report(
        self,
        trials: usize,
        max_residual: f64,
        tolerance: Option<f64>,
        extra: Vec<(String, Value)>,
        status: Status,
    ) -> ClaimReport {
        ClaimReport {
            claim_id: self.id.to_string(),
            paper_anchor: self.anchor.to_string(),
            params: self.params,
            trials,
            max_residual,
            tolerance,
            extra,
            status,
        }
    }
}

fn with_error(residual: Result<f64>, mut extra: Vec<(String, Value)>) -> (f64, Vec<(String, Value)>) {
    match residual {
        Ok(r) => (r, extra),
        Err(e) => {
            extra.push(("error".into(), e.to_string().into()));
            (f64::NAN, extra)
        }
    }
}

/// `max` that propagates NaN.
pub(crate) fn worst(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter()
        .fold(0.0, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}

/// Runs the configured suite and returns its claims in registry order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<ClaimReport>> {
    cfg.validate()?;
    let suites: Vec<Suite> = match cfg.suite {
        Suite::All => Suite::REGISTRY.to_vec(),
        s => vec![s],
    };
    // reject incompatible signatures before doing any work
    let plans = suites
        .iter()
        .map(|&s| suites::plan(s, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(plans.into_iter().flat_map(|plan| plan.run(cfg)).collect())
}

/// `true` iff no claim failed.
pub fn all_passed(reports: &[ClaimReport]) -> bool {
    reports.iter().all(|r| r.status != Status::Fail)
}
