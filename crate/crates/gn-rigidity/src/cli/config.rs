//! Resolved run configurations. Every emitted JSON document carries one, and feeding it back
//! through `--config` repeats the run.

use serde::{Deserialize, Serialize};

use crate::constants::{GNParams, Regime};
use crate::error::{Error, Result};
use crate::expansion::{AChoice, SeriesKind, TGrid};
use crate::geometry::RadialMetric;
use crate::varmin::MinimizeConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum RunConfig {
    Constants(ConstantsConfig),
    Ranges(RangesConfig),
    MomentsVerify(MomentsConfig),
    ExpansionFit(FitConfig),
    Minimize(MinimizeRun),
    Symmetrize(SymmetrizeConfig),
    ConformalCheck(ConformalConfig),
    Suite(SuiteConfig),
}

/// `(n, α)` with an optional regime override and the `𝔪` scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamsConfig {
    pub n: usize,
    pub alpha: f64,
    pub regime: Option<Regime>,
    pub m_frak: f64,
}

impl ParamsConfig {
    pub fn params(&self) -> Result<GNParams> {
        let regime = match self.regime {
            Some(r) => r,
            None => Regime::of_alpha(self.alpha)?,
        };
        GNParams::with(self.n, self.alpha, regime, self.m_frak)
    }
}

/// A metric spec as accepted by [`RadialMetric::parse`] and an optional chart radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub spec: String,
    pub r_max: Option<f64>,
}

impl MetricConfig {
    pub fn metric(&self, n: usize) -> Result<RadialMetric> {
        RadialMetric::parse(&self.spec, n, self.r_max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsConfig {
    pub n: Vec<usize>,
    pub alpha: Vec<f64>,
    pub regime: Option<Regime>,
    pub m_frak: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangesConfig {
    pub n: Vec<usize>,
    /// Residual bound on root-found endpoints and κ.
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentsConfig {
    pub n: Vec<usize>,
    pub alpha: Vec<f64>,
    pub q1: Vec<f64>,
    /// Explicit `q2` values; empty means the four exponent families tied to α.
    pub q2: Vec<f64>,
    pub tol: f64,
}

/// Grid overrides; unset fields keep the per-cell default.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GridOverride {
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub t_count: Option<usize>,
}

impl GridOverride {
    pub fn is_empty(&self) -> bool {
        self.t_min.is_none() && self.t_max.is_none() && self.t_count.is_none()
    }

    /// `None` when no override is set; `t_max` is required otherwise.
    pub fn grid(&self) -> Result<Option<TGrid>> {
        if self.is_empty() {
            return Ok(None);
        }
        let t_max = self
            .t_max
            .ok_or_else(|| Error::Config("--tmin/--tcount need --tmax".into()))?;
        let count = self.t_count.unwrap_or(10);
        Ok(Some(
            match self.t_min {
                Some(t_min) => TGrid::span(t_min, t_max, count),
                None => TGrid::new(t_max, count, 2.0),
            }
            .map_err(|e| Error::Config(e.to_string()))?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub params: ParamsConfig,
    pub metric: MetricConfig,
    pub series: Vec<SeriesKind>,
    /// Jet of the L-series cutoff; the W-series always uses the ℬ_p jet.
    pub a_choice: AChoice,
    pub grid: GridOverride,
    pub r0: Option<f64>,
    pub tol_c1: f64,
    pub tol_c2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeRun {
    pub params: ParamsConfig,
    pub metric: MetricConfig,
    pub minimize: MinimizeConfig,
    /// Relative distance to the sharp constant accepted on Euclidean space.
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceConfig {
    Random { seed: u64, nodes: usize, r_end: f64 },
    Profile { path: String },
    Histogram { path: String },
}

impl std::str::FromStr for SourceConfig {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "random" {
            return Ok(SourceConfig::Random {
                seed: 0,
                nodes: 128,
                r_end: 1.2,
            });
        }
        if let Some(p) = s.strip_prefix("profile:") {
            return Ok(SourceConfig::Profile { path: p.into() });
        }
        if let Some(p) = s.strip_prefix("histogram:") {
            return Ok(SourceConfig::Histogram { path: p.into() });
        }
        Err(Error::Config(format!(
            "unknown source {s:?} (random | profile:<csv> | histogram:<csv>)"
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetrizeConfig {
    pub n: usize,
    pub source: SourceConfig,
    /// Metric of a grid source; ignored for histograms.
    pub metric: MetricConfig,
    pub target: MetricConfig,
    pub q: Vec<f64>,
    pub levels: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformalConfig {
    pub n: usize,
    pub metric: MetricConfig,
    /// Support `[lo, hi]` of the test function `((r-lo)(hi-r))^power`.
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub power: f64,
    pub nodes: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub quick: bool,
    /// Criterion ids; empty runs all of them.
    pub only: Vec<usize>,
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

impl RunConfig {
    pub fn name(&self) -> &'static str {
        match self {
            RunConfig::Constants(_) => "constants",
            RunConfig::Ranges(_) => "ranges",
            RunConfig::MomentsVerify(_) => "moments verify",
            RunConfig::ExpansionFit(_) => "expansion fit",
            RunConfig::Minimize(_) => "minimize",
            RunConfig::Symmetrize(_) => "symmetrize",
            RunConfig::ConformalCheck(_) => "conformal check",
            RunConfig::Suite(_) => "suite",
        }
    }

    /// Cheap checks of everything that can be rejected before computing.
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64, what: &str| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{what} must be positive, got {x}")))
            }
        };
        let nonempty = |len: usize, what: &str| {
            if len == 0 {
                Err(Error::Config(format!("{what} list is empty")))
            } else {
                Ok(())
            }
        };
        match self {
            RunConfig::Constants(c) => {
                nonempty(c.n.len(), "n")?;
                nonempty(c.alpha.len(), "alpha")?;
                positive(c.m_frak, "m_frak")?;
                if let Some(&n) = c.n.iter().find(|&&n| n < 3) {
                    return Err(Error::Config(format!("n = {n} must be at least 3")));
                }
            }
            RunConfig::Ranges(c) => {
                nonempty(c.n.len(), "n")?;
                positive(c.tol, "tol")?;
                if let Some(&n) = c.n.iter().find(|&&n| n < 3) {
                    return Err(Error::Config(format!("n = {n} must be at least 3")));
                }
            }
            RunConfig::MomentsVerify(c) => {
                nonempty(c.n.len(), "n")?;
                nonempty(c.alpha.len(), "alpha")?;
                nonempty(c.q1.len(), "q1")?;
                positive(c.tol, "tol")?;
            }
            RunConfig::ExpansionFit(c) => {
                let p = c.params.params().map_err(config_err)?;
                let m = c.metric.metric(p.n).map_err(config_err)?;
                if m.curvature_k().is_none() {
                    return Err(Error::Config(
                        "expansion fits need a Euclidean or space-form metric".into(),
                    ));
                }
                nonempty(c.series.len(), "series")?;
                c.grid.grid()?;
                positive(c.tol_c1, "tol")?;
                positive(c.tol_c2, "tol")?;
            }
            RunConfig::Minimize(c) => {
                let p = c.params.params().map_err(config_err)?;
                let m = c.metric.metric(p.n).map_err(config_err)?;
                c.minimize.validate(&m)?;
                positive(c.tol, "tol")?;
            }
            RunConfig::Symmetrize(c) => {
                if c.n < 2 {
                    return Err(Error::Config(format!("n = {} must be at least 2", c.n)));
                }
                c.metric.metric(c.n).map_err(config_err)?;
                c.target.metric(c.n).map_err(config_err)?;
                if let SourceConfig::Random { nodes, r_end, .. } = &c.source {
                    positive(*r_end, "r_end")?;
                    if *nodes < 2 {
                        return Err(Error::Config("a source needs at least 2 nodes".into()));
                    }
                }
                if let Some(&q) = c.q.iter().find(|&&q| !(q > 0.0)) {
                    return Err(Error::Config(format!("norm exponent {q} must be positive")));
                }
                positive(c.tol, "tol")?;
            }
            RunConfig::ConformalCheck(c) => {
                c.metric.metric(c.n).map_err(config_err)?;
                positive(c.power, "power")?;
                positive(c.tol, "tol")?;
            }
            RunConfig::Suite(c) => {
                if let Some(&id) = c.only.iter().find(|&&id| !(1..=10).contains(&id)) {
                    return Err(Error::Config(format!("no criterion {id} (1..=10)")));
                }
            }
        }
        Ok(())
    }
}
