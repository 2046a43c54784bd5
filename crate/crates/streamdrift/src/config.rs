//! Experiment configuration files (TOML, `version = 1`).
//!
//! A config names one stream, a list of learners and one or more seeds.
//! [`ExperimentConfig::resolve`] validates it and fills every default, and
//! the resolved form is what gets echoed next to the outputs.
//!
//! ```toml
//! version = 1
//! name = "sudden"
//! seeds = [1, 2]
//!
//! [stream]
//! kind = "hyperplane"
//! drift = "sudden"
//! d = 2
//!
//! [eval]
//! window = 200
//!
//! [[learners]]
//! id = "sgd"
//! learning_rate = 0.01
//!
//! [[learners]]
//! id = "reset(ht)"
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use streamdrift_core::eval::{EvalConfig, TrackingMode};
use streamdrift_core::generators::DriftKind;
use streamdrift_core::normalize::Normalization;
use streamdrift_core::DriftSchedule;

use crate::error::{Error, Result};
use crate::ingest::DatasetSpec;
use crate::learners::{LearnerKind, LearnerSpec};

pub const CONFIG_VERSION: u32 = 1;

/// Default stream length and drift window.
pub const DEFAULT_TOTAL: u64 = 10_000;
pub const DEFAULT_TAU1: u64 = 5_000;
pub const DEFAULT_TAU2: u64 = 6_000;
pub const DEFAULT_ANGLE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub stream: StreamSpec,
    #[serde(default)]
    pub eval: EvalSpec,
    pub learners: Vec<LearnerSpec>,
}

fn default_name() -> String {
    "experiment".into()
}

fn default_seeds() -> Vec<u64> {
    vec![1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StreamSpec {
    Hyperplane(HyperplaneSpec),
    Rtg(RtgSpec),
    Dataset(DatasetStreamSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftName {
    None,
    Sudden,
    Incremental,
    Gradual,
    ConstantIncremental,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperplaneSpec {
    pub drift: DriftName,
    #[serde(default = "default_d")]
    pub d: usize,
    /// Radians per step for the rotating kinds.
    #[serde(default = "default_angle")]
    pub angle: f64,
    #[serde(default = "default_total")]
    pub total: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau0: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau1: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau2: Option<u64>,
}

fn default_d() -> usize {
    2
}

fn default_angle() -> f64 {
    DEFAULT_ANGLE
}

fn default_total() -> u64 {
    DEFAULT_TOTAL
}

impl HyperplaneSpec {
    pub fn new(drift: DriftName) -> Self {
        HyperplaneSpec {
            drift,
            d: default_d(),
            angle: DEFAULT_ANGLE,
            total: DEFAULT_TOTAL,
            tau0: None,
            tau1: None,
            tau2: None,
        }
    }

    pub fn kind(&self) -> DriftKind {
        match self.drift {
            DriftName::None => DriftKind::None,
            DriftName::Sudden => DriftKind::Sudden,
            DriftName::Incremental => DriftKind::Incremental(self.angle),
            DriftName::Gradual => DriftKind::Gradual,
            DriftName::ConstantIncremental => DriftKind::ConstantIncremental(self.angle),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RtgSpec {
    #[serde(default = "default_rtg_d")]
    pub d: usize,
    #[serde(default = "default_rtg_classes")]
    pub classes: usize,
    #[serde(default = "default_rtg_depth")]
    pub depth: usize,
    #[serde(default = "default_total")]
    pub total: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau0: Option<u64>,
}

fn default_rtg_d() -> usize {
    10
}

fn default_rtg_classes() -> usize {
    2
}

fn default_rtg_depth() -> usize {
    5
}

impl Default for RtgSpec {
    fn default() -> Self {
        RtgSpec {
            d: default_rtg_d(),
            classes: default_rtg_classes(),
            depth: default_rtg_depth(),
            total: DEFAULT_TOTAL,
            tau0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetStreamSpec {
    pub dataset: DatasetSpec,
    /// Real datasets are scored from the first row by default.
    #[serde(default)]
    pub tau0: u64,
    /// Only replay the first `limit` rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrackingName {
    #[default]
    Normalized,
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSpec {
    #[serde(default = "default_window")]
    pub window: usize,
    /// Per-instance timings. Off by default so reruns give identical CSVs.
    #[serde(default)]
    pub timing: bool,
    #[serde(default)]
    pub record_trajectory: bool,
    #[serde(default)]
    pub tracking: TrackingName,
}

fn default_window() -> usize {
    200
}

impl Default for EvalSpec {
    fn default() -> Self {
        EvalSpec {
            window: default_window(),
            timing: false,
            record_trajectory: false,
            tracking: TrackingName::Normalized,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationName {
    None,
    OnlineStandardize,
}

impl From<NormalizationName> for Normalization {
    fn from(n: NormalizationName) -> Self {
        match n {
            NormalizationName::None => Normalization::None,
            NormalizationName::OnlineStandardize => Normalization::OnlineStandardize,
        }
    }
}

impl StreamSpec {
    /// The scoring schedule. Only meaningful after [`ExperimentConfig::resolve`].
    pub fn schedule(&self) -> Result<DriftSchedule> {
        let s = match self {
            StreamSpec::Hyperplane(h) => DriftSchedule::new(
                h.tau0.unwrap_or(h.total / 10),
                h.tau1.unwrap_or(h.total),
                h.tau2.unwrap_or(h.total),
                h.total,
            ),
            StreamSpec::Rtg(r) => {
                DriftSchedule::new(r.tau0.unwrap_or(r.total / 10), r.total, r.total, r.total)
            }
            StreamSpec::Dataset(ds) => {
                let total = ds.limit.unwrap_or(u64::MAX);
                DriftSchedule::new(ds.tau0, total, total, total)
            }
        };
        s.map_err(|e| Error::invalid("stream", e.to_string()))
    }

    pub fn is_dataset(&self) -> bool {
        matches!(self, StreamSpec::Dataset(_))
    }
}

impl ExperimentConfig {
    pub fn new(name: impl Into<String>, stream: StreamSpec, learners: Vec<LearnerSpec>) -> Self {
        ExperimentConfig {
            version: CONFIG_VERSION,
            name: name.into(),
            seeds: default_seeds(),
            out: None,
            stream,
            eval: EvalSpec::default(),
            learners,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config { reason, .. } => Error::Config {
                path: path.to_path_buf(),
                reason,
            },
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config {
            path: PathBuf::from("<config>"),
            reason: e.to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config types serialize to TOML")
    }

    pub fn eval_config(&self) -> Result<EvalConfig> {
        let mut eval = EvalConfig::new(self.eval.window, self.stream.schedule()?)
            .map_err(|e| Error::invalid("eval.window", e.to_string()))?;
        eval.timing = self.eval.timing;
        eval.record_trajectory = self.eval.record_trajectory;
        eval.tracking = match self.eval.tracking {
            TrackingName::Normalized => TrackingMode::Normalized,
            TrackingName::Raw => TrackingMode::Raw,
        };
        Ok(eval)
    }

    /// Validates every field and replaces defaults with explicit values.
    pub fn resolve(mut self) -> Result<Self> {
        if self.version != CONFIG_VERSION {
            return Err(Error::invalid(
                "version",
                format!("unsupported version {}, expected {CONFIG_VERSION}", self.version),
            ));
        }
        if self.seeds.is_empty() {
            return Err(Error::invalid("seeds", "list at least one seed"));
        }
        if self.learners.is_empty() {
            return Err(Error::invalid("learners", "list at least one learner"));
        }
        if self.eval.window == 0 {
            return Err(Error::invalid("eval.window", "must be at least 1"));
        }
        match &mut self.stream {
            StreamSpec::Hyperplane(h) => resolve_hyperplane(h)?,
            StreamSpec::Rtg(r) => {
                for (field, v) in [("stream.d", r.d), ("stream.classes", r.classes), ("stream.depth", r.depth)] {
                    if v == 0 {
                        return Err(Error::invalid(field, "must be at least 1"));
                    }
                }
                if r.classes < 2 {
                    return Err(Error::invalid("stream.classes", "must be at least 2"));
                }
                r.tau0.get_or_insert(r.total / 10);
            }
            StreamSpec::Dataset(ds) => {
                if ds.limit == Some(0) {
                    return Err(Error::invalid("stream.limit", "must be positive"));
                }
            }
        }
        self.stream.schedule()?;
        let on_dataset = self.stream.is_dataset();
        for (i, learner) in self.learners.iter_mut().enumerate() {
            learner.resolve(on_dataset).map_err(|e| match e {
                Error::Invalid { field, reason } => Error::invalid(format!("learners[{i}].{field}"), reason),
                other => other,
            })?;
        }
        Ok(self)
    }

    /// Learner kinds, parsed from the ids.
    pub fn learner_kinds(&self) -> Result<Vec<LearnerKind>> {
        self.learners.iter().map(|l| LearnerKind::parse(&l.id)).collect()
    }
}

fn resolve_hyperplane(h: &mut HyperplaneSpec) -> Result<()> {
    if !h.angle.is_finite() {
        return Err(Error::invalid("stream.angle", "must be a finite number of radians"));
    }
    let rotating = matches!(h.drift, DriftName::Incremental | DriftName::ConstantIncremental);
    if h.d < 1 || (rotating && h.d < 2) {
        return Err(Error::invalid(
            "stream.d",
            format!("must be at least {} for {:?} drift", if rotating { 2 } else { 1 }, h.drift),
        ));
    }
    if h.total == 0 {
        return Err(Error::invalid("stream.total", "must be positive"));
    }
    let tau0 = *h.tau0.get_or_insert(h.total / 10);
    let (tau1, tau2) = match h.drift {
        DriftName::None => (h.total, h.total),
        DriftName::Sudden => {
            let t1 = h.tau1.unwrap_or(DEFAULT_TAU1.min(h.total));
            (t1, h.tau2.unwrap_or((t1 + 1).min(h.total)))
        }
        DriftName::Incremental | DriftName::Gradual => (
            h.tau1.unwrap_or(DEFAULT_TAU1.min(h.total)),
            h.tau2.unwrap_or(DEFAULT_TAU2.min(h.total)),
        ),
        // rotation runs on every step; the window only documents that
        DriftName::ConstantIncremental => (h.tau1.unwrap_or(tau0), h.tau2.unwrap_or(h.total)),
    };
    h.tau1 = Some(tau1);
    h.tau2 = Some(tau2);
    if tau0 >= h.total {
        return Err(Error::invalid("stream.tau0", "must be below total"));
    }
    if !(tau1 <= tau2 && tau2 <= h.total) {
        return Err(Error::invalid("stream.tau1", "need tau1 <= tau2 <= total"));
    }
    Ok(())
}
