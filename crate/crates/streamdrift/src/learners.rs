//! Learner ids and construction from config entries.
//!
//! Ids: `sgd`, `pbf-sgd-<degree>`, `knn`, `ht`, `rls`, and `reset(<id>)`
//! wrapping any of those in detect-and-reset.

use std::fmt;

use serde::{Deserialize, Serialize};
use streamdrift_core::learners::{
    DetectAndReset, HoeffdingTree, HoeffdingTreeConfig, KnnClassifier, ResetConfig, RlsClassifier, SgdClassifier,
    SgdConfig,
};
use streamdrift_core::learners::rls::DEFAULT_DELTA;
use streamdrift_core::Learner;

use crate::config::NormalizationName;
use crate::error::{Error, Result};

pub type BoxedLearner = Box<dyn Learner + Send>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LearnerKind {
    Sgd,
    PbfSgd(usize),
    Knn,
    Ht,
    Rls,
    Reset(Box<LearnerKind>),
}

impl LearnerKind {
    pub fn parse(id: &str) -> Result<Self> {
        let id = id.trim();
        if let Some(inner) = id.strip_prefix("reset(").and_then(|s| s.strip_suffix(')')) {
            let inner = LearnerKind::parse(inner)?;
            if matches!(inner, LearnerKind::Reset(_)) {
                return Err(Error::invalid("id", "reset(...) cannot be nested"));
            }
            return Ok(LearnerKind::Reset(Box::new(inner)));
        }
        match id {
            "sgd" => Ok(LearnerKind::Sgd),
            "knn" => Ok(LearnerKind::Knn),
            "ht" => Ok(LearnerKind::Ht),
            "rls" => Ok(LearnerKind::Rls),
            _ => match id.strip_prefix("pbf-sgd-").map(str::parse::<usize>) {
                Some(Ok(degree)) if degree >= 1 => Ok(LearnerKind::PbfSgd(degree)),
                _ => Err(Error::invalid(
                    "id",
                    format!("unknown learner `{id}`; expected sgd, pbf-sgd-<degree>, knn, ht, rls or reset(<id>)"),
                )),
            },
        }
    }

    /// Gradient-based learners get standardized inputs on real datasets.
    pub fn wants_standardization(&self) -> bool {
        match self {
            LearnerKind::Sgd | LearnerKind::PbfSgd(_) | LearnerKind::Rls => true,
            LearnerKind::Knn | LearnerKind::Ht => false,
            LearnerKind::Reset(inner) => inner.wants_standardization(),
        }
    }

    fn base(&self) -> &LearnerKind {
        match self {
            LearnerKind::Reset(inner) => inner,
            other => other,
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LearnerKind::Sgd => f.write_str("sgd"),
            LearnerKind::PbfSgd(d) => write!(f, "pbf-sgd-{d}"),
            LearnerKind::Knn => f.write_str("knn"),
            LearnerKind::Ht => f.write_str("ht"),
            LearnerKind::Rls => f.write_str("rls"),
            LearnerKind::Reset(inner) => write!(f, "reset({inner})"),
        }
    }
}

/// One `[[learners]]` entry. Unset fields take the defaults of the kind.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momentum: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub buffer: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_confidence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tie_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grace_period: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nb_threshold: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forgetting: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reset_window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<NormalizationName>,
}

impl LearnerSpec {
    pub fn new(id: impl Into<String>) -> Self {
        LearnerSpec {
            id: id.into(),
            ..LearnerSpec::default()
        }
    }

    pub fn kind(&self) -> Result<LearnerKind> {
        LearnerKind::parse(&self.id)
    }

    /// Fields set on the entry that the learner kind does not use.
    fn stray_fields(&self, kind: &LearnerKind) -> Vec<&'static str> {
        let sgd = matches!(kind.base(), LearnerKind::Sgd | LearnerKind::PbfSgd(_));
        let checks = [
            ("learning_rate", self.learning_rate.is_some(), sgd),
            ("l2", self.l2.is_some(), sgd),
            ("momentum", self.momentum.is_some(), sgd),
            ("k", self.k.is_some(), *kind.base() == LearnerKind::Knn),
            ("buffer", self.buffer.is_some(), *kind.base() == LearnerKind::Knn),
            ("split_confidence", self.split_confidence.is_some(), *kind.base() == LearnerKind::Ht),
            ("tie_threshold", self.tie_threshold.is_some(), *kind.base() == LearnerKind::Ht),
            ("grace_period", self.grace_period.is_some(), *kind.base() == LearnerKind::Ht),
            ("nb_threshold", self.nb_threshold.is_some(), *kind.base() == LearnerKind::Ht),
            ("delta", self.delta.is_some(), *kind.base() == LearnerKind::Rls),
            ("forgetting", self.forgetting.is_some(), *kind.base() == LearnerKind::Rls),
            ("reset_window", self.reset_window.is_some(), matches!(kind, LearnerKind::Reset(_))),
            ("sensitivity", self.sensitivity.is_some(), matches!(kind, LearnerKind::Reset(_))),
        ];
        checks
            .into_iter()
            .filter(|(_, set, used)| *set && !used)
            .map(|(name, _, _)| name)
            .collect()
    }

    /// Fills defaults for the learner kind and checks the values.
    pub fn resolve(&mut self, on_dataset: bool) -> Result<()> {
        let kind = self.kind()?;
        if let Some(field) = self.stray_fields(&kind).first() {
            return Err(Error::invalid(*field, format!("not used by `{kind}`")));
        }
        self.id = kind.to_string();
        match kind.base() {
            LearnerKind::Sgd | LearnerKind::PbfSgd(_) => {
                let d = SgdConfig::default();
                self.learning_rate.get_or_insert(d.learning_rate);
                self.l2.get_or_insert(d.l2);
                self.momentum.get_or_insert(d.momentum);
            }
            LearnerKind::Knn => {
                self.k.get_or_insert(10);
                self.buffer.get_or_insert(100);
            }
            LearnerKind::Ht => {
                let d = HoeffdingTreeConfig::default();
                self.split_confidence.get_or_insert(d.split_confidence);
                self.tie_threshold.get_or_insert(d.tie_threshold);
                self.grace_period.get_or_insert(d.grace_period);
                self.nb_threshold.get_or_insert(d.nb_threshold);
            }
            LearnerKind::Rls => {
                self.delta.get_or_insert(DEFAULT_DELTA);
                self.forgetting.get_or_insert(1.0);
            }
            LearnerKind::Reset(_) => unreachable!("base() strips reset"),
        }
        if let LearnerKind::Reset(_) = kind {
            let d = ResetConfig::default();
            self.reset_window.get_or_insert(d.window);
            self.sensitivity.get_or_insert(d.sensitivity);
        }
        self.normalization.get_or_insert(if on_dataset && kind.wants_standardization() {
            NormalizationName::OnlineStandardize
        } else {
            NormalizationName::None
        });
        // a throwaway build surfaces parameter errors now rather than mid-run
        build_learner(self, 2, 2).map(drop)
    }

    fn sgd_config(&self, degree: Option<usize>) -> SgdConfig {
        let d = SgdConfig::default();
        SgdConfig {
            learning_rate: self.learning_rate.unwrap_or(d.learning_rate),
            l2: self.l2.unwrap_or(d.l2),
            momentum: self.momentum.unwrap_or(d.momentum),
            degree,
        }
    }

    fn ht_config(&self) -> HoeffdingTreeConfig {
        let d = HoeffdingTreeConfig::default();
        HoeffdingTreeConfig {
            split_confidence: self.split_confidence.unwrap_or(d.split_confidence),
            tie_threshold: self.tie_threshold.unwrap_or(d.tie_threshold),
            grace_period: self.grace_period.unwrap_or(d.grace_period),
            nb_threshold: self.nb_threshold.unwrap_or(d.nb_threshold),
            ..d
        }
    }
}

/// Maps a core parameter error onto the config field name.
fn field_error(e: streamdrift_core::Error) -> Error {
    match e {
        streamdrift_core::Error::InvalidParameter { name, reason } => Error::invalid(name, reason),
        other => Error::Core(other),
    }
}

fn build_base(kind: &LearnerKind, spec: &LearnerSpec, d: usize, classes: usize) -> Result<BoxedLearner> {
    Ok(match kind {
        LearnerKind::Sgd => Box::new(SgdClassifier::new(d, classes, spec.sgd_config(None)).map_err(field_error)?),
        LearnerKind::PbfSgd(deg) => {
            Box::new(SgdClassifier::new(d, classes, spec.sgd_config(Some(*deg))).map_err(field_error)?)
        }
        LearnerKind::Knn => Box::new(KnnClassifier::new(spec.k.unwrap_or(10), spec.buffer.unwrap_or(100)).map_err(field_error)?),
        LearnerKind::Ht => Box::new(HoeffdingTree::new(classes, spec.ht_config()).map_err(field_error)?),
        LearnerKind::Rls => {
            if classes != 2 {
                return Err(Error::invalid("id", "rls handles binary streams only"));
            }
            Box::new(
                RlsClassifier::new(d, spec.delta.unwrap_or(DEFAULT_DELTA), spec.forgetting.unwrap_or(1.0))
                    .map_err(field_error)?,
            )
        }
        LearnerKind::Reset(_) => return Err(Error::invalid("id", "reset(...) cannot be nested")),
    })
}

/// Builds the learner for a stream of dimension `d` with `classes` labels.
pub fn build_learner(spec: &LearnerSpec, d: usize, classes: usize) -> Result<BoxedLearner> {
    let kind = spec.kind()?;
    match kind {
        LearnerKind::Reset(inner) => {
            build_base(&inner, spec, d, classes)?;
            let cfg = ResetConfig {
                window: spec.reset_window.unwrap_or(100),
                sensitivity: spec.sensitivity.unwrap_or(0.15),
            };
            let spec = spec.clone();
            let factory = move || build_base(&inner, &spec, d, classes).expect("parameters checked above");
            Ok(Box::new(DetectAndReset::new(factory, cfg).map_err(field_error)?))
        }
        base => build_base(&base, spec, d, classes),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ids() {
        assert_eq!(LearnerKind::parse("sgd").unwrap(), LearnerKind::Sgd);
        assert_eq!(LearnerKind::parse("pbf-sgd-3").unwrap(), LearnerKind::PbfSgd(3));
        assert_eq!(
            LearnerKind::parse("reset(ht)").unwrap(),
            LearnerKind::Reset(Box::new(LearnerKind::Ht))
        );
        assert!(LearnerKind::parse("reset(reset(ht))").is_err());
        assert!(LearnerKind::parse("pbf-sgd-0").is_err());
        assert!(LearnerKind::parse("svm").is_err());
        for id in ["sgd", "pbf-sgd-2", "knn", "ht", "rls", "reset(knn)"] {
            assert_eq!(LearnerKind::parse(id).unwrap().to_string(), id);
        }
    }

    #[test]
    fn built_ids_match() {
        for id in ["sgd", "pbf-sgd-3", "knn", "ht", "rls", "reset(ht)"] {
            let l = build_learner(&LearnerSpec::new(id), 2, 2).unwrap();
            assert_eq!(l.id(), id);
        }
    }

    #[test]
    fn resolve_fills_defaults_and_normalization() {
        let mut s = LearnerSpec::new("reset(sgd)");
        s.resolve(true).unwrap();
        assert_eq!(s.learning_rate, Some(0.01));
        assert_eq!(s.reset_window, Some(100));
        assert_eq!(s.normalization, Some(NormalizationName::OnlineStandardize));
        let mut k = LearnerSpec::new("knn");
        k.resolve(true).unwrap();
        assert_eq!(k.normalization, Some(NormalizationName::None));
    }

    #[test]
    fn stray_and_bad_fields_are_named() {
        let mut s = LearnerSpec {
            k: Some(3),
            ..LearnerSpec::new("sgd")
        };
        let err = s.resolve(false).unwrap_err().to_string();
        assert!(err.contains("`k`"), "{err}");
        let mut s = LearnerSpec {
            learning_rate: Some(-1.0),
            ..LearnerSpec::new("sgd")
        };
        let err = s.resolve(false).unwrap_err().to_string();
        assert!(err.contains("learning_rate"), "{err}");
    }
}
