//! Instance, stream and learner contracts shared by every module.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::generators::ConceptParams;

/// A dense feature vector with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance(Vec<f64>);

impl Instance {
    pub fn new(features: Vec<f64>) -> Result<Self> {
        if let Some(i) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Instance(features))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Instance {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledInstance {
    pub instance: Instance,
    pub label: usize,
}

impl LabeledInstance {
    pub fn new(instance: Instance, label: usize) -> Self {
        LabeledInstance { instance, label }
    }

    /// Builds an instance and checks the label against the class count.
    pub fn checked(features: Vec<f64>, label: usize, classes: usize) -> Result<Self> {
        if label >= classes {
            return Err(Error::InvalidLabel { label, classes });
        }
        Ok(LabeledInstance {
            instance: Instance::new(features)?,
            label,
        })
    }

    pub fn features(&self) -> &[f64] {
        self.instance.as_slice()
    }
}

/// Timeline of a drifting stream.
///
/// `tau0` ends pre-training (accuracy is recorded from `tau0` on), drift is
/// active on `[tau1, tau2)` and the stream has `total` instances. Timesteps
/// are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DriftSchedule {
    pub tau0: u64,
    pub tau1: u64,
    pub tau2: u64,
    pub total: u64,
}

impl DriftSchedule {
    pub fn new(tau0: u64, tau1: u64, tau2: u64, total: u64) -> Result<Self> {
        if !(tau0 <= tau1 && tau1 <= tau2 && tau2 <= total) {
            return Err(Error::InvalidSchedule(alloc::format!(
                "need tau0 <= tau1 <= tau2 <= total, got {tau0}, {tau1}, {tau2}, {total}"
            )));
        }
        Ok(DriftSchedule {
            tau0,
            tau1,
            tau2,
            total,
        })
    }

    /// Standard synthetic timeline: `tau0 = T/10`, drift on `[tau1, tau2)`.
    pub fn standard(total: u64, tau1: u64, tau2: u64) -> Result<Self> {
        Self::new(total / 10, tau1, tau2, total)
    }

    /// Sudden drift at `tau1` is a one-step window.
    pub fn sudden(total: u64, tau1: u64) -> Result<Self> {
        Self::new(total / 10, tau1, tau1 + 1, total)
    }

    /// No drift: the drift window is empty and sits at the end.
    pub fn stationary(total: u64) -> Self {
        DriftSchedule {
            tau0: total / 10,
            tau1: total,
            tau2: total,
            total,
        }
    }
}

/// A source of labelled instances.
///
/// Implementations are deterministic given their seed and parameters.
pub trait StreamSource {
    fn dim(&self) -> usize;
    fn classes(&self) -> usize;
    /// The instance at the current timestep, or `None` once exhausted.
    fn next_instance(&mut self) -> Option<LabeledInstance>;

    /// The concept that generated the most recently emitted instance.
    fn true_theta(&self) -> Result<ConceptParams> {
        Err(Error::Unsupported("stream has no parametric concept"))
    }

    fn describe(&self) -> String {
        String::from("stream")
    }
}

impl<S: StreamSource + ?Sized> StreamSource for Box<S> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn classes(&self) -> usize {
        (**self).classes()
    }
    fn next_instance(&mut self) -> Option<LabeledInstance> {
        (**self).next_instance()
    }
    fn true_theta(&self) -> Result<ConceptParams> {
        (**self).true_theta()
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// An incremental classifier.
///
/// `predict` takes `&self`, so the test-then-train order cannot leak the
/// label into the prediction.
pub trait Learner {
    /// Stable identifier used on the command line and in output files.
    fn id(&self) -> String;
    fn predict(&self, x: &Instance) -> Result<usize>;
    fn update(&mut self, example: &LabeledInstance) -> Result<()>;

    /// Parameter vector in input space, for parametric learners.
    fn weights(&self) -> Option<Vec<f64>> {
        None
    }

    /// Model-size proxy: leaf count, buffer size or weight dimension.
    fn model_size(&self) -> usize;
}

impl<L: Learner + ?Sized> Learner for Box<L> {
    fn id(&self) -> String {
        (**self).id()
    }
    fn predict(&self, x: &Instance) -> Result<usize> {
        (**self).predict(x)
    }
    fn update(&mut self, example: &LabeledInstance) -> Result<()> {
        (**self).update(example)
    }
    fn weights(&self) -> Option<Vec<f64>> {
        (**self).weights()
    }
    fn model_size(&self) -> usize {
        (**self).model_size()
    }
}
