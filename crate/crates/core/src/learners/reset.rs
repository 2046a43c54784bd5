//! Detect-and-reset wrapper.
//!
//! Tracks the inner learner's error over a sliding window. Once the window
//! is full, the lowest windowed error rate seen since the last reset becomes
//! the reference. When the current rate exceeds `reference + sensitivity`,
//! the inner learner is discarded and rebuilt from its factory.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::stream::{Instance, LabeledInstance, Learner};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResetConfig {
    pub window: usize,
    pub sensitivity: f64,
}

impl Default for ResetConfig {
    fn default() -> Self {
        ResetConfig {
            window: 100,
            sensitivity: 0.15,
        }
    }
}

pub struct DetectAndReset<L, F> {
    factory: F,
    inner: L,
    config: ResetConfig,
    errors: VecDeque<bool>,
    error_count: usize,
    reference: Option<f64>,
    resets: Vec<u64>,
    seen: u64,
}

impl<L: Learner, F: Fn() -> L> DetectAndReset<L, F> {
    pub fn new(factory: F, config: ResetConfig) -> Result<Self> {
        if config.window == 0 {
            return Err(Error::param("window", "must be at least 1"));
        }
        if config.sensitivity.is_nan() || config.sensitivity < 0.0 {
            return Err(Error::param("sensitivity", "must be non-negative"));
        }
        let inner = factory();
        Ok(DetectAndReset {
            factory,
            inner,
            config,
            errors: VecDeque::with_capacity(config.window),
            error_count: 0,
            reference: None,
            resets: Vec::new(),
            seen: 0,
        })
    }

    pub fn inner(&self) -> &L {
        &self.inner
    }

    pub fn reset_count(&self) -> usize {
        self.resets.len()
    }

    /// Instance counts at which resets fired.
    pub fn reset_times(&self) -> &[u64] {
        &self.resets
    }

    /// Windowed error rate, once the window is full.
    pub fn error_rate(&self) -> Option<f64> {
        (self.errors.len() == self.config.window).then(|| self.error_count as f64 / self.config.window as f64)
    }

    pub fn reference(&self) -> Option<f64> {
        self.reference
    }

    fn record(&mut self, wrong: bool) -> bool {
        self.errors.push_back(wrong);
        self.error_count += usize::from(wrong);
        if self.errors.len() > self.config.window && self.errors.pop_front() == Some(true) {
            self.error_count -= 1;
        }
        let Some(rate) = self.error_rate() else {
            return false;
        };
        let reference = self.reference.map_or(rate, |r| r.min(rate));
        self.reference = Some(reference);
        rate > reference + self.config.sensitivity
    }

    fn reset(&mut self) {
        self.inner = (self.factory)();
        self.errors.clear();
        self.error_count = 0;
        self.reference = None;
        self.resets.push(self.seen);
    }
}

impl<L: Learner, F: Fn() -> L> Learner for DetectAndReset<L, F> {
    fn id(&self) -> String {
        format!("reset({})", self.inner.id())
    }

    fn predict(&self, x: &Instance) -> Result<usize> {
        self.inner.predict(x)
    }

    fn update(&mut self, example: &LabeledInstance) -> Result<()> {
        self.seen += 1;
        let wrong = self.inner.predict(&example.instance)? != example.label;
        if self.record(wrong) {
            self.reset();
        }
        self.inner.update(example)
    }

    fn weights(&self) -> Option<Vec<f64>> {
        self.inner.weights()
    }

    fn model_size(&self) -> usize {
        self.inner.model_size()
    }
}
