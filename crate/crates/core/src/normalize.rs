//! Causal per-attribute standardization.
//!
//! Statistics are updated with the current instance and then applied to it,
//! so nothing after `t` ever influences the value emitted at `t`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::generators::ConceptParams;
use crate::stream::{Instance, LabeledInstance, StreamSource};

const MIN_STD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    #[default]
    None,
    OnlineStandardize,
}

impl Normalization {
    pub fn name(&self) -> &'static str {
        match self {
            Normalization::None => "none",
            Normalization::OnlineStandardize => "online-standardize",
        }
    }
}

/// Welford running mean and variance per attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct OnlineStandardizer {
    n: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl OnlineStandardizer {
    pub fn new(d: usize) -> Self {
        OnlineStandardizer {
            n: 0,
            mean: vec![0.0; d],
            m2: vec![0.0; d],
        }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn std(&self, i: usize) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            libm::sqrt(self.m2[i] / (self.n - 1) as f64)
        }
    }

    pub fn observe(&mut self, x: &[f64]) {
        self.n += 1;
        let n = self.n as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(&mut self.m2).zip(x) {
            let delta = v - *m;
            *m += delta / n;
            *s += delta * (v - *m);
        }
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, v)| (v - self.mean[i]) / self.std(i).max(MIN_STD))
            .collect()
    }

    pub fn observe_and_transform(&mut self, x: &[f64]) -> Vec<f64> {
        self.observe(x);
        self.transform(x)
    }
}

/// A stream passed through a [`Normalization`].
pub struct Normalized<S> {
    inner: S,
    mode: Normalization,
    scaler: OnlineStandardizer,
}

pub fn normalize<S: StreamSource>(stream: S, mode: Normalization) -> Normalized<S> {
    let d = stream.dim();
    Normalized {
        inner: stream,
        mode,
        scaler: OnlineStandardizer::new(d),
    }
}

impl<S> Normalized<S> {
    pub fn into_inner(self) -> S {
        self.inner
    }
}

impl<S: StreamSource> StreamSource for Normalized<S> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn classes(&self) -> usize {
        self.inner.classes()
    }

    fn next_instance(&mut self) -> Option<LabeledInstance> {
        let ex = self.inner.next_instance()?;
        match self.mode {
            Normalization::None => Some(ex),
            Normalization::OnlineStandardize => {
                let x = self.scaler.observe_and_transform(ex.features());
                Some(LabeledInstance::new(Instance::new(x).ok()?, ex.label))
            }
        }
    }

    fn true_theta(&self) -> Result<ConceptParams> {
        self.inner.true_theta()
    }

    fn describe(&self) -> String {
        format!("{} normalization={}", self.inner.describe(), self.mode.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{DriftKind, HyperplaneConfig, HyperplaneStream};
    use crate::stream::DriftSchedule;

    fn source(total: u64) -> HyperplaneStream {
        HyperplaneStream::new(HyperplaneConfig {
            d: 3,
            kind: DriftKind::None,
            schedule: DriftSchedule::stationary(total),
            seed: 13,
        })
        .unwrap()
    }

    #[test]
    fn none_is_passthrough() {
        let mut a = source(100);
        let mut b = normalize(source(100), Normalization::None);
        for _ in 0..100 {
            assert_eq!(a.next_instance(), b.next_instance());
        }
    }

    #[test]
    fn constant_attribute_maps_to_zero() {
        let mut s = OnlineStandardizer::new(2);
        for i in 0..10 {
            let out = s.observe_and_transform(&[3.5, i as f64]);
            assert_eq!(out[0], 0.0);
        }
    }

    #[test]
    fn running_mean_converges() {
        let mut s = OnlineStandardizer::new(3);
        let mut src = source(10_000);
        while let Some(ex) = src.next_instance() {
            s.observe(ex.features());
        }
        assert_eq!(s.count(), 10_000);
        assert!(s.mean().iter().all(|m| m.abs() < 0.05));
        assert!((0..3).all(|i| (s.std(i) - 1.0).abs() < 0.05));
    }

    #[test]
    fn prefix_equivalence() {
        let mut short = normalize(source(300), Normalization::OnlineStandardize);
        let mut long = normalize(source(1000), Normalization::OnlineStandardize);
        for _ in 0..300 {
            assert_eq!(short.next_instance(), long.next_instance());
        }
    }
}
