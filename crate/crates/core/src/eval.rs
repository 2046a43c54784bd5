//! Prequential (test-then-train) evaluation.
//!
//! Every instance is first predicted, then scored, then used for one update.
//! Scoring starts at `tau0`; earlier instances only train. Timing is
//! delegated to a [`Clock`] so the loop stays usable without `std`.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::stream::{DriftSchedule, Learner, StreamSource};

/// Monotonic nanosecond clock.
pub trait Clock {
    fn now_ns(&mut self) -> u64;
}

/// A clock that never advances; every duration reads as zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct NullClock;

impl Clock for NullClock {
    fn now_ns(&mut self) -> u64 {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TrackingMode {
    /// Unit-normalized, sign-aligned squared distance.
    #[default]
    Normalized,
    /// Plain squared Euclidean distance.
    Raw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub window: usize,
    pub schedule: DriftSchedule,
    pub record_trajectory: bool,
    pub timing: bool,
    pub tracking: TrackingMode,
}

impl EvalConfig {
    pub fn new(window: usize, schedule: DriftSchedule) -> Result<Self> {
        if window == 0 {
            return Err(Error::param("window", "must be at least 1"));
        }
        Ok(EvalConfig {
            window,
            schedule,
            record_trajectory: false,
            timing: true,
            tracking: TrackingMode::Normalized,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub t: u64,
    pub correct: bool,
    pub window_accuracy: f64,
    pub tracking_error: Option<f64>,
    pub predict_ns: u64,
    pub update_ns: u64,
    pub model_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub learner: String,
    pub stream: String,
    /// Instances consumed, including pre-training.
    pub instances: u64,
    /// Instances scored (`t >= tau0`).
    pub evaluated: u64,
    pub correct: u64,
    pub overall_accuracy: f64,
    pub predict_ns: u64,
    pub update_ns: u64,
    /// Predict plus update time over the whole stream.
    pub total_ns: u64,
    /// Wall time of the loop, stream generation included.
    pub wall_ns: u64,
    pub final_model_size: usize,
}

/// True and estimated concept at one timestep.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub t: u64,
    pub theta: Vec<f64>,
    pub estimate: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub records: Vec<EvalRecord>,
    pub summary: RunSummary,
    pub trajectory: Vec<TrajectoryPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingError {
    pub value: f64,
    /// The estimate had zero norm and the value is the upper bound 4.
    pub degenerate: bool,
}

/// Distance between the true concept and an estimate.
pub fn tracking_error(theta: &[f64], estimate: &[f64], mode: TrackingMode) -> Result<TrackingError> {
    if theta.len() != estimate.len() {
        return Err(Error::DimensionMismatch {
            expected: theta.len(),
            found: estimate.len(),
        });
    }
    if mode == TrackingMode::Raw {
        let value = theta.iter().zip(estimate).map(|(a, b)| (a - b) * (a - b)).sum();
        return Ok(TrackingError {
            value,
            degenerate: false,
        });
    }
    let norm = |v: &[f64]| libm::sqrt(v.iter().map(|x| x * x).sum());
    let (nt, ne) = (norm(theta), norm(estimate));
    if nt == 0.0 || ne == 0.0 {
        return Ok(TrackingError {
            value: 4.0,
            degenerate: true,
        });
    }
    let cos: f64 = theta.iter().zip(estimate).map(|(a, b)| a * b).sum::<f64>() / (nt * ne);
    let sign = if cos < 0.0 { -1.0 } else { 1.0 };
    let value = theta
        .iter()
        .zip(estimate)
        .map(|(a, b)| {
            let d = a / nt - sign * b / ne;
            d * d
        })
        .sum();
    Ok(TrackingError {
        value,
        degenerate: false,
    })
}

/// Trailing mean of `correct`; the first `window - 1` points average over
/// what is available.
pub fn sliding_accuracy(correct: &[bool], window: usize) -> Result<Vec<f64>> {
    if window == 0 {
        return Err(Error::param("window", "must be at least 1"));
    }
    let mut out = Vec::with_capacity(correct.len());
    let mut hits = 0usize;
    for (i, &c) in correct.iter().enumerate() {
        hits += usize::from(c);
        if i >= window && correct[i - window] {
            hits -= 1;
        }
        out.push(hits as f64 / (i + 1).min(window) as f64);
    }
    Ok(out)
}

struct Window {
    size: usize,
    buf: VecDeque<bool>,
    hits: usize,
}

impl Window {
    fn push(&mut self, c: bool) -> f64 {
        self.buf.push_back(c);
        self.hits += usize::from(c);
        if self.buf.len() > self.size && self.buf.pop_front() == Some(true) {
            self.hits -= 1;
        }
        self.hits as f64 / self.buf.len() as f64
    }
}

/// Runs the test-then-train loop until the stream ends or `schedule.total`
/// instances have been consumed.
pub fn prequential_run<L, S, C>(learner: &mut L, stream: &mut S, config: &EvalConfig, clock: &mut C) -> Result<RunOutput>
where
    L: Learner + ?Sized,
    S: StreamSource + ?Sized,
    C: Clock + ?Sized,
{
    if config.window == 0 {
        return Err(Error::param("window", "must be at least 1"));
    }
    if config.record_trajectory && (learner.weights().is_none() || stream.true_theta().is_err()) {
        return Err(Error::Unsupported(
            "trajectory capture needs a parametric learner on a hyperplane stream",
        ));
    }
    let tau0 = config.schedule.tau0;
    let mut window = Window {
        size: config.window,
        buf: VecDeque::with_capacity(config.window + 1),
        hits: 0,
    };
    let mut records = Vec::new();
    let mut trajectory = Vec::new();
    let (mut predict_total, mut update_total) = (0u64, 0u64);
    let (mut evaluated, mut correct_total) = (0u64, 0u64);
    let mut t = 0u64;
    let wall_start = clock.now_ns();

    while t < config.schedule.total {
        let Some(example) = stream.next_instance() else {
            break;
        };
        let (p0, prediction, p1) = if config.timing {
            let p0 = clock.now_ns();
            let prediction = learner.predict(&example.instance)?;
            (p0, prediction, clock.now_ns())
        } else {
            (0, learner.predict(&example.instance)?, 0)
        };
        let correct = prediction == example.label;

        let estimate = learner.weights();
        let theta = stream.true_theta().ok();
        let tracking = match (&theta, &estimate) {
            (Some(th), Some(est)) if th.dim() == est.len() => {
                Some(tracking_error(&th.theta, est, config.tracking)?.value)
            }
            _ => None,
        };
        if config.record_trajectory {
            if let (Some(th), Some(est)) = (theta, estimate) {
                trajectory.push(TrajectoryPoint {
                    t,
                    theta: th.theta,
                    estimate: est,
                });
            }
        }

        let (u0, u1) = if config.timing {
            let u0 = clock.now_ns();
            learner.update(&example)?;
            (u0, clock.now_ns())
        } else {
            learner.update(&example)?;
            (0, 0)
        };
        let (predict_ns, update_ns) = (p1.saturating_sub(p0), u1.saturating_sub(u0));
        predict_total += predict_ns;
        update_total += update_ns;

        if t >= tau0 {
            evaluated += 1;
            correct_total += u64::from(correct);
            let window_accuracy = window.push(correct);
            records.push(EvalRecord {
                t,
                correct,
                window_accuracy,
                tracking_error: tracking,
                predict_ns,
                update_ns,
                model_size: learner.model_size(),
            });
        }
        t += 1;
    }
    let wall_ns = clock.now_ns().saturating_sub(wall_start);

    if t <= tau0 {
        return Err(Error::StreamTooShort { ended: t, tau0 });
    }
    let summary = RunSummary {
        learner: learner.id(),
        stream: stream.describe(),
        instances: t,
        evaluated,
        correct: correct_total,
        overall_accuracy: correct_total as f64 / evaluated as f64,
        predict_ns: predict_total,
        update_ns: update_total,
        total_ns: predict_total + update_total,
        wall_ns,
        final_model_size: learner.model_size(),
    };
    Ok(RunOutput {
        records,
        summary,
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{label, DriftKind, HyperplaneConfig, HyperplaneStream};
    use crate::learners::{SgdClassifier, SgdConfig};
    use crate::stream::{Instance, LabeledInstance};
    use alloc::string::String;
    use alloc::vec;

    struct Constant(usize);

    impl Learner for Constant {
        fn id(&self) -> String {
            String::from("constant")
        }
        fn predict(&self, _: &Instance) -> Result<usize> {
            Ok(self.0)
        }
        fn update(&mut self, _: &LabeledInstance) -> Result<()> {
            Ok(())
        }
        fn model_size(&self) -> usize {
            0
        }
    }

    /// Knows the stream's concept in advance.
    struct Oracle(crate::generators::ConceptParams);

    impl Learner for Oracle {
        fn id(&self) -> String {
            String::from("oracle")
        }
        fn predict(&self, x: &Instance) -> Result<usize> {
            label(&self.0, x.as_slice())
        }
        fn update(&mut self, _: &LabeledInstance) -> Result<()> {
            Ok(())
        }
        fn model_size(&self) -> usize {
            0
        }
    }

    /// Recalls labels of exact repeats, otherwise guesses 0.
    struct Memorizer(Vec<(Vec<f64>, usize)>);

    impl Learner for Memorizer {
        fn id(&self) -> String {
            String::from("memorizer")
        }
        fn predict(&self, x: &Instance) -> Result<usize> {
            Ok(self
                .0
                .iter()
                .find(|(f, _)| f.as_slice() == x.as_slice())
                .map_or(0, |(_, y)| *y))
        }
        fn update(&mut self, e: &LabeledInstance) -> Result<()> {
            self.0.push((e.features().to_vec(), e.label));
            Ok(())
        }
        fn model_size(&self) -> usize {
            self.0.len()
        }
    }

    struct Ticks(u64);

    impl Clock for Ticks {
        fn now_ns(&mut self) -> u64 {
            self.0 += 1;
            self.0
        }
    }

    fn hyperplane(total: u64, seed: u64) -> HyperplaneStream {
        HyperplaneStream::new(HyperplaneConfig {
            d: 2,
            kind: DriftKind::None,
            schedule: DriftSchedule::stationary(total),
            seed,
        })
        .unwrap()
    }

    #[test]
    fn constant_learner_scores_half() {
        let mut s = hyperplane(10_000, 4);
        let cfg = EvalConfig::new(200, DriftSchedule::new(0, 10_000, 10_000, 10_000).unwrap()).unwrap();
        let out = prequential_run(&mut Constant(1), &mut s, &cfg, &mut NullClock).unwrap();
        assert!((out.summary.overall_accuracy - 0.5).abs() < 0.02);
    }

    #[test]
    fn oracle_is_perfect_and_counts_from_tau0() {
        let mut s = hyperplane(10_000, 9);
        let mut oracle = Oracle(s.theta_a().clone());
        let cfg = EvalConfig::new(200, DriftSchedule::stationary(10_000)).unwrap();
        let out = prequential_run(&mut oracle, &mut s, &cfg, &mut NullClock).unwrap();
        assert_eq!(out.summary.overall_accuracy, 1.0);
        assert_eq!(out.summary.evaluated, 9_000);
        assert_eq!(out.summary.instances, 10_000);
        assert_eq!(out.records.len(), 9_000);
        assert_eq!(out.records[0].t, 1000);
    }

    #[test]
    fn overall_accuracy_is_window_free() {
        let mut s = hyperplane(3000, 2);
        let mut m = SgdClassifier::new(2, 2, SgdConfig::default()).unwrap();
        let cfg = EvalConfig::new(7, DriftSchedule::stationary(3000)).unwrap();
        let out = prequential_run(&mut m, &mut s, &cfg, &mut NullClock).unwrap();
        let hits = out.records.iter().filter(|r| r.correct).count();
        assert_eq!(out.summary.overall_accuracy, hits as f64 / out.records.len() as f64);
        let series: Vec<bool> = out.records.iter().map(|r| r.correct).collect();
        let sliding = sliding_accuracy(&series, 7).unwrap();
        for (r, w) in out.records.iter().zip(&sliding) {
            assert!((r.window_accuracy - w).abs() < 1e-12);
        }
    }

    #[test]
    fn test_then_train_order() {
        // every instance is unique, so a memorizer can only get lucky
        let mut s = hyperplane(2000, 5);
        let cfg = EvalConfig::new(100, DriftSchedule::new(0, 2000, 2000, 2000).unwrap()).unwrap();
        let out = prequential_run(&mut Memorizer(Vec::new()), &mut s, &cfg, &mut NullClock).unwrap();
        assert!(out.summary.overall_accuracy < 0.6);
    }

    #[test]
    fn short_stream_is_an_error() {
        let mut s = hyperplane(50, 1);
        let cfg = EvalConfig::new(10, DriftSchedule::new(100, 100, 100, 1000).unwrap()).unwrap();
        let err = prequential_run(&mut Constant(0), &mut s, &cfg, &mut NullClock).unwrap_err();
        assert_eq!(err, Error::StreamTooShort { ended: 50, tau0: 100 });
    }

    #[test]
    fn timing_uses_the_clock() {
        let mut s = hyperplane(20, 1);
        let cfg = EvalConfig::new(5, DriftSchedule::new(0, 20, 20, 20).unwrap()).unwrap();
        let out = prequential_run(&mut Constant(0), &mut s, &cfg, &mut Ticks(0)).unwrap();
        assert!(out.records.iter().all(|r| r.predict_ns == 1 && r.update_ns == 1));
        assert_eq!(out.summary.total_ns, 40);
        let mut off = cfg.clone();
        off.timing = false;
        let mut s = hyperplane(20, 1);
        let out = prequential_run(&mut Constant(0), &mut s, &off, &mut Ticks(0)).unwrap();
        assert_eq!(out.summary.total_ns, 0);
    }

    #[test]
    fn sliding_examples() {
        assert_eq!(sliding_accuracy(&[true; 5], 3).unwrap(), [1.0; 5]);
        let alt: Vec<bool> = (0..10).map(|i| i % 2 == 0).collect();
        let s = sliding_accuracy(&alt, 2).unwrap();
        assert!(s[1..].iter().all(|v| *v == 0.5));
        let mut seq = vec![false; 100];
        seq.extend([true; 100]);
        assert_eq!(*sliding_accuracy(&seq, 200).unwrap().last().unwrap(), 0.5);
        assert!(sliding_accuracy(&seq, 0).is_err());
    }

    #[test]
    fn tracking_error_examples() {
        let th = [0.6, -0.8];
        let te = |e: &[f64]| tracking_error(&th, e, TrackingMode::Normalized).unwrap();
        assert!(te(&th).value < 1e-15);
        assert!(te(&[1.2, -1.6]).value < 1e-15);
        assert!((te(&[0.8, 0.6]).value - 2.0).abs() < 1e-12);
        let zero = te(&[0.0, 0.0]);
        assert_eq!(zero.value, 4.0);
        assert!(zero.degenerate);
        let raw = tracking_error(&th, &[0.0, 0.0], TrackingMode::Raw).unwrap();
        assert!((raw.value - 1.0).abs() < 1e-12);
        assert!(tracking_error(&th, &[1.0], TrackingMode::Raw).is_err());
    }

    #[test]
    fn trajectory_needs_parametric_learner() {
        let mut s = hyperplane(100, 1);
        let mut cfg = EvalConfig::new(10, DriftSchedule::stationary(100)).unwrap();
        cfg.record_trajectory = true;
        let err = prequential_run(&mut Constant(0), &mut s, &cfg, &mut NullClock).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
        let mut m = SgdClassifier::new(2, 2, SgdConfig::default()).unwrap();
        let out = prequential_run(&mut m, &mut s, &cfg, &mut NullClock).unwrap();
        assert_eq!(out.trajectory.len(), 100);
    }
}
