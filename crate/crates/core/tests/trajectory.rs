use streamdrift_core::eval::{prequential_run, EvalConfig, NullClock, TrajectoryPoint};
use streamdrift_core::generators::{DriftKind, HyperplaneConfig, HyperplaneStream};
use streamdrift_core::learners::{SgdClassifier, SgdConfig};
use streamdrift_core::DriftSchedule;

fn capture(kind: DriftKind, cfg: SgdConfig, seed: u64) -> (Vec<TrajectoryPoint>, f64) {
    let schedule = DriftSchedule::new(0, 0, 10_000, 10_000).unwrap();
    let mut stream = HyperplaneStream::new(HyperplaneConfig { d: 2, kind, schedule, seed }).unwrap();
    let radius = stream.theta_a().norm();
    let mut eval = EvalConfig::new(200, schedule).unwrap();
    eval.record_trajectory = true;
    let mut m = SgdClassifier::new(2, 2, cfg).unwrap();
    let out = prequential_run(&mut m, &mut stream, &eval, &mut NullClock).unwrap();
    (out.trajectory, radius)
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

#[test]
fn rotating_concept_stays_on_its_circle() {
    let (points, radius) = capture(DriftKind::ConstantIncremental(0.01), SgdConfig::default(), 3);
    assert_eq!(points.len(), 10_000);
    for p in &points {
        let r = p.theta.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((r - radius).abs() < 1e-6, "t={} r={r} radius={radius}", p.t);
    }
}

#[test]
fn frozen_learner_has_a_constant_estimate() {
    let cfg = SgdConfig {
        learning_rate: 0.0,
        ..SgdConfig::default()
    };
    let (points, _) = capture(DriftKind::ConstantIncremental(0.01), cfg, 4);
    assert!(points.iter().all(|p| p.estimate == points[0].estimate));
}

#[test]
fn converged_estimate_settles_on_a_stationary_stream() {
    let (points, _) = capture(DriftKind::None, SgdConfig::default(), 5);
    let tail: Vec<Vec<f64>> = points[points.len() - 1000..].iter().map(|p| unit(&p.estimate)).collect();
    let variance: f64 = (0..2)
        .map(|i| {
            let mean = tail.iter().map(|u| u[i]).sum::<f64>() / tail.len() as f64;
            tail.iter().map(|u| (u[i] - mean).powi(2)).sum::<f64>() / tail.len() as f64
        })
        .sum();
    assert!(variance < 1e-3, "tail variance {variance}");
}
