//! Recursive least squares.
//!
//! With inverse correlation matrix `P = R^-1`, gain `k = P x` and forgetting
//! factor `rho` (1 for plain RLS):
//!
//! ```text
//! P     <- (P - k k^T / (rho + x^T k)) / rho
//! theta <- theta + P x (y - x^T theta)
//! ```
//!
//! `P` starts at `delta * I`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{check_dim, check_finite, dot};
use crate::error::{Error, Result};
use crate::stream::{Instance, LabeledInstance, Learner};

pub const DEFAULT_DELTA: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct RlsRegressor {
    weights: Vec<f64>,
    /// Row-major `d x d`.
    rinv: Vec<f64>,
    delta: f64,
    forgetting: f64,
    updates: u64,
}

impl RlsRegressor {
    pub fn new(d: usize, delta: f64) -> Result<Self> {
        Self::with_forgetting(d, delta, 1.0)
    }

    pub fn with_forgetting(d: usize, delta: f64, forgetting: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension(0, 1));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::param("delta", "must be positive and finite"));
        }
        if !(forgetting > 0.0 && forgetting <= 1.0) {
            return Err(Error::param("forgetting", "must be in (0, 1]"));
        }
        let mut rinv = vec![0.0; d * d];
        for i in 0..d {
            rinv[i * d + i] = delta;
        }
        Ok(RlsRegressor {
            weights: vec![0.0; d],
            rinv,
            delta,
            forgetting,
            updates: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rinv(&self) -> &[f64] {
        &self.rinv
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn predict_value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(dot(&self.weights, x))
    }

    fn mat_vec(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|i| dot(&self.rinv[i * d..(i + 1) * d], x)).collect()
    }

    pub fn update(&mut self, x: &[f64], y: f64) -> Result<()> {
        check_dim(self.dim(), x.len())?;
        check_finite(x)?;
        if !y.is_finite() {
            return Err(Error::param("y", "target must be finite"));
        }
        let d = self.dim();
        let rho = self.forgetting;
        let k = self.mat_vec(x);
        let denom = rho + dot(x, &k);
        for i in 0..d {
            for j in 0..d {
                let v = &mut self.rinv[i * d + j];
                *v = (*v - k[i] * k[j] / denom) / rho;
            }
        }
        let residual = y - dot(x, &self.weights);
        let gain = self.mat_vec(x);
        for (w, g) in self.weights.iter_mut().zip(&gain) {
            *w += g * residual;
        }
        self.updates += 1;
        Ok(())
    }

    /// Largest `|P_ij - P_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in (i + 1)..d {
                worst = worst.max((self.rinv[i * d + j] - self.rinv[j * d + i]).abs());
            }
        }
        worst
    }
}

/// Binary classifier that regresses onto `+-1` targets and predicts by sign.
#[derive(Debug, Clone, PartialEq)]
pub struct RlsClassifier {
    inner: RlsRegressor,
}

impl RlsClassifier {
    pub fn new(d: usize, delta: f64, forgetting: f64) -> Result<Self> {
        Ok(RlsClassifier {
            inner: RlsRegressor::with_forgetting(d, delta, forgetting)?,
        })
    }

    pub fn regressor(&self) -> &RlsRegressor {
        &self.inner
    }
}

impl Learner for RlsClassifier {
    fn id(&self) -> String {
        if self.inner.forgetting < 1.0 {
            alloc::format!("rls-f{}", self.inner.forgetting)
        } else {
            String::from("rls")
        }
    }

    fn predict(&self, x: &Instance) -> Result<usize> {
        let v = self.inner.predict_value(x.as_slice())?;
        if self.inner.updates == 0 {
            return Ok(0);
        }
        Ok(usize::from(v >= 0.0))
    }

    fn update(&mut self, example: &LabeledInstance) -> Result<()> {
        if example.label > 1 {
            return Err(Error::InvalidLabel {
                label: example.label,
                classes: 2,
            });
        }
        let y = if example.label == 1 { 1.0 } else { -1.0 };
        self.inner.update(example.features(), y)
    }

    fn weights(&self) -> Option<Vec<f64>> {
        Some(self.inner.weights.clone())
    }

    fn model_size(&self) -> usize {
        self.inner.dim() * (self.inner.dim() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_step_by_hand() {
        let mut m = RlsRegressor::new(1, 1.0).unwrap();
        m.update(&[1.0], 1.0).unwrap();
        assert!((m.rinv()[0] - 0.5).abs() < 1e-15);
        assert!((m.weights()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_input_is_zero_gain() {
        let mut m = RlsRegressor::new(3, 10.0).unwrap();
        m.update(&[1.0, 2.0, -1.0], 0.7).unwrap();
        let before = m.clone();
        m.update(&[0.0, 0.0, 0.0], 5.0).unwrap();
        assert_eq!(m.weights(), before.weights());
        assert_eq!(m.rinv(), before.rinv());
    }

    #[test]
    fn rejects_bad_input() {
        let mut m = RlsRegressor::new(2, 1.0).unwrap();
        assert!(m.update(&[f64::NAN, 0.0], 1.0).is_err());
        assert!(m.update(&[1.0, 0.0], f64::INFINITY).is_err());
        assert!(m.update(&[1.0], 1.0).is_err());
        assert!(RlsRegressor::new(2, 0.0).is_err());
        assert!(RlsRegressor::with_forgetting(2, 1.0, 1.5).is_err());
        assert_eq!(m.updates(), 0);
    }

    #[test]
    fn stays_symmetric() {
        let mut m = RlsRegressor::new(4, 1e6).unwrap();
        let mut rng = crate::rng::seeded_rng(3);
        for _ in 0..500 {
            let x: Vec<f64> = (0..4).map(|_| crate::rng::standard_normal(&mut rng)).collect();
            m.update(&x, x[0] - x[3]).unwrap();
            assert!(m.asymmetry() < 1e-8);
        }
    }

    #[test]
    fn forgetting_one_matches_plain() {
        let mut a = RlsRegressor::new(2, 100.0).unwrap();
        let mut b = RlsRegressor::with_forgetting(2, 100.0, 1.0).unwrap();
        for i in 0..20 {
            let x = [i as f64 * 0.1, 1.0 - i as f64 * 0.05];
            a.update(&x, 2.0 * x[0]).unwrap();
            b.update(&x, 2.0 * x[0]).unwrap();
        }
        assert_eq!(a, b);
    }

    #[test]
    fn classifier_learns_sign() {
        let mut c = RlsClassifier::new(2, 1e6, 1.0).unwrap();
        let x = Instance::new(vec![1.0, 0.5]).unwrap();
        assert_eq!(c.predict(&x).unwrap(), 0);
        c.update(&LabeledInstance::new(x.clone(), 1)).unwrap();
        assert_eq!(c.predict(&x).unwrap(), 1);
        assert_eq!(c.id(), "rls");
        assert!(c.update(&LabeledInstance::new(x, 2)).is_err());
    }
}
