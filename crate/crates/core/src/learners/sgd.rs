//! Hinge-loss SGD with a constant learning rate.
//!
//! The per-instance objective for target `s = +-1` and margin
//! `m = s (w^T phi(x) + b)` is
//!
//! ```text
//! f(w, b) = max(0, 1 - m) + l2/2 * |w|^2
//! ```
//!
//! Each update takes the descent direction `g = -grad f` through a classical
//! momentum velocity: `v <- beta v + lambda g`, `w <- w + v`. The bias is not
//! regularized. The learning rate is never decayed; a constant step is what
//! lets the weights keep following a moving concept.
//!
//! Binary problems keep one weight vector. With more than two classes the
//! model is one-vs-rest and predicts the argmax score.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::basis::PolyBasis;
use super::{check_dim, check_finite, dot};
use crate::error::{Error, Result};
use crate::stream::{Instance, LabeledInstance, Learner};

#[derive(Debug, Clone, PartialEq)]
pub struct SgdConfig {
    pub learning_rate: f64,
    pub l2: f64,
    pub momentum: f64,
    /// Polynomial basis degree; `None` or `Some(1)` keeps the raw features.
    pub degree: Option<usize>,
}

impl Default for SgdConfig {
    fn default() -> Self {
        SgdConfig {
            learning_rate: 0.01,
            l2: 1e-4,
            momentum: 0.0,
            degree: None,
        }
    }
}

impl SgdConfig {
    pub fn validate(&self) -> Result<()> {
        // zero is allowed and freezes the model
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(Error::param("learning_rate", "must be non-negative and finite"));
        }
        if !(self.l2.is_finite() && self.l2 >= 0.0) {
            return Err(Error::param("l2", "must be non-negative and finite"));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::param("momentum", "must be in [0, 1)"));
        }
        if self.degree == Some(0) {
            return Err(Error::param("degree", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Hyperplane {
    weights: Vec<f64>,
    bias: f64,
    velocity: Vec<f64>,
    bias_velocity: f64,
}

impl Hyperplane {
    fn zeros(dim: usize) -> Self {
        Hyperplane {
            weights: vec![0.0; dim],
            bias: 0.0,
            velocity: vec![0.0; dim],
            bias_velocity: 0.0,
        }
    }

    fn score(&self, phi: &[f64]) -> f64 {
        dot(&self.weights, phi) + self.bias
    }

    fn step(&mut self, phi: &[f64], target: f64, cfg: &SgdConfig) {
        let violated = target * self.score(phi) < 1.0;
        let (lr, beta, l2) = (cfg.learning_rate, cfg.momentum, cfg.l2);
        for ((w, v), p) in self.weights.iter_mut().zip(&mut self.velocity).zip(phi) {
            let g = if violated { target * p } else { 0.0 } - l2 * *w;
            *v = beta * *v + lr * g;
            *w += *v;
        }
        let gb = if violated { target } else { 0.0 };
        self.bias_velocity = beta * self.bias_velocity + lr * gb;
        self.bias += self.bias_velocity;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgdClassifier {
    config: SgdConfig,
    d: usize,
    classes: usize,
    basis: Option<PolyBasis>,
    planes: Vec<Hyperplane>,
    updates: u64,
}

impl SgdClassifier {
    pub fn new(d: usize, classes: usize, config: SgdConfig) -> Result<Self> {
        config.validate()?;
        if d == 0 {
            return Err(Error::InvalidDimension(0, 1));
        }
        if classes < 2 {
            return Err(Error::param("classes", "need at least two classes"));
        }
        let basis = match config.degree {
            Some(deg) if deg > 1 => Some(PolyBasis::new(d, deg)?),
            _ => None,
        };
        let dim = basis.as_ref().map_or(d, PolyBasis::output_dim);
        let n_planes = if classes == 2 { 1 } else { classes };
        Ok(SgdClassifier {
            config,
            d,
            classes,
            basis,
            planes: vec![Hyperplane::zeros(dim); n_planes],
            updates: 0,
        })
    }

    /// A binary model with preset weights, treated as already trained.
    pub fn with_weights(weights: Vec<f64>, bias: f64, config: SgdConfig) -> Result<Self> {
        let mut model = SgdClassifier::new(weights.len(), 2, SgdConfig { degree: None, ..config })?;
        model.set_params(&weights, bias)?;
        model.updates = 1;
        Ok(model)
    }

    pub fn config(&self) -> &SgdConfig {
        &self.config
    }

    pub fn expanded_dim(&self) -> usize {
        self.planes[0].weights.len()
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    /// Weights and bias of the binary model.
    pub fn params(&self) -> (&[f64], f64) {
        (&self.planes[0].weights, self.planes[0].bias)
    }

    pub fn set_params(&mut self, weights: &[f64], bias: f64) -> Result<()> {
        check_dim(self.expanded_dim(), weights.len())?;
        check_finite(weights)?;
        self.planes[0].weights.copy_from_slice(weights);
        self.planes[0].bias = bias;
        Ok(())
    }

    /// Multiplies every weight and bias by `factor`.
    pub fn scale_params(&mut self, factor: f64) {
        for p in &mut self.planes {
            p.weights.iter_mut().for_each(|w| *w *= factor);
            p.bias *= factor;
        }
    }

    fn features(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.d, x.len())?;
        match &self.basis {
            Some(b) => b.expand(x),
            None => Ok(x.to_vec()),
        }
    }

    /// Raw scores, one per hyperplane.
    pub fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        let phi = self.features(x)?;
        Ok(self.planes.iter().map(|p| p.score(&phi)).collect())
    }

    /// Binary hinge objective at the current parameters.
    pub fn objective(&self, x: &[f64], label: usize) -> Result<f64> {
        let phi = self.features(x)?;
        let p = &self.planes[0];
        let s = target(label);
        let hinge = (1.0 - s * p.score(&phi)).max(0.0);
        Ok(hinge + 0.5 * self.config.l2 * dot(&p.weights, &p.weights))
    }

    /// Gradient of [`objective`](Self::objective) with respect to the
    /// weights and the bias. At margin exactly 1 the hinge is taken as flat.
    pub fn objective_gradient(&self, x: &[f64], label: usize) -> Result<(Vec<f64>, f64)> {
        let phi = self.features(x)?;
        let p = &self.planes[0];
        let s = target(label);
        let violated = s * p.score(&phi) < 1.0;
        let grad = p
            .weights
            .iter()
            .zip(&phi)
            .map(|(w, f)| self.config.l2 * w - if violated { s * f } else { 0.0 })
            .collect();
        Ok((grad, if violated { -s } else { 0.0 }))
    }
}

fn target(label: usize) -> f64 {
    if label == 1 {
        1.0
    } else {
        -1.0
    }
}

impl Learner for SgdClassifier {
    fn id(&self) -> String {
        let mut id = match &self.basis {
            Some(b) => format!("pbf-sgd-{}", b.degree()),
            None => String::from("sgd"),
        };
        if self.config.momentum > 0.0 {
            id.push_str(&format!("-m{}", self.config.momentum));
        }
        id
    }

    fn predict(&self, x: &Instance) -> Result<usize> {
        let scores = self.scores(x.as_slice())?;
        if self.updates == 0 {
            return Ok(0);
        }
        if scores.len() == 1 {
            return Ok(usize::from(scores[0] >= 0.0));
        }
        let mut best = 0;
        for (i, s) in scores.iter().enumerate() {
            if *s > scores[best] {
                best = i;
            }
        }
        Ok(best)
    }

    fn update(&mut self, example: &LabeledInstance) -> Result<()> {
        if example.label >= self.classes {
            return Err(Error::InvalidLabel {
                label: example.label,
                classes: self.classes,
            });
        }
        let phi = self.features(example.features())?;
        check_finite(&phi)?;
        let cfg = self.config.clone();
        if self.planes.len() == 1 {
            self.planes[0].step(&phi, target(example.label), &cfg);
        } else {
            for (c, plane) in self.planes.iter_mut().enumerate() {
                let s = if c == example.label { 1.0 } else { -1.0 };
                plane.step(&phi, s, &cfg);
            }
        }
        self.updates += 1;
        Ok(())
    }

    fn weights(&self) -> Option<Vec<f64>> {
        if self.basis.is_none() && self.planes.len() == 1 {
            Some(self.planes[0].weights.clone())
        } else {
            None
        }
    }

    fn model_size(&self) -> usize {
        self.planes.len() * (self.expanded_dim() + 1)
    }
}
