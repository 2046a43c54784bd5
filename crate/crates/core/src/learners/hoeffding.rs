//! Hoeffding tree with Gaussian numeric observers and naive Bayes leaves.
//!
//! Every leaf keeps class counts and, per attribute and class, a running
//! Gaussian summary. After each grace period of `n_min` instances a leaf
//! scores candidate splits by information gain. Candidates are equal-width
//! thresholds between the observed minimum and maximum. The class mass on
//! either side of a threshold comes from the per-class Gaussian CDF. The leaf
//! splits when
//!
//! ```text
//! G_best - G_second > eps   or   eps < tie_threshold
//! eps = sqrt(R^2 ln(1/delta) / (2 n)),   R = log2(K)
//! ```
//!
//! where `n` counts the instances the leaf has observed. The "no split"
//! option always competes with gain 0.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::check_dim;
use crate::error::{Error, Result};
use crate::stream::{Instance, LabeledInstance, Learner};

#[derive(Debug, Clone, PartialEq)]
pub struct HoeffdingTreeConfig {
    /// `delta` in the Hoeffding bound.
    pub split_confidence: f64,
    pub tie_threshold: f64,
    /// `n_min`: instances a leaf observes between split attempts.
    pub grace_period: u64,
    /// Leaves that have observed fewer instances predict the majority class.
    pub nb_threshold: u64,
    pub candidate_thresholds: usize,
}

impl Default for HoeffdingTreeConfig {
    fn default() -> Self {
        HoeffdingTreeConfig {
            split_confidence: 1e-7,
            tie_threshold: 0.05,
            grace_period: 200,
            nb_threshold: 10,
            candidate_thresholds: 10,
        }
    }
}

impl HoeffdingTreeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.split_confidence > 0.0 && self.split_confidence < 1.0) {
            return Err(Error::param("split_confidence", "must be in (0, 1)"));
        }
        if !(self.tie_threshold.is_finite() && self.tie_threshold >= 0.0) {
            return Err(Error::param("tie_threshold", "must be non-negative"));
        }
        if self.grace_period == 0 {
            return Err(Error::param("grace_period", "must be at least 1"));
        }
        if self.candidate_thresholds == 0 {
            return Err(Error::param("candidate_thresholds", "must be at least 1"));
        }
        Ok(())
    }
}

/// The Hoeffding bound `eps` for range `range` after `n` observations.
pub fn hoeffding_bound(range: f64, confidence: f64, n: f64) -> f64 {
    libm::sqrt(range * range * libm::log(1.0 / confidence) / (2.0 * n))
}

/// Shannon entropy in bits of an unnormalized distribution.
pub fn entropy(counts: &[f64]) -> f64 {
    let total: f64 = counts.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    counts
        .iter()
        .filter(|c| **c > 0.0)
        .map(|c| {
            let p = c / total;
            -p * libm::log2(p)
        })
        .sum()
}

const MIN_STD: f64 = 1e-6;

#[derive(Debug, Clone, Default, PartialEq)]
struct Gaussian {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Gaussian {
    fn add(&mut self, x: f64) {
        self.n += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.n;
        self.m2 += delta * (x - self.mean);
    }

    fn std(&self) -> f64 {
        if self.n > 1.0 {
            libm::sqrt(self.m2 / (self.n - 1.0))
        } else {
            0.0
        }
    }

    /// Mass at or below `x`.
    fn mass_below(&self, x: f64) -> f64 {
        let std = self.std();
        if std <= 0.0 {
            return if self.mean <= x { self.n } else { 0.0 };
        }
        let z = (x - self.mean) / (std * core::f64::consts::SQRT_2);
        self.n * 0.5 * (1.0 + libm::erf(z))
    }

    fn log_pdf(&self, x: f64) -> f64 {
        let std = self.std().max(MIN_STD);
        let z = (x - self.mean) / std;
        -0.5 * z * z - libm::log(std) - 0.5 * libm::log(2.0 * core::f64::consts::PI)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct AttributeStats {
    per_class: Vec<Gaussian>,
    min: f64,
    max: f64,
}

impl AttributeStats {
    fn new(classes: usize) -> Self {
        AttributeStats {
            per_class: vec![Gaussian::default(); classes],
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Leaf {
    /// Prior for prediction, seeded from the parent's split distribution.
    prior: Vec<f64>,
    /// Class counts of instances this leaf has observed.
    observed: Vec<f64>,
    attributes: Vec<AttributeStats>,
    seen: u64,
    seen_at_last_check: u64,
}

impl Leaf {
    fn new(prior: Vec<f64>, d: usize) -> Self {
        let classes = prior.len();
        Leaf {
            prior,
            observed: vec![0.0; classes],
            attributes: vec![AttributeStats::new(classes); d],
            seen: 0,
            seen_at_last_check: 0,
        }
    }

    fn learn(&mut self, x: &[f64], label: usize) {
        self.prior[label] += 1.0;
        self.observed[label] += 1.0;
        for (stats, &v) in self.attributes.iter_mut().zip(x) {
            stats.per_class[label].add(v);
            stats.min = stats.min.min(v);
            stats.max = stats.max.max(v);
        }
        self.seen += 1;
    }

    fn majority(&self) -> usize {
        argmax(&self.prior)
    }

    fn naive_bayes(&self, x: &[f64]) -> usize {
        let total: f64 = self.prior.iter().sum();
        if total <= 0.0 {
            return 0;
        }
        let live: Vec<usize> = (0..self.prior.len()).filter(|&c| self.prior[c] > 0.0).collect();
        let mut scores: Vec<f64> = vec![f64::NEG_INFINITY; self.prior.len()];
        for &c in &live {
            scores[c] = libm::log(self.prior[c] / total);
        }
        for (stats, &v) in self.attributes.iter().zip(x) {
            // an attribute only votes once every live class has a spread estimate
            if live.iter().any(|&c| stats.per_class[c].n < 2.0) {
                continue;
            }
            for &c in &live {
                scores[c] += stats.per_class[c].log_pdf(v);
            }
        }
        argmax(&scores)
    }

    /// Best threshold and its gain for one attribute, if any.
    fn best_split_on(&self, attribute: usize, candidates: usize) -> Option<(f64, f64, Vec<f64>, Vec<f64>)> {
        let stats = &self.attributes[attribute];
        if !(stats.min < stats.max) {
            return None;
        }
        let parent = entropy(&self.observed);
        let total: f64 = self.observed.iter().sum();
        let mut best: Option<(f64, f64, Vec<f64>, Vec<f64>)> = None;
        for i in 1..=candidates {
            let threshold = stats.min + (stats.max - stats.min) * i as f64 / (candidates + 1) as f64;
            let left: Vec<f64> = stats.per_class.iter().map(|g| g.mass_below(threshold)).collect();
            let right: Vec<f64> = stats
                .per_class
                .iter()
                .zip(&left)
                .map(|(g, l)| (g.n - l).max(0.0))
                .collect();
            let (nl, nr): (f64, f64) = (left.iter().sum(), right.iter().sum());
            let gain = parent - (nl / total) * entropy(&left) - (nr / total) * entropy(&right);
            if best.as_ref().is_none_or(|b| gain > b.0) {
                best = Some((gain, threshold, left, right));
            }
        }
        best
    }
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(Leaf),
    Split {
        attribute: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Outcome of a split attempt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitDecision {
    pub best_gain: f64,
    pub second_gain: f64,
    pub bound: f64,
    pub split: bool,
}

/// Applies the split rule to a pair of gains.
pub fn should_split(best_gain: f64, second_gain: f64, bound: f64, tie_threshold: f64) -> bool {
    best_gain > 0.0 && (best_gain - second_gain > bound || bound < tie_threshold)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoeffdingTree {
    config: HoeffdingTreeConfig,
    classes: usize,
    d: Option<usize>,
    nodes: Vec<Node>,
    leaves: usize,
    seen: u64,
    split_times: Vec<u64>,
}

impl HoeffdingTree {
    pub fn new(classes: usize, config: HoeffdingTreeConfig) -> Result<Self> {
        config.validate()?;
        if classes < 2 {
            return Err(Error::param("classes", "need at least two classes"));
        }
        Ok(HoeffdingTree {
            config,
            classes,
            d: None,
            nodes: vec![Node::Leaf(Leaf::new(vec![0.0; classes], 0))],
            leaves: 1,
            seen: 0,
            split_times: Vec::new(),
        })
    }

    pub fn config(&self) -> &HoeffdingTreeConfig {
        &self.config
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves
    }

    pub fn instances_seen(&self) -> u64 {
        self.seen
    }

    /// Instance counts at which splits happened.
    pub fn split_times(&self) -> &[u64] {
        &self.split_times
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], id: usize) -> usize {
            match nodes[id] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    fn leaf_index(&self, x: &[f64]) -> usize {
        let mut id = 0;
        loop {
            match self.nodes[id] {
                Node::Leaf(_) => return id,
                Node::Split {
                    attribute,
                    threshold,
                    left,
                    right,
                } => id = if x[attribute] <= threshold { left } else { right },
            }
        }
    }

    fn range(&self) -> f64 {
        libm::log2(self.classes as f64)
    }

    /// Scores the leaf's candidate splits and splits it if the bound allows.
    fn try_split(&mut self, id: usize) -> SplitDecision {
        let Node::Leaf(leaf) = &self.nodes[id] else {
            unreachable!("split attempts only target leaves");
        };
        let n = leaf.seen as f64;
        let bound = hoeffding_bound(self.range(), self.config.split_confidence, n);
        let no_split = SplitDecision {
            best_gain: 0.0,
            second_gain: 0.0,
            bound,
            split: false,
        };
        if leaf.observed.iter().filter(|c| **c > 0.0).count() < 2 {
            return no_split;
        }
        let mut best: Option<(usize, f64, f64, Vec<f64>, Vec<f64>)> = None;
        let mut second = 0.0;
        for a in 0..leaf.attributes.len() {
            let Some((gain, threshold, left, right)) = leaf.best_split_on(a, self.config.candidate_thresholds) else {
                continue;
            };
            match &best {
                Some(b) if gain <= b.1 => second = f64::max(second, gain),
                _ => {
                    if let Some(b) = &best {
                        second = f64::max(second, b.1);
                    }
                    best = Some((a, gain, threshold, left, right));
                }
            }
        }
        let Some((attribute, best_gain, threshold, left, right)) = best else {
            return no_split;
        };
        let split = should_split(best_gain, second, bound, self.config.tie_threshold);
        if split {
            let d = leaf.attributes.len();
            let l = self.nodes.len();
            self.nodes.push(Node::Leaf(Leaf::new(left, d)));
            self.nodes.push(Node::Leaf(Leaf::new(right, d)));
            self.nodes[id] = Node::Split {
                attribute,
                threshold,
                left: l,
                right: l + 1,
            };
            self.leaves += 1;
            self.split_times.push(self.seen);
        }
        SplitDecision {
            best_gain,
            second_gain: second,
            bound,
            split,
        }
    }

    fn learn(&mut self, x: &[f64], label: usize) -> Result<()> {
        if label >= self.classes {
            return Err(Error::InvalidLabel {
                label,
                classes: self.classes,
            });
        }
        match self.d {
            Some(d) => check_dim(d, x.len())?,
            None => {
                self.d = Some(x.len());
                self.nodes[0] = Node::Leaf(Leaf::new(vec![0.0; self.classes], x.len()));
            }
        }
        self.seen += 1;
        let id = self.leaf_index(x);
        let grace = self.config.grace_period;
        let due = {
            let Node::Leaf(leaf) = &mut self.nodes[id] else {
                unreachable!();
            };
            leaf.learn(x, label);
            if leaf.seen - leaf.seen_at_last_check >= grace {
                leaf.seen_at_last_check = leaf.seen;
                true
            } else {
                false
            }
        };
        if due {
            self.try_split(id);
        }
        Ok(())
    }
}

impl Learner for HoeffdingTree {
    fn id(&self) -> String {
        String::from("ht")
    }

    fn predict(&self, x: &Instance) -> Result<usize> {
        let Some(d) = self.d else {
            return Ok(0);
        };
        check_dim(d, x.dim())?;
        let id = self.leaf_index(x.as_slice());
        let Node::Leaf(leaf) = &self.nodes[id] else {
            unreachable!();
        };
        if leaf.seen < self.config.nb_threshold {
            Ok(leaf.majority())
        } else {
            Ok(leaf.naive_bayes(x.as_slice()))
        }
    }

    fn update(&mut self, example: &LabeledInstance) -> Result<()> {
        self.learn(example.features(), example.label)
    }

    fn model_size(&self) -> usize {
        self.leaves
    }
}
