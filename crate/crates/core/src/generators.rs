//! Synthetic concept-drifting streams.
//!
//! [`HyperplaneStream`] labels standard-normal inputs by the side of a
//! hyperplane `theta^T x = 0`, and moves `theta` according to a
//! [`DriftKind`]:
//!
//! * sudden: `theta_a` before `tau1`, an independently drawn `theta_b` after;
//! * incremental: one plane rotation per step while drift is active;
//! * gradual: on `[tau1, tau2)` each instance comes from `theta_b` with
//!   probability `(t - tau1) / (tau2 - tau1)`, otherwise from `theta_a`.
//!
//! Rotations act on the first two coordinates and leave the rest alone.
//!
//! [`RandomTreeStream`] routes uniform inputs through a fixed random tree.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{seeded_rng, seeded_substream, standard_normal, uniform, StreamRng};
use crate::stream::{DriftSchedule, Instance, LabeledInstance, StreamSource};

/// Hyperplane normal defining a concept.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptParams {
    pub theta: Vec<f64>,
}

impl ConceptParams {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::InvalidDimension(0, 1));
        }
        if let Some(i) = theta.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(ConceptParams { theta })
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.theta.iter().map(|v| v * v).sum())
    }

    /// `A^T theta` for a rotation by `angle` radians in the first two
    /// coordinates. Positive angles turn clockwise.
    pub fn rotate(&mut self, angle: f64) -> Result<()> {
        if self.theta.len() < 2 {
            return Err(Error::InvalidDimension(self.theta.len(), 2));
        }
        let (s, c) = libm::sincos(angle);
        let (a, b) = (self.theta[0], self.theta[1]);
        self.theta[0] = c * a + s * b;
        self.theta[1] = -s * a + c * b;
        Ok(())
    }
}

/// Draws a concept with i.i.d. standard-normal entries.
pub fn sample_concept<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ConceptParams> {
    if d == 0 {
        return Err(Error::InvalidDimension(0, 1));
    }
    Ok(ConceptParams {
        theta: (0..d).map(|_| standard_normal(rng)).collect(),
    })
}

/// Class 1 on or above the hyperplane, class 0 below it.
pub fn label(theta: &ConceptParams, x: &[f64]) -> Result<usize> {
    if theta.dim() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: theta.dim(),
            found: x.len(),
        });
    }
    let score: f64 = theta.theta.iter().zip(x).map(|(a, b)| a * b).sum();
    Ok(usize::from(score >= 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriftKind {
    None,
    Sudden,
    /// Rotation angle in radians per step while drift is active.
    Incremental(f64),
    Gradual,
    /// Rotation on every step of the stream, ignoring `tau1`/`tau2`.
    ConstantIncremental(f64),
}

impl DriftKind {
    pub fn name(&self) -> &'static str {
        match self {
            DriftKind::None => "none",
            DriftKind::Sudden => "sudden",
            DriftKind::Incremental(_) => "incremental",
            DriftKind::Gradual => "gradual",
            DriftKind::ConstantIncremental(_) => "constant-incremental",
        }
    }

    fn angle(&self) -> Option<f64> {
        match *self {
            DriftKind::Incremental(a) | DriftKind::ConstantIncremental(a) => Some(a),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperplaneConfig {
    pub d: usize,
    pub kind: DriftKind,
    pub schedule: DriftSchedule,
    pub seed: u64,
}

/// Which concept produced the last instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Active {
    A,
    B,
    Rotated,
}

#[derive(Debug, Clone)]
pub struct HyperplaneStream {
    config: HyperplaneConfig,
    theta_a: ConceptParams,
    theta_b: ConceptParams,
    rotated: ConceptParams,
    active: Active,
    t: u64,
    rng: StreamRng,
    mix_rng: StreamRng,
}

impl HyperplaneStream {
    /// Both concepts are drawn up front from the seed, so every drift kind
    /// sees the same `theta_a` and the same input sequence.
    pub fn new(config: HyperplaneConfig) -> Result<Self> {
        if let Some(angle) = config.kind.angle() {
            if !angle.is_finite() {
                return Err(Error::param("angle", "must be finite"));
            }
            if config.d < 2 {
                return Err(Error::InvalidDimension(config.d, 2));
            }
        }
        let mut concept_rng = seeded_substream(config.seed, 1);
        let theta_a = sample_concept(config.d, &mut concept_rng)?;
        let theta_b = sample_concept(config.d, &mut concept_rng)?;
        Ok(HyperplaneStream {
            rotated: theta_a.clone(),
            theta_a,
            theta_b,
            active: Active::A,
            t: 0,
            rng: seeded_rng(config.seed),
            mix_rng: seeded_substream(config.seed, 2),
            config,
        })
    }

    /// Replaces the drawn concepts, e.g. to pin a test to a known boundary.
    pub fn with_concepts(mut self, theta_a: ConceptParams, theta_b: ConceptParams) -> Result<Self> {
        for c in [&theta_a, &theta_b] {
            if c.dim() != self.config.d {
                return Err(Error::DimensionMismatch {
                    expected: self.config.d,
                    found: c.dim(),
                });
            }
        }
        self.rotated = theta_a.clone();
        self.theta_a = theta_a;
        self.theta_b = theta_b;
        Ok(self)
    }

    pub fn config(&self) -> &HyperplaneConfig {
        &self.config
    }

    pub fn theta_a(&self) -> &ConceptParams {
        &self.theta_a
    }

    pub fn theta_b(&self) -> &ConceptParams {
        &self.theta_b
    }

    /// Timestep of the next instance.
    pub fn t(&self) -> u64 {
        self.t
    }

    fn current(&self) -> &ConceptParams {
        match self.active {
            Active::A => &self.theta_a,
            Active::B => &self.theta_b,
            Active::Rotated => &self.rotated,
        }
    }

    fn advance_sudden(&mut self) {
        self.active = if self.t < self.config.schedule.tau1 {
            Active::A
        } else {
            Active::B
        };
    }

    fn advance_incremental(&mut self, angle: f64, from: u64, until: u64) {
        if self.t >= from && self.t < until {
            // d >= 2 is checked at construction
            let _ = self.rotated.rotate(angle);
        }
        self.active = Active::Rotated;
    }

    /// Probability of drawing from `theta_b` at the current timestep.
    pub fn gradual_alpha(&self) -> f64 {
        gradual_alpha(self.t, &self.config.schedule)
    }

    fn advance_gradual(&mut self) {
        let alpha = self.gradual_alpha();
        let use_b = if alpha <= 0.0 {
            false
        } else if alpha >= 1.0 {
            true
        } else {
            uniform(&mut self.mix_rng) < alpha
        };
        self.active = if use_b { Active::B } else { Active::A };
    }

    fn advance(&mut self) {
        let schedule = self.config.schedule;
        match self.config.kind {
            DriftKind::None => self.active = Active::A,
            DriftKind::Sudden => self.advance_sudden(),
            DriftKind::Incremental(angle) => {
                self.advance_incremental(angle, schedule.tau1, schedule.tau2)
            }
            DriftKind::ConstantIncremental(angle) => self.advance_incremental(angle, 1, u64::MAX),
            DriftKind::Gradual => self.advance_gradual(),
        }
    }
}

/// Linear ramp: 0 before `tau1`, 1 from `tau2` on. An empty window
/// (`tau2 == tau1`) degenerates to a sudden switch at `tau1`.
pub fn gradual_alpha(t: u64, schedule: &DriftSchedule) -> f64 {
    if t < schedule.tau1 {
        0.0
    } else if t >= schedule.tau2 {
        1.0
    } else {
        (t - schedule.tau1) as f64 / (schedule.tau2 - schedule.tau1) as f64
    }
}

impl StreamSource for HyperplaneStream {
    fn dim(&self) -> usize {
        self.config.d
    }

    fn classes(&self) -> usize {
        2
    }

    fn next_instance(&mut self) -> Option<LabeledInstance> {
        if self.t >= self.config.schedule.total {
            return None;
        }
        self.advance();
        let x: Vec<f64> = (0..self.config.d)
            .map(|_| standard_normal(&mut self.rng))
            .collect();
        let y = label(self.current(), &x).ok()?;
        self.t += 1;
        Some(LabeledInstance::new(Instance::new(x).ok()?, y))
    }

    fn true_theta(&self) -> Result<ConceptParams> {
        Ok(self.current().clone())
    }

    fn describe(&self) -> String {
        let s = &self.config.schedule;
        let mut out = format!(
            "hyperplane d={} drift={} tau0={} tau1={} tau2={} T={} seed={}",
            self.config.d,
            self.config.kind.name(),
            s.tau0,
            s.tau1,
            s.tau2,
            s.total,
            self.config.seed
        );
        if let Some(angle) = self.config.kind.angle() {
            out.push_str(&format!(" angle={angle} rotation_plane=0,1"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Split {
        attribute: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        class: usize,
    },
}

/// A fixed decision tree over `[0, 1]^d`. Values `<= threshold` go left.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomTree {
    nodes: Vec<TreeNode>,
    d: usize,
    classes: usize,
}

impl RandomTree {
    /// Full binary tree of the given depth. Each internal node picks a
    /// uniform attribute and a uniform threshold inside the region that
    /// reaches it; each leaf gets a uniform class.
    pub fn random<R: Rng + ?Sized>(d: usize, classes: usize, depth: usize, rng: &mut R) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension(0, 1));
        }
        if classes < 2 {
            return Err(Error::param("classes", "need at least two classes"));
        }
        let mut tree = RandomTree {
            nodes: Vec::new(),
            d,
            classes,
        };
        let mut lo = vec![0.0; d];
        let mut hi = vec![1.0; d];
        tree.grow(depth, &mut lo, &mut hi, rng);
        Ok(tree)
    }

    fn grow<R: Rng + ?Sized>(&mut self, depth: usize, lo: &mut [f64], hi: &mut [f64], rng: &mut R) -> usize {
        let id = self.nodes.len();
        if depth == 0 {
            let class = rng.random_range(0..self.classes);
            self.nodes.push(TreeNode::Leaf { class });
            return id;
        }
        let attribute = rng.random_range(0..self.d);
        let threshold = lo[attribute] + uniform(rng) * (hi[attribute] - lo[attribute]);
        self.nodes.push(TreeNode::Split {
            attribute,
            threshold,
            left: 0,
            right: 0,
        });
        let saved_hi = hi[attribute];
        hi[attribute] = threshold;
        let left = self.grow(depth - 1, lo, hi, rng);
        hi[attribute] = saved_hi;
        let saved_lo = lo[attribute];
        lo[attribute] = threshold;
        let right = self.grow(depth - 1, lo, hi, rng);
        lo[attribute] = saved_lo;
        if let TreeNode::Split { left: l, right: r, .. } = &mut self.nodes[id] {
            *l = left;
            *r = right;
        }
        id
    }

    /// Builds a tree from explicit nodes; node 0 is the root.
    pub fn from_nodes(nodes: Vec<TreeNode>, d: usize, classes: usize) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::param("nodes", "tree needs a root"));
        }
        for node in &nodes {
            match *node {
                TreeNode::Split {
                    attribute,
                    left,
                    right,
                    ..
                } => {
                    if attribute >= d || left >= nodes.len() || right >= nodes.len() {
                        return Err(Error::param("nodes", "split references out of range"));
                    }
                }
                TreeNode::Leaf { class } => {
                    if class >= classes {
                        return Err(Error::InvalidLabel { label: class, classes });
                    }
                }
            }
        }
        Ok(RandomTree { nodes, d, classes })
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn classify(&self, x: &[f64]) -> usize {
        let mut id = 0;
        loop {
            match self.nodes[id] {
                TreeNode::Leaf { class } => return class,
                TreeNode::Split {
                    attribute,
                    threshold,
                    left,
                    right,
                } => id = if x[attribute] <= threshold { left } else { right },
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RtgConfig {
    pub d: usize,
    pub classes: usize,
    pub depth: usize,
    pub total: u64,
    pub seed: u64,
}

impl Default for RtgConfig {
    fn default() -> Self {
        RtgConfig {
            d: 10,
            classes: 2,
            depth: 5,
            total: 10_000,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RandomTreeStream {
    tree: RandomTree,
    total: u64,
    t: u64,
    seed: u64,
    depth: usize,
    rng: StreamRng,
}

impl RandomTreeStream {
    pub fn new(config: RtgConfig) -> Result<Self> {
        let mut tree_rng = seeded_substream(config.seed, 1);
        let tree = RandomTree::random(config.d, config.classes, config.depth, &mut tree_rng)?;
        Ok(Self::with_tree(tree, config.total, config.seed, config.depth))
    }

    pub fn with_tree(tree: RandomTree, total: u64, seed: u64, depth: usize) -> Self {
        RandomTreeStream {
            tree,
            total,
            t: 0,
            seed,
            depth,
            rng: seeded_rng(seed),
        }
    }

    pub fn tree(&self) -> &RandomTree {
        &self.tree
    }
}

impl StreamSource for RandomTreeStream {
    fn dim(&self) -> usize {
        self.tree.d
    }

    fn classes(&self) -> usize {
        self.tree.classes
    }

    fn next_instance(&mut self) -> Option<LabeledInstance> {
        if self.t >= self.total {
            return None;
        }
        let x: Vec<f64> = (0..self.tree.d).map(|_| uniform(&mut self.rng)).collect();
        let y = self.tree.classify(&x);
        self.t += 1;
        Some(LabeledInstance::new(Instance::new(x).ok()?, y))
    }

    fn true_theta(&self) -> Result<ConceptParams> {
        Err(Error::Unsupported("random tree stream has no hyperplane concept"))
    }

    fn describe(&self) -> String {
        format!(
            "rtg d={} classes={} depth={} T={} seed={}",
            self.tree.d, self.tree.classes, self.depth, self.total, self.seed
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream(kind: DriftKind, schedule: DriftSchedule, seed: u64) -> HyperplaneStream {
        HyperplaneStream::new(HyperplaneConfig {
            d: 2,
            kind,
            schedule,
            seed,
        })
        .unwrap()
    }

    fn concept(v: &[f64]) -> ConceptParams {
        ConceptParams::new(v.to_vec()).unwrap()
    }

    #[test]
    fn sample_concept_is_deterministic() {
        let a = sample_concept(2, &mut seeded_rng(9)).unwrap();
        let b = sample_concept(2, &mut seeded_rng(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);
        let one = sample_concept(1, &mut seeded_rng(9)).unwrap();
        assert!(one.theta[0].is_finite());
        assert_eq!(sample_concept(0, &mut seeded_rng(9)), Err(Error::InvalidDimension(0, 1)));
    }

    #[test]
    fn sample_concept_mean_near_zero() {
        let c = sample_concept(10_000, &mut seeded_rng(5)).unwrap();
        let mean = c.theta.iter().sum::<f64>() / 1e4;
        // standard error 0.01
        assert!(mean.abs() < 0.05);
    }

    #[test]
    fn label_examples() {
        assert_eq!(label(&concept(&[1.0, 0.0]), &[0.5, -3.0]).unwrap(), 1);
        assert_eq!(label(&concept(&[1.0, 0.0]), &[-0.5, 3.0]).unwrap(), 0);
        assert_eq!(label(&concept(&[1.0, 1.0]), &[1.0, -1.0]).unwrap(), 1);
        assert!(label(&concept(&[1.0, 1.0]), &[1.0]).is_err());
    }

    #[test]
    fn rotation_composes_to_closed_form() {
        let mut c = concept(&[1.0, 0.0]);
        for _ in 0..100 {
            c.rotate(0.01).unwrap();
        }
        // clockwise: (cos 1, -sin 1)
        assert!((c.theta[0] - libm::cos(1.0)).abs() < 1e-12);
        assert!((c.theta[1] + libm::sin(1.0)).abs() < 1e-12);

        let mut z = concept(&[0.3, -0.7]);
        z.rotate(0.0).unwrap();
        assert_eq!(z.theta, [0.3, -0.7]);
        assert_eq!(concept(&[1.0]).rotate(0.1), Err(Error::InvalidDimension(1, 2)));
    }

    #[test]
    fn rotation_preserves_norm() {
        let mut c = concept(&[0.4, -1.3, 2.0]);
        let n0 = c.norm();
        for _ in 0..100_000 {
            c.rotate(0.01).unwrap();
        }
        assert!((c.norm() - n0).abs() / n0 < 1e-6);
        assert_eq!(c.theta[2], 2.0);
    }

    #[test]
    fn incremental_requires_two_dims() {
        let r = HyperplaneStream::new(HyperplaneConfig {
            d: 1,
            kind: DriftKind::Incremental(0.01),
            schedule: DriftSchedule::standard(100, 50, 60).unwrap(),
            seed: 1,
        });
        assert_eq!(r.err(), Some(Error::InvalidDimension(1, 2)));
        let nan = HyperplaneStream::new(HyperplaneConfig {
            d: 2,
            kind: DriftKind::ConstantIncremental(f64::NAN),
            schedule: DriftSchedule::stationary(100),
            seed: 1,
        });
        assert!(matches!(nan, Err(Error::InvalidParameter { name: "angle", .. })));
    }

    #[test]
    fn stationary_labels_follow_theta_a() {
        let mut s = stream(DriftKind::None, DriftSchedule::stationary(500), 3);
        let theta = s.theta_a().clone();
        while let Some(ex) = s.next_instance() {
            assert_eq!(ex.label, label(&theta, ex.features()).unwrap());
            assert_eq!(s.true_theta().unwrap(), theta);
        }
    }

    #[test]
    fn stream_has_exact_length() {
        let mut s = stream(DriftKind::None, DriftSchedule::stationary(10_000), 3);
        let mut n = 0;
        while s.next_instance().is_some() {
            n += 1;
        }
        assert_eq!(n, 10_000);
        assert!(s.next_instance().is_none());
    }

    #[test]
    fn class_balance_is_even() {
        let mut s = stream(DriftKind::None, DriftSchedule::stationary(10_000), 11);
        let mut ones = 0;
        while let Some(ex) = s.next_instance() {
            ones += ex.label;
        }
        assert!((ones as f64 / 1e4 - 0.5).abs() < 0.02);
    }

    #[test]
    fn sudden_switches_at_tau1() {
        let schedule = DriftSchedule::sudden(200, 100).unwrap();
        let mut s = stream(DriftKind::Sudden, schedule, 4);
        let (a, b) = (s.theta_a().clone(), s.theta_b().clone());
        assert_ne!(a, b);
        for t in 0..200 {
            let ex = s.next_instance().unwrap();
            let expected = if t < 100 { &a } else { &b };
            assert_eq!(&s.true_theta().unwrap(), expected, "t={t}");
            assert_eq!(ex.label, label(expected, ex.features()).unwrap());
        }
    }

    #[test]
    fn sudden_matches_stationary_before_tau1() {
        let mut none = stream(DriftKind::None, DriftSchedule::stationary(300), 8);
        let mut sudden = stream(DriftKind::Sudden, DriftSchedule::sudden(300, 150).unwrap(), 8);
        for _ in 0..150 {
            assert_eq!(none.next_instance(), sudden.next_instance());
        }
    }

    #[test]
    fn degenerate_resample_changes_nothing() {
        let schedule = DriftSchedule::sudden(200, 100).unwrap();
        let c = concept(&[0.6, -0.2]);
        let mut s = stream(DriftKind::Sudden, schedule, 4)
            .with_concepts(c.clone(), c.clone())
            .unwrap();
        let mut none = stream(DriftKind::None, DriftSchedule::stationary(200), 4)
            .with_concepts(c.clone(), c)
            .unwrap();
        for _ in 0..200 {
            assert_eq!(s.next_instance(), none.next_instance());
        }
    }

    #[test]
    fn incremental_rotates_only_inside_window() {
        let schedule = DriftSchedule::standard(100, 20, 50).unwrap();
        let mut s = stream(DriftKind::Incremental(0.01), schedule, 2);
        let a = s.theta_a().clone();
        for _ in 0..20 {
            s.next_instance();
        }
        assert_eq!(s.true_theta().unwrap(), a);
        for _ in 20..100 {
            s.next_instance();
        }
        let mut expected = a.clone();
        for _ in 0..30 {
            expected.rotate(0.01).unwrap();
        }
        let got = s.true_theta().unwrap();
        for (g, e) in got.theta.iter().zip(&expected.theta) {
            assert!((g - e).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_incremental_rotates_every_step() {
        let mut s = stream(DriftKind::ConstantIncremental(0.01), DriftSchedule::stationary(1000), 6);
        let theta0 = s.theta_a().clone();
        let r0 = theta0.norm();
        for t in 0..1000u64 {
            s.next_instance();
            let got = s.true_theta().unwrap();
            assert!((got.norm() - r0).abs() < 1e-9 * r0);
            if t == 400 {
                // rotated t times, closed form
                let (sn, c) = libm::sincos(0.01 * t as f64);
                let e0 = c * theta0.theta[0] + sn * theta0.theta[1];
                let e1 = -sn * theta0.theta[0] + c * theta0.theta[1];
                assert!((got.theta[0] - e0).abs() < 1e-9);
                assert!((got.theta[1] - e1).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn gradual_ramp_endpoints() {
        let schedule = DriftSchedule::standard(100, 40, 60).unwrap();
        assert_eq!(gradual_alpha(39, &schedule), 0.0);
        assert_eq!(gradual_alpha(40, &schedule), 0.0);
        assert_eq!(gradual_alpha(50, &schedule), 0.5);
        assert_eq!(gradual_alpha(60, &schedule), 1.0);
        assert_eq!(gradual_alpha(99, &schedule), 1.0);
        // empty window acts as sudden
        let s2 = DriftSchedule::new(0, 40, 40, 100).unwrap();
        assert_eq!(gradual_alpha(39, &s2), 0.0);
        assert_eq!(gradual_alpha(40, &s2), 1.0);
    }

    #[test]
    fn gradual_uses_pure_concepts_outside_window() {
        let schedule = DriftSchedule::standard(100, 40, 60).unwrap();
        let mut s = stream(DriftKind::Gradual, schedule, 12);
        let (a, b) = (s.theta_a().clone(), s.theta_b().clone());
        for t in 0..100 {
            s.next_instance();
            let active = s.true_theta().unwrap();
            if t <= 40 {
                assert_eq!(active, a);
            }
            if t >= 60 {
                assert_eq!(active, b);
            }
        }
    }

    #[test]
    fn gradual_midpoint_frequency() {
        // each stream contributes one draw at the ramp midpoint
        let schedule = DriftSchedule::new(0, 0, 2, 2).unwrap();
        let n = 10_000;
        let mut hits = 0;
        for seed in 0..n {
            let mut s = stream(DriftKind::Gradual, schedule, seed);
            s.next_instance();
            s.next_instance();
            if s.true_theta().unwrap() == *s.theta_b() {
                hits += 1;
            }
        }
        let freq = hits as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.02, "{freq}");
    }

    #[test]
    fn hyperplane_replay_is_identical() {
        let schedule = DriftSchedule::standard(500, 200, 300).unwrap();
        for kind in [DriftKind::Gradual, DriftKind::Incremental(0.01), DriftKind::Sudden] {
            let mut a = stream(kind, schedule, 77);
            let mut b = stream(kind, schedule, 77);
            for _ in 0..500 {
                assert_eq!(a.next_instance(), b.next_instance());
            }
        }
    }

    #[test]
    fn single_threshold_tree() {
        let tree = RandomTree::from_nodes(
            vec![
                TreeNode::Split {
                    attribute: 0,
                    threshold: 0.5,
                    left: 1,
                    right: 2,
                },
                TreeNode::Leaf { class: 0 },
                TreeNode::Leaf { class: 1 },
            ],
            3,
            2,
        )
        .unwrap();
        assert_eq!(tree.classify(&[0.2, 0.9, 0.9]), 0);
        assert_eq!(tree.classify(&[0.7, 0.1, 0.1]), 1);
        let mut s = RandomTreeStream::with_tree(tree.clone(), 1000, 1, 1);
        while let Some(ex) = s.next_instance() {
            assert_eq!(ex.label, usize::from(ex.features()[0] > 0.5));
            assert!(ex.features().iter().all(|v| (0.0..1.0).contains(v)));
        }
        assert!(s.true_theta().is_err());
    }

    #[test]
    fn rtg_replay_is_identical() {
        let cfg = RtgConfig {
            total: 300,
            ..RtgConfig::default()
        };
        let mut a = RandomTreeStream::new(cfg.clone()).unwrap();
        let mut b = RandomTreeStream::new(cfg).unwrap();
        assert_eq!(a.tree(), b.tree());
        for _ in 0..300 {
            assert_eq!(a.next_instance(), b.next_instance());
        }
    }

    /// Exact class volumes by recursive box splitting, independent of
    /// `classify`.
    fn class_volumes(tree: &RandomTree) -> Vec<f64> {
        fn walk(tree: &RandomTree, id: usize, lo: &mut [f64], hi: &mut [f64], out: &mut [f64]) {
            match tree.nodes()[id] {
                TreeNode::Leaf { class } => {
                    out[class] += lo.iter().zip(hi.iter()).map(|(l, h)| (h - l).max(0.0)).product::<f64>();
                }
                TreeNode::Split {
                    attribute,
                    threshold,
                    left,
                    right,
                } => {
                    let (l0, h0) = (lo[attribute], hi[attribute]);
                    hi[attribute] = threshold.min(h0).max(l0);
                    walk(tree, left, lo, hi, out);
                    hi[attribute] = h0;
                    lo[attribute] = threshold.max(l0).min(h0);
                    walk(tree, right, lo, hi, out);
                    lo[attribute] = l0;
                }
            }
        }
        let mut out = vec![0.0; tree.classes];
        walk(tree, 0, &mut vec![0.0; tree.d], &mut vec![1.0; tree.d], &mut out);
        out
    }

    #[test]
    fn rtg_label_distribution_matches_region_volume() {
        let mut s = RandomTreeStream::new(RtgConfig {
            d: 4,
            total: 10_000,
            seed: 21,
            ..RtgConfig::default()
        })
        .unwrap();
        let volumes = class_volumes(s.tree());
        assert!((volumes.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let mut counts = [0usize; 2];
        while let Some(ex) = s.next_instance() {
            counts[ex.label] += 1;
        }
        for c in 0..2 {
            assert!((counts[c] as f64 / 1e4 - volumes[c]).abs() < 0.02);
        }
    }
}
