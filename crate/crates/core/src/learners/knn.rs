//! k-nearest neighbours over a fixed-size FIFO buffer.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::check_dim;
use crate::error::{Error, Result};
use crate::stream::{Instance, LabeledInstance, Learner};

#[derive(Debug, Clone, PartialEq)]
pub struct KnnClassifier {
    k: usize,
    window: usize,
    d: Option<usize>,
    buffer: VecDeque<LabeledInstance>,
}

impl KnnClassifier {
    pub fn new(k: usize, window: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("k", "must be at least 1"));
        }
        if window == 0 {
            return Err(Error::param("window", "must be at least 1"));
        }
        Ok(KnnClassifier {
            k,
            window,
            d: None,
            buffer: VecDeque::with_capacity(window + 1),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    /// Oldest first.
    pub fn buffer(&self) -> impl Iterator<Item = &LabeledInstance> {
        self.buffer.iter()
    }

    pub fn insert(&mut self, example: LabeledInstance) -> Result<()> {
        match self.d {
            Some(d) => check_dim(d, example.instance.dim())?,
            None => self.d = Some(example.instance.dim()),
        }
        self.buffer.push_back(example);
        while self.buffer.len() > self.window {
            self.buffer.pop_front();
        }
        Ok(())
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl Learner for KnnClassifier {
    fn id(&self) -> String {
        String::from("knn")
    }

    fn predict(&self, x: &Instance) -> Result<usize> {
        if self.buffer.is_empty() {
            return Ok(0);
        }
        if let Some(d) = self.d {
            check_dim(d, x.dim())?;
        }
        // (distance, age) keeps equal distances in insertion order
        let mut dists: Vec<(f64, usize, usize)> = self
            .buffer
            .iter()
            .enumerate()
            .map(|(age, ex)| (squared_distance(ex.features(), x.as_slice()), age, ex.label))
            .collect();
        let k = self.k.min(dists.len());
        let by_distance = |a: &(f64, usize, usize), b: &(f64, usize, usize)| {
            a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
        };
        if k < dists.len() {
            dists.select_nth_unstable_by(k - 1, by_distance);
        }
        let max_label = dists[..k].iter().map(|e| e.2).max().unwrap_or(0);
        let mut votes = vec![0usize; max_label + 1];
        for e in &dists[..k] {
            votes[e.2] += 1;
        }
        let mut best = 0;
        for (c, v) in votes.iter().enumerate() {
            if *v > votes[best] {
                best = c;
            }
        }
        Ok(best)
    }

    fn update(&mut self, example: &LabeledInstance) -> Result<()> {
        self.insert(example.clone())
    }

    fn model_size(&self) -> usize {
        self.buffer.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(x: &[f64], y: usize) -> LabeledInstance {
        LabeledInstance::new(Instance::new(x.to_vec()).unwrap(), y)
    }

    fn inst(x: &[f64]) -> Instance {
        Instance::new(x.to_vec()).unwrap()
    }

    #[test]
    fn nearest_neighbour() {
        let mut m = KnnClassifier::new(1, 10).unwrap();
        m.insert(ex(&[0.0, 0.0], 0)).unwrap();
        m.insert(ex(&[1.0, 1.0], 1)).unwrap();
        assert_eq!(m.predict(&inst(&[0.1, 0.0])).unwrap(), 0);
        assert_eq!(m.predict(&inst(&[0.9, 1.2])).unwrap(), 1);
    }

    #[test]
    fn empty_buffer_predicts_zero() {
        let m = KnnClassifier::new(10, 100).unwrap();
        assert_eq!(m.predict(&inst(&[3.0])).unwrap(), 0);
    }

    #[test]
    fn majority_of_three() {
        let mut m = KnnClassifier::new(3, 10).unwrap();
        m.insert(ex(&[0.0], 1)).unwrap();
        m.insert(ex(&[0.1], 1)).unwrap();
        m.insert(ex(&[0.2], 0)).unwrap();
        m.insert(ex(&[5.0], 0)).unwrap();
        m.insert(ex(&[6.0], 0)).unwrap();
        assert_eq!(m.predict(&inst(&[0.05])).unwrap(), 1);
    }

    #[test]
    fn vote_tie_goes_to_smallest_class() {
        let mut m = KnnClassifier::new(2, 10).unwrap();
        m.insert(ex(&[1.0], 1)).unwrap();
        m.insert(ex(&[-1.0], 0)).unwrap();
        assert_eq!(m.predict(&inst(&[0.0])).unwrap(), 0);
    }

    #[test]
    fn fifo_eviction() {
        let mut m = KnnClassifier::new(1, 2).unwrap();
        let (a, b, c) = (ex(&[0.0], 0), ex(&[1.0], 1), ex(&[2.0], 0));
        m.insert(a).unwrap();
        m.insert(b.clone()).unwrap();
        m.insert(c.clone()).unwrap();
        let kept: Vec<_> = m.buffer().cloned().collect();
        assert_eq!(kept, [b, c]);
    }

    #[test]
    fn buffer_is_bounded() {
        let mut m = KnnClassifier::new(10, 100).unwrap();
        for i in 0..100 {
            m.insert(ex(&[i as f64], i % 2)).unwrap();
        }
        assert_eq!(m.len(), 100);
        for i in 0..100_000 {
            m.insert(ex(&[i as f64], i % 2)).unwrap();
            assert!(m.len() <= 100);
        }
        assert_eq!(m.len(), 100);
        assert_eq!(m.model_size(), 100);
    }

    #[test]
    fn dimension_is_fixed_by_first_insert() {
        let mut m = KnnClassifier::new(1, 5).unwrap();
        m.insert(ex(&[0.0, 1.0], 0)).unwrap();
        assert!(m.insert(ex(&[0.0], 0)).is_err());
        assert!(m.predict(&inst(&[0.0])).is_err());
        assert!(KnnClassifier::new(0, 5).is_err());
        assert!(KnnClassifier::new(1, 0).is_err());
    }
}
