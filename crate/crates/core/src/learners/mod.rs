//! Incremental classifiers.

pub mod basis;
pub mod hoeffding;
pub mod knn;
pub mod reset;
pub mod rls;
pub mod sgd;

pub use basis::PolyBasis;
pub use hoeffding::{HoeffdingTree, HoeffdingTreeConfig};
pub use knn::KnnClassifier;
pub use reset::{DetectAndReset, ResetConfig};
pub use rls::{RlsClassifier, RlsRegressor};
pub use sgd::{SgdClassifier, SgdConfig};

use crate::error::{Error, Result};

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub(crate) fn check_finite(x: &[f64]) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
