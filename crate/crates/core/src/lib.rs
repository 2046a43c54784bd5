//! Streaming learners and concept-drift generators.
//!
//! This crate is `no_std` (it needs `alloc`). Everything that touches the
//! filesystem, wall-clock time or the command line lives in the companion
//! `streamdrift` crate.
//!
//! The pieces fit together through two traits: [`StreamSource`] produces
//! labelled instances one at a time and [`Learner`] predicts then updates.
//! [`eval::prequential_run`] drives the test-then-train loop.

#![no_std]

extern crate alloc;

pub mod error;
pub mod eval;
pub mod generators;
pub mod learners;
pub mod normalize;
pub mod rng;
pub mod stats;
pub mod stream;

pub use error::{Error, Result};
pub use stream::{DriftSchedule, Instance, LabeledInstance, Learner, StreamSource};
