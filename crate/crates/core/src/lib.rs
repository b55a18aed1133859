//! Weighted means and numerical checks of weighted Kedlaya-type inequalities.
//!
//! The crate covers weight vectors and their admissibility classes, a family of
//! weighted means (closed forms and deviation means), Jensen concavity tests,
//! exact rational step-function geometry, and the weighted Kedlaya inequality
//! itself together with the machinery used to prove or refute it.

// `!(a <= b)` is used deliberately so that NaN takes the failing branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod concavity;
pub mod deviation;
pub mod error;
pub mod interval;
pub mod kedlaya;
pub mod means;
pub mod parse;
pub mod rational;
pub mod sampling;
pub mod simple;
pub mod weights;

pub use error::{Error, Result};
pub use interval::Interval;
pub use means::{Family, MeanHandle};
pub use rational::Rational;
pub use weights::{WeightClass, WeightVector};
