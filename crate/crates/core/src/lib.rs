//! Computable bounds on the best achievable robust accuracy of a 2-D labeled
//! distribution under a uniform ε-ball vicinity.
//!
//! The pipeline: rasterize a labeled density ([`density`]), convolve it
//! with the vicinity kernel ([`vicinity`], [`convolution`]), and read off
//! Bayes errors and uncertainty regions ([`bayes`]) to form the bounds
//! ([`bounds`]). [`correctness`] holds the sample-based checks.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positives.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bayes;
pub mod bounds;
pub mod cli;
pub mod convolution;
pub mod correctness;
pub mod density;
pub mod error;
pub mod grid;
pub mod quadrature;
pub mod render;
pub mod special;
pub mod vicinity;

pub use error::{Error, Result};
