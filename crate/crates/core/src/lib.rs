//! Gabor analysis on finite abelian groups and on ℝ: twisted group algebras,
//! Heisenberg-module inner products, frame bounds and dual windows, and the
//! transfer of generators by sampling and periodization.

pub mod algebra;
pub mod approx;
pub mod continuous;
pub mod error;
pub mod frames;
pub mod lca;
pub mod linalg;
pub mod rational;
pub mod timefreq;
pub mod transfer;

pub use error::{Error, Hypothesis, Result};
pub use num_complex::Complex64;
pub use rational::Rational;
