//! Adaptive random scan Gibbs and Metropolis-within-Gibbs samplers, exact
//! finite-space kernels, ergodicity bounds and asymptotic-variance tools.

pub mod adaptation;
pub mod bounds;
pub mod error;
pub mod fixtures;
pub mod harness;
pub mod kernels;
pub mod ladder;
pub mod rng;
pub mod samplers;
pub mod target;
pub mod variance;
pub mod weights;

pub use error::{Error, Result};
pub use kernels::{DistributionVector, StateSpace, TransitionMatrix};
pub use target::{ContinuousProductTarget, FiniteProductTarget};
pub use weights::{make_selection_weights, mixture_decomposition, SelectionWeights};
