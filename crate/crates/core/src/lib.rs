//! f-attentive second-order objects for prox-regular functions: truncated
//! subgradient graphs, SC derivatives as `(P, W)` pairs, one-dimensional
//! attentive coderivatives, the point-based and neighborhood criteria for
//! variational convexity and tilt stability, and brute-force oracles that
//! check them.

pub mod calculus;
pub mod catalog;
pub mod criteria;
pub mod error;
pub mod graph;
mod linalg;
pub mod oracles;
pub mod scalar;
pub mod scderiv;
pub mod subspace;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Subspace = subspace::Subspace<f64>;
pub type SubspaceF32 = subspace::Subspace<f32>;
pub type PwPair = subspace::PwPair<f64>;
pub type PwPairF32 = subspace::PwPair<f32>;
pub type PwSet = scderiv::PwSet<f64>;
pub type PwSetF32 = scderiv::PwSet<f32>;
