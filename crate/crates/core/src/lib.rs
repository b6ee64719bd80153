//! Sinc-based solvers for Volterra integral equations of the second kind,
//!
//! ```text
//! u(t) - ∫_a^t k(t, s) u(s) ds = g(t),   a <= t <= b,
//! ```
//!
//! using the tanh (SE) and double-exponential (DE) variable transformations.
//! Five methods are provided: SE/DE-Sinc-Nyström, the SE-Sinc-collocation
//! method of Stenger, the bordered SE-Sinc-collocation method of
//! Rashidinia and Zarebnia, and DE-Sinc-collocation.

pub mod bench;
pub mod error;
pub mod linear_system;
pub mod problem;
pub mod sinc_core;
pub mod solvers;
pub mod transforms;

pub use error::{Error, Result};
pub use problem::VolterraProblem;
pub use sinc_core::SincGrid;
pub use solvers::{Approximant, Method};
pub use transforms::{MeshParameters, TransformKind, VariableTransform};
