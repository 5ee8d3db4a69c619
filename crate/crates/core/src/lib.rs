//! Approximate Noether symmetries and first integrals of perturbed
//! one-degree-of-freedom Lagrangians `L = L0 + eps*G1 + eps^2*G2 + eps^3*G3`.

pub mod expr;
pub mod linalg;
pub mod error;
pub mod noether;
pub mod separate;
pub mod solve;
pub mod integrals;
pub mod verify;
pub mod case;
pub mod report;
pub mod cli;

pub use error::{Error, Result};
