//! Exact low-order fidelity polynomials for [7,1,3] logical-zero preparation
//! under a non-equiprobable Pauli error channel.
//!
//! Noisy Clifford circuits are simulated on a stabilizer tableau. Every fault
//! path up to a chosen order is enumerated, and its contribution is weighted by
//! the exact product of per-slot error probabilities, giving acceptance and
//! fidelity polynomials in `(p_x, p_y, p_z)` with rational coefficients.

pub mod circuit;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod golden;
pub mod noise;
pub mod oracle;
pub mod pauli;
pub mod polynomial;
pub mod stabilizer;
pub mod steane;

pub use error::{Error, Result};
pub use polynomial::{ErrorPolynomial, Monomial, Var};
