//! Exact and floating-point machinery for the genuine Goodman-Sharma operator
//! `U_n` and its modification `Ũ_n = U_n - (1/n) D̃ U_n`, where
//! `D̃ f = φ f''` and `φ(x) = x(1 - x)`.
//!
//! The crate is layered bottom-up:
//!
//! * [`basis`]: Bernstein basis vectors, the rational functions `T_{n,k}`,
//!   Bernstein-operator moments and the tail sums `λ(n)`, `θ(n)`.
//! * [`exactpoly`]: rational-coefficient polynomials and exact application of
//!   `U_n`, `Ũ_n` and `D̃`. Every float path is checked against it.
//! * [`quadrature`]: Gauss-Legendre rules on `[0, 1]` for the interior
//!   functionals of non-polynomial inputs.
//! * [`operators`]: the test-function catalog, float Bernstein forms and the
//!   operators acting on them.
//! * [`analysis`]: sup norms, the K-functional sandwich and one checker per
//!   inequality.

pub mod analysis;
pub mod basis;
pub mod error;
pub mod exactpoly;
pub mod operators;
pub mod quadrature;
pub mod report;

pub use error::{Error, Result};
