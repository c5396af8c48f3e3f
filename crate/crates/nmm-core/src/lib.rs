//! Numerics for the Gaussian normal matrix model.
//!
//! The canonical potential is `V(z) = |z|^2 - t Re(z^2)` with `0 <= t < 1`.
//! Its eigenvalues, at weight `e^{-n tr V}`, form a determinantal point
//! process whose kernel is built from orthonormal polynomials that are
//! rescaled Hermite polynomials. This crate evaluates those polynomials in
//! overflow-safe arithmetic and provides the kernels, densities, correlation
//! determinants, exact kernel identities and the large-n limits.
//!
//! `no_std` with `alloc`.

#![no_std]

extern crate alloc;

pub mod asymptotics;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod linalg;
pub mod orthopoly;
pub mod quadrature;
pub mod sampler;
pub mod scaledcx;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use orthopoly::{CanonicalModel, GeneralPotential};
pub use scaledcx::ScaledComplex;
