//! Pseudo-spectral vector-field calculus on a periodic box, with a
//! certification layer for the differential identities, energy balances,
//! Fourier-multiplier algebra and Wiener-norm inequalities that govern the
//! stationary incompressible Navier-Stokes system
//!
//! ```text
//!     nu curl^2 v + P(curl v x v) = f,      div v = 0,
//! ```
//!
//! where `P` is the Leray projection. The library works with Fourier-series
//! coefficients on `[0, L)^3`; all products are dealiased by zero-padding so
//! that every checkable identity holds at spectral accuracy, and every check
//! returns a structured [`report::CheckReport`].
//!
//! Module map:
//!
//! - [`grid`], [`spectral`]: the discretization substrate (physical samples,
//!   Fourier coefficients, transforms, dealiased products).
//! - [`operators`]: curl, grad, div, Laplacian and inverse, Leray projectors,
//!   Riesz-type singular integrals, generic bounded multipliers.
//! - [`bands`]: radial frequency cutoffs, low/high splitting and the
//!   cutoff-multiplier commutator with its explicit kernel representation.
//! - [`norms`]: lattice Lp, Wiener / weighted-Wiener sums, homogeneous
//!   Sobolev norms, superlevel-set measure.
//! - [`nse`]: Bernoulli head pressure, residuals in both formulations and
//!   the identity / energy audits.
//! - [`solutions`]: shear flows, seeded random divergence-free states with
//!   manufactured forcing, analytic harmonic-gradient solutions, the integer
//!   rescaling map.
//! - [`certify`]: standalone inequality certifiers (Peetre bracket, cross
//!   product bounds, split bounds, power inequality, isoperimetric
//!   diagnostic) and the dimensional-analysis checker.
//! - [`corpus`]: deterministic test-field corpora described by a JSON
//!   manifest.

pub mod bands;
pub mod certify;
pub mod corpus;
mod error;
mod fft;
pub mod grid;
pub mod norms;
pub mod nse;
pub mod operators;
pub mod quad;
pub mod report;
pub mod rng;
pub mod solutions;
pub mod spectral;
pub mod units;

pub use error::{Error, Result};
