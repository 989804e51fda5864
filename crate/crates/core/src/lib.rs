//! Minimal-length quantum mechanics on the ordinary momentum-space Hilbert
//! space `L²(ℝ, dp)`.
//!
//! The library realizes a deformed position operator 𝒳 = √f(p̂) x̂ √f(p̂) for a
//! positive deformation function f alongside the canonical pair (x̂, p̂), so
//! that generalized-uncertainty-principle (GUP) physics can be computed with
//! plain wavefunctions ψ(p) on a uniform grid.  The pieces:
//!
//! * [`grid`] — momentum grids, trapezoidal quadrature, spectral
//!   differentiation, expectation values and uncertainties;
//! * [`expr`] / [`deform`] — a small expression language for f(p), its
//!   symbolic derivative, the momentum map k(p) = ∫dp̃/f and cutoff;
//! * [`ops`] — canonical and deformed operator actions, commutator
//!   diagnostics, and the GUP inequality check;
//! * [`states`] — squeezed Gaussians, deformed-position eigenstates,
//!   minimum-length states, and the closed-form Gaussian Δ𝒳;
//! * [`fock`] / [`oscillator`] — truncated number-basis matrices, the
//!   deformed oscillator, and perturbative energy corrections;
//! * [`wigner`] — Weyl transform, Wigner functions, marginals, and the
//!   deformed phase-space symbols;
//! * [`egup`] — the q-deformed ladder algebra behind the extended GUP,
//!   uncertainty floors, and the q-oscillator spectrum.

pub mod deform;
pub mod egup;
pub mod error;
pub mod expr;
pub mod fock;
pub mod fourier;
pub mod grid;
pub mod io;
pub mod ops;
pub mod oscillator;
pub mod states;
pub mod units;
pub mod wigner;

pub use error::{Error, Result};
pub use units::PhysicalUnits;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
