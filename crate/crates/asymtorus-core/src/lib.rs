//! Exact algebra and symbol calculus for an asymmetric noncommutative torus.
//!
//! The crate is organized bottom-up:
//!
//! * [`scalar`] — coefficient rings: Gaussian rationals ℚ(i), their extension
//!   by the circle constant τ = 2π, and a float fallback for irrational
//!   deformation parameters.
//! * [`torus`] — elements Σ a_{mn} U₁^m U₂^n of the rotation algebra with
//!   U₁U₂ = e^{2πiθ} U₂U₁, their product, star, derivations and trace.
//! * [`ratfn`] — rational functions of one or two commuting variables (s, t)
//!   with exact rational coefficients and factored denominators.
//! * [`symbol`] — the noncommutative symbol calculus: words in k, b₀ and the
//!   derivatives of k, the squared-operator symbols, and the parametrix
//!   recursion producing the order-(−2) term b₂.
//! * [`classical`] — the commutative (θ = 0) collapse of symbol expressions
//!   and its exact ξ-integration in closed form.
//! * [`rearrange`] — rearrangement of operator words into modular-function
//!   form: integral descriptors and their exact closed-form evaluation.
//! * [`modfn`] — modular functions F(s,t) with k-power prefactors, their
//!   arithmetic, substitutions, printing, and an expression parser.
//! * [`curvature`] — assembly of the dressed curvature packages, trace
//!   reduction, the Gauss–Bonnet residual, the classical limit chain, and the
//!   two closing algebraic functionals.
//! * [`goldens`] — embedded reference word lists and function tables, plus
//!   their parsers.
//!
//! Everything here is `no_std` + `alloc`; numerics, matrices and IO live in
//! the companion lab crate.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod classical;
pub mod curvature;
pub mod goldens;
pub mod modfn;
pub mod ratfn;
pub mod rearrange;
pub mod scalar;
pub mod symbol;
pub mod torus;
