//! Numerical toolkit for pseudo-Hermitian and PT-symmetric quantum mechanics.
//!
//! * [`linalg`]: dense complex kernel (Schur-based eigensystems with left and
//!   right vectors, Padé matrix exponential, condition numbers).
//! * [`pt_algebra`]: involutions, pseudo-Hermiticity, indefinite inner products
//!   and the two-level toy Hamiltonians.
//! * [`spectral`]: regime classification, exceptional-point detection, sweeps.
//! * [`metric`]: metric operators `η` with `ηH = H†η` and their conditioning.
//! * [`evolution`]: propagators, pseudo-unitarity checks, time stepping.
//! * [`fv`]: free Klein-Gordon dynamics in two-component Feshbach-Villars form.

pub mod evolution;
pub mod fv;
pub mod linalg;
pub mod metric;
pub mod pt_algebra;
pub mod spectral;

pub use linalg::{ComplexMatrix, LinalgError, C64};
