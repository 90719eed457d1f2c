//! Dynamics of weighted composition operators `W f = u · (f ∘ ψ)` on Fock
//! spaces, for the affine/exponential symbol family
//! `ψ(z) = a z + b`, `u(z) = u₀ e^{c z}`.
//!
//! The crate is split into
//!
//! - [`symbol`]: exact parameter algebra (iterates, fixed points, the
//!   boundedness constant) and the exact exp-polynomial function class,
//! - [`classify`]: closed-form verdicts (boundedness, compactness, power
//!   boundedness, supercyclicity, Ritt and unconditional Ritt) and spectra,
//! - [`linalg`]: a small dense complex matrix kernel and the truncated matrix
//!   of `W` in the orthonormal monomial basis of `F²`,
//! - [`dynlab`]: numerical experiments that cross-check the verdicts,
//! - [`report`]: run configuration, JSON/CSV reports and the command bodies
//!   behind the `fockdyn` binary.

pub mod classify;
pub mod dynlab;
mod error;
pub mod fmt;
pub mod linalg;
pub mod par;
pub mod report;
pub mod rng;
pub mod special;
pub mod symbol;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Absolute tolerance for complex equality tests such as `c = −a·conj(b)`.
pub const EQ_TOL: f64 = 1e-12;

pub(crate) fn approx_eq(x: Complex64, y: Complex64) -> bool {
    (x - y).norm() <= EQ_TOL
}
