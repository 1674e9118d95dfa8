//! Numerical laboratory for linear waves on slowly rotating Kerr–de Sitter
//! black holes.
//!
//! The crate is `no_std` (it only needs `alloc`) and contains the pure
//! numerics:
//!
//! * [`spacetime`]: the metric in Boyer–Lindquist, Kerr-star and shifted
//!   Kerr-star charts, horizons, chart transition functions, Christoffel
//!   symbols and surface gravities.
//! * [`energy`]: stress-energy tensor, energy currents, deformation tensors,
//!   the red-shift multiplier and its certification.
//! * [`solver`]: a method-of-lines evolution for the azimuthal modes of
//!   `□_g u = f` (optionally `(□_g + ψX)u = f`) on the extended domain.
//! * [`spectral`]: angular separation constants, quasinormal modes by
//!   Frobenius matching, argument-principle scans of the spectral gap.
//! * [`diagnostics`]: the late-time constant, decay fits, weighted norms,
//!   energy budgets and convergence studies.
//!
//! IO, configuration and the command line live in the `kds-lab` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod diagnostics;
pub mod energy;
mod error;
pub mod numerics;
pub mod solver;
pub mod spacetime;
pub mod spectral;

pub use error::Error;

/// Version of this crate, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Complex scalar used throughout the mode computations.
pub type C64 = num_complex::Complex64;

pub type Result<T, E = Error> = core::result::Result<T, E>;
