//! Numerical machinery for the fractional heat semigroup on periodic boxes:
//! rearrangement-based Zygmund norms, spectral propagators with kernel-bound
//! fits, real-interpolation K-functionals, weighted Hardy checks, and the
//! Duhamel/Picard solver with blow-up threshold bisection.

pub mod error;
pub mod harness;
pub mod fft;
pub mod gridfn;
pub mod interp;
pub mod quad;
pub mod rearrange;
pub mod solver;
pub mod semigroup;
pub mod zygmund;

pub use error::{Error, Result};
