//! Exact computer algebra for the hierarchy of higher-order Jacobi fields and
//! conservation laws of constant mean curvature surfaces in 3-dimensional
//! space forms.
//!
//! The crate is `no_std` with `alloc`. Everything symbolic is exact over the
//! Gaussian rationals; the few numeric routines (path integration, root
//! finding) live in [`finitetype`] and use double-double floats.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod error;
pub mod linalg;
pub mod poly;
pub mod scalar;

pub mod jetring;
pub mod hierarchy;
pub mod cvlaws;
pub mod umbilic;
pub mod pdebridge;
pub mod deformation;
pub mod finitetype;

pub use error::{Error, Result};
pub use jetring::{JetPoly, JetVar, Rules};
pub use poly::{Mono, Poly, Var, WeightReport};
pub use scalar::Gq;
