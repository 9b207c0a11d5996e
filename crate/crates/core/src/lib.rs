//! Weyl transform between phase-space functions on the plane and
//! Hermite-basis operator matrices.
//!
//! The commutative side lives in [`phase_space`], the operator side in
//! [`ncspace`]; [`weyl`] connects them. Every closed form has an
//! independent quadrature path in [`quadrature`] so results can be checked
//! rather than trusted.

pub mod acceptance;
pub mod cli;
pub mod decay;
pub mod error;
pub mod exact;
pub mod io;
pub mod linalg;
pub mod ncspace;
pub mod phase_space;
pub mod quadrature;
pub mod spectral;
pub mod specfun;
pub mod symbol;
pub mod weyl;

pub use error::{Result, WeylError};
pub use num_complex::Complex64;
pub use specfun::EpsParam;
