//! Arbitrary-precision toolkit for Bessel moment integrals, their exact moment
//! algebra, Apery-style continued fractions and integer relation detection.

pub mod contfrac;
pub mod error;
pub mod momentalg;
pub mod periods;
pub mod quadrature;
pub mod real;
pub mod relation;
pub mod specfun;

pub use error::{Error, Result};
pub use real::{BigReal, Precision};
