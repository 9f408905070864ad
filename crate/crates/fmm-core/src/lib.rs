//! Exact and floating-point laboratory for 2×2-block fast matrix multiplication.

pub mod bench;
pub mod coeff;
pub mod error;
pub mod growth;
pub mod hm;
pub mod isotropy;
pub mod matrix;
pub mod orbit;
pub mod recursion;
pub mod slp;

pub use coeff::{Coefficient, Rational};
pub use error::{Error, Result};
pub use hm::{catalog, HMRep, HMRepF};
pub use matrix::{MatrixF, MatrixQ};
