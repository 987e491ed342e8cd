//! Parabolic cylinder functions U(a,z), V(a,z): asymptotic expansions with
//! computable remainder bounds, checked against an extended-precision oracle.

pub mod error;
pub mod integral;
pub mod numerics;
pub mod oracle;
pub mod poincare;
pub mod precision;
pub mod report;
pub mod tables;
pub mod uniform;
pub mod value;

pub use error::{PcfError, Result};
pub use precision::{BigComplex, BigReal, PrecisionContext};
