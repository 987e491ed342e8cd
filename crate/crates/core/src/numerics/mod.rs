//! Extended-precision numeric substrate.

pub mod erfc;
pub mod gamma;
pub mod hyp2f1;
pub mod poly;
pub mod quad;

pub use erfc::{erfc_complex, erfc_ref};
pub use gamma::{chi, gamma_complex, gamma_fn, pochhammer};
pub use hyp2f1::hyp2f1_half;
pub use poly::{poly_real_roots, poly_variation, RationalPoly};
pub use quad::{quad_interval, quad_piecewise, quad_semi_infinite, quad_semi_infinite_from, QuadResult, QuadValue};
