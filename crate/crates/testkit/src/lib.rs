//! Reference computations for tests.
//!
//! Nothing here shares code with the `seesaw` crate: the quadrature and
//! rejection samplers are the independent side of every closed-form check.

pub mod quad;
pub mod rejection;
