//! Long-run performance of A/B-tested innovations whose effects spill over
//! onto unmeasured dimensions.
//!
//! The crate evaluates closed-form long-run performance under four effect
//! distributions, decides whether a zero hurdle produces a net-negative
//! ("seesaw") outcome, computes optimal hurdle rates, and checks all of it
//! against a seeded Monte Carlo simulation of the adoption process.

pub mod analysis;
pub mod closed_form;
mod error;
pub mod estimate;
pub mod kernels;
pub mod models;
pub mod optimize;
pub mod simulate;
mod special;

pub use error::{Error, Result};
pub use models::{
    AsymmetricNormalModel, EquicorrelatedModel, HurdlePolicy, Model, Regime, RegimeModel,
    StudentTModel, SymmetricNormalModel, Validated, ValidationMode, ValidationReport,
};
