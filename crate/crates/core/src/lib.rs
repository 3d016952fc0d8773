//! Simulation and analysis toolkit for the `d`-dimensional
//! nucleation-and-growth lattice model.
//!
//! Empty sites of `Z^d` become occupied, irreversibly, at a rate `c(n)`
//! that depends only on the number `n` of occupied nearest neighbors, with
//! `c(n) = exp(-β Γ_{d-n})` for `n < d` and `c(n) = 1` above. The crate
//! provides
//!
//! * [`lattice`]: boxes, configurations, clusters, serialization;
//! * [`model`]: parameters, rates and the critical constants `κ_i`, `L_i`;
//! * [`randomness`]: the seeded per-site clocks that couple all processes;
//! * [`dynamics`]: exact and fast engines, boundary conditions, coupled and
//!   multilayer runs;
//! * [`morphology`]: bootstrap closure, dilation, erosion, internally
//!   spanned boxes;
//! * [`analysis`]: projections, containment, ordering audits, statistics;
//! * [`harness`]: seeded multi-trial experiments and exponent fits.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod model;
pub mod morphology;
pub mod randomness;

pub use error::{Error, Result};
