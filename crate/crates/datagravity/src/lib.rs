//! Energy economics of separating computation from data.
//!
//! Data movement across an interconnect of length `d` costs
//! `alpha * N * d^beta` joules for `N` bits, with the distance exponent
//! `beta` between 1 and 3 depending on the technology. Once movement
//! dominates compute energy, where an operation runs relative to its
//! operands becomes the first-order design question. This crate models
//! that trade-off:
//!
//! - [`energy`]: the power-law movement energy law, per-technology
//!   profiles, and the movement/compute energy ratio `G_d`.
//! - [`gravity`]: information mass (entropy rate) of data objects and
//!   the attraction field they exert on compute placement.
//! - [`advantage`]: the colocation energy-advantage factor, its lower
//!   bound `G_d^((beta-1)/2)`, and numerical verification over
//!   parameter grids.
//! - [`placement`]: continuous and slot-based optimizers that position
//!   compute kernels to minimize total movement energy.
//! - [`catalog`]: published movement/compute energy measurements from
//!   45 nm to 7 nm silicon and PIM hardware, with derived `G_d` values
//!   checked against the figures reported for them.
//! - [`scenario`]: the TOML scenario file format shared by the CLI and
//!   the demo.
//!
//! All energies are joules and all distances meters internally;
//! picojoules appear only at I/O boundaries.

pub mod advantage;
pub mod catalog;
pub mod energy;
mod error;
pub mod geom;
pub mod gravity;
pub mod placement;
pub mod scenario;

pub use error::Error;
pub use geom::{AxisBox, Vec3};

/// Crate result alias.
pub type Result<T> = std::result::Result<T, Error>;
