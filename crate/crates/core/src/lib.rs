//! Computations in the Fenchel–Nielsen coordinate space of marked convex
//! hyperbolic structures on infinite-type surfaces.
//!
//! - [`hyptrig`]: pants trigonometry (collar widths, orthodistances).
//! - [`rate`]: the symbolic rate-function algebra and certified tails.
//! - [`fnspace`]: lazy coordinate sequences and the product metric.
//! - [`flutes`]: completeness and end geometry of flute structures.
//! - [`paths`]: zig-zag, straight-line and peripheral scaling paths.
//! - [`mcg`]: mapping classes, the quasiconformal trichotomy, `D_r` subspaces.
//! - [`pantsgraph`]: dual graphs of pants decompositions and flute extraction.

pub mod error;
pub mod flutes;
pub mod fnspace;
pub mod hyptrig;
pub mod mcg;
pub mod pantsgraph;
pub mod paths;
pub mod rate;

pub use error::{Error, Result};
pub use fnspace::{finite_difference, fn_distance, Coord, CoordSeq, Family, Peripheral, Term, Topology, Truncated};
pub use hyptrig::{collar_width, orthodistance, orthodistance_bounds, pentagon_split, PantsGeom};
pub use rate::{RateFn, RateSum};
