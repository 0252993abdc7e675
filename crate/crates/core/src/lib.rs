//! Contact process on randomly diluted graphs.
//!
//! The crate is split along the lines of the work it does:
//!
//! * [`graphgen`] builds path, square-lattice and Erdős–Rényi graphs and
//!   applies bond or site dilution with counter-based, seed-addressable
//!   randomness so that masks at different keep probabilities are nested.
//! * [`percolate`] is the structural side: cluster labeling, 1D active runs,
//!   exact and heuristic longest paths, crossings, planar duality and the
//!   strip construction of long paths.
//! * [`cpsim`] runs the continuous-time contact process (event driven and
//!   via the graphical construction) and the discrete oriented model.
//! * [`theory`] evaluates the closed forms and integral asymptotics.
//! * [`oracle`] holds exact brute-force baselines for small instances.
//! * [`stats`] has the small amount of statistics the checks need.

pub mod cpsim;
pub mod error;
pub mod graphgen;
pub mod oracle;
pub mod percolate;
pub mod rng;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};
