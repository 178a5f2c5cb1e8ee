//! Momentum-resolved pseudospin entanglement of two Dirac quasiparticles in
//! separate honeycomb layers coupled through a planar cavity.
//!
//! The pipeline for one parameter point is
//! [`kernel`] (delta-reduced photon-exchange integrals per band channel) ->
//! [`bse`] (dressed-propagator solve and coherent channel sum) ->
//! [`entanglement`] (reduced density matrix and von Neumann entropy).
//! [`sweep`] evaluates grids of such points in parallel and writes CSV.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bse;
pub mod cavity;
pub mod config;
pub mod entanglement;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod quadrature;
pub mod spinors;
pub mod sweep;
pub mod units;
pub mod validate;

pub use config::{load_config, RunConfig};
pub use entanglement::{entropy_at, LogBase, PointResult};
pub use error::{Error, Result};
