//! Globally optimal path planning over inclined terrain.
//!
//! This crate solves the static Hamilton-Jacobi-Bellman equation on a regular
//! hexagonal grid with a bi-directional ordered upwind method, driven by a
//! continuous anisotropic cost model for slopes. The cost of moving one meter
//! depends on the steepness of the ground and on the heading of the vehicle
//! relative to the downhill direction: gravity assists descent, resists
//! ascent, slippage inflates both, and an optional roll weight penalizes
//! side-slope traverses.
//!
//! The pipeline is:
//!
//! 1. [`raster`] — load a square elevation raster (ESRI ASCII grid or CSV
//!    lattice) and optionally smooth it with a mean filter.
//! 2. [`terrain`] — resample the raster onto a hexagonal node lattice and fit
//!    per-node steepness and aspect.
//! 3. [`cost`] — build the directional cost model: four anchor costs per
//!    steepness, interpolated over all headings by a displaced ellipse.
//! 4. [`solver`] — propagate total-cost fields from start and goal until the
//!    fronts meet, then trace the path through the characteristic directions.
//! 5. [`metrics`] — profile the path (orientation angles, cost per meter,
//!    roll exceedance) and compare against the isotropic-equivalent plan.
//!
//! [`oracle`] holds brute-force references (discrete shortest path, eikonal
//! solver, dense extremizers) used to validate the solver, and [`synth`]
//! generates the deterministic synthetic terrains used by tests and demos.

pub mod config;
pub mod cost;
pub mod error;
pub mod geom;
pub mod hex;
pub mod metrics;
pub mod oracle;
pub mod raster;
pub mod solver;
pub mod synth;
pub mod terrain;

pub use error::Error;
pub use geom::Vec2;
pub use hex::HexIndex;

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
