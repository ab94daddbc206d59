//! Deterministic 2D multi-target tracking simulator and coverage planner
//! for swarms of dual-zone mobile sensors.
//!
//! Each sensor has a primary zone (radius `r`) in which it senses targets
//! and a secondary zone (radius `R`) in which it senses other sensors. The
//! planner sizes a fleet for a rectangular field, classifies the deployment
//! into one of four sufficiency cases, and lays the fleet out; the engine
//! then drives a flock of targets across the field while sensors track them
//! and hand tracks to each other as zonal strengths shift.
//!
//! Modules map onto the moving parts:
//!
//! * [`geometry`] — points, rectangles, covering lattices, Monte Carlo
//!   coverage estimation.
//! * [`planner`] — fleet sizing (`n`), the K value, case classification,
//!   area/radius sweeps.
//! * [`targets`] — flocking target motion (cohesion, alignment, separation,
//!   drift).
//! * [`network`] — sensor deployment layouts and the secondary-zone
//!   neighbour graph.
//! * [`tracking`] — zonal strength, the handoff trigger, track records.
//! * [`engine`] — the seeded step loop, metrics, CSV output.

pub mod engine;
pub mod error;
pub mod geometry;
pub mod network;
pub mod planner;
pub mod targets;
pub mod tracking;

pub use error::{Error, Result};
