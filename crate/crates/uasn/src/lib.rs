//! Relay deployment and lifetime optimization for underwater acoustic
//! sensor networks.
//!
//! A field of battery-powered sensors on the seabed side routes traffic to a
//! surface buoy over acoustic links. Links get expensive fast with distance,
//! so the nodes that forward the most die first and take the network down
//! with them. This crate models that energy geometry and places a budget of
//! relays to push the first death as far out as possible, then prunes the
//! relays that the lifetime target does not actually need.
//!
//! Module layout:
//!
//! - [`model`]: nodes, Thorp-based link energies, rate matrices, lifetimes
//! - [`routing`]: initial cheapest-path routing, reroutes through relays,
//!   relay splice-out
//! - [`orns`]: iterative relay placement for the current bottleneck node
//! - [`baselines`]: random-position and line-segment placement baselines
//! - [`rnmi`]: relay subset selection against a lifetime floor
//! - [`harness`]: deployment generation, experiment sweeps, metrics
//! - [`io`]: file formats (deployment JSON, rate CSV, placement JSONL,
//!   selection report JSON)
//!
//! The `examples/` directory demonstrates each capability end to end; the
//! `uasn` binary wraps the same calls behind subcommands for scripting.

pub mod baselines;
pub mod config;
pub mod error;
pub mod geom;
pub mod harness;
pub mod io;
pub mod model;
pub mod opt;
pub mod orns;
pub mod rnmi;
pub mod routing;

pub use config::SimConfig;
pub use error::{Error, NodeId, Result};
