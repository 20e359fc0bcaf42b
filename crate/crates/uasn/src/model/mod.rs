//! Physical network model: nodes, link energies, rates, lifetimes.

mod energy;
mod lifetime;
mod node;
mod rate;

pub use energy::{thorp_absorption, thorp_db_per_km, EnergyModel, THORP_MIN_VALID_KHZ};
pub use lifetime::{drain_watts, network_lifetime, node_lifetime, node_lifetimes};
pub use node::{Deployment, Field, Node, NodeKind};
pub use rate::{validate_rate_array, ConstraintKind, RateArray, RateViolation};
