//! Node and network lifetimes under a fixed routing.
//!
//! A node drains at the sum of its transmit powers (one term per outgoing
//! link, distance dependent) plus receive power for everything it takes in.
//! Lifetime is residual energy over that drain; a node that neither sends
//! nor receives never dies and reports infinity. The network lives until
//! its first sensor or relay dies; the buoy is externally powered and is
//! excluded from the minimum.

use crate::error::{NodeId, Result};
use crate::model::energy::EnergyModel;
use crate::model::node::{Deployment, NodeKind};
use crate::model::rate::RateArray;

/// Powers are mW per bit/s while energies are joules, so drains convert to
/// watts before dividing.
const MW_PER_W: f64 = 1000.0;

/// Drain of node `i` in watts under `rate`.
pub fn drain_watts(
    i: NodeId,
    rate: &RateArray,
    deployment: &Deployment,
    model: &EnergyModel,
) -> f64 {
    let mut mw = 0.0;
    for j in 0..rate.len() {
        let r = rate.get(i, j);
        if r > 0.0 {
            mw += model.power(deployment.distance(i, j)) * r;
        }
    }
    let p_r = model.receive_power_per_bit();
    for k in 0..rate.len() {
        if deployment.kind(k) == NodeKind::SurfaceBuoy {
            continue;
        }
        let r = rate.get(k, i);
        if r > 0.0 {
            mw += p_r * r;
        }
    }
    mw / MW_PER_W
}

/// Seconds until node `i` runs flat; infinite when it carries no traffic.
pub fn node_lifetime(
    i: NodeId,
    rate: &RateArray,
    deployment: &Deployment,
    model: &EnergyModel,
) -> Result<f64> {
    let drain = drain_watts(i, rate, deployment, model);
    if drain == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(deployment.node(i).residual_energy / drain)
}

/// Minimum lifetime over all sensors and relays.
pub fn network_lifetime(rate: &RateArray, deployment: &Deployment, model: &EnergyModel) -> f64 {
    deployment
        .constrained_ids()
        .map(|i| node_lifetime(i, rate, deployment, model).unwrap_or(f64::INFINITY))
        .fold(f64::INFINITY, f64::min)
}

/// All node lifetimes, indexed by id. The buoy reports infinity.
pub fn node_lifetimes(
    rate: &RateArray,
    deployment: &Deployment,
    model: &EnergyModel,
) -> Vec<f64> {
    (0..deployment.len())
        .map(|i| {
            if deployment.kind(i) == NodeKind::SurfaceBuoy {
                f64::INFINITY
            } else {
                node_lifetime(i, rate, deployment, model).unwrap_or(f64::INFINITY)
            }
        })
        .collect()
}
