//! Relay-outlives-bottleneck condition in linear form.
//!
//! After a reroute the bottleneck `c` only transmits its aggregate outflow
//! `F` to the relay, and the relay retransmits the original per-neighbor
//! flows. Writing the per-link transmit powers as unknowns, the requirement
//! tau_relay >= tau_c collapses to one linear inequality
//!
//! ```text
//! sum_j a_j p_rj - (eps_r / eps_c) F p_cr <= gamma0
//! gamma0 = (eps_r / eps_c) p_recv In_c - p_recv F
//! ```
//!
//! with a_j the flow relayed to neighbor j and In_c the traffic c receives.
//! The left side minus gamma0 equals (eps_c E_r - eps_r E_c) / eps_c, E
//! being the total drains, so the inequality and the lifetime comparison
//! agree in sign exactly.

use crate::error::{Error, NodeId, Result};
use crate::model::{Deployment, EnergyModel, NodeKind, RateArray};
use crate::routing::upper_neighbors;

#[derive(Debug, Clone)]
pub struct LifetimeConstraint {
    pub bottleneck: NodeId,
    /// Upper neighbors of the bottleneck, ascending.
    pub neighbors: Vec<NodeId>,
    /// Flow relayed onward to each neighbor, bit/s.
    pub flows: Vec<f64>,
    /// Aggregate outflow F, bit/s; equals the new rate over c -> relay.
    pub total_flow: f64,
    /// Traffic received by the bottleneck from sensors and relays, bit/s.
    pub inflow: f64,
    /// Residual energy of the bottleneck, J.
    pub bottleneck_energy: f64,
    /// Battery of the relay to be placed, J.
    pub relay_energy: f64,
    /// Receive power, mW per bit/s.
    recv_power: f64,
    /// Constant right-hand side of the linear constraint.
    pub gamma0: f64,
}

impl LifetimeConstraint {
    pub fn build(
        c: NodeId,
        relay_energy: f64,
        rate: &RateArray,
        deployment: &Deployment,
        model: &EnergyModel,
    ) -> Result<Self> {
        if deployment.kind(c) == NodeKind::SurfaceBuoy {
            return Err(Error::Domain(
                "the surface buoy cannot be a bottleneck".into(),
            ));
        }
        let eps_c = deployment.node(c).residual_energy;
        if !(eps_c > 0.0) {
            return Err(Error::Infeasible(format!(
                "node {c} has no residual energy left"
            )));
        }
        if !(relay_energy > 0.0) {
            return Err(Error::Domain(format!(
                "relay energy must be positive, got {relay_energy}"
            )));
        }
        let neighbors = upper_neighbors(c, rate);
        if neighbors.is_empty() {
            return Err(Error::Infeasible(format!(
                "node {c} has no outgoing flow; a relay cannot relieve it"
            )));
        }
        let flows: Vec<f64> = neighbors.iter().map(|&j| rate.get(c, j)).collect();
        let total_flow: f64 = flows.iter().sum();
        let inflow: f64 = (0..rate.len())
            .filter(|&k| deployment.kind(k) != NodeKind::SurfaceBuoy)
            .map(|k| rate.get(k, c))
            .sum();
        let recv = model.receive_power_per_bit();
        let ratio = relay_energy / eps_c;
        let gamma0 = ratio * recv * inflow - recv * total_flow;
        Ok(LifetimeConstraint {
            bottleneck: c,
            neighbors,
            flows,
            total_flow,
            inflow,
            bottleneck_energy: eps_c,
            relay_energy,
            recv_power: recv,
            gamma0,
        })
    }

    /// Left side minus gamma0; feasible placements make this non-positive.
    pub fn linear_form(&self, neighbor_powers: &[f64], p_cr: f64) -> f64 {
        debug_assert_eq!(neighbor_powers.len(), self.flows.len());
        let relayed: f64 = self
            .flows
            .iter()
            .zip(neighbor_powers)
            .map(|(a, p)| a * p)
            .sum();
        let ratio = self.relay_energy / self.bottleneck_energy;
        relayed - ratio * self.total_flow * p_cr - self.gamma0
    }

    /// Bottleneck drain after the reroute, mW.
    pub fn bottleneck_drain_mw(&self, p_cr: f64) -> f64 {
        self.total_flow * p_cr + self.recv_power * self.inflow
    }

    /// Relay drain after the reroute, mW.
    pub fn relay_drain_mw(&self, neighbor_powers: &[f64]) -> f64 {
        let relayed: f64 = self
            .flows
            .iter()
            .zip(neighbor_powers)
            .map(|(a, p)| a * p)
            .sum();
        relayed + self.recv_power * self.total_flow
    }

    pub fn bottleneck_lifetime(&self, p_cr: f64) -> f64 {
        self.bottleneck_energy / (self.bottleneck_drain_mw(p_cr) * 1e-3)
    }

    pub fn relay_lifetime(&self, neighbor_powers: &[f64]) -> f64 {
        self.relay_energy / (self.relay_drain_mw(neighbor_powers) * 1e-3)
    }

    /// True when the relay outlives the bottleneck, with `rel_tol` relative
    /// slack on the drain comparison.
    pub fn satisfied(&self, neighbor_powers: &[f64], p_cr: f64, rel_tol: f64) -> bool {
        let scale =
            self.relay_energy / self.bottleneck_energy * self.bottleneck_drain_mw(p_cr);
        self.linear_form(neighbor_powers, p_cr) <= rel_tol * scale
    }
}
