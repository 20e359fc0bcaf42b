//! Iterative relay deployment against the current network bottleneck.
//!
//! Each round finds the shortest-lived node, solves a single-relay
//! placement inside the hull of that node and its forwarding targets, and
//! commits the relay only when it actually helps: the bottleneck's own
//! lifetime must strictly rise and the network lifetime must not fall.
//! A node whose placement cannot help is skipped permanently, which is
//! sound because later reroutes never touch a non-bottleneck node's flows,
//! energies or neighbor geometry. Unconditional deployment (no skip rule)
//! remains available as a setting for comparison runs.

mod constraint;
mod hull;
mod oracle;
mod solver;

pub use constraint::LifetimeConstraint;
pub use hull::Hull;
pub use oracle::{grid_oracle, grid_point_count, GRID_POINT_CAP};
pub use solver::{solve_placement, Placement, PlacementSettings, SolveStatus};

pub(crate) use solver::{edge_candidate, Instance};

use crate::config::SimConfig;
use crate::error::{Error, NodeId, Result};
use crate::geom::Point3;
use crate::model::{
    network_lifetime, node_lifetime, node_lifetimes, Deployment, EnergyModel, RateArray,
};
use crate::routing::{reroute_through_relay, upper_neighbors};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Shortest-lived sensor or relay under `rate`, ties to the lowest id.
/// `None` when every node is idle (infinite lifetime).
pub fn bottleneck_node(
    rate: &RateArray,
    deployment: &Deployment,
    model: &EnergyModel,
) -> Option<NodeId> {
    bottleneck_excluding(rate, deployment, model, &HashSet::new())
}

fn bottleneck_excluding(
    rate: &RateArray,
    deployment: &Deployment,
    model: &EnergyModel,
    exclude: &HashSet<NodeId>,
) -> Option<NodeId> {
    let mut best: Option<(f64, NodeId)> = None;
    for i in deployment.constrained_ids() {
        if exclude.contains(&i) {
            continue;
        }
        let t = node_lifetime(i, rate, deployment, model).unwrap_or(f64::INFINITY);
        if !t.is_finite() {
            continue;
        }
        if best.map_or(true, |(bt, _)| t < bt) {
            best = Some((t, i));
        }
    }
    best.map(|(_, i)| i)
}

/// One line of the deployment log, serialized as JSONL.
///
/// Deployed relays get ids in record order: the k-th non-skipped record
/// corresponds to node `base + k` where `base` is the node count before the
/// run started.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlacementRecord {
    pub iter: usize,
    pub critical_node: NodeId,
    pub neighbors: Vec<NodeId>,
    pub theta: Option<Vec<f64>>,
    pub position: Option<Point3>,
    /// Bottleneck-to-relay transmit power, mW per bit/s.
    pub p_ciri: Option<f64>,
    pub tau_c: Option<f64>,
    pub tau_r: Option<f64>,
    pub lifetime_after: f64,
    pub skipped: bool,
    pub reason: Option<String>,
}

#[derive(Debug, Clone)]
pub struct DeployOutcome {
    pub deployment: Deployment,
    pub rate: RateArray,
    pub records: Vec<PlacementRecord>,
    pub network_lifetime: f64,
}

impl DeployOutcome {
    pub fn deployed_relay_ids(&self) -> Vec<NodeId> {
        self.deployment.relay_ids().collect()
    }
}

/// A concrete relay position plus the powers and lifetimes it implies.
pub(crate) struct Proposal {
    pub position: Point3,
    pub theta: Option<Vec<f64>>,
    pub link_power: f64,
    pub tau_bottleneck: f64,
    pub tau_relay: f64,
}

/// Whether a failed proposal for a node rules that node out for good.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SkipPolicy {
    /// Deterministic proposers: the same bottleneck would fail identically.
    Persistent,
    /// Randomized proposers: a later draw may still serve this node.
    Retry,
}

pub(crate) trait ProposeRelay {
    fn propose(
        &mut self,
        c: NodeId,
        rate: &RateArray,
        deployment: &Deployment,
    ) -> Result<Proposal>;

    fn skip_policy(&self) -> SkipPolicy;
}

#[derive(Debug, Clone)]
pub struct OrnsSettings {
    pub placement: PlacementSettings,
    /// Deploy only when the bottleneck improves and the network does not
    /// get worse; off means deploy whenever a feasible placement exists.
    pub skip_unhelpful: bool,
}

impl Default for OrnsSettings {
    fn default() -> Self {
        OrnsSettings {
            placement: PlacementSettings::default(),
            skip_unhelpful: true,
        }
    }
}

impl OrnsSettings {
    pub fn from_config(cfg: &SimConfig) -> Self {
        OrnsSettings {
            placement: PlacementSettings::from_config(cfg),
            skip_unhelpful: cfg.solver.skip_unhelpful,
        }
    }
}

struct SolverProposer<'a> {
    settings: &'a PlacementSettings,
    model: &'a EnergyModel,
}

impl ProposeRelay for SolverProposer<'_> {
    fn propose(
        &mut self,
        c: NodeId,
        rate: &RateArray,
        deployment: &Deployment,
    ) -> Result<Proposal> {
        let p = solve_placement(c, rate, deployment, self.model, self.settings)?;
        Ok(Proposal {
            position: p.position,
            theta: Some(p.weights),
            link_power: p.link_power,
            tau_bottleneck: p.tau_bottleneck,
            tau_relay: p.tau_relay,
        })
    }

    fn skip_policy(&self) -> SkipPolicy {
        SkipPolicy::Persistent
    }
}

/// Deploys up to `budget` relays with the hull solver as the proposer.
pub fn orns_run(
    deployment: &Deployment,
    rate: &RateArray,
    model: &EnergyModel,
    budget: usize,
    settings: &OrnsSettings,
) -> Result<DeployOutcome> {
    let mut proposer = SolverProposer {
        settings: &settings.placement,
        model,
    };
    deploy_loop(
        deployment,
        rate,
        model,
        budget,
        &mut proposer,
        settings.skip_unhelpful,
        settings.placement.relay_energy,
    )
}

/// Shared deployment loop: bottleneck selection, tentative reroute, the
/// helpfulness gate, and record keeping. All placement strategies go
/// through here so their logs and skip semantics match.
pub(crate) fn deploy_loop(
    deployment: &Deployment,
    rate: &RateArray,
    model: &EnergyModel,
    budget: usize,
    proposer: &mut dyn ProposeRelay,
    skip_unhelpful: bool,
    relay_energy: f64,
) -> Result<DeployOutcome> {
    if rate.len() != deployment.len() {
        return Err(Error::InvalidRateArray(format!(
            "rate array of {} nodes does not match deployment of {}",
            rate.len(),
            deployment.len()
        )));
    }
    let mut deployment = deployment.clone();
    let mut rate = rate.clone();
    let mut records = Vec::with_capacity(budget);
    let mut ruled_out: HashSet<NodeId> = HashSet::new();
    let persistent = proposer.skip_policy() == SkipPolicy::Persistent;

    for iter in 0..budget {
        let lifetimes = node_lifetimes(&rate, &deployment, model);
        let net_before = deployment
            .constrained_ids()
            .map(|i| lifetimes[i])
            .fold(f64::INFINITY, f64::min);
        let Some(c) = bottleneck_excluding(&rate, &deployment, model, &ruled_out) else {
            break;
        };
        let neighbors = upper_neighbors(c, &rate);

        let skip = |records: &mut Vec<PlacementRecord>,
                    ruled_out: &mut HashSet<NodeId>,
                    reason: String| {
            records.push(PlacementRecord {
                iter,
                critical_node: c,
                neighbors: neighbors.clone(),
                theta: None,
                position: None,
                p_ciri: None,
                tau_c: None,
                tau_r: None,
                lifetime_after: net_before,
                skipped: true,
                reason: Some(reason),
            });
            if persistent {
                ruled_out.insert(c);
            }
        };

        let proposal = match proposer.propose(c, &rate, &deployment) {
            Ok(p) => p,
            Err(Error::Infeasible(msg)) => {
                skip(&mut records, &mut ruled_out, msg);
                continue;
            }
            Err(e) => return Err(e),
        };

        let mut next_deployment = deployment.clone();
        let r = next_deployment.push_relay(proposal.position, relay_energy)?;
        let next_rate = reroute_through_relay(&rate.expanded(1), c, r, &next_deployment)?;
        let net_after = network_lifetime(&next_rate, &next_deployment, model);
        let tau_c_new = node_lifetime(c, &next_rate, &next_deployment, model)?;

        if skip_unhelpful {
            if !(tau_c_new > lifetimes[c]) {
                skip(
                    &mut records,
                    &mut ruled_out,
                    format!("relay cannot raise the lifetime of node {c}"),
                );
                continue;
            }
            if net_after < net_before * (1.0 - 1e-12) {
                skip(
                    &mut records,
                    &mut ruled_out,
                    "deployment would lower the network lifetime".to_string(),
                );
                continue;
            }
        }

        deployment = next_deployment;
        rate = next_rate;
        records.push(PlacementRecord {
            iter,
            critical_node: c,
            neighbors,
            theta: proposal.theta,
            position: Some(proposal.position),
            p_ciri: Some(proposal.link_power),
            tau_c: Some(proposal.tau_bottleneck),
            tau_r: Some(proposal.tau_relay),
            lifetime_after: net_after,
            skipped: false,
            reason: None,
        });
    }

    let final_lifetime = network_lifetime(&rate, &deployment, model);
    Ok(DeployOutcome {
        deployment,
        rate,
        records,
        network_lifetime: final_lifetime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_rate_array, Field, Node, NodeKind};
    use crate::routing::{build_initial_rate_array, RoutingPolicy};

    fn mk(id: NodeId, kind: NodeKind, x: f64, z: f64, g: f64, e: f64) -> Node {
        Node {
            id,
            kind,
            position: Point3::new(x, 0.0, z),
            residual_energy: e,
            primary_energy: 4.0e5,
            generation_rate: g,
        }
    }

    fn chain() -> (Deployment, RateArray, EnergyModel) {
        let d = Deployment::new(
            vec![
                mk(0, NodeKind::SurfaceBuoy, 0.0, 0.0, 0.0, 1.0),
                mk(1, NodeKind::Sensor, 0.0, -400.0, 100.0, 1.0e5),
                mk(2, NodeKind::Sensor, 0.0, -800.0, 150.0, 4.0e5),
            ],
            500.0,
            Field {
                radius: 1000.0,
                depth: 2000.0,
            },
        )
        .unwrap();
        let m = EnergyModel::new(1.0, 1.0, 87.0, 1.0, 10_000.0).unwrap();
        let r = build_initial_rate_array(&d, &m, RoutingPolicy::MinEnergyPath).unwrap();
        (d, r, m)
    }

    #[test]
    fn bottleneck_is_the_weak_forwarder() {
        let (d, r, m) = chain();
        assert_eq!(bottleneck_node(&r, &d, &m), Some(1));
    }

    #[test]
    fn run_deploys_and_lifts_lifetime() {
        let (d, r, m) = chain();
        let before = network_lifetime(&r, &d, &m);
        let out = orns_run(&d, &r, &m, 2, &OrnsSettings::default()).unwrap();
        assert!(out.network_lifetime > before, "lifetime must improve");
        let deployed: Vec<_> = out.records.iter().filter(|x| !x.skipped).collect();
        assert!(!deployed.is_empty());
        assert_eq!(out.deployment.len(), 3 + deployed.len());
        // The rerouted array stays a valid routing.
        let v = validate_rate_array(&out.rate, &out.deployment, &m, 1e-6).unwrap();
        assert!(v.is_empty(), "violations after deployment: {v:?}");
    }

    #[test]
    fn lifetime_never_decreases_across_deployments() {
        let (d, r, m) = chain();
        let before = network_lifetime(&r, &d, &m);
        let out = orns_run(&d, &r, &m, 4, &OrnsSettings::default()).unwrap();
        let mut last = before;
        for rec in &out.records {
            assert!(
                rec.lifetime_after >= last * (1.0 - 1e-12),
                "iteration {} dropped lifetime from {last} to {}",
                rec.iter,
                rec.lifetime_after
            );
            last = rec.lifetime_after;
        }
    }

    #[test]
    fn skipped_nodes_are_not_retried() {
        let (d, r, m) = chain();
        // A hopeless relay battery makes every placement infeasible.
        let settings = OrnsSettings {
            placement: PlacementSettings {
                relay_energy: 1e-9,
                ..PlacementSettings::default()
            },
            ..OrnsSettings::default()
        };
        let out = orns_run(&d, &r, &m, 4, &settings).unwrap();
        assert!(out.records.iter().all(|x| x.skipped));
        let mut seen = HashSet::new();
        for rec in &out.records {
            assert!(
                seen.insert(rec.critical_node),
                "node {} was retried after a skip",
                rec.critical_node
            );
        }
        assert_eq!(out.deployment.len(), 3);
    }

    #[test]
    fn records_follow_the_log_schema() {
        let (d, r, m) = chain();
        let out = orns_run(&d, &r, &m, 1, &OrnsSettings::default()).unwrap();
        let rec = &out.records[0];
        assert!(!rec.skipped);
        assert_eq!(rec.critical_node, 1);
        assert_eq!(rec.neighbors, vec![0]);
        let theta = rec.theta.as_ref().unwrap();
        assert_eq!(theta.len(), 2);
        assert!(rec.p_ciri.unwrap() > 0.0);
        assert!(rec.tau_r.unwrap() >= rec.tau_c.unwrap() * (1.0 - 2e-6));
    }
}
