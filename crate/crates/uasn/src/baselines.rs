//! Comparison placement strategies.
//!
//! Both baselines run through the same deployment loop as the hull solver,
//! so skip semantics, helpfulness gates and logs are identical; only the
//! way a candidate relay position is proposed differs.
//!
//! `ra_run` scatters surface anchor points uniformly over the field disc
//! and only tunes each relay's depth, a proxy reconstruction of
//! random-deployment schemes. `lsrnp_run` confines each relay to the line
//! segment between the bottleneck and its farthest forwarding target, which
//! is exactly one edge of the hull the full solver searches; it can never
//! beat the hull optimum and meets it when there is a single target.

use crate::error::{Error, NodeId, Result};
use crate::geom::Point3;
use crate::model::{Deployment, EnergyModel, RateArray};
use crate::opt::golden_section_min;
use crate::orns::{
    deploy_loop, edge_candidate, DeployOutcome, Instance, LifetimeConstraint, OrnsSettings,
    PlacementSettings, Proposal, ProposeRelay, SkipPolicy, SolveStatus,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Builds the proposal for a concrete candidate position, or `None` when
/// the position violates range, separation or the lifetime condition.
fn proposal_at(
    constraint: &LifetimeConstraint,
    deployment: &Deployment,
    model: &EnergyModel,
    settings: &PlacementSettings,
    position: Point3,
) -> Option<Proposal> {
    let c = constraint.bottleneck;
    let d_c = position.distance(deployment.position(c));
    if d_c < settings.min_separation - 1e-9 || d_c > deployment.comm_range + 1e-9 {
        return None;
    }
    let mut neighbor_powers = Vec::with_capacity(constraint.neighbors.len());
    for &j in &constraint.neighbors {
        let d = position.distance(deployment.position(j));
        if d > deployment.comm_range + 1e-9 {
            return None;
        }
        neighbor_powers.push(model.power(d));
    }
    let link_power = model.power(d_c);
    if !constraint.satisfied(&neighbor_powers, link_power, settings.lifetime_rel_tol) {
        return None;
    }
    Some(Proposal {
        position,
        theta: None,
        link_power,
        tau_bottleneck: constraint.bottleneck_lifetime(link_power),
        tau_relay: constraint.relay_lifetime(&neighbor_powers),
    })
}

/// Random surface anchors with a per-relay depth search.
struct RandomAnchorProposer<'a> {
    anchors: Vec<(f64, f64)>,
    next: usize,
    depth: f64,
    model: &'a EnergyModel,
    settings: &'a PlacementSettings,
}

impl<'a> RandomAnchorProposer<'a> {
    fn new(
        deployment: &Deployment,
        model: &'a EnergyModel,
        settings: &'a PlacementSettings,
        budget: usize,
        seed: u64,
    ) -> Self {
        // All horizontal draws happen up front so the stream consumed per
        // run depends only on the budget.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let anchors = (0..budget)
            .map(|_| {
                let r = deployment.field.radius * rng.random::<f64>().sqrt();
                let phi = std::f64::consts::TAU * rng.random::<f64>();
                (r * phi.cos(), r * phi.sin())
            })
            .collect();
        RandomAnchorProposer {
            anchors,
            next: 0,
            depth: deployment.field.depth,
            model,
            settings,
        }
    }
}

impl ProposeRelay for RandomAnchorProposer<'_> {
    fn propose(
        &mut self,
        c: NodeId,
        rate: &RateArray,
        deployment: &Deployment,
    ) -> Result<Proposal> {
        let (x, y) = self.anchors[self.next.min(self.anchors.len() - 1)];
        self.next += 1;
        let constraint = LifetimeConstraint::build(
            c,
            self.settings.relay_energy,
            rate,
            deployment,
            self.model,
        )?;
        // Scan depth, then polish around the best feasible cell. The relay
        // and bottleneck lifetimes are the only ones a deployment changes,
        // so their minimum stands in for the network lifetime.
        let score = |z: f64| -> f64 {
            match proposal_at(&constraint, deployment, self.model, self.settings, Point3::new(x, y, z))
            {
                Some(p) => -p.tau_bottleneck.min(p.tau_relay),
                None => f64::INFINITY,
            }
        };
        const CELLS: usize = 128;
        let dz = self.depth / CELLS as f64;
        let mut best: Option<(f64, f64)> = None;
        for i in 0..=CELLS {
            let z = -(i as f64) * dz;
            let s = score(z);
            if s.is_finite() && best.map_or(true, |(bs, _)| s < bs) {
                best = Some((s, z));
            }
        }
        let Some((_, z0)) = best else {
            return Err(Error::Infeasible(format!(
                "anchor ({x:.1}, {y:.1}) cannot host a relay for node {c} at any depth"
            )));
        };
        let (z, _) = golden_section_min(
            score,
            (z0 - dz).max(-self.depth),
            (z0 + dz).min(0.0),
            1e-6,
            120,
        );
        let refined = proposal_at(
            &constraint,
            deployment,
            self.model,
            self.settings,
            Point3::new(x, y, z),
        );
        let fallback = || {
            proposal_at(
                &constraint,
                deployment,
                self.model,
                self.settings,
                Point3::new(x, y, z0),
            )
        };
        refined.or_else(fallback).ok_or_else(|| {
            Error::Infeasible(format!("depth refinement lost feasibility at anchor for node {c}"))
        })
    }

    fn skip_policy(&self) -> SkipPolicy {
        // The next iteration draws a fresh anchor, so a failed node may
        // still be served later.
        SkipPolicy::Retry
    }
}

/// Deploys up to `budget` relays at random surface anchors, tuning depth
/// only. Draws are pinned by `seed`.
pub fn ra_run(
    deployment: &Deployment,
    rate: &RateArray,
    model: &EnergyModel,
    budget: usize,
    settings: &OrnsSettings,
    seed: u64,
) -> Result<DeployOutcome> {
    let mut proposer =
        RandomAnchorProposer::new(deployment, model, &settings.placement, budget, seed);
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

/// Relay confined to the segment from the bottleneck to its farthest
/// forwarding target.
struct SegmentProposer<'a> {
    model: &'a EnergyModel,
    settings: &'a PlacementSettings,
}

impl ProposeRelay for SegmentProposer<'_> {
    fn propose(
        &mut self,
        c: NodeId,
        rate: &RateArray,
        deployment: &Deployment,
    ) -> Result<Proposal> {
        let inst = Instance::new(c, rate, deployment, self.model, self.settings)?;
        // Farthest target, ties to the lowest id (anchor order is ascending).
        let c_pos = deployment.position(c);
        let mut far = 0usize;
        let mut far_d = -1.0;
        for (k, &j) in inst.constraint.neighbors.iter().enumerate() {
            let d = c_pos.distance(deployment.position(j));
            if d > far_d {
                far_d = d;
                far = k;
            }
        }
        // Outermost feasible point of the segment, shrunk back toward the
        // bottleneck; the scan and the shrink share one ray, so this lands
        // on the lower feasibility boundary.
        let Some(w) = edge_candidate(&inst, far) else {
            return Err(Error::Infeasible(format!(
                "no point of the segment to node {} can host a relay for node {c}",
                inst.constraint.neighbors[far]
            )));
        };
        let p = inst.realize(w, SolveStatus::Converged);
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

/// Deploys up to `budget` relays on bottleneck-to-farthest-target segments.
pub fn lsrnp_run(
    deployment: &Deployment,
    rate: &RateArray,
    model: &EnergyModel,
    budget: usize,
    settings: &OrnsSettings,
) -> Result<DeployOutcome> {
    let mut proposer = SegmentProposer {
        model,
        settings: &settings.placement,
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
