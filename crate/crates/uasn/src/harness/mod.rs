//! Scenario generation, batch experiments and evaluation metrics.
//!
//! A scenario fixes the sensor count, the relay budget as a fraction of it,
//! how depleted the initially critical node starts out, the placement
//! method and whether selection prunes the result. Each seed generates a
//! fresh deployment, routes it, deploys relays, optionally selects, then
//! simulates the constant-rate drain up to a horizon to snapshot residual
//! energies. Seeds run in parallel but the report order and content depend
//! only on (config, seed list).

pub mod stats;

use crate::baselines::{lsrnp_run, ra_run};
use crate::config::SimConfig;
use crate::error::{Error, NodeId, Result};
use crate::geom::Point3;
use crate::model::{
    drain_watts, network_lifetime, Deployment, EnergyModel, Field, Node, NodeKind, RateArray,
};
use crate::orns::{bottleneck_node, orns_run, DeployOutcome, OrnsSettings};
use crate::rnmi::{select_relays, SelectionProblem, SelectionSettings};
use crate::routing::{build_initial_rate_array, RoutingPolicy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// The four studied parameter combinations: how much battery the critical
/// node starts with (residual factor) and how many relays the budget allows
/// relative to the sensor count (relay ratio).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    A,
    B,
    C,
    D,
}

impl Case {
    pub const ALL: [Case; 4] = [Case::A, Case::B, Case::C, Case::D];

    /// Fraction of a full battery the initially critical node keeps.
    pub fn residual_factor(self) -> f64 {
        match self {
            Case::B => 0.75,
            _ => 0.25,
        }
    }

    /// Relay budget over sensor count.
    pub fn relay_ratio(self) -> f64 {
        match self {
            Case::A | Case::B => 0.3,
            Case::C => 0.6,
            Case::D => 0.9,
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::A => "A",
            Case::B => "B",
            Case::C => "C",
            Case::D => "D",
        })
    }
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(Case::A),
            "B" => Ok(Case::B),
            "C" => Ok(Case::C),
            "D" => Ok(Case::D),
            other => Err(Error::Config(format!(
                "unknown case {other:?}; expected A, B, C or D"
            ))),
        }
    }
}

/// Placement strategy under evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Orns,
    Ra,
    Lsrnp,
    NoRelay,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Orns, Method::Ra, Method::Lsrnp, Method::NoRelay];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Orns => "orns",
            Method::Ra => "ra",
            Method::Lsrnp => "lsrnp",
            Method::NoRelay => "norelay",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "orns" => Ok(Method::Orns),
            "ra" => Ok(Method::Ra),
            "lsrnp" => Ok(Method::Lsrnp),
            "norelay" | "none" => Ok(Method::NoRelay),
            other => Err(Error::Config(format!(
                "unknown method {other:?}; expected orns, ra, lsrnp or norelay"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub case: Case,
    /// Sensor count.
    pub n: usize,
    pub method: Method,
    /// Whether keep-or-drop selection prunes the deployed relays.
    pub selection: bool,
    pub seeds: Vec<u64>,
}

impl Scenario {
    /// Relay budget: the case's ratio of the sensor count, rounded.
    pub fn relay_budget(&self) -> usize {
        (self.case.relay_ratio() * self.n as f64).round() as usize
    }
}

/// Draws a connected deployment: sensors uniform in the cylinder, integer
/// generation rates, full batteries except the initially critical node,
/// which keeps `rf` of a full charge. Returns the deployment together with
/// its initial routing. Redraws on disconnection or saturation, up to the
/// configured attempt budget; everything is pinned by `seed`.
pub fn generate_deployment(
    cfg: &SimConfig,
    n: usize,
    rf: f64,
    seed: u64,
) -> Result<(Deployment, RateArray)> {
    if n == 0 {
        return Err(Error::Config("a deployment needs at least one sensor".into()));
    }
    if !(rf > 0.0 && rf <= 1.0) {
        return Err(Error::Config(format!(
            "residual factor must lie in (0, 1], got {rf}"
        )));
    }
    let model = EnergyModel::from_config(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attempts = cfg.max_generation_attempts.max(1);
    for _ in 0..attempts {
        let mut nodes = Vec::with_capacity(n + 1);
        nodes.push(Node {
            id: 0,
            kind: NodeKind::SurfaceBuoy,
            position: Point3::ORIGIN,
            residual_energy: cfg.eps_p_j,
            primary_energy: cfg.eps_p_j,
            generation_rate: 0.0,
        });
        for id in 1..=n {
            let r = cfg.r_s_m * rng.random::<f64>().sqrt();
            let phi = std::f64::consts::TAU * rng.random::<f64>();
            let z = -cfg.h_s * rng.random::<f64>();
            let g = rng.random_range(cfg.g_min..=cfg.g_max);
            nodes.push(Node {
                id,
                kind: NodeKind::Sensor,
                position: Point3::new(r * phi.cos(), r * phi.sin(), z),
                residual_energy: cfg.eps_p_j,
                primary_energy: cfg.eps_p_j,
                generation_rate: g as f64,
            });
        }
        let mut deployment = Deployment::new(
            nodes,
            cfg.c_r,
            Field {
                radius: cfg.r_s_m,
                depth: cfg.h_s,
            },
        )?;
        match build_initial_rate_array(&deployment, &model, RoutingPolicy::MinEnergyPath) {
            Ok(rate) => {
                // Every sensor generates, so a critical node always exists.
                let c = bottleneck_node(&rate, &deployment, &model)
                    .expect("positive generation rates leave no node idle");
                deployment.set_residual_energy(c, rf * cfg.eps_p_j)?;
                return Ok((deployment, rate));
            }
            Err(Error::Disconnected { .. }) | Err(Error::CapacitySaturated { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::GenerationFailed { attempts })
}

/// Residual energy of every node after draining at the current rates for
/// min(network lifetime, horizon) seconds. The buoy keeps its charge.
pub fn residual_snapshot(
    deployment: &Deployment,
    rate: &RateArray,
    model: &EnergyModel,
    horizon_s: f64,
) -> (Vec<f64>, f64) {
    let t = network_lifetime(rate, deployment, model).min(horizon_s);
    let residuals = (0..deployment.len())
        .map(|i| {
            if deployment.kind(i) == NodeKind::SurfaceBuoy {
                deployment.node(i).residual_energy
            } else {
                (deployment.node(i).residual_energy - drain_watts(i, rate, deployment, model) * t)
                    .max(0.0)
            }
        })
        .collect();
    (residuals, t)
}

/// Imbalance of energy consumption across nodes, averaged over runs:
/// the variance of per-node mean residuals around the grand mean, scaled
/// by `sigma0_sq`. Zero means perfectly even depletion.
pub fn compute_iec(runs: &[Vec<f64>], sigma0_sq: f64) -> Result<f64> {
    let Some(first) = runs.first() else {
        return Err(Error::Domain("imbalance needs at least one run".into()));
    };
    let n = first.len();
    if n == 0 {
        return Err(Error::Domain("imbalance needs at least one node".into()));
    }
    if runs.iter().any(|r| r.len() != n) {
        return Err(Error::Domain(
            "all residual vectors must have the same length".into(),
        ));
    }
    if !(sigma0_sq > 0.0) {
        return Err(Error::Domain(format!(
            "normalization factor must be positive, got {sigma0_sq}"
        )));
    }
    let k = runs.len() as f64;
    let node_means: Vec<f64> = (0..n)
        .map(|i| runs.iter().map(|r| r[i]).sum::<f64>() / k)
        .collect();
    let grand = node_means.iter().sum::<f64>() / n as f64;
    let ss: f64 = node_means.iter().map(|&m| (m - grand) * (m - grand)).sum();
    Ok(ss / (n as f64 * sigma0_sq))
}

/// One seed's line in the report. `error` set means the seed failed and the
/// numeric fields are absent or zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub lifetime_s: Option<f64>,
    pub relays_deployed: usize,
    pub relays_kept: usize,
    /// Positions of the relays that survive selection (all deployed ones
    /// when selection is off).
    pub relay_positions: Vec<Point3>,
    /// Post-drain residual energy of sensors 1..=n, J.
    pub sensor_residuals: Vec<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub case: Case,
    pub method: Method,
    pub n: usize,
    pub relay_budget: usize,
    pub selection: bool,
    pub horizon_s: f64,
    pub per_seed: Vec<SeedOutcome>,
    /// Aggregates over successful seeds; absent when none succeeded (or,
    /// for the deviation, when fewer than two did).
    pub mean_lifetime_s: Option<f64>,
    pub stddev_lifetime_s: Option<f64>,
    pub iec: Option<f64>,
    pub failed_seeds: usize,
}

impl MetricsReport {
    /// Lifetimes of the successful seeds, report order.
    pub fn lifetimes(&self) -> Vec<f64> {
        self.per_seed
            .iter()
            .filter_map(|s| s.lifetime_s)
            .collect()
    }
}

fn run_seed(
    scenario: &Scenario,
    cfg: &SimConfig,
    model: &EnergyModel,
    seed: u64,
) -> Result<SeedOutcome> {
    let (deployment, rate) = generate_deployment(cfg, scenario.n, scenario.case.residual_factor(), seed)?;
    let budget = scenario.relay_budget();
    let settings = OrnsSettings::from_config(cfg);

    let out = match scenario.method {
        Method::NoRelay => DeployOutcome {
            network_lifetime: network_lifetime(&rate, &deployment, model),
            deployment,
            rate,
            records: Vec::new(),
        },
        Method::Orns => orns_run(&deployment, &rate, model, budget, &settings)?,
        Method::Ra => ra_run(&deployment, &rate, model, budget, &settings, seed)?,
        Method::Lsrnp => lsrnp_run(&deployment, &rate, model, budget, &settings)?,
    };

    let deployed: Vec<NodeId> = out.deployment.relay_ids().collect();
    let (kept_ids, final_rate, lifetime) = if scenario.selection && !deployed.is_empty() {
        let problem = SelectionProblem::from_network(
            &out.deployment,
            &out.rate,
            model,
            out.network_lifetime,
            cfg.omega1,
            (cfg.eta > 0.0).then_some(cfg.eta),
        )?;
        let sel = select_relays(
            &problem,
            &out.deployment,
            &out.rate,
            model,
            &SelectionSettings::from_config(cfg),
        )?;
        (sel.kept, sel.rate, sel.achieved_lifetime)
    } else {
        (deployed.clone(), out.rate.clone(), out.network_lifetime)
    };

    let (residuals, _) = residual_snapshot(&out.deployment, &final_rate, model, cfg.horizon_s);
    Ok(SeedOutcome {
        seed,
        lifetime_s: Some(lifetime),
        relays_deployed: deployed.len(),
        relays_kept: kept_ids.len(),
        relay_positions: kept_ids
            .iter()
            .map(|&r| *out.deployment.position(r))
            .collect(),
        sensor_residuals: (1..=scenario.n)
            .map(|i| residuals[i])
            .collect(),
        error: None,
    })
}

/// Runs every seed of the scenario and aggregates. Per-seed failures are
/// recorded in the report, not raised; seeds run in parallel with the
/// output order fixed by the seed list.
pub fn run_experiment(scenario: &Scenario, cfg: &SimConfig) -> Result<MetricsReport> {
    cfg.validate()?;
    let model = EnergyModel::from_config(cfg)?;
    let per_seed: Vec<SeedOutcome> = scenario
        .seeds
        .par_iter()
        .map(|&seed| {
            run_seed(scenario, cfg, &model, seed).unwrap_or_else(|e| SeedOutcome {
                seed,
                lifetime_s: None,
                relays_deployed: 0,
                relays_kept: 0,
                relay_positions: Vec::new(),
                sensor_residuals: Vec::new(),
                error: Some(e.to_string()),
            })
        })
        .collect();

    let lifetimes: Vec<f64> = per_seed.iter().filter_map(|s| s.lifetime_s).collect();
    let residual_runs: Vec<Vec<f64>> = per_seed
        .iter()
        .filter(|s| s.error.is_none())
        .map(|s| s.sensor_residuals.clone())
        .collect();
    let iec = if residual_runs.is_empty() {
        None
    } else {
        Some(compute_iec(&residual_runs, cfg.sigma0_sq())?)
    };
    let failed = per_seed.iter().filter(|s| s.error.is_some()).count();
    Ok(MetricsReport {
        case: scenario.case,
        method: scenario.method,
        n: scenario.n,
        relay_budget: scenario.relay_budget(),
        selection: scenario.selection,
        horizon_s: cfg.horizon_s,
        mean_lifetime_s: stats::mean(&lifetimes),
        stddev_lifetime_s: stats::sample_stddev(&lifetimes),
        iec,
        failed_seeds: failed,
        per_seed,
    })
}
