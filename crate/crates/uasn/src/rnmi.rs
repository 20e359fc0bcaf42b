//! Keep-or-drop selection over the deployed relays.
//!
//! Deployment leaves M0 relays in the water; some of them may no longer
//! earn their keep once the whole set is in place. Selection picks the
//! subset to retain by minimizing a scalarized objective, a smoothed count
//! of kept relays against the one-norm gap to direct-transmission powers,
//! subject to the network lifetime staying at the level the deployment
//! achieved. Dropping a relay hands its traffic back to its feeders as
//! direct links; physically the relay is removed, in the rate array its row
//! and column go to zero.
//!
//! Units in the cost vectors follow the source formulation: `p_relay` is a
//! plain sum of the relay's per-link transmit powers (mW per bit/s), while
//! both `p_c` cases weight powers by the rates they carry (mW). The
//! objective mixes the two as given; the lifetime floor does the real
//! gatekeeping and is computed from physical drains only.

use crate::config::SimConfig;
use crate::error::{Error, NodeId, Result};
use crate::model::{network_lifetime, Deployment, EnergyModel, NodeKind, RateArray};
use crate::routing::splice_out_relay;

/// Data of one selection instance, fixed before the search starts.
#[derive(Debug, Clone)]
pub struct SelectionProblem {
    /// Candidate relays, ascending. Entry order keys every vector below.
    pub relay_ids: Vec<NodeId>,
    /// Sum of each relay's per-link transmit powers, mW per bit/s.
    pub p_relay: Vec<f64>,
    /// Power its feeders spend reaching the relay while it is kept,
    /// flow-weighted, mW.
    pub p_c_kept: Vec<f64>,
    /// Power its feeders would spend transmitting directly after the drop,
    /// flow-weighted, mW.
    pub p_c_dropped: Vec<f64>,
    /// Lifetime floor every surviving configuration must respect, s.
    pub tau_star: f64,
    /// Weight on the smoothed relay count; the one-norm term gets 1 - omega1.
    pub omega1: f64,
    /// Smoothing sharpness of the approximate count.
    pub eta: f64,
}

impl SelectionProblem {
    pub fn new(
        relay_ids: Vec<NodeId>,
        p_relay: Vec<f64>,
        p_c_kept: Vec<f64>,
        p_c_dropped: Vec<f64>,
        tau_star: f64,
        omega1: f64,
        eta: f64,
    ) -> Result<Self> {
        let m = relay_ids.len();
        if p_relay.len() != m || p_c_kept.len() != m || p_c_dropped.len() != m {
            return Err(Error::Domain(format!(
                "selection vectors must all have length {m}"
            )));
        }
        for v in p_relay.iter().chain(&p_c_kept).chain(&p_c_dropped) {
            if !(*v >= 0.0) {
                return Err(Error::Domain(format!(
                    "selection power entries must be nonnegative, got {v}"
                )));
            }
        }
        if !(omega1 > 0.0 && omega1 < 1.0) {
            return Err(Error::Domain(format!(
                "omega1 must lie strictly between 0 and 1, got {omega1}"
            )));
        }
        if !(eta > 0.0) {
            return Err(Error::Domain(format!("eta must be positive, got {eta}")));
        }
        if !(tau_star > 0.0) || !tau_star.is_finite() {
            return Err(Error::Domain(format!(
                "lifetime floor must be positive and finite, got {tau_star}"
            )));
        }
        Ok(SelectionProblem {
            relay_ids,
            p_relay,
            p_c_kept,
            p_c_dropped,
            tau_star,
            omega1,
            eta,
        })
    }

    /// Reads the cost vectors off a deployed network. Each relay's feeders
    /// and targets come from the current rate array; the dropped case prices
    /// the very links a splice-out would create, so the two stay consistent
    /// by construction. `eta` of `None` picks the data-scaled default.
    pub fn from_network(
        deployment: &Deployment,
        rate: &RateArray,
        model: &EnergyModel,
        tau_star: f64,
        omega1: f64,
        eta: Option<f64>,
    ) -> Result<Self> {
        if rate.len() != deployment.len() {
            return Err(Error::InvalidRateArray(format!(
                "rate array of {} nodes does not match deployment of {}",
                rate.len(),
                deployment.len()
            )));
        }
        let relay_ids: Vec<NodeId> = deployment.relay_ids().collect();
        let mut p_relay = Vec::with_capacity(relay_ids.len());
        let mut p_c_kept = Vec::with_capacity(relay_ids.len());
        let mut p_c_dropped = Vec::with_capacity(relay_ids.len());
        for &r in &relay_ids {
            let targets = rate.out_neighbors(r);
            let sources = rate.in_neighbors(r);
            let inflow = rate.incoming(r);
            p_relay.push(
                targets
                    .iter()
                    .map(|&j| model.power(deployment.distance(r, j)))
                    .sum(),
            );
            p_c_kept.push(
                sources
                    .iter()
                    .map(|&u| model.power(deployment.distance(u, r)) * rate.get(u, r))
                    .sum(),
            );
            // Direct case: each feeder takes over its share of the relayed
            // flows, exactly the proportional split a splice-out restores.
            let mut direct = 0.0;
            for &u in &sources {
                let share = rate.get(u, r) / inflow;
                for &j in &targets {
                    direct += model.power(deployment.distance(u, j)) * share * rate.get(r, j);
                }
            }
            p_c_dropped.push(direct);
        }
        let eta = eta.unwrap_or_else(|| auto_eta(&p_relay));
        SelectionProblem::new(
            relay_ids, p_relay, p_c_kept, p_c_dropped, tau_star, omega1, eta,
        )
    }

    pub fn len(&self) -> usize {
        self.relay_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relay_ids.is_empty()
    }

    pub fn omega2(&self) -> f64 {
        1.0 - self.omega1
    }

    /// (smoothed count, one-norm) contributions of relay `i` in one state.
    fn terms(&self, i: usize, keep: bool) -> (f64, f64) {
        if keep {
            (
                1.0 - (-self.eta * self.p_relay[i]).exp(),
                (self.p_relay[i] - self.p_c_kept[i]).abs(),
            )
        } else {
            (0.0, self.p_c_dropped[i])
        }
    }
}

/// Data-scaled smoothing default: sharp enough that a typical kept relay
/// counts as nearly one, clamped away from degenerate magnitudes.
pub fn auto_eta(p_relay: &[f64]) -> f64 {
    let mut nz: Vec<f64> = p_relay.iter().copied().filter(|&v| v > 0.0).collect();
    if nz.is_empty() {
        return 1.0;
    }
    nz.sort_by(|a, b| a.total_cmp(b));
    let mid = nz.len() / 2;
    let median = if nz.len() % 2 == 1 {
        nz[mid]
    } else {
        0.5 * (nz[mid - 1] + nz[mid])
    };
    (10.0 / median).clamp(1e-3, 1e6)
}

/// Smooth stand-in for the number of nonzero entries: sum of
/// 1 - exp(-eta x). Exact at zero, approaches the true count as eta grows.
pub fn smoothed_zero_norm(p: &[f64], eta: f64) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::Domain(format!("eta must be positive, got {eta}")));
    }
    let mut sum = 0.0;
    for &x in p {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!(
                "smoothed count needs nonnegative entries, got {x}"
            )));
        }
        sum += 1.0 - (-eta * x).exp();
    }
    Ok(sum)
}

/// Scalarized cost of a keep pattern; lower is better. The effective power
/// vector has `p_relay[i]` where kept and zero where dropped, and the
/// reference vector switches per entry between the kept and dropped cases.
pub fn selection_objective(keep: &[bool], problem: &SelectionProblem) -> f64 {
    debug_assert_eq!(keep.len(), problem.len());
    let mut smoothed = 0.0;
    let mut norm1 = 0.0;
    for (i, &k) in keep.iter().enumerate() {
        let (s, n) = problem.terms(i, k);
        smoothed += s;
        norm1 += n;
    }
    problem.omega1 * smoothed - problem.omega2() * norm1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionMode {
    /// Exact up to the configured cap, greedy beyond it.
    Auto,
    Exact,
    Greedy,
}

#[derive(Debug, Clone)]
pub struct SelectionSettings {
    pub mode: SelectionMode,
    /// Largest relay count Auto still enumerates exhaustively.
    pub exact_cap: usize,
    /// Relative slack on the lifetime floor.
    pub lifetime_rel_tol: f64,
}

impl Default for SelectionSettings {
    fn default() -> Self {
        SelectionSettings {
            mode: SelectionMode::Auto,
            exact_cap: 14,
            lifetime_rel_tol: 1e-9,
        }
    }
}

impl SelectionSettings {
    pub fn from_config(cfg: &SimConfig) -> Self {
        SelectionSettings {
            mode: SelectionMode::Auto,
            exact_cap: cfg.solver.exact_selection_cap,
            lifetime_rel_tol: cfg.tolerances.selection_rel,
        }
    }
}

/// Per-relay line of the selection report.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct RelayVerdict {
    pub id: NodeId,
    /// Smoothed-count cost vector entry, mW per bit/s.
    pub p_relay: f64,
    /// Flow-weighted direct-transmission power if dropped, mW.
    pub p_direct: f64,
    /// Network lifetime after dropping only this relay; zero when the drop
    /// is impossible (some restored link would be out of range).
    pub lifetime_if_dropped: f64,
}

#[derive(Debug, Clone)]
pub struct SelectionResult {
    /// Keep flag per entry of `SelectionProblem::relay_ids`.
    pub keep: Vec<bool>,
    pub kept: Vec<NodeId>,
    pub dropped: Vec<NodeId>,
    pub objective: f64,
    /// Smoothed relay count of the chosen pattern, before weighting.
    pub smoothed_term: f64,
    /// One-norm gap of the chosen pattern, before weighting.
    pub norm1_term: f64,
    pub tau_star: f64,
    /// Min node lifetime of the surviving configuration, recomputed from
    /// drains, not cached values.
    pub achieved_lifetime: f64,
    /// Set when not even keeping everything meets the floor; the result is
    /// then the all-keep pattern.
    pub constraint_relaxed: bool,
    /// Whether the exhaustive search produced this result.
    pub exact: bool,
    pub per_relay: Vec<RelayVerdict>,
    /// Routing after the drops; dropped relays are idle.
    pub rate: RateArray,
}

/// Splices the dropped relays out, newest first, undoing deployments in
/// reverse order. `None` when some restored link would be out of range or
/// the flows no longer have the spliceable single-feeder shape.
fn apply_drops(
    rate: &RateArray,
    deployment: &Deployment,
    relay_ids: &[NodeId],
    keep: &[bool],
) -> Option<RateArray> {
    let mut out = rate.clone();
    for i in (0..keep.len()).rev() {
        if !keep[i] {
            out = splice_out_relay(&out, relay_ids[i], deployment).ok()?;
        }
    }
    Some(out)
}

struct Candidate {
    keep: Vec<bool>,
    kept_count: usize,
    objective: f64,
    rate: RateArray,
    lifetime: f64,
}

impl Candidate {
    /// Total order: objective, then fewer kept, then lexicographically
    /// smallest keep vector (drop-first).
    fn beats(&self, other: &Candidate) -> bool {
        if self.objective != other.objective {
            return self.objective < other.objective;
        }
        if self.kept_count != other.kept_count {
            return self.kept_count < other.kept_count;
        }
        self.keep < other.keep
    }
}

fn evaluate(
    mask: u64,
    problem: &SelectionProblem,
    deployment: &Deployment,
    rate: &RateArray,
    model: &EnergyModel,
    floor: f64,
) -> Option<Candidate> {
    let m = problem.len();
    let keep: Vec<bool> = (0..m).map(|i| mask >> i & 1 == 1).collect();
    let after = apply_drops(rate, deployment, &problem.relay_ids, &keep)?;
    let lifetime = network_lifetime(&after, deployment, model);
    if lifetime < floor {
        return None;
    }
    Some(Candidate {
        kept_count: keep.iter().filter(|&&k| k).count(),
        objective: selection_objective(&keep, problem),
        keep,
        rate: after,
        lifetime,
    })
}

fn exact_search(
    problem: &SelectionProblem,
    deployment: &Deployment,
    rate: &RateArray,
    model: &EnergyModel,
    floor: f64,
) -> Option<Candidate> {
    let m = problem.len();
    let mut best: Option<Candidate> = None;
    for mask in 0..(1u64 << m) {
        if let Some(c) = evaluate(mask, problem, deployment, rate, model, floor) {
            if best.as_ref().map_or(true, |b| c.beats(b)) {
                best = Some(c);
            }
        }
    }
    best
}

/// Drops relays one at a time, least lifetime impact first, keeping each
/// drop only while the floor still holds.
fn greedy_search(
    problem: &SelectionProblem,
    deployment: &Deployment,
    rate: &RateArray,
    model: &EnergyModel,
    floor: f64,
    single_drop: &[Option<f64>],
) -> Option<Candidate> {
    let m = problem.len();
    let all_keep = vec![true; m];
    let start = network_lifetime(rate, deployment, model);
    if start < floor {
        return None;
    }
    // Highest post-drop lifetime = least impact; unsplicable relays stay.
    let mut order: Vec<usize> = (0..m).filter(|&i| single_drop[i].is_some()).collect();
    order.sort_by(|&a, &b| {
        single_drop[b]
            .unwrap()
            .total_cmp(&single_drop[a].unwrap())
            .then(a.cmp(&b))
    });
    let mut keep = all_keep;
    let mut current = rate.clone();
    let mut lifetime = start;
    for &i in &order {
        let Ok(tentative) = splice_out_relay(&current, problem.relay_ids[i], deployment) else {
            continue;
        };
        let t = network_lifetime(&tentative, deployment, model);
        if t >= floor {
            keep[i] = false;
            current = tentative;
            lifetime = t;
        }
    }
    Some(Candidate {
        kept_count: keep.iter().filter(|&&k| k).count(),
        objective: selection_objective(&keep, problem),
        keep,
        rate: current,
        lifetime,
    })
}

/// Picks the relays to retain. The problem fixes the costs and the floor;
/// the deployment, rate array and model are the ground truth every feasible
/// pattern is re-verified against.
pub fn select_relays(
    problem: &SelectionProblem,
    deployment: &Deployment,
    rate: &RateArray,
    model: &EnergyModel,
    settings: &SelectionSettings,
) -> Result<SelectionResult> {
    if rate.len() != deployment.len() {
        return Err(Error::InvalidRateArray(format!(
            "rate array of {} nodes does not match deployment of {}",
            rate.len(),
            deployment.len()
        )));
    }
    for &r in &problem.relay_ids {
        if r >= deployment.len() || deployment.kind(r) != NodeKind::Relay {
            return Err(Error::Domain(format!(
                "selection candidate {r} is not a relay of this deployment"
            )));
        }
    }
    let m = problem.len();
    let exact = match settings.mode {
        SelectionMode::Exact => {
            if m > 24 {
                return Err(Error::Domain(format!(
                    "exact selection enumerates 2^{m} subsets; 24 relays is the limit"
                )));
            }
            true
        }
        SelectionMode::Greedy => false,
        SelectionMode::Auto => m <= settings.exact_cap.min(24),
    };
    let floor = problem.tau_star * (1.0 - settings.lifetime_rel_tol);

    // Single-drop lifetimes serve the report and the greedy order.
    let single_drop: Vec<Option<f64>> = (0..m)
        .map(|i| {
            let mut keep = vec![true; m];
            keep[i] = false;
            apply_drops(rate, deployment, &problem.relay_ids, &keep)
                .map(|r| network_lifetime(&r, deployment, model))
        })
        .collect();

    let best = if m == 0 {
        Some(Candidate {
            keep: Vec::new(),
            kept_count: 0,
            objective: 0.0,
            rate: rate.clone(),
            lifetime: network_lifetime(rate, deployment, model),
        })
    } else if exact {
        exact_search(problem, deployment, rate, model, floor)
    } else {
        greedy_search(problem, deployment, rate, model, floor, &single_drop)
    };

    let (candidate, constraint_relaxed) = match best {
        Some(c) => (c, false),
        // Nothing meets the floor, not even the full set; fall back to
        // keeping everything and say so.
        None => (
            Candidate {
                keep: vec![true; m],
                kept_count: m,
                objective: selection_objective(&vec![true; m], problem),
                rate: rate.clone(),
                lifetime: network_lifetime(rate, deployment, model),
            },
            true,
        ),
    };

    let mut smoothed_term = 0.0;
    let mut norm1_term = 0.0;
    for (i, &k) in candidate.keep.iter().enumerate() {
        let (s, n) = problem.terms(i, k);
        smoothed_term += s;
        norm1_term += n;
    }
    let per_relay = (0..m)
        .map(|i| RelayVerdict {
            id: problem.relay_ids[i],
            p_relay: problem.p_relay[i],
            p_direct: problem.p_c_dropped[i],
            lifetime_if_dropped: single_drop[i].unwrap_or(0.0),
        })
        .collect();
    let kept = problem
        .relay_ids
        .iter()
        .zip(&candidate.keep)
        .filter_map(|(&id, &k)| k.then_some(id))
        .collect();
    let dropped = problem
        .relay_ids
        .iter()
        .zip(&candidate.keep)
        .filter_map(|(&id, &k)| (!k).then_some(id))
        .collect();
    Ok(SelectionResult {
        objective: candidate.objective,
        keep: candidate.keep,
        kept,
        dropped,
        smoothed_term,
        norm1_term,
        tau_star: problem.tau_star,
        achieved_lifetime: candidate.lifetime,
        constraint_relaxed,
        exact,
        per_relay,
        rate: candidate.rate,
    })
}
