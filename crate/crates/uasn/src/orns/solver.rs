//! Single-relay placement inside the candidate hull.
//!
//! The problem: put a relay at x(w), w on the unit simplex over the hull
//! anchors, minimizing the bottleneck's residual transmit power p(d_c)
//! subject to the relay outliving the bottleneck and every relayed link
//! staying within comm range. p(d) is monotone in d, so the objective is
//! the distance d_c itself.
//!
//! The lifetime constraint is a difference of convex pieces: per-neighbor
//! transmit terms (convex in position) minus a multiple of p(d_c) (also
//! convex, entering negatively). Each outer round linearizes the negative
//! part at the current iterate and solves the resulting convex penalty
//! subproblem by projected gradient descent on the simplex, growing the
//! penalty weight until iterates turn feasible. Only iterates that pass the
//! exact feasibility predicate are ever recorded, so whatever comes back is
//! honestly feasible; a deterministic multi-start plus a coarse grid sweep
//! covers hull geometries where a single descent stalls.

use crate::config::SimConfig;
use crate::error::{Error, NodeId, Result};
use crate::geom::{dot, Point3};
use crate::model::{Deployment, EnergyModel, RateArray};
use crate::opt::project_to_simplex;
use crate::orns::constraint::LifetimeConstraint;
use crate::orns::hull::Hull;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct PlacementSettings {
    /// Battery of the relay to be placed, J.
    pub relay_energy: f64,
    pub outer_max_iters: usize,
    pub inner_max_iters: usize,
    /// Relative objective change that stops the outer loop.
    pub objective_rel_tol: f64,
    /// Relative slack on the relay-outlives-bottleneck comparison.
    pub lifetime_rel_tol: f64,
    /// Barycentric coordinates must sit this close to the simplex.
    pub simplex_tol: f64,
    /// Relays may not sit closer to the bottleneck than this, metres.
    pub min_separation: f64,
    /// Random restarts beyond the deterministic start set.
    pub multistart: usize,
    pub seed: u64,
}

impl Default for PlacementSettings {
    fn default() -> Self {
        PlacementSettings {
            relay_energy: 4.0e5,
            outer_max_iters: 500,
            inner_max_iters: 200,
            objective_rel_tol: 1e-6,
            lifetime_rel_tol: 1e-6,
            simplex_tol: 1e-8,
            min_separation: 1.0,
            multistart: 4,
            seed: 0,
        }
    }
}

impl PlacementSettings {
    pub fn from_config(cfg: &SimConfig) -> Self {
        PlacementSettings {
            relay_energy: cfg.eps_p_j,
            outer_max_iters: cfg.solver.outer_max_iters,
            inner_max_iters: cfg.solver.inner_max_iters,
            objective_rel_tol: cfg.tolerances.objective_rel,
            lifetime_rel_tol: cfg.tolerances.lifetime_rel,
            simplex_tol: cfg.tolerances.simplex,
            min_separation: cfg.solver.min_separation_m,
            multistart: cfg.solver.multistart,
            seed: cfg.solver.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Outer loop stopped on the relative objective change criterion.
    Converged,
    /// Iteration budget ran out; the best feasible iterate is returned.
    IterationCapped,
}

/// A feasible relay placement for one bottleneck node.
#[derive(Debug, Clone)]
pub struct Placement {
    /// Barycentric coordinates over (neighbors ascending, bottleneck last).
    pub weights: Vec<f64>,
    pub position: Point3,
    pub neighbors: Vec<NodeId>,
    /// Transmit power bottleneck -> relay, mW per bit/s.
    pub link_power: f64,
    /// Transmit power relay -> each neighbor, mW per bit/s.
    pub neighbor_powers: Vec<f64>,
    /// Bottleneck lifetime after the reroute, s.
    pub tau_bottleneck: f64,
    /// Relay lifetime after the reroute, s.
    pub tau_relay: f64,
    pub status: SolveStatus,
}

/// Shared problem definition: the solver and the exhaustive grid oracle
/// search the same objective over the same feasible set, and only their
/// search strategies differ.
pub(crate) struct Instance<'a> {
    pub hull: Hull,
    pub constraint: LifetimeConstraint,
    pub model: &'a EnergyModel,
    /// Anchor positions relative to the bottleneck; the last entry is zero.
    centered: Vec<[f64; 3]>,
    comm_range: f64,
    lifetime_rel_tol: f64,
    min_separation: f64,
}

pub(crate) struct Eval {
    /// Distance from x(w) to each anchor; last entry is d_c.
    pub dists: Vec<f64>,
    pub neighbor_powers: Vec<f64>,
    pub link_power: f64,
    pub feasible: bool,
}

impl<'a> Instance<'a> {
    pub(crate) fn new(
        c: NodeId,
        rate: &RateArray,
        deployment: &Deployment,
        model: &'a EnergyModel,
        settings: &PlacementSettings,
    ) -> Result<Self> {
        let constraint =
            LifetimeConstraint::build(c, settings.relay_energy, rate, deployment, model)?;
        let hull = Hull::new(c, &constraint.neighbors, deployment);
        let origin = *hull.bottleneck_position();
        let centered = hull.anchors().iter().map(|a| a.sub(&origin)).collect();
        Ok(Instance {
            hull,
            constraint,
            model,
            centered,
            comm_range: deployment.comm_range,
            lifetime_rel_tol: settings.lifetime_rel_tol,
            min_separation: settings.min_separation,
        })
    }

    pub(crate) fn dims(&self) -> usize {
        self.hull.len()
    }

    /// Position relative to the bottleneck.
    fn centered_position(&self, w: &[f64]) -> [f64; 3] {
        let mut x = [0.0; 3];
        for (a, &wi) in self.centered.iter().zip(w) {
            x[0] += wi * a[0];
            x[1] += wi * a[1];
            x[2] += wi * a[2];
        }
        x
    }

    fn distances(&self, w: &[f64]) -> Vec<f64> {
        let x = self.centered_position(w);
        self.centered
            .iter()
            .map(|a| {
                let dx = [x[0] - a[0], x[1] - a[1], x[2] - a[2]];
                dot(&dx, &dx).sqrt()
            })
            .collect()
    }

    pub(crate) fn eval(&self, w: &[f64]) -> Eval {
        let dists = self.distances(w);
        let m = dists.len() - 1;
        let neighbor_powers: Vec<f64> = dists[..m].iter().map(|&d| self.model.power(d)).collect();
        let link_power = self.model.power(dists[m]);
        let feasible = self.feasible_parts(&dists, &neighbor_powers, link_power);
        Eval {
            dists,
            neighbor_powers,
            link_power,
            feasible,
        }
    }

    fn feasible_parts(&self, dists: &[f64], neighbor_powers: &[f64], link_power: f64) -> bool {
        let m = dists.len() - 1;
        let d_c = dists[m];
        if d_c < self.min_separation - 1e-9 {
            return false;
        }
        if dists.iter().any(|&d| d > self.comm_range + 1e-9) {
            return false;
        }
        self.constraint
            .satisfied(neighbor_powers, link_power, self.lifetime_rel_tol)
    }

    pub(crate) fn is_feasible(&self, w: &[f64]) -> bool {
        self.eval(w).feasible
    }

    /// Distance from x(w) to the bottleneck; minimizing it minimizes the
    /// bottleneck's post-reroute transmit power.
    pub(crate) fn objective(&self, w: &[f64]) -> f64 {
        let x = self.centered_position(w);
        dot(&x, &x).sqrt()
    }

    pub(crate) fn realize(&self, w: Vec<f64>, status: SolveStatus) -> Placement {
        let e = self.eval(&w);
        debug_assert!(e.feasible);
        let position = self.hull.position(&w);
        Placement {
            position,
            neighbors: self.constraint.neighbors.clone(),
            link_power: e.link_power,
            tau_bottleneck: self.constraint.bottleneck_lifetime(e.link_power),
            tau_relay: self.constraint.relay_lifetime(&e.neighbor_powers),
            neighbor_powers: e.neighbor_powers,
            weights: w,
            status,
        }
    }
}

/// Scales that keep the penalty terms around unity.
struct Scales {
    obj: f64,
    con: f64,
    range: f64,
}

impl Scales {
    fn new(inst: &Instance) -> Self {
        let spread = inst.hull.spread().max(inst.min_separation);
        let p_far = inst.model.power(spread.min(inst.comm_range));
        let c = &inst.constraint;
        let ratio = c.relay_energy / c.bottleneck_energy;
        let con = (c.total_flow * p_far * (1.0 + ratio) + c.gamma0.abs()).max(1e-12);
        Scales {
            obj: spread * spread,
            con,
            range: inst.comm_range * inst.comm_range,
        }
    }
}

/// Linearization of the concave constraint part at a base point.
struct ConcaveCut {
    value_at_base: f64,
    grad: Vec<f64>,
    base: Vec<f64>,
}

impl ConcaveCut {
    fn at(inst: &Instance, w: &[f64]) -> Self {
        let c = &inst.constraint;
        let ratio = c.relay_energy / c.bottleneck_energy;
        let coef = -ratio * c.total_flow;
        let x = inst.centered_position(w);
        let d_c = dot(&x, &x).sqrt();
        let value_at_base = coef * inst.model.power(d_c);
        let mut grad = vec![0.0; w.len()];
        if d_c > 1e-12 {
            let slope = coef * inst.model.power_gradient(d_c) / d_c;
            for (i, a) in inst.centered.iter().enumerate() {
                grad[i] = slope * dot(a, &x);
            }
        }
        ConcaveCut {
            value_at_base,
            grad,
            base: w.to_vec(),
        }
    }

    fn value(&self, w: &[f64]) -> f64 {
        let mut v = self.value_at_base;
        for i in 0..w.len() {
            v += self.grad[i] * (w[i] - self.base[i]);
        }
        v
    }
}

/// Penalty objective for one convexified subproblem.
fn penalty_value(inst: &Instance, scales: &Scales, cut: &ConcaveCut, mu: f64, w: &[f64]) -> f64 {
    let dists = inst.distances(w);
    let m = dists.len() - 1;
    let d_c = dists[m];
    let mut lam = -inst.constraint.gamma0 + cut.value(w);
    for (j, &d) in dists[..m].iter().enumerate() {
        lam += inst.constraint.flows[j] * inst.model.power(d);
    }
    let mut phi = d_c * d_c / scales.obj;
    let g = (lam / scales.con).max(0.0);
    phi += mu * g * g;
    for &d in &dists {
        let u = ((d * d - inst.comm_range * inst.comm_range) / scales.range).max(0.0);
        phi += mu * u * u;
    }
    phi
}

fn penalty_grad(inst: &Instance, scales: &Scales, cut: &ConcaveCut, mu: f64, w: &[f64]) -> Vec<f64> {
    let n = w.len();
    let x = inst.centered_position(w);
    let dists = inst.distances(w);
    let m = dists.len() - 1;

    let mut lam = -inst.constraint.gamma0 + cut.value(w);
    for (j, &d) in dists[..m].iter().enumerate() {
        lam += inst.constraint.flows[j] * inst.model.power(d);
    }

    let mut grad = vec![0.0; n];
    // d(d_c^2)/dw_i = 2 a_i . x with centered anchors.
    for i in 0..n {
        grad[i] = 2.0 * dot(&inst.centered[i], &x) / scales.obj;
    }

    let g = lam / scales.con;
    if g > 0.0 {
        let outer = mu * 2.0 * g / scales.con;
        for i in 0..n {
            let mut dlam = cut.grad[i];
            for (j, &d) in dists[..m].iter().enumerate() {
                if d > 1e-12 {
                    let diff = [
                        x[0] - inst.centered[j][0],
                        x[1] - inst.centered[j][1],
                        x[2] - inst.centered[j][2],
                    ];
                    dlam += inst.constraint.flows[j] * inst.model.power_gradient(d)
                        * dot(&inst.centered[i], &diff)
                        / d;
                }
            }
            grad[i] += outer * dlam;
        }
    }

    for (k, &d) in dists.iter().enumerate() {
        let u = (d * d - inst.comm_range * inst.comm_range) / scales.range;
        if u > 0.0 {
            let outer = mu * 2.0 * u * 2.0 / scales.range;
            let diff = [
                x[0] - inst.centered[k][0],
                x[1] - inst.centered[k][1],
                x[2] - inst.centered[k][2],
            ];
            for i in 0..n {
                grad[i] += outer * dot(&inst.centered[i], &diff);
            }
        }
    }
    grad
}

/// Projected gradient descent with backtracking on the simplex.
fn pgd(
    inst: &Instance,
    scales: &Scales,
    cut: &ConcaveCut,
    mu: f64,
    w0: Vec<f64>,
    max_iters: usize,
) -> (Vec<f64>, f64) {
    let mut w = w0;
    let mut fw = penalty_value(inst, scales, cut, mu, &w);
    let mut step = 1.0;
    for _ in 0..max_iters {
        let grad = penalty_grad(inst, scales, cut, mu, &w);
        let mut accepted = false;
        for _ in 0..40 {
            let mut cand: Vec<f64> = w
                .iter()
                .zip(&grad)
                .map(|(&wi, &gi)| wi - step * gi)
                .collect();
            project_to_simplex(&mut cand);
            let fc = penalty_value(inst, scales, cut, mu, &cand);
            let move_sq: f64 = cand
                .iter()
                .zip(&w)
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum();
            if fc <= fw - 1e-4 * move_sq / step.max(1e-18) {
                let converged = move_sq.sqrt() <= 1e-12;
                w = cand;
                fw = fc;
                accepted = true;
                step *= 2.0;
                if converged {
                    return (w, fw);
                }
                break;
            }
            step *= 0.25;
            if step < 1e-18 {
                break;
            }
        }
        if !accepted {
            break;
        }
    }
    (w, fw)
}

struct CcpOutcome {
    best: Option<(Vec<f64>, f64)>,
    converged: bool,
}

/// Convex-concave outer loop from one start point. Records the best iterate
/// that passes the exact feasibility predicate.
fn ccp(inst: &Instance, scales: &Scales, start: Vec<f64>, s: &PlacementSettings) -> CcpOutcome {
    let mut w = start;
    let mut best: Option<(Vec<f64>, f64)> = None;
    let consider = |inst: &Instance, w: &[f64], best: &mut Option<(Vec<f64>, f64)>| {
        let e = inst.eval(w);
        if e.feasible {
            let d_c = e.dists[e.dists.len() - 1];
            if best.as_ref().map_or(true, |(_, b)| d_c < *b) {
                *best = Some((w.to_vec(), d_c));
            }
        }
    };
    consider(inst, &w, &mut best);

    let mut mu = 10.0;
    let mut prev = f64::INFINITY;
    let mut converged = false;
    let mut stall = 0usize;
    for _ in 0..s.outer_max_iters {
        let cut = ConcaveCut::at(inst, &w);
        let (next, phi) = pgd(inst, scales, &cut, mu, w.clone(), s.inner_max_iters);
        w = next;
        let before = best.as_ref().map(|(_, b)| *b);
        consider(inst, &w, &mut best);
        let improved = match (before, best.as_ref().map(|(_, b)| *b)) {
            (Some(a), Some(b)) => b < a * (1.0 - 1e-9),
            (None, Some(_)) => true,
            _ => false,
        };

        let rel = (phi - prev).abs() / phi.abs().max(1.0);
        if rel <= s.objective_rel_tol {
            if best.is_some() {
                converged = true;
                break;
            }
            // Feasibility still out of reach: push the penalty harder.
            mu *= 8.0;
            if mu > 1e10 {
                break;
            }
        }
        prev = phi;
        stall = if improved { 0 } else { stall + 1 };
        if best.is_some() && stall >= 8 {
            converged = true;
            break;
        }
    }
    CcpOutcome { best, converged }
}

/// Shrinks the placement toward the bottleneck along the barycentric ray
/// while it stays feasible. Feasibility is re-verified at every probe, so
/// the result can only improve on `w`.
pub(crate) fn tighten_toward_bottleneck(inst: &Instance, w: Vec<f64>) -> Vec<f64> {
    let n = w.len();
    let cidx = n - 1;
    let at = |s: f64| -> Vec<f64> {
        // e_c + s (w - e_c)
        let mut out: Vec<f64> = w.iter().map(|&wi| s * wi).collect();
        out[cidx] = 1.0 - s * (1.0 - w[cidx]);
        out
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if inst.is_feasible(&at(lo)) {
        return at(lo);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if inst.is_feasible(&at(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    at(hi)
}

fn deterministic_starts(inst: &Instance) -> Vec<Vec<f64>> {
    let n = inst.dims();
    let m = n - 1;
    let mut starts = Vec::new();
    starts.push(vec![1.0 / n as f64; n]);
    if m > 0 {
        // All mass on the neighbors, split by relayed flow.
        let total = inst.constraint.total_flow;
        let mut w = vec![0.0; n];
        for j in 0..m {
            w[j] = inst.constraint.flows[j] / total;
        }
        starts.push(w);
        // Halfway between the bottleneck and the flow-weighted mix.
        let mut h = starts.last().unwrap().clone();
        for v in h.iter_mut() {
            *v *= 0.5;
        }
        h[m] += 0.5;
        starts.push(h);
        for j in 0..m {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            starts.push(e);
        }
    }
    starts
}

fn random_starts(n: usize, count: usize, seed: u64, salt: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    (0..count)
        .map(|_| {
            // Exponential draws normalized: uniform on the simplex.
            let mut w: Vec<f64> = (0..n)
                .map(|_| -(1.0 - rng.random::<f64>()).ln().max(1e-12))
                .collect();
            let sum: f64 = w.iter().sum();
            for v in w.iter_mut() {
                *v /= sum;
            }
            w
        })
        .collect()
}

/// Line search on the edge from the bottleneck vertex to anchor `j`: scan
/// for the outermost feasible point, then shrink back in. The scan and the
/// shrink share one ray, so the result sits on the lower feasibility
/// boundary of that edge.
pub(crate) fn edge_candidate(inst: &Instance, j: usize) -> Option<Vec<f64>> {
    let n = inst.dims();
    let at = |lambda: f64| -> Vec<f64> {
        let mut w = vec![0.0; n];
        w[j] = lambda;
        w[n - 1] = 1.0 - lambda;
        w
    };
    let mut seed = None;
    for i in (1..=256).rev() {
        let w = at(i as f64 / 256.0);
        if inst.is_feasible(&w) {
            seed = Some(w);
            break;
        }
    }
    seed.map(|w| tighten_toward_bottleneck(inst, w))
}

/// Coarse feasibility sweep used when every descent start fails.
fn grid_seed(inst: &Instance) -> Option<Vec<f64>> {
    let n = inst.dims();
    let k = match n {
        0..=4 => 20,
        5..=6 => 10,
        _ => 5,
    };
    let mut best: Option<(Vec<f64>, f64)> = None;
    super::oracle::for_each_grid_point(n, k, |w| {
        let e = inst.eval(w);
        if e.feasible {
            let d_c = e.dists[e.dists.len() - 1];
            if best.as_ref().map_or(true, |(_, b)| d_c < *b) {
                best = Some((w.to_vec(), d_c));
            }
        }
    });
    best.map(|(w, _)| w)
}

/// Places one relay for bottleneck `c` under the current routing.
///
/// Returns the placement with the smallest bottleneck-to-relay distance
/// found, or an infeasibility error when no point of the hull satisfies the
/// lifetime and range constraints.
pub fn solve_placement(
    c: NodeId,
    rate: &RateArray,
    deployment: &Deployment,
    model: &EnergyModel,
    settings: &PlacementSettings,
) -> Result<Placement> {
    let inst = Instance::new(c, rate, deployment, model, settings)?;
    let scales = Scales::new(&inst);
    let n = inst.dims();

    let mut starts = deterministic_starts(&inst);
    starts.extend(random_starts(n, settings.multistart, settings.seed, c as u64));

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut any_converged = false;
    for start in starts {
        let out = ccp(&inst, &scales, start, settings);
        any_converged |= out.converged;
        if let Some((w, d_c)) = out.best {
            if best.as_ref().map_or(true, |(_, b)| d_c < *b) {
                best = Some((w, d_c));
            }
        }
    }

    // Cheap line searches on every bottleneck-to-anchor edge. Descent can
    // stall in a poor basin; these keep the hull search from ever losing to
    // a restriction of its own feasible set (the segment baseline included).
    for j in 0..n - 1 {
        if let Some(w) = edge_candidate(&inst, j) {
            let d_c = inst.objective(&w);
            if best.as_ref().map_or(true, |(_, b)| d_c < *b) {
                best = Some((w, d_c));
            }
        }
    }

    if best.is_none() {
        if let Some(seed) = grid_seed(&inst) {
            let out = ccp(&inst, &scales, seed.clone(), settings);
            any_converged |= out.converged;
            best = out.best.or_else(|| {
                let d_c = inst.objective(&seed);
                Some((seed, d_c))
            });
        }
    }

    let Some((w, _)) = best else {
        return Err(Error::Infeasible(format!(
            "no point of the candidate hull lets a relay outlive node {c}"
        )));
    };

    let w = tighten_toward_bottleneck(&inst, w);
    debug_assert!(Hull::on_simplex(&w, settings.simplex_tol));
    let status = if any_converged {
        SolveStatus::Converged
    } else {
        SolveStatus::IterationCapped
    };
    Ok(inst.realize(w, status))
}
