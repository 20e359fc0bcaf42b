//! Multi-hop routing and flow surgery.
//!
//! Initial routes go over sensors only (relays join the topology later, by
//! explicit reroutes). The default policy sends every sensor's traffic along
//! its cheapest path to the buoy, where cost is transmit power per bit over
//! each hop; a min-hop policy is kept alongside for sensitivity checks.
//! Ties break on hop count and then on lowest predecessor id so the tree is
//! identical across platforms and runs.

use crate::error::{Error, NodeId, Result};
use crate::model::{Deployment, EnergyModel, NodeKind, RateArray};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RoutingPolicy {
    /// Cheapest total transmit power per bit to the buoy.
    #[default]
    MinEnergyPath,
    /// Fewest hops; energy only breaks ties indirectly through ordering.
    MinHopPath,
}

/// Shortest-path forest rooted at the buoy.
#[derive(Debug, Clone)]
pub struct RouteTree {
    /// Next hop toward the buoy, per node; the buoy maps to itself.
    pred: Vec<NodeId>,
    cost: Vec<f64>,
    hops: Vec<u32>,
}

impl RouteTree {
    pub fn next_hop(&self, i: NodeId) -> NodeId {
        self.pred[i]
    }

    pub fn cost_to_buoy(&self, i: NodeId) -> f64 {
        self.cost[i]
    }

    pub fn hops_to_buoy(&self, i: NodeId) -> u32 {
        self.hops[i]
    }

    /// Nodes on the way from `i` to the buoy, starting at `i`, ending at 0.
    pub fn path_to_buoy(&self, i: NodeId) -> Vec<NodeId> {
        let mut path = vec![i];
        let mut cur = i;
        while cur != 0 {
            cur = self.pred[cur];
            path.push(cur);
        }
        path
    }
}

/// Edge cost under a policy. Unit cost collapses the search to hop counting.
fn edge_cost(policy: RoutingPolicy, model: &EnergyModel, d: f64) -> f64 {
    match policy {
        RoutingPolicy::MinEnergyPath => model.power(d),
        RoutingPolicy::MinHopPath => 1.0,
    }
}

/// Dijkstra from the buoy over sensors within comm range, with deterministic
/// tie-breaking on (cost, hops, predecessor id). `usable` filters candidate
/// forwarders; the buoy is always usable.
fn shortest_path_forest(
    deployment: &Deployment,
    model: &EnergyModel,
    policy: RoutingPolicy,
    usable: &dyn Fn(NodeId) -> bool,
) -> RouteTree {
    let n = deployment.len();
    let unreached = f64::INFINITY;
    let mut cost = vec![unreached; n];
    let mut hops = vec![u32::MAX; n];
    let mut pred: Vec<NodeId> = (0..n).collect();
    let mut done = vec![false; n];
    cost[0] = 0.0;
    hops[0] = 0;

    // n is small; a linear scan per extraction is simpler than a heap with
    // custom float ordering and is deterministic by construction.
    loop {
        let mut best: Option<NodeId> = None;
        for v in 0..n {
            if done[v] || cost[v] == unreached {
                continue;
            }
            best = match best {
                None => Some(v),
                Some(b) => {
                    let lhs = (cost[v], hops[v], v);
                    let rhs = (cost[b], hops[b], b);
                    if lhs.0 < rhs.0 || (lhs.0 == rhs.0 && (lhs.1, lhs.2) < (rhs.1, rhs.2)) {
                        Some(v)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        let Some(u) = best else { break };
        done[u] = true;
        if u != 0 && !usable(u) {
            // Reachable but barred from forwarding: keep its own route,
            // relax nothing through it.
            continue;
        }
        for v in 0..n {
            if done[v] || v == 0 || deployment.kind(v) == NodeKind::Relay {
                continue;
            }
            let d = deployment.distance(u, v);
            if d > deployment.comm_range {
                continue;
            }
            // v pays to transmit toward u.
            let c = cost[u] + edge_cost(policy, model, d);
            let h = hops[u] + 1;
            let better = c < cost[v]
                || (c == cost[v] && (h < hops[v] || (h == hops[v] && u < pred[v])));
            if better {
                cost[v] = c;
                hops[v] = h;
                pred[v] = u;
            }
        }
    }
    RouteTree { pred, cost, hops }
}

/// Cheapest-path tree for the deployment; fails if any sensor is unreachable.
pub fn route_tree(
    deployment: &Deployment,
    model: &EnergyModel,
    policy: RoutingPolicy,
) -> Result<RouteTree> {
    let tree = shortest_path_forest(deployment, model, policy, &|_| true);
    for s in deployment.sensor_ids() {
        if tree.cost[s].is_infinite() {
            return Err(Error::Disconnected { node: s });
        }
    }
    Ok(tree)
}

/// Routes every sensor's generated traffic to the buoy and returns the
/// resulting rate matrix.
///
/// Sensors are processed in ascending id order along the shared cheapest-path
/// tree. When adding a flow would push some forwarder past link capacity, that
/// sensor's traffic is diverted along its cheapest path that avoids saturated
/// forwarders; if no such path exists the routing is infeasible.
pub fn build_initial_rate_array(
    deployment: &Deployment,
    model: &EnergyModel,
    policy: RoutingPolicy,
) -> Result<RateArray> {
    let n = deployment.len();
    let tree = route_tree(deployment, model, policy)?;
    let mut rate = RateArray::zeros(n);
    let cap = model.link_capacity();

    for s in deployment.sensor_ids() {
        let g = deployment.node(s).generation_rate;
        let path = tree.path_to_buoy(s);
        if path_fits(&rate, &path, g, cap) {
            add_flow(&mut rate, &path, g);
            continue;
        }
        // The source itself must have headroom no matter the path.
        if rate.outgoing(s) + g > cap {
            return Err(Error::CapacitySaturated { node: s, origin: s });
        }
        let usable = |v: NodeId| v == s || rate.outgoing(v) + g <= cap;
        let detour = shortest_path_forest(deployment, model, policy, &usable);
        if detour.cost[s].is_infinite() {
            let blocking = first_saturated(&rate, &path, g, cap).unwrap_or(s);
            return Err(Error::CapacitySaturated {
                node: blocking,
                origin: s,
            });
        }
        let path = detour.path_to_buoy(s);
        debug_assert!(path_fits(&rate, &path, g, cap));
        add_flow(&mut rate, &path, g);
    }
    Ok(rate)
}

fn path_fits(rate: &RateArray, path: &[NodeId], g: f64, cap: f64) -> bool {
    path[..path.len() - 1]
        .iter()
        .all(|&v| rate.outgoing(v) + g <= cap)
}

fn first_saturated(rate: &RateArray, path: &[NodeId], g: f64, cap: f64) -> Option<NodeId> {
    path[..path.len() - 1]
        .iter()
        .copied()
        .find(|&v| rate.outgoing(v) + g > cap)
}

fn add_flow(rate: &mut RateArray, path: &[NodeId], g: f64) {
    for hop in path.windows(2) {
        rate.add(hop[0], hop[1], g);
    }
}

/// Nodes that `c` currently transmits to, ascending.
pub fn upper_neighbors(c: NodeId, rate: &RateArray) -> Vec<NodeId> {
    rate.out_neighbors(c)
}

/// Moves all of `c`'s outgoing traffic through relay `r`: `c` sends its
/// whole outflow to `r`, and `r` forwards the original per-neighbor splits.
///
/// `r` must be idle (zero flows) and in range of `c` and of every current
/// upper neighbor of `c`. With no outgoing traffic at `c` the array is
/// returned unchanged.
pub fn reroute_through_relay(
    rate: &RateArray,
    c: NodeId,
    r: NodeId,
    deployment: &Deployment,
) -> Result<RateArray> {
    if c == r || r >= rate.len() || c >= rate.len() {
        return Err(Error::InvalidRateArray(format!(
            "reroute needs two distinct in-matrix nodes, got c={c}, r={r}"
        )));
    }
    if rate.outgoing(r) != 0.0 || rate.incoming(r) != 0.0 {
        return Err(Error::InvalidRateArray(format!(
            "relay {r} already carries traffic"
        )));
    }
    let neighbors = upper_neighbors(c, rate);
    if neighbors.is_empty() {
        return Ok(rate.clone());
    }
    let range = deployment.comm_range + 1e-9;
    if deployment.distance(c, r) > range {
        return Err(Error::Infeasible(format!(
            "relay {r} is out of range of node {c}"
        )));
    }
    for &j in &neighbors {
        if deployment.distance(r, j) > range {
            return Err(Error::Infeasible(format!(
                "relay {r} is out of range of neighbor {j}"
            )));
        }
    }
    let mut out = rate.clone();
    let mut total = 0.0;
    for &j in &neighbors {
        let v = rate.get(c, j);
        out.set(r, j, v);
        out.set(c, j, 0.0);
        total += v;
    }
    out.set(c, r, total);
    Ok(out)
}

/// Removes relay `r` from the routing by handing its forwarded traffic back
/// to its upstream nodes: each in-neighbor sends its share directly to `r`'s
/// out-neighbors, split proportionally. With the single in-neighbor that
/// reroutes create, this exactly restores direct transmission.
///
/// The relay's row and column end up all zero; every new direct link must
/// stay within comm range.
pub fn splice_out_relay(
    rate: &RateArray,
    r: NodeId,
    deployment: &Deployment,
) -> Result<RateArray> {
    if deployment.kind(r) != NodeKind::Relay {
        return Err(Error::InvalidRateArray(format!(
            "node {r} is not a relay; refusing to splice it out"
        )));
    }
    let inflow = rate.incoming(r);
    let outflow = rate.outgoing(r);
    let mut out = rate.clone();
    if inflow == 0.0 && outflow == 0.0 {
        return Ok(out);
    }
    if (inflow - outflow).abs() > 1e-6 {
        return Err(Error::InvalidRateArray(format!(
            "relay {r} is unbalanced (in {inflow}, out {outflow}); cannot splice"
        )));
    }
    let sources = rate.in_neighbors(r);
    let targets = rate.out_neighbors(r);
    let range = deployment.comm_range + 1e-9;
    for &u in &sources {
        for &v in &targets {
            if u == v {
                // A node both feeding and fed by the relay means a flow
                // cycle; no direct-link rewrite can preserve balance.
                return Err(Error::InvalidRateArray(format!(
                    "relay {r} forms a cycle with node {u}; cannot splice"
                )));
            }
            if deployment.distance(u, v) > range {
                return Err(Error::Infeasible(format!(
                    "splicing out relay {r} would need an over-range link {u} -> {v}"
                )));
            }
        }
    }
    for &u in &sources {
        let share = rate.get(u, r) / inflow;
        out.set(u, r, 0.0);
        for &v in &targets {
            out.add(u, v, share * rate.get(r, v));
        }
    }
    for &v in &targets {
        out.set(r, v, 0.0);
    }
    Ok(out)
}
