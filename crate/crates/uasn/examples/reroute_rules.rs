//! Flow surgery on a rate array: route a relay in, then splice it back out.
//!
//! A reroute moves the bottleneck's entire outflow onto a relay; a splice
//! undoes it, handing each feeder's share back to the relay's targets in
//! proportion. Both operations preserve every flow balance exactly, which
//! is what keeps lifetimes comparable before and after.
//!
//! Run with: cargo run --example reroute_rules

use uasn::geom::Point3;
use uasn::model::{validate_rate_array, Deployment, EnergyModel, Field, Node, NodeKind};
use uasn::routing::{build_initial_rate_array, reroute_through_relay, splice_out_relay, RoutingPolicy};
use uasn::SimConfig;

fn show(rate: &uasn::model::RateArray, label: &str) {
    println!("{label}:");
    for (i, row) in rate.rows().enumerate() {
        let links: Vec<String> = row
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > 0.0)
            .map(|(j, v)| format!("{i}->{j}: {v:.0}"))
            .collect();
        if !links.is_empty() {
            println!("  {}", links.join(", "));
        }
    }
}

fn main() -> uasn::Result<()> {
    let cfg = SimConfig::default();
    let model = EnergyModel::from_config(&cfg)?;
    let node = |id, kind, z: f64, g: f64| Node {
        id,
        kind,
        position: Point3::new(0.0, 0.0, z),
        residual_energy: cfg.eps_p_j,
        primary_energy: cfg.eps_p_j,
        generation_rate: g,
    };

    // A vertical chain: two sensors under the buoy.
    let mut deployment = Deployment::new(
        vec![
            node(0, NodeKind::SurfaceBuoy, 0.0, 0.0),
            node(1, NodeKind::Sensor, -450.0, 120.0),
            node(2, NodeKind::Sensor, -900.0, 80.0),
        ],
        500.0,
        Field { radius: 1000.0, depth: 2000.0 },
    )?;

    let rate = build_initial_rate_array(&deployment, &model, RoutingPolicy::MinEnergyPath)?;
    show(&rate, "initial routes");

    // Drop a relay halfway along node 1's expensive hop to the buoy and
    // push 1's outflow through it.
    let r = deployment.push_relay(Point3::new(0.0, 0.0, -225.0), cfg.eps_p_j)?;
    let rerouted = reroute_through_relay(&rate.expanded(1), 1, r, &deployment)?;
    show(&rerouted, "after rerouting node 1 through the relay");

    // Undo it. The relay goes idle and flows return to the original shape.
    let spliced = splice_out_relay(&rerouted, r, &deployment)?;
    show(&spliced, "after splicing the relay back out");

    for (rate, label) in [(&rerouted, "rerouted"), (&spliced, "spliced")] {
        let violations = validate_rate_array(rate, &deployment, &model, 1e-9)?;
        println!("{label}: {} balance/capacity/range violations", violations.len());
    }
    Ok(())
}
