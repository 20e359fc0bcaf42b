//! Solve one relay placement for a hand-built bottleneck.
//!
//! The relay serves the critical node c and must (a) cost c as little
//! transmit power as possible and (b) itself outlive c's new lifetime. The
//! search runs in barycentric coordinates over the hull of c's forwarding
//! targets and c itself, so candidates never leave the region where the
//! reroute makes geometric sense.
//!
//! Run with: cargo run --example place_single_relay

use uasn::geom::Point3;
use uasn::model::{network_lifetime, Deployment, EnergyModel, Field, Node, NodeKind};
use uasn::orns::{solve_placement, PlacementSettings};
use uasn::routing::{build_initial_rate_array, reroute_through_relay, RoutingPolicy};
use uasn::SimConfig;

fn main() -> uasn::Result<()> {
    let cfg = SimConfig::default();
    let model = EnergyModel::from_config(&cfg)?;
    let node = |id, kind, x: f64, z: f64, g: f64| Node {
        id,
        kind,
        position: Point3::new(x, 0.0, z),
        residual_energy: cfg.eps_p_j,
        primary_energy: cfg.eps_p_j,
        generation_rate: g,
    };

    // Node 2 sits deep and routes through node 1 over a long, expensive
    // hop; that hop makes node 2 the network bottleneck.
    let mut deployment = Deployment::new(
        vec![
            node(0, NodeKind::SurfaceBuoy, 0.0, 0.0, 0.0),
            node(1, NodeKind::Sensor, -20.0, -250.0, 120.0),
            node(2, NodeKind::Sensor, -80.0, -700.0, 90.0),
        ],
        500.0,
        Field { radius: 1000.0, depth: 2000.0 },
    )?;
    let rate = build_initial_rate_array(&deployment, &model, RoutingPolicy::MinEnergyPath)?;
    println!(
        "before: network lifetime {:.4e} s",
        network_lifetime(&rate, &deployment, &model)
    );

    let settings = PlacementSettings::from_config(&cfg);
    let placement = solve_placement(2, &rate, &deployment, &model, &settings)?;

    println!("relay at {:?} ({:?})", placement.position.0, placement.status);
    println!(
        "barycentric weights over targets {:?} then node 2: {:?}",
        placement.neighbors, placement.weights
    );
    println!(
        "link power 2->relay: {:.4} mW per bit/s (direct hop was {:.4})",
        placement.link_power,
        model.transmit_power_per_bit(deployment.distance(1, 2))?
    );
    println!(
        "lifetimes after reroute: node 2 {:.4e} s, relay {:.4e} s",
        placement.tau_bottleneck, placement.tau_relay
    );

    // Apply it for real and confirm the predicted lifetime.
    let r = deployment.push_relay(placement.position, cfg.eps_p_j)?;
    let rerouted = reroute_through_relay(&rate.expanded(1), 2, r, &deployment)?;
    println!(
        "after: network lifetime {:.4e} s",
        network_lifetime(&rerouted, &deployment, &model)
    );
    Ok(())
}
