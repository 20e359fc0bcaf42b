//! Generate a random connected deployment, route it, and see who dies first.
//!
//! Run with: cargo run --example route_and_lifetime

use uasn::harness::generate_deployment;
use uasn::model::{network_lifetime, node_lifetimes, EnergyModel, NodeKind};
use uasn::orns::bottleneck_node;
use uasn::routing::upper_neighbors;
use uasn::SimConfig;

fn main() -> uasn::Result<()> {
    // A tighter field than the default so a dozen nodes connect reliably;
    // with the default 1000 m radius and 2000 m depth a random draw this
    // small almost never reaches the buoy.
    let cfg = SimConfig {
        r_s_m: 400.0,
        h_s: 800.0,
        ..SimConfig::default()
    };
    let model = EnergyModel::from_config(&cfg)?;

    // rf = 0.25: the node that ends up critical starts at a quarter charge.
    let (deployment, rate) = generate_deployment(&cfg, 12, 0.25, 7)?;

    println!("{:>4} {:>8} {:>9} {:>10} {:>12} {:>14}", "id", "kind", "z (m)", "g (bit/s)", "energy (J)", "lifetime (s)");
    let lifetimes = node_lifetimes(&rate, &deployment, &model);
    for node in deployment.nodes() {
        let kind = match node.kind {
            NodeKind::SurfaceBuoy => "buoy",
            NodeKind::Sensor => "sensor",
            NodeKind::Relay => "relay",
        };
        println!(
            "{:>4} {kind:>8} {:>9.1} {:>10} {:>12.0} {:>14.4e}",
            node.id,
            node.position.z(),
            node.generation_rate,
            node.residual_energy,
            lifetimes[node.id],
        );
    }

    let c = bottleneck_node(&rate, &deployment, &model).expect("every sensor generates traffic");
    println!();
    println!(
        "network lifetime {:.4e} s, pinned by node {c}",
        network_lifetime(&rate, &deployment, &model)
    );
    println!(
        "node {c} forwards to {:?}; relays for {c} would be placed inside the hull of those targets",
        upper_neighbors(c, &rate)
    );
    Ok(())
}
