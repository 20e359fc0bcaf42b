//! The full placement loop: find the bottleneck, place a relay for it,
//! reroute, repeat until the budget runs out or relays stop helping.
//!
//! Run with: cargo run --example orns_pipeline

use uasn::harness::generate_deployment;
use uasn::model::{network_lifetime, EnergyModel};
use uasn::orns::{orns_run, OrnsSettings};
use uasn::SimConfig;

fn main() -> uasn::Result<()> {
    let cfg = SimConfig {
        r_s_m: 400.0,
        h_s: 800.0,
        ..SimConfig::default()
    };
    let model = EnergyModel::from_config(&cfg)?;
    let (deployment, rate) = generate_deployment(&cfg, 12, 0.25, 7)?;
    let before = network_lifetime(&rate, &deployment, &model);

    let settings = OrnsSettings::from_config(&cfg);
    let outcome = orns_run(&deployment, &rate, &model, 5, &settings)?;

    println!("{:>4} {:>9} {:>28} {:>16} note", "iter", "critical", "relay position", "lifetime (s)");
    for rec in &outcome.records {
        let (pos, note) = match (&rec.position, &rec.reason) {
            (Some(p), _) => (
                format!("({:7.1}, {:7.1}, {:7.1})", p.x(), p.y(), p.z()),
                String::new(),
            ),
            (None, Some(reason)) => ("-".into(), format!("skipped: {reason}")),
            (None, None) => ("-".into(), "skipped".into()),
        };
        println!(
            "{:>4} {:>9} {:>28} {:>16.4e} {note}",
            rec.iter, rec.critical_node, pos, rec.lifetime_after
        );
    }

    println!();
    println!(
        "lifetime {:.4e} -> {:.4e} s with {} relays",
        before,
        outcome.network_lifetime,
        outcome.deployment.len() - deployment.len()
    );
    Ok(())
}
