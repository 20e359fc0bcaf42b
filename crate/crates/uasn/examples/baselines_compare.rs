//! The hull-based placement against both baselines on one deployment.
//!
//! The line-segment baseline restricts each relay to the segment between
//! the bottleneck and its farthest forwarding target; since that segment is
//! an edge of the hull the full solver searches, it can tie but never win.
//! The random-anchor baseline draws relay sites blindly and only tunes
//! their depth, so it usually trails both.
//!
//! Run with: cargo run --example baselines_compare

use uasn::baselines::{lsrnp_run, ra_run};
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
    let settings = OrnsSettings::from_config(&cfg);
    let budget = 4;

    println!(
        "{:>6} {:>8} {:>9} {:>16} {:>8}",
        "seed", "method", "placed", "lifetime (s)", "gain"
    );
    for seed in [3, 7, 11] {
        let (deployment, rate) = generate_deployment(&cfg, 12, 0.25, seed)?;
        let before = network_lifetime(&rate, &deployment, &model);

        let runs = [
            ("orns", orns_run(&deployment, &rate, &model, budget, &settings)?),
            ("lsrnp", lsrnp_run(&deployment, &rate, &model, budget, &settings)?),
            ("ra", ra_run(&deployment, &rate, &model, budget, &settings, seed)?),
        ];
        for (name, outcome) in runs {
            println!(
                "{seed:>6} {name:>8} {:>9} {:>16.4e} {:>7.1}x",
                outcome.deployment.len() - deployment.len(),
                outcome.network_lifetime,
                outcome.network_lifetime / before
            );
        }
        println!("{:>6} {:>8} {:>9} {before:>16.4e} {:>7.1}x", seed, "none", 0, 1.0);
        println!();
    }
    Ok(())
}
