//! Prune an over-provisioned relay fleet without giving up lifetime.
//!
//! Placement happily spends its whole budget; selection then asks which of
//! those relays the achieved lifetime actually needs. Keeping a relay costs
//! its forwarding power; dropping one re-splices its traffic onto direct
//! links. The exact search enumerates every keep/drop pattern (up to a cap)
//! and picks the best feasible one, preferring fewer relays on ties.
//!
//! Run with: cargo run --example select_relays

use uasn::harness::generate_deployment;
use uasn::model::{network_lifetime, EnergyModel};
use uasn::orns::{orns_run, OrnsSettings};
use uasn::rnmi::{select_relays, SelectionProblem, SelectionSettings};
use uasn::SimConfig;

fn main() -> uasn::Result<()> {
    let cfg = SimConfig {
        r_s_m: 400.0,
        h_s: 800.0,
        ..SimConfig::default()
    };
    let model = EnergyModel::from_config(&cfg)?;
    let (deployment, rate) = generate_deployment(&cfg, 10, 0.25, 3)?;

    // Deploy generously: a relay per bottleneck until they stop helping.
    let settings = OrnsSettings::from_config(&cfg);
    let out = orns_run(&deployment, &rate, &model, 8, &settings)?;
    let relays = out.deployment.len() - deployment.len();
    println!(
        "placed {relays} relays; lifetime {:.4e} s",
        out.network_lifetime
    );

    // The floor is the achieved lifetime itself: selection may only drop
    // relays whose removal costs nothing.
    let problem = SelectionProblem::from_network(
        &out.deployment,
        &out.rate,
        &model,
        out.network_lifetime,
        cfg.omega1,
        None,
    )?;
    let result = select_relays(
        &problem,
        &out.deployment,
        &out.rate,
        &model,
        &SelectionSettings::from_config(&cfg),
    )?;

    println!();
    println!("{:>4} {:>14} {:>14} {:>18} kept?", "id", "p_relay (mW)", "p_direct (mW)", "tau if dropped (s)");
    for (v, keep) in result.per_relay.iter().zip(&result.keep) {
        println!(
            "{:>4} {:>14.4e} {:>14.4e} {:>18.4e} {}",
            v.id, v.p_relay, v.p_direct, v.lifetime_if_dropped, keep
        );
    }
    println!();
    println!(
        "kept {:?}, dropped {:?} ({} search)",
        result.kept,
        result.dropped,
        if result.exact { "exact" } else { "greedy" }
    );
    println!(
        "lifetime after drops: {:.4e} s (floor {:.4e} s); recheck: {:.4e} s",
        result.achieved_lifetime,
        result.tau_star,
        network_lifetime(&result.rate, &out.deployment, &model)
    );

    // Trade lifetime for hardware: at half the floor, the tail of the relay
    // chain becomes optional and the optimizer sheds it.
    let relaxed = SelectionProblem::from_network(
        &out.deployment,
        &out.rate,
        &model,
        0.5 * out.network_lifetime,
        cfg.omega1,
        None,
    )?;
    let result = select_relays(
        &relaxed,
        &out.deployment,
        &out.rate,
        &model,
        &SelectionSettings::from_config(&cfg),
    )?;
    println!();
    println!(
        "at half the floor: kept {:?}, dropped {:?}, lifetime {:.4e} s",
        result.kept, result.dropped, result.achieved_lifetime
    );
    Ok(())
}
