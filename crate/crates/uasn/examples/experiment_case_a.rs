//! A small seeded sweep: case A, every method, with the plot tables.
//!
//! Case A gives the critical node a quarter charge and budgets relays for
//! 30% of the sensor count. Each seed draws a fresh connected deployment,
//! places relays per method, prunes them, then simulates battery drain to
//! the first death (or the horizon). Everything is deterministic in the
//! seed list, so reruns reproduce the files byte for byte.
//!
//! Run with: cargo run --example experiment_case_a

use uasn::harness::{run_experiment, Case, Method, Scenario};
use uasn::io;
use uasn::SimConfig;

fn main() -> uasn::Result<()> {
    let cfg = SimConfig {
        r_s_m: 400.0,
        h_s: 800.0,
        ..SimConfig::default()
    };

    let mut reports = Vec::new();
    for method in Method::ALL {
        let scenario = Scenario {
            case: Case::A,
            n: 10,
            method,
            selection: true,
            seeds: (0..5).collect(),
        };
        let report = run_experiment(&scenario, &cfg)?;
        println!(
            "{method:>8}: mean lifetime {:>12.4e} s, stddev {:>12.4e}, IEC {:.4}, kept {:.1} relays on average",
            report.mean_lifetime_s.unwrap_or(f64::NAN),
            report.stddev_lifetime_s.unwrap_or(f64::NAN),
            report.iec.unwrap_or(f64::NAN),
            report
                .per_seed
                .iter()
                .map(|s| s.relays_kept as f64)
                .sum::<f64>()
                / report.per_seed.len() as f64
        );
        reports.push(report);
    }

    let dir = std::env::temp_dir().join("uasn_case_a");
    std::fs::create_dir_all(&dir)?;
    io::save_reports(&dir.join("report.json"), &reports)?;
    io::save_lifetime_csv(&dir.join("lifetime.csv"), &reports)?;
    io::save_iec_csv(&dir.join("iec.csv"), &reports)?;
    println!();
    println!("wrote report.json, lifetime.csv, iec.csv to {}", dir.display());
    Ok(())
}
