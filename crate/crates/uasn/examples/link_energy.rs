//! Transmit power per bit over link length, and the spreading crossover.
//!
//! Below d_t the model charges d^2 (spherical-like spreading); from d_t on
//! it charges d^4. The jump at the crossover is what makes one long hop so
//! much worse than two short ones, and that asymmetry is the entire reason
//! relays pay for themselves.
//!
//! Run with: cargo run --example link_energy

use uasn::model::EnergyModel;
use uasn::SimConfig;

fn main() -> uasn::Result<()> {
    let cfg = SimConfig::default();
    let model = EnergyModel::from_config(&cfg)?;
    let d_t = model.crossover_distance();

    println!("{:>10} {:>18}", "d (m)", "p(d) mW per bit/s");
    for &d in &[0.0, 20.0, 50.0, d_t - 1.0, d_t, d_t + 1.0, 150.0, 300.0, 500.0] {
        println!("{d:>10.1} {:>18.6}", model.transmit_power_per_bit(d)?);
    }

    let below = model.transmit_power_per_bit(d_t - 1e-9)?;
    let at = model.transmit_power_per_bit(d_t)?;
    println!();
    println!("crossover at {d_t} m: power jumps x{:.0}", at / below);

    // One 500 m hop against two 250 m hops, for a 100 bit/s flow. The relay
    // also has to receive the flow, so count that too; the split still wins
    // by orders of magnitude.
    let g = 100.0;
    let single = model.transmit_power_per_bit(500.0)? * g;
    let split = (model.transmit_power_per_bit(250.0)? * 2.0 + model.receive_power_per_bit()) * g;
    println!(
        "500 m direct: {:.3e} mW; two 250 m hops (+1 receive): {:.3e} mW; ratio {:.1}",
        single,
        split,
        single / split
    );
    Ok(())
}
