//! Sweep Thorp's attenuation fit over the frequencies acoustic modems use.
//!
//! Run with: cargo run --example thorp_absorption

use uasn::model::{thorp_absorption, thorp_db_per_km, THORP_MIN_VALID_KHZ};

fn main() -> uasn::Result<()> {
    println!("{:>10} {:>14} {:>16}", "f (kHz)", "A(f) dB/km", "alpha (per km)");
    for &f in &[0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0] {
        println!(
            "{f:>10} {:>14.6} {:>16.6}",
            thorp_db_per_km(f)?,
            thorp_absorption(f)?
        );
    }

    // The fit is empirical; below ~0.2 kHz it is extrapolation, which the
    // model flags rather than refusing.
    println!();
    println!(
        "validity floor: {THORP_MIN_VALID_KHZ} kHz; A({THORP_MIN_VALID_KHZ}) = {:.6} dB/km",
        thorp_db_per_km(THORP_MIN_VALID_KHZ)?
    );

    // At 1 kHz a kilometre of seawater eats about 1.5% of the signal energy
    // on top of spreading loss; absorption only starts to dominate once the
    // carrier climbs past a few tens of kHz.
    let alpha = thorp_absorption(1.0)?;
    println!(
        "1 kHz over 1 km: {:.3}% absorbed",
        (1.0 - 1.0 / alpha) * 100.0
    );
    Ok(())
}
