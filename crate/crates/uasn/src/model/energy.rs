//! Acoustic link energy model.
//!
//! Absorption follows Thorp's empirical formula, which gives attenuation in
//! dB/km for a carrier frequency in kHz:
//!
//! ```text
//! 10 log a(f) = 0.1 f^2 / (1 + f^2) + 40 f^2 / (4100 + f^2)
//!             + 2.75e-4 f^2 + 0.003
//! ```
//!
//! Transmit power per bit/s over a link of length `d` metres combines an
//! electronics floor `p_s` with absorption and polynomial spreading loss:
//! spherical-like `d^2` below the crossover distance `d_t`, `d^4` at and
//! beyond it. The absorption exponent is `d/1000` so that `a(f)` keeps its
//! per-kilometre meaning while the spreading polynomial stays in metres;
//! reading the exponent in metres instead would make absorption negligible
//! at every realistic range and is documented as the rejected alternative.

use crate::config::SimConfig;
use crate::error::{Error, Result};

/// Thorp's fit is only trusted down to roughly this frequency.
pub const THORP_MIN_VALID_KHZ: f64 = 0.2;

/// Attenuation in dB/km at `f_khz` kilohertz.
pub fn thorp_db_per_km(f_khz: f64) -> Result<f64> {
    if !(f_khz > 0.0) || !f_khz.is_finite() {
        return Err(Error::Domain(format!(
            "Thorp attenuation needs a positive frequency, got {f_khz} kHz"
        )));
    }
    let f2 = f_khz * f_khz;
    Ok(0.1 * f2 / (1.0 + f2) + 40.0 * f2 / (4100.0 + f2) + 2.75e-4 * f2 + 3.0e-3)
}

/// Linear absorption coefficient per kilometre: 10^(A(f)/10).
pub fn thorp_absorption(f_khz: f64) -> Result<f64> {
    Ok(10f64.powf(thorp_db_per_km(f_khz)? / 10.0))
}

/// Per-link power model with a cached absorption coefficient.
#[derive(Debug, Clone)]
pub struct EnergyModel {
    p_s: f64,
    p_r: f64,
    d_t: f64,
    f_khz: f64,
    l_c: f64,
    alpha: f64,
    ln_alpha: f64,
}

impl EnergyModel {
    pub fn new(p_s_mw: f64, p_r_mw: f64, d_t_m: f64, f_khz: f64, l_c_bps: f64) -> Result<Self> {
        for (name, v) in [
            ("p_s_mw", p_s_mw),
            ("p_r_mw", p_r_mw),
            ("d_t_m", d_t_m),
            ("l_c_bps", l_c_bps),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        let alpha = thorp_absorption(f_khz)?;
        Ok(EnergyModel {
            p_s: p_s_mw,
            p_r: p_r_mw,
            d_t: d_t_m,
            f_khz,
            l_c: l_c_bps,
            alpha,
            ln_alpha: alpha.ln(),
        })
    }

    pub fn from_config(cfg: &SimConfig) -> Result<Self> {
        Self::new(cfg.p_s_mw, cfg.p_r_mw, cfg.d_t_m, cfg.f_khz, cfg.l_c_bps)
    }

    /// Transmit power in mW per bit/s over `d` metres.
    ///
    /// Exactly at the crossover the steeper spreading branch applies, so the
    /// function jumps upward at `d_t` and is convex on each side of it.
    pub fn transmit_power_per_bit(&self, d: f64) -> Result<f64> {
        if d < 0.0 || !d.is_finite() {
            return Err(Error::Domain(format!(
                "link length must be non-negative, got {d}"
            )));
        }
        Ok(self.power(d))
    }

    /// Unchecked transmit power; hot-path twin of `transmit_power_per_bit`.
    pub(crate) fn power(&self, d: f64) -> f64 {
        debug_assert!(d >= 0.0);
        let spread = if d < self.d_t {
            d * d
        } else {
            let d2 = d * d;
            d2 * d2
        };
        self.p_s + self.alpha.powf(d / 1000.0) * spread
    }

    /// dp/dd on the branch that applies at `d`; the right branch at `d_t`.
    pub(crate) fn power_gradient(&self, d: f64) -> f64 {
        debug_assert!(d >= 0.0);
        let absorb = self.alpha.powf(d / 1000.0);
        if d < self.d_t {
            absorb * (self.ln_alpha / 1000.0 * d * d + 2.0 * d)
        } else {
            let d2 = d * d;
            absorb * (self.ln_alpha / 1000.0 * d2 * d2 + 4.0 * d2 * d)
        }
    }

    /// Receive power in mW per bit/s, distance independent.
    pub fn receive_power_per_bit(&self) -> f64 {
        self.p_r
    }

    pub fn link_capacity(&self) -> f64 {
        self.l_c
    }

    pub fn crossover_distance(&self) -> f64 {
        self.d_t
    }

    pub fn frequency_khz(&self) -> f64 {
        self.f_khz
    }

    pub fn absorption(&self) -> f64 {
        self.alpha
    }

    /// False when the carrier sits below the trusted range of Thorp's fit.
    pub fn frequency_within_thorp_validity(&self) -> bool {
        self.f_khz >= THORP_MIN_VALID_KHZ
    }
}
