//! Run configuration.
//!
//! All knobs live in one TOML-serializable struct so that a single file pins
//! an entire experiment. Every field has a default matching the reference
//! parameter set (2 km deep field, 500 m acoustic modems at 1 kHz, 10 kbit/s
//! link capacity, 400 kJ batteries).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Field depth H_s, metres.
    pub h_s: f64,
    /// Communication range C_R, metres.
    pub c_r: f64,
    /// Carrier frequency, kHz.
    pub f_khz: f64,
    /// Electronics transmit power floor, mW per bit/s.
    pub p_s_mw: f64,
    /// Receive power, mW per bit/s.
    pub p_r_mw: f64,
    /// Spreading crossover distance d_t, metres.
    pub d_t_m: f64,
    /// Per-node link capacity L_c, bit/s.
    pub l_c_bps: f64,
    /// Primary (full battery) energy, joules.
    pub eps_p_j: f64,
    /// Sensor generation rate bounds, bit/s (integers drawn uniformly).
    pub g_min: u32,
    pub g_max: u32,
    /// Field radius R_s, metres.
    pub r_s_m: f64,
    /// Selection objective weight on the deployment-count term; the energy
    /// term gets 1 - omega1.
    pub omega1: f64,
    /// Smoothing sharpness for the approximate relay count. 0 picks a value
    /// automatically from the relay power scale.
    pub eta: f64,
    pub tolerances: Tolerances,
    pub solver: SolverConfig,
    /// Drain horizon cap T, seconds.
    pub horizon_s: f64,
    /// Normalizing variance for the energy-consumption index. 0 means
    /// eps_p_j squared.
    pub sigma0_sq: f64,
    /// Connected-deployment generation retries.
    pub max_generation_attempts: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative slack allowed on the relay-outlives-critical constraint.
    pub lifetime_rel: f64,
    /// Allowed deviation of barycentric coordinates from the unit simplex.
    pub simplex: f64,
    /// Relative objective change that counts as solver convergence.
    pub objective_rel: f64,
    /// Relative slack on the selection lifetime floor.
    pub selection_rel: f64,
    /// Absolute slack on flow balance checks, bit/s.
    pub balance_abs: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub outer_max_iters: usize,
    pub inner_max_iters: usize,
    /// Random restarts on top of the deterministic start set.
    pub multistart: usize,
    /// Minimum relay distance from the node it serves, metres.
    pub min_separation_m: f64,
    /// Seed for the solver's own restart draws.
    pub seed: u64,
    /// Skip relays that cannot help (true) or deploy unconditionally (false).
    pub skip_unhelpful: bool,
    /// Subset-enumeration cutoff for exact relay selection; larger counts
    /// fall back to the greedy pass.
    pub exact_selection_cap: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            h_s: 2000.0,
            c_r: 500.0,
            f_khz: 1.0,
            p_s_mw: 1.0,
            p_r_mw: 1.0,
            d_t_m: 87.0,
            l_c_bps: 10_000.0,
            eps_p_j: 4.0e5,
            g_min: 10,
            g_max: 200,
            r_s_m: 1000.0,
            omega1: 0.5,
            eta: 0.0,
            tolerances: Tolerances::default(),
            solver: SolverConfig::default(),
            horizon_s: 1.0e6,
            sigma0_sq: 0.0,
            max_generation_attempts: 1000,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            lifetime_rel: 1e-6,
            simplex: 1e-8,
            objective_rel: 1e-6,
            selection_rel: 1e-9,
            balance_abs: 1e-9,
        }
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            outer_max_iters: 500,
            inner_max_iters: 200,
            multistart: 4,
            min_separation_m: 1.0,
            seed: 0,
            skip_unhelpful: true,
            exact_selection_cap: 14,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("h_s", self.h_s),
            ("c_r", self.c_r),
            ("f_khz", self.f_khz),
            ("p_s_mw", self.p_s_mw),
            ("p_r_mw", self.p_r_mw),
            ("d_t_m", self.d_t_m),
            ("l_c_bps", self.l_c_bps),
            ("eps_p_j", self.eps_p_j),
            ("r_s_m", self.r_s_m),
            ("horizon_s", self.horizon_s),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.g_min == 0 || self.g_min > self.g_max {
            return Err(Error::Config(format!(
                "generation bounds must satisfy 0 < g_min <= g_max, got [{}, {}]",
                self.g_min, self.g_max
            )));
        }
        if !(0.0..=1.0).contains(&self.omega1) {
            return Err(Error::Config(format!(
                "omega1 must lie in [0, 1], got {}",
                self.omega1
            )));
        }
        if self.eta < 0.0 {
            return Err(Error::Config(format!("eta must be >= 0, got {}", self.eta)));
        }
        if f64::from(self.g_max) > self.l_c_bps {
            return Err(Error::Config(
                "g_max exceeds link capacity; no sensor could forward its own traffic".into(),
            ));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: SimConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = toml::to_string_pretty(self)
            .map_err(|e| Error::Config(format!("serialize: {e}")))?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn sigma0_sq(&self) -> f64 {
        if self.sigma0_sq > 0.0 {
            self.sigma0_sq
        } else {
            self.eps_p_j * self.eps_p_j
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        SimConfig::default().validate().unwrap();
    }

    #[test]
    fn roundtrip_through_toml() {
        let cfg = SimConfig {
            r_s_m: 750.0,
            ..SimConfig::default()
        };
        let text = toml::to_string_pretty(&cfg).unwrap();
        let back: SimConfig = toml::from_str(&text).unwrap();
        assert_eq!(back.r_s_m, 750.0);
        assert_eq!(back.l_c_bps, cfg.l_c_bps);
    }

    #[test]
    fn partial_toml_fills_defaults() {
        let back: SimConfig = toml::from_str("r_s_m = 500.0\n").unwrap();
        assert_eq!(back.r_s_m, 500.0);
        assert_eq!(back.h_s, 2000.0);
        assert_eq!(back.tolerances.simplex, 1e-8);
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = SimConfig::default();
        cfg.omega1 = 1.5;
        assert!(cfg.validate().is_err());
        cfg = SimConfig::default();
        cfg.g_min = 0;
        assert!(cfg.validate().is_err());
    }
}
