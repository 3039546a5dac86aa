//! Uplink open-loop power control.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerConfig {
    pub bs_tx_power_dbm: f64,
    pub ue_max_power_dbm: f64,
    pub ul_pc_p0_dbm: f64,
    pub ul_pc_alpha: f64,
    /// Every UE transmits at `ue_max_power_dbm`.
    pub full_power: bool,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig {
            bs_tx_power_dbm: 24.0,
            ue_max_power_dbm: 23.0,
            ul_pc_p0_dbm: -76.0,
            ul_pc_alpha: 0.8,
            full_power: false,
        }
    }
}

impl PowerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.ul_pc_alpha) {
            return Err(Error::config("phy.power.ul_pc_alpha", "must lie in [0, 1]"));
        }
        if !self.bs_tx_power_dbm.is_finite() || !self.ue_max_power_dbm.is_finite() || !self.ul_pc_p0_dbm.is_finite() {
            return Err(Error::config("phy.power", "powers must be finite"));
        }
        Ok(())
    }
}

/// UE transmit power in dBm: `min(P_max, P0 + α·PL)`, with `PL` the serving
/// link loss in dB including shadowing.
pub fn ul_tx_power(cfg: &PowerConfig, pathloss_db: f64) -> f64 {
    if cfg.full_power {
        return cfg.ue_max_power_dbm;
    }
    (cfg.ul_pc_p0_dbm + cfg.ul_pc_alpha * pathloss_db).min(cfg.ue_max_power_dbm)
}
