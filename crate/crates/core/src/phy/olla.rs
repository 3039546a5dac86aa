//! Outer-loop link adaptation: a per-link SINR backoff driven by block
//! acknowledgements.

use serde::{Deserialize, Serialize};

use super::mcs::Outcome;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OllaConfig {
    pub enabled: bool,
    /// Backoff increase after a failed block, dB.
    pub step_db: f64,
    /// Block error rate the loop settles at.
    pub target_bler: f64,
    pub min_offset_db: f64,
    pub max_offset_db: f64,
}

impl Default for OllaConfig {
    fn default() -> Self {
        // The block model already loses 10% of blocks above threshold, so the
        // loop aims at roughly as many outages on top of that.
        OllaConfig { enabled: true, step_db: 0.5, target_bler: 0.2, min_offset_db: -5.0, max_offset_db: 10.0 }
    }
}

impl OllaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_db > 0.0) {
            return Err(Error::config("phy.olla.step_db", "must be positive"));
        }
        if !(self.target_bler > 0.0 && self.target_bler < 1.0) {
            return Err(Error::config("phy.olla.target_bler", "must lie in (0, 1)"));
        }
        if !(self.min_offset_db <= 0.0 && self.max_offset_db >= 0.0) {
            return Err(Error::config("phy.olla", "offset bounds must bracket zero"));
        }
        Ok(())
    }

    /// Offset after one outcome. At equilibrium the failure rate equals
    /// `target_bler`.
    pub fn update(&self, offset_db: f64, outcome: Outcome) -> f64 {
        if !self.enabled {
            return 0.0;
        }
        let next = match outcome {
            Outcome::Failure => offset_db + self.step_db,
            Outcome::Success => offset_db - self.step_db * self.target_bler / (1.0 - self.target_bler),
        };
        next.clamp(self.min_offset_db, self.max_offset_db)
    }
}
