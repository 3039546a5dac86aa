//! Link-level abstraction: MMSE receiver, precoding, CSI, MCS and power.

pub mod codebook;
pub mod csi;
pub mod mcs;
pub mod mmse;
pub mod olla;
pub mod power;

use serde::{Deserialize, Serialize};

pub use codebook::{Codebook, PrecoderId};
pub use csi::{compute_report, CsiConfig, CsiReport};
pub use mcs::{block_outcome, effective_sinr, select_mcs, transport_bits, McsChoice, McsId, McsTable, Outcome};
pub use olla::OllaConfig;
pub use mmse::{mmse_sinr, Covariance, Interferer, StreamSinrs, WhitenedGram};
pub use power::{ul_tx_power, PowerConfig};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhyConfig {
    pub resource_blocks: u32,
    pub subcarriers_per_rb: u32,
    pub symbols_per_subframe: u32,
    pub overhead_symbols: u32,
    pub target_bler: f64,
    /// Interferers modelled with their full spatial signature; the weaker
    /// remainder is added as white noise at its mean power.
    pub max_explicit_interferers: usize,
    pub csi: CsiConfig,
    pub olla: OllaConfig,
    pub power: PowerConfig,
    pub mcs: McsTable,
}

impl Default for PhyConfig {
    fn default() -> Self {
        PhyConfig {
            resource_blocks: 50,
            subcarriers_per_rb: 12,
            symbols_per_subframe: 14,
            overhead_symbols: 3,
            target_bler: 0.1,
            max_explicit_interferers: 6,
            csi: CsiConfig::default(),
            olla: OllaConfig::default(),
            power: PowerConfig::default(),
            mcs: McsTable::default(),
        }
    }
}

impl PhyConfig {
    /// Data resource elements per subframe.
    pub fn n_data_re(&self) -> u32 {
        self.resource_blocks * self.subcarriers_per_rb * self.symbols_per_subframe.saturating_sub(self.overhead_symbols)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_data_re() == 0 {
            return Err(Error::config("phy", "no data resource elements per subframe"));
        }
        if !(0.0..1.0).contains(&self.target_bler) {
            return Err(Error::config("phy.target_bler", "must lie in [0, 1)"));
        }
        self.csi.validate()?;
        self.olla.validate()?;
        self.power.validate()?;
        self.mcs.validate()
    }
}
