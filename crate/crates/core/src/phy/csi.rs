//! Periodic, delayed channel-state reports: rank, precoder and MCS.

use serde::{Deserialize, Serialize};

use super::codebook::{Codebook, PrecoderId};
use super::mcs::{effective_sinr, lin_to_db, transport_bits, McsId, McsTable};
use super::mmse::WhitenedGram;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CsiConfig {
    pub feedback_period_ms: u64,
    pub feedback_delay_ms: u64,
    pub max_rank: usize,
    /// Fading realisations, one frame apart, averaged into one wideband
    /// report. Only useful with per-subframe fading.
    pub measurement_samples: usize,
}

impl Default for CsiConfig {
    fn default() -> Self {
        CsiConfig { feedback_period_ms: 50, feedback_delay_ms: 10, max_rank: 2, measurement_samples: 1 }
    }
}

impl CsiConfig {
    pub fn validate(&self) -> Result<()> {
        if self.feedback_period_ms == 0 {
            return Err(Error::config("phy.csi.feedback_period_ms", "must be positive"));
        }
        if !(1..=super::codebook::MAX_RANK).contains(&self.max_rank) {
            return Err(Error::config("phy.csi.max_rank", "must be 1 or 2"));
        }
        if self.measurement_samples == 0 {
            return Err(Error::config("phy.csi.measurement_samples", "must be positive"));
        }
        Ok(())
    }

    /// Latest measurement instant whose report has arrived by subframe `t`.
    pub fn usable_measurement_instant(&self, t: u64) -> Option<u64> {
        let ready = t.checked_sub(self.feedback_delay_ms)?;
        Some(ready / self.feedback_period_ms * self.feedback_period_ms)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsiReport {
    pub precoder: PrecoderId,
    pub mcs: McsId,
    /// Effective SINR predicted for the chosen precoder, dB.
    pub eff_sinr_db: f64,
}

impl CsiReport {
    /// Used before any report is available: rank 1, first precoder, lowest MCS.
    pub fn cold_start(table: &McsTable) -> Self {
        CsiReport { precoder: PrecoderId::FIRST, mcs: table.lowest(), eff_sinr_db: f64::NEG_INFINITY }
    }

    pub fn rank(&self) -> usize {
        self.precoder.rank
    }
}

/// Evaluates every codebook entry up to `max_rank` and keeps the one with the
/// largest transport block; ties go to higher SINR, then to the earlier entry.
/// Each entry is scored by its mutual information averaged over all
/// `samples` (one whitened Gram matrix per measured fading realisation).
pub fn compute_report(
    samples: &[WhitenedGram],
    tx_power_w: f64,
    codebook: &Codebook,
    max_rank: usize,
    table: &McsTable,
    n_data_re: u32,
) -> Result<CsiReport> {
    let mut best: Option<(u64, f64, CsiReport)> = None;
    for id in codebook.candidates(max_rank) {
        let q = codebook.precoder(id);
        let mut mi = 0.0;
        for gram in samples {
            let sinrs = gram.stream_sinrs(tx_power_w, q)?;
            mi += effective_sinr(sinrs.as_slice()).ln_1p();
        }
        let eff_db = lin_to_db((mi / samples.len().max(1) as f64).exp_m1());
        let mcs = table.select(eff_db);
        let bits = if table.decodable(eff_db) { transport_bits(table, mcs, id.rank, n_data_re) } else { 0 };
        let better = match &best {
            None => true,
            Some((b, s, _)) => bits > *b || (bits == *b && eff_db > *s),
        };
        if better {
            best = Some((bits, eff_db, CsiReport { precoder: id, mcs, eff_sinr_db: eff_db }));
        }
    }
    Ok(best.map(|(_, _, r)| r).unwrap_or_else(|| CsiReport::cold_start(table)))
}
