//! Modulation-and-coding grid, link abstraction and block outcomes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Modulation {
    #[serde(rename = "QPSK")]
    Qpsk,
    #[serde(rename = "16QAM")]
    Qam16,
    #[serde(rename = "64QAM")]
    Qam64,
}

impl Modulation {
    pub fn bits_per_symbol(self) -> u32 {
        match self {
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
            Modulation::Qam64 => 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McsEntry {
    pub modulation: Modulation,
    pub code_rate: f64,
    /// Bits per resource element per layer.
    pub spectral_efficiency: f64,
    pub min_sinr_db: f64,
}

/// Index into an [`McsTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct McsId(pub usize);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McsTable {
    entries: Vec<McsEntry>,
}

const DEFAULT_TABLE: &str = include_str!("../../data/mcs_table.toml");

impl Default for McsTable {
    fn default() -> Self {
        let table: McsTable = toml::from_str(DEFAULT_TABLE).expect("bundled MCS table parses");
        table.validate().expect("bundled MCS table is valid");
        table
    }
}

impl McsTable {
    pub fn new(entries: Vec<McsEntry>) -> Result<Self> {
        let t = McsTable { entries };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::config("phy.mcs.entries", "table is empty"));
        }
        for (i, w) in self.entries.windows(2).enumerate() {
            if !(w[1].min_sinr_db > w[0].min_sinr_db) || !(w[1].spectral_efficiency > w[0].spectral_efficiency) {
                return Err(Error::config(
                    "phy.mcs.entries",
                    format!("entries {i} and {} are not strictly increasing", i + 1),
                ));
            }
        }
        for e in &self.entries {
            let cap = e.modulation.bits_per_symbol() as f64;
            if !(e.spectral_efficiency > 0.0) || e.spectral_efficiency > cap {
                return Err(Error::config(
                    "phy.mcs.entries",
                    format!("spectral efficiency {} outside (0, {cap}]", e.spectral_efficiency),
                ));
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &[McsEntry] {
        &self.entries
    }

    pub fn entry(&self, id: McsId) -> &McsEntry {
        &self.entries[id.0]
    }

    pub fn lowest(&self) -> McsId {
        McsId(0)
    }

    pub fn highest(&self) -> McsId {
        McsId(self.entries.len() - 1)
    }

    pub fn max_se(&self) -> f64 {
        self.entries[self.entries.len() - 1].spectral_efficiency
    }

    /// Highest entry whose threshold is at or below `eff_sinr_db`; the lowest
    /// entry when none qualifies.
    pub fn select(&self, eff_sinr_db: f64) -> McsId {
        let n = self.entries.partition_point(|e| e.min_sinr_db <= eff_sinr_db);
        McsId(n.saturating_sub(1))
    }

    /// True when the reported SINR clears the lowest threshold.
    pub fn decodable(&self, eff_sinr_db: f64) -> bool {
        eff_sinr_db >= self.entries[0].min_sinr_db
    }
}

/// Rank and MCS chosen for one transmission.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McsChoice {
    pub mcs: McsId,
    pub rank: usize,
}

/// MCS for a reported effective SINR (dB) at the reported rank.
pub fn select_mcs(reported_eff_sinr_db: f64, rank: usize, table: &McsTable) -> McsChoice {
    McsChoice { mcs: table.select(reported_eff_sinr_db), rank }
}

/// Transport block size in bits: `SE × rank × data REs`.
pub fn transport_bits(table: &McsTable, mcs: McsId, rank: usize, n_data_re: u32) -> u64 {
    (table.entry(mcs).spectral_efficiency * rank as f64 * n_data_re as f64).round() as u64
}

/// Equivalent per-stream SINR with the same mean mutual information:
/// `2^(mean log2(1 + sinr)) - 1`. Linear in, linear out.
pub fn effective_sinr(streams: &[f64]) -> f64 {
    if streams.is_empty() {
        return 0.0;
    }
    let mean_mi = streams.iter().map(|s| (1.0 + s.max(0.0)).log2()).sum::<f64>() / streams.len() as f64;
    mean_mi.exp2() - 1.0
}

pub fn lin_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn db_to_lin(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Failure,
}

/// Two-regime block error model: below the entry's threshold the block is
/// lost; at or above it the block fails with probability `bler`.
pub fn block_outcome<R: Rng + ?Sized>(
    table: &McsTable,
    mcs: McsId,
    actual_eff_sinr_db: f64,
    bler: f64,
    rng: &mut R,
) -> Outcome {
    block_outcome_from_uniform(table, mcs, actual_eff_sinr_db, bler, rng.gen::<f64>())
}

/// [`block_outcome`] with the uniform draw supplied by the caller.
pub fn block_outcome_from_uniform(table: &McsTable, mcs: McsId, actual_eff_sinr_db: f64, bler: f64, u: f64) -> Outcome {
    if actual_eff_sinr_db >= table.entry(mcs).min_sinr_db && u >= bler {
        Outcome::Success
    } else {
        Outcome::Failure
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn bundled_table_shape() {
        let t = McsTable::default();
        assert_eq!(t.entries().len(), 15);
        assert_eq!(t.entries()[0].spectral_efficiency, 0.25);
        assert_eq!(t.max_se(), 5.55);
        let mods: Vec<_> = t.entries().iter().map(|e| e.modulation).collect();
        assert!(mods.contains(&Modulation::Qpsk) && mods.contains(&Modulation::Qam16));
        assert_eq!(*mods.last().unwrap(), Modulation::Qam64);
    }

    #[test]
    fn unsorted_table_rejected() {
        let mut entries = McsTable::default().entries().to_vec();
        entries.swap(3, 4);
        assert!(McsTable::new(entries).is_err());
        assert!(McsTable::new(vec![]).is_err());
    }

    #[test]
    fn select_floor_top_and_boundary() {
        let t = McsTable::default();
        assert_eq!(t.select(-30.0), McsId(0));
        assert_eq!(t.select(40.0), t.highest());
        assert_eq!(t.entry(t.highest()).modulation, Modulation::Qam64);
        let th = t.entries()[7].min_sinr_db;
        assert_eq!(t.select(th), McsId(7));
        assert_eq!(t.select(th - 1e-9), McsId(6));
    }

    #[test]
    fn select_is_monotone() {
        let t = McsTable::default();
        let mut prev = McsId(0);
        for i in -100..300 {
            let id = t.select(i as f64 * 0.1);
            assert!(id >= prev);
            prev = id;
        }
    }

    #[test]
    fn transport_block_sizes() {
        let t = McsTable::default();
        assert_eq!(transport_bits(&t, McsId(0), 1, 6600), 1650);
        let top1 = transport_bits(&t, t.highest(), 1, 6600);
        assert_eq!(top1, 36_630);
        assert_eq!(transport_bits(&t, t.highest(), 2, 6600), 2 * top1);
    }

    #[test]
    fn effective_sinr_properties() {
        assert!((effective_sinr(&[3.0]) - 3.0).abs() < 1e-12);
        // (1+1)(1+7) = 16 → equivalent 3 per stream
        assert!((effective_sinr(&[1.0, 7.0]) - 3.0).abs() < 1e-12);
        assert!(effective_sinr(&[1.0, 7.5]) > effective_sinr(&[1.0, 7.0]));
    }

    #[test]
    fn outage_is_certain_failure() {
        let t = McsTable::default();
        let mut r = rng::stream(1, &[]);
        for _ in 0..1000 {
            assert_eq!(block_outcome(&t, McsId(5), 0.0, 0.1, &mut r), Outcome::Failure);
        }
    }

    #[test]
    fn failure_rate_at_threshold() {
        let t = McsTable::default();
        let th = t.entry(McsId(9)).min_sinr_db;
        let mut r = rng::stream(42, &[]);
        let n = 100_000;
        let failures = (0..n)
            .filter(|_| block_outcome(&t, McsId(9), th, 0.1, &mut r) == Outcome::Failure)
            .count();
        let rate = failures as f64 / n as f64;
        assert!((rate - 0.1).abs() <= 0.005, "rate {rate}");
    }

    #[test]
    fn outcomes_repeat_with_seed() {
        let t = McsTable::default();
        let draw = |seed| {
            let mut r = rng::stream(seed, &[]);
            (0..64).map(|_| block_outcome(&t, McsId(2), 10.0, 0.1, &mut r)).collect::<Vec<_>>()
        };
        assert_eq!(draw(5), draw(5));
    }
}
