//! Per-cell link selection, ideal HARQ and TDD reconfiguration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phy::Outcome;
use crate::tddconf::{select_config, ConfigSetLabel, TddConfigSet, TddPattern, FRAME_LEN};
use crate::traffic::{CellBuffers, Direction, Packet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeId {
    S1,
    S2,
    S3,
    S4,
    S5,
}

impl SchemeId {
    pub const ALL: [SchemeId; 5] = [SchemeId::S1, SchemeId::S2, SchemeId::S3, SchemeId::S4, SchemeId::S5];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::S1 => "s1",
            SchemeId::S2 => "s2",
            SchemeId::S3 => "s3",
            SchemeId::S4 => "s4",
            SchemeId::S5 => "s5",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::config("schemes", format!("unknown scheme `{s}` (expected s1..s5)")))
    }
}

/// A duplexing scheme: reconfiguration period, configuration set and IC.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeSpec {
    pub id: SchemeId,
    /// `None` keeps the initial pattern for the whole run.
    pub reconfig_period_ms: Option<u64>,
    pub config_set: TddConfigSet,
    pub ic_enabled: bool,
    pub initial_pattern: TddPattern,
}

/// Id of the pattern every cell starts from.
pub const INITIAL_CONFIG: u8 = 1;

impl SchemeSpec {
    pub fn new(id: SchemeId) -> Self {
        let (period, label, ic) = match id {
            SchemeId::S1 => (None, ConfigSetLabel::Rel11, false),
            SchemeId::S2 => (Some(200), ConfigSetLabel::Rel11, false),
            SchemeId::S3 => (Some(10), ConfigSetLabel::Rel11, false),
            SchemeId::S4 => (Some(10), ConfigSetLabel::Rel11, true),
            SchemeId::S5 => (Some(10), ConfigSetLabel::Rel13, true),
        };
        let config_set = TddConfigSet::for_label(label);
        let initial_pattern = *config_set.get(INITIAL_CONFIG).expect("config 1 in every set");
        SchemeSpec { id, reconfig_period_ms: period, config_set, ic_enabled: ic, initial_pattern }
    }

    pub fn is_static(&self) -> bool {
        self.reconfig_period_ms.is_none()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.reconfig_period_ms {
            if p == 0 || p % FRAME_LEN as u64 != 0 {
                return Err(Error::config("scheme.reconfig_period_ms", "must be a positive multiple of 10"));
            }
        }
        if !self.config_set.contains(&self.initial_pattern) {
            return Err(Error::config("scheme.initial_pattern", "not in the configuration set"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellSchedulerState {
    pub cell: usize,
    pub active_pattern: TddPattern,
    pub pattern_valid_from: u64,
}

impl CellSchedulerState {
    pub fn new(cell: usize, scheme: &SchemeSpec) -> Self {
        CellSchedulerState { cell, active_pattern: scheme.initial_pattern, pattern_valid_from: 0 }
    }
}

#[inline]
pub fn subframe_direction(state: &CellSchedulerState, t: u64) -> Direction {
    debug_assert!(t >= state.pattern_valid_from);
    state.active_pattern.direction_at(t)
}

/// Head-of-line packet in `direction`, or `None` when the cell idles.
pub fn pick_transmission(buffers: &CellBuffers, direction: Direction) -> Option<&Packet> {
    buffers.head(direction)
}

/// Applies one block outcome to the head-of-line packet. A failed block
/// leaves the packet untouched for retransmission in the next subframe of
/// the same direction. Returns the packet if it completed; completion is
/// stamped at the end of subframe `t`.
pub fn apply_outcome(
    buffers: &mut CellBuffers,
    direction: Direction,
    served_bits: u64,
    outcome: Outcome,
    t: u64,
) -> Option<Packet> {
    match outcome {
        Outcome::Success => buffers.serve_head(direction, served_bits, (t + 1) as f64),
        Outcome::Failure => None,
    }
}

/// Reselects the pattern at multiples of the scheme period.
pub fn maybe_reconfigure(
    state: &CellSchedulerState,
    scheme: &SchemeSpec,
    buffers: &CellBuffers,
    t: u64,
) -> Result<CellSchedulerState> {
    let Some(period) = scheme.reconfig_period_ms else {
        return Ok(*state);
    };
    if t % period != 0 {
        return Ok(*state);
    }
    let bits = buffers.buffer_ratio();
    let next = select_config(&scheme.config_set, bits.dl_bits, bits.ul_bits, &state.active_pattern)?;
    if next == state.active_pattern {
        return Ok(*state);
    }
    Ok(CellSchedulerState { cell: state.cell, active_pattern: next, pattern_valid_from: t })
}
