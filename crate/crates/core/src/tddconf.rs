//! TDD subframe patterns and the buffer-matching configuration selector.
//!
//! The special subframe `S` counts as downlink everywhere: in the DL share,
//! in the direction of a subframe, and in schedulable capacity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::traffic::Direction;

pub const FRAME_LEN: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    D,
    S,
    U,
}

impl Slot {
    pub fn direction(self) -> Direction {
        match self {
            Slot::D | Slot::S => Direction::Dl,
            Slot::U => Direction::Ul,
        }
    }

    fn from_char(c: char) -> Option<Slot> {
        match c {
            'D' => Some(Slot::D),
            'S' => Some(Slot::S),
            'U' => Some(Slot::U),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Slot::D => 'D',
            Slot::S => 'S',
            Slot::U => 'U',
        }
    }
}

/// One 10-subframe direction pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TddPattern {
    id: u8,
    slots: [Slot; FRAME_LEN],
}

impl TddPattern {
    /// Parses a pattern such as `"DSUUDDSUUD"`. Requires at least one UL slot
    /// and at least one DL-or-special slot.
    pub fn parse(id: u8, text: &str) -> Result<Self> {
        let chars: Vec<char> = text.chars().collect();
        if chars.len() != FRAME_LEN {
            return Err(Error::config("tdd.pattern", format!("`{text}` must have {FRAME_LEN} slots")));
        }
        let mut slots = [Slot::D; FRAME_LEN];
        for (slot, c) in slots.iter_mut().zip(chars) {
            *slot = Slot::from_char(c).ok_or_else(|| Error::config("tdd.pattern", format!("bad slot `{c}` in `{text}`")))?;
        }
        let ul = slots.iter().filter(|s| **s == Slot::U).count();
        if ul == 0 || ul == FRAME_LEN {
            return Err(Error::config("tdd.pattern", format!("`{text}` needs both DL and UL slots")));
        }
        Ok(TddPattern { id, slots })
    }

    pub fn id(&self) -> u8 {
        self.id
    }

    pub fn name(&self) -> String {
        format!("config {}", self.id)
    }

    pub fn slots(&self) -> &[Slot; FRAME_LEN] {
        &self.slots
    }

    pub fn slot_string(&self) -> String {
        self.slots.iter().map(|s| s.as_char()).collect()
    }

    /// DL subframes per frame, special subframes included.
    pub fn dl_count(&self) -> usize {
        self.slots.iter().filter(|s| s.direction() == Direction::Dl).count()
    }

    pub fn ul_count(&self) -> usize {
        FRAME_LEN - self.dl_count()
    }

    #[inline]
    pub fn direction_at(&self, subframe: u64) -> Direction {
        self.slots[(subframe % FRAME_LEN as u64) as usize].direction()
    }
}

/// Fraction of DL (and special) subframes in the pattern.
pub fn dl_share(p: &TddPattern) -> f64 {
    p.dl_count() as f64 / FRAME_LEN as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConfigSetLabel {
    /// The seven standard configurations.
    Rel11,
    /// Standard set plus three UL-heavy configurations.
    Rel13,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TddConfigSet {
    label: ConfigSetLabel,
    patterns: Vec<TddPattern>,
}

const STANDARD: [&str; 7] = [
    "DSUUUDSUUU",
    "DSUUDDSUUD",
    "DSUDDDSUDD",
    "DSUUUDDDDD",
    "DSUUDDDDDD",
    "DSUDDDDDDD",
    "DSUUUDSUUD",
];

const UL_HEAVY: [&str; 3] = ["DUUUUUUUUU", "DUUUUDUUUU", "DUUUDDUUUU"];

impl TddConfigSet {
    pub fn new(label: ConfigSetLabel, patterns: Vec<TddPattern>) -> Result<Self> {
        if patterns.is_empty() {
            return Err(Error::config("tdd.config_set", "configuration set is empty"));
        }
        Ok(TddConfigSet { label, patterns })
    }

    pub fn for_label(label: ConfigSetLabel) -> Self {
        match label {
            ConfigSetLabel::Rel11 => standard_configs(),
            ConfigSetLabel::Rel13 => hypothetical_configs(),
        }
    }

    pub fn label(&self) -> ConfigSetLabel {
        self.label
    }

    pub fn patterns(&self) -> &[TddPattern] {
        &self.patterns
    }

    pub fn get(&self, id: u8) -> Option<&TddPattern> {
        self.patterns.iter().find(|p| p.id == id)
    }

    pub fn contains(&self, p: &TddPattern) -> bool {
        self.patterns.contains(p)
    }
}

fn parse_all(first_id: u8, texts: &[&str]) -> Vec<TddPattern> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| TddPattern::parse(first_id + i as u8, t).expect("built-in pattern is valid"))
        .collect()
}

/// The seven standard configurations, ids 0 to 6.
pub fn standard_configs() -> TddConfigSet {
    TddConfigSet { label: ConfigSetLabel::Rel11, patterns: parse_all(0, &STANDARD) }
}

/// Standard configurations plus ids 7 to 9 with 1, 2 and 3 DL subframes.
pub fn hypothetical_configs() -> TddConfigSet {
    let mut patterns = parse_all(0, &STANDARD);
    patterns.extend(parse_all(7, &UL_HEAVY));
    TddConfigSet { label: ConfigSetLabel::Rel13, patterns }
}

/// Picks the pattern whose DL share is closest to the buffered DL fraction
/// `dl_bits / (dl_bits + ul_bits)`, lowest id on ties. Empty buffers keep
/// `current`.
pub fn select_config(set: &TddConfigSet, dl_bits: u64, ul_bits: u64, current: &TddPattern) -> Result<TddPattern> {
    if set.patterns.is_empty() {
        return Err(Error::config("tdd.config_set", "configuration set is empty"));
    }
    let total = dl_bits as u128 + ul_bits as u128;
    if total == 0 {
        return Ok(*current);
    }
    // |dl_count/10 - dl/total| scaled by 10·total, in exact integers.
    let distance = |p: &TddPattern| (p.dl_count() as u128 * total).abs_diff(FRAME_LEN as u128 * dl_bits as u128);
    let best = set
        .patterns
        .iter()
        .min_by(|a, b| distance(a).cmp(&distance(b)).then(a.id.cmp(&b.id)))
        .expect("non-empty set");
    Ok(*best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shares(set: &TddConfigSet) -> Vec<f64> {
        set.patterns().iter().map(dl_share).collect()
    }

    #[test]
    fn standard_shares() {
        let set = standard_configs();
        assert_eq!(set.patterns().len(), 7);
        let mut s = shares(&set);
        s.sort_by(f64::total_cmp);
        assert_eq!(s, vec![0.4, 0.5, 0.6, 0.7, 0.8, 0.8, 0.9]);
    }

    #[test]
    fn config_1_is_six_four() {
        let p = standard_configs().get(1).copied().unwrap();
        assert_eq!((p.dl_count(), p.ul_count()), (6, 4));
        assert_eq!(dl_share(&p), 0.6);
    }

    #[test]
    fn ratio_endpoints() {
        let set = standard_configs();
        let c0 = set.get(0).unwrap();
        assert_eq!((c0.dl_count(), c0.ul_count()), (4, 6));
        let c5 = set.get(5).unwrap();
        assert_eq!((c5.dl_count(), c5.ul_count()), (9, 1));
        assert_eq!(dl_share(set.get(6).unwrap()), 0.5);
    }

    #[test]
    fn hypothetical_set() {
        let set = hypothetical_configs();
        assert_eq!(set.patterns().len(), 10);
        assert_eq!(dl_share(set.get(7).unwrap()), 0.1);
        assert_eq!(dl_share(set.get(8).unwrap()), 0.2);
        assert_eq!(dl_share(set.get(9).unwrap()), 0.3);
        let s = shares(&set);
        assert_eq!(s.iter().copied().fold(f64::INFINITY, f64::min), 0.1);
        assert_eq!(s.iter().copied().fold(0.0, f64::max), 0.9);
    }

    #[test]
    fn invalid_patterns_rejected() {
        assert!(TddPattern::parse(0, "UUUUUUUUUU").is_err());
        assert!(TddPattern::parse(0, "DDDDDDDDDD").is_err());
        assert!(TddPattern::parse(0, "DSU").is_err());
        assert!(TddPattern::parse(0, "DSUXDDSUUD").is_err());
    }

    #[test]
    fn selector_idle_keeps_current() {
        let set = standard_configs();
        let current = *set.get(4).unwrap();
        assert_eq!(select_config(&set, 0, 0, &current).unwrap(), current);
    }

    #[test]
    fn selector_two_thirds_picks_config_3() {
        let set = standard_configs();
        let c1 = *set.get(1).unwrap();
        assert_eq!(select_config(&set, 2_000_000, 1_000_000, &c1).unwrap().id(), 3);
    }

    #[test]
    fn selector_tie_goes_to_lowest_id() {
        let set = standard_configs();
        let c1 = *set.get(1).unwrap();
        assert_eq!(select_config(&set, 3_000_000, 1_000_000, &c1).unwrap().id(), 2);
    }

    #[test]
    fn selector_extremes() {
        let rel11 = standard_configs();
        let rel13 = hypothetical_configs();
        let c1 = *rel11.get(1).unwrap();
        assert_eq!(select_config(&rel11, 1, 0, &c1).unwrap().id(), 5);
        assert_eq!(select_config(&rel11, 0, 1, &c1).unwrap().id(), 0);
        assert_eq!(select_config(&rel13, 0, 1, &c1).unwrap().id(), 7);
    }

    #[test]
    fn empty_set_rejected() {
        assert!(TddConfigSet::new(ConfigSetLabel::Rel11, vec![]).is_err());
    }

    #[test]
    fn directions_follow_slots() {
        let c1 = *standard_configs().get(1).unwrap();
        assert_eq!(c1.direction_at(2), Direction::Ul);
        assert_eq!(c1.direction_at(1), Direction::Dl);
        assert_eq!(c1.direction_at(12), Direction::Ul);
        assert_eq!(c1.slot_string(), "DSUUDDSUUD");
    }
}
