//! Poisson packet arrivals per cell and direction, and the per-cell FIFO
//! buffers whose bit counts drive TDD reconfiguration.

use std::collections::VecDeque;

use rand::Rng;
use rand_distr::Exp;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "DL")]
    Dl,
    #[serde(rename = "UL")]
    Ul,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Dl, Direction::Ul];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Dl => "DL",
            Direction::Ul => "UL",
        }
    }

    pub fn index(self) -> usize {
        match self {
            Direction::Dl => 0,
            Direction::Ul => 1,
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-run traffic parameters. The UL rate is derived from the DL rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrafficConfig {
    /// DL packet arrivals per second per cell.
    pub lambda_dl: f64,
    pub dl_ul_arrival_ratio: f64,
    pub packet_size_bits: u64,
    pub duration_ms: u64,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        TrafficConfig {
            lambda_dl: 0.5,
            dl_ul_arrival_ratio: 2.0,
            // 0.5 MB with decimal megabytes.
            packet_size_bits: 4_000_000,
            duration_ms: 22_000,
        }
    }
}

impl TrafficConfig {
    pub fn lambda_ul(&self) -> f64 {
        self.lambda_dl / self.dl_ul_arrival_ratio
    }

    pub fn rate(&self, direction: Direction) -> f64 {
        match direction {
            Direction::Dl => self.lambda_dl,
            Direction::Ul => self.lambda_ul(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_dl >= 0.0) || !self.lambda_dl.is_finite() {
            return Err(Error::config("traffic.lambda_dl", "must be a finite non-negative rate"));
        }
        if !(self.dl_ul_arrival_ratio > 0.0) || !self.dl_ul_arrival_ratio.is_finite() {
            return Err(Error::config("traffic.dl_ul_arrival_ratio", "must be positive"));
        }
        if self.packet_size_bits == 0 {
            return Err(Error::config("traffic.packet_size_bits", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PacketId(pub u64);

#[derive(Clone, Debug, PartialEq)]
pub struct Packet {
    pub id: PacketId,
    pub direction: Direction,
    pub ue: usize,
    pub cell: usize,
    pub arrival_ms: f64,
    pub size_bits: u64,
    pub remaining_bits: u64,
    pub completion_ms: Option<f64>,
}

impl Packet {
    pub fn new(id: u64, direction: Direction, ue: usize, cell: usize, arrival_ms: f64, size_bits: u64) -> Self {
        Packet {
            id: PacketId(id),
            direction,
            ue,
            cell,
            arrival_ms,
            size_bits,
            remaining_bits: size_bits,
            completion_ms: None,
        }
    }

    pub fn served_bits(&self) -> u64 {
        self.size_bits - self.remaining_bits
    }

    pub fn is_complete(&self) -> bool {
        self.remaining_bits == 0
    }
}

/// Arrival stream for one cell, both directions merged and sorted by
/// `(arrival time, id)`. Each packet goes to a UE drawn uniformly from
/// `ues`. Deterministic in `(cfg, cell, seed)`.
pub fn generate_arrivals(cfg: &TrafficConfig, cell: usize, ues: &[usize], seed: u64) -> Result<Vec<Packet>> {
    cfg.validate()?;
    if cfg.lambda_dl == 0.0 {
        return Ok(Vec::new());
    }
    if ues.is_empty() {
        return Err(Error::config(
            "traffic.lambda_dl",
            format!("cell {cell} has a positive arrival rate but no UEs"),
        ));
    }
    let horizon = cfg.duration_ms as f64;
    let mut packets = Vec::new();
    let mut seq = 0u64;
    for direction in Direction::BOTH {
        let mean_gap_ms = 1000.0 / cfg.rate(direction);
        let exp = Exp::new(1.0).expect("unit rate is valid");
        let mut r = rng::stream(seed, &[rng::tag("arrivals"), cell as u64, direction.index() as u64]);
        let mut t = 0.0;
        loop {
            let gap: f64 = r.sample(exp);
            t += gap * mean_gap_ms;
            if t >= horizon {
                break;
            }
            let ue = ues[r.gen_range(0..ues.len())];
            // Cell in the high bits keeps ids unique network-wide.
            let id = ((cell as u64) << 32) | seq;
            seq += 1;
            packets.push(Packet::new(id, direction, ue, cell, t, cfg.packet_size_bits));
        }
    }
    packets.sort_by(|a, b| a.arrival_ms.total_cmp(&b.arrival_ms).then(a.id.cmp(&b.id)));
    Ok(packets)
}

/// Buffered bits per direction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BufferBits {
    pub dl_bits: u64,
    pub ul_bits: u64,
}

/// DL and UL FIFO queues of one picocell.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CellBuffers {
    dl: VecDeque<Packet>,
    ul: VecDeque<Packet>,
    dl_bits: u64,
    ul_bits: u64,
}

impl CellBuffers {
    pub fn new() -> Self {
        Self::default()
    }

    fn queue(&self, direction: Direction) -> &VecDeque<Packet> {
        match direction {
            Direction::Dl => &self.dl,
            Direction::Ul => &self.ul,
        }
    }

    /// Appends a packet to the queue of its direction. Arrivals must come in
    /// `(arrival time, id)` order.
    pub fn enqueue(&mut self, p: Packet) -> Result<()> {
        if let Some(last) = self.queue(p.direction).back() {
            let in_order = last.arrival_ms < p.arrival_ms || (last.arrival_ms == p.arrival_ms && last.id < p.id);
            if !in_order {
                return Err(Error::Ordering { id: p.id.0, arrival_ms: p.arrival_ms, last_ms: last.arrival_ms });
            }
        }
        match p.direction {
            Direction::Dl => {
                self.dl_bits += p.remaining_bits;
                self.dl.push_back(p);
            }
            Direction::Ul => {
                self.ul_bits += p.remaining_bits;
                self.ul.push_back(p);
            }
        }
        Ok(())
    }

    pub fn buffer_ratio(&self) -> BufferBits {
        BufferBits { dl_bits: self.dl_bits, ul_bits: self.ul_bits }
    }

    pub fn buffered_bits(&self, direction: Direction) -> u64 {
        match direction {
            Direction::Dl => self.dl_bits,
            Direction::Ul => self.ul_bits,
        }
    }

    pub fn len(&self, direction: Direction) -> usize {
        self.queue(direction).len()
    }

    pub fn is_empty(&self) -> bool {
        self.dl.is_empty() && self.ul.is_empty()
    }

    pub fn head(&self, direction: Direction) -> Option<&Packet> {
        self.queue(direction).front()
    }

    pub fn iter(&self, direction: Direction) -> impl Iterator<Item = &Packet> {
        self.queue(direction).iter()
    }

    /// Serves `bits` of the head-of-line packet; a completed packet is popped
    /// and returned.
    pub fn serve_head(&mut self, direction: Direction, bits: u64, completion_ms: f64) -> Option<Packet> {
        let (queue, total) = match direction {
            Direction::Dl => (&mut self.dl, &mut self.dl_bits),
            Direction::Ul => (&mut self.ul, &mut self.ul_bits),
        };
        let head = queue.front_mut()?;
        let served = bits.min(head.remaining_bits);
        head.remaining_bits -= served;
        *total -= served;
        if head.remaining_bits == 0 {
            head.completion_ms = Some(completion_ms);
            queue.pop_front()
        } else {
            None
        }
    }
}

/// Current remaining-bit sums per direction.
pub fn buffer_ratio(buffers: &CellBuffers) -> BufferBits {
    buffers.buffer_ratio()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(lambda: f64, duration_ms: u64) -> TrafficConfig {
        TrafficConfig { lambda_dl: lambda, duration_ms, ..Default::default() }
    }

    #[test]
    fn zero_rate_is_empty() {
        assert!(generate_arrivals(&cfg(0.0, 100_000), 0, &[], 1).unwrap().is_empty());
    }

    #[test]
    fn empty_ue_list_rejected() {
        assert!(matches!(generate_arrivals(&cfg(1.0, 1000), 0, &[], 1), Err(Error::Config { .. })));
    }

    #[test]
    fn fixed_packet_size() {
        let p = generate_arrivals(&cfg(2.5, 60_000), 3, &[30, 31, 32], 7).unwrap();
        assert!(!p.is_empty());
        assert!(p.iter().all(|p| p.size_bits == 4_000_000 && p.remaining_bits == 4_000_000));
        assert!(p.iter().all(|p| p.cell == 3 && (30..=32).contains(&p.ue)));
    }

    #[test]
    fn time_ordered_and_deterministic() {
        let a = generate_arrivals(&cfg(10.0, 10_000), 1, &[0, 1], 9).unwrap();
        assert_eq!(a, generate_arrivals(&cfg(10.0, 10_000), 1, &[0, 1], 9).unwrap());
        assert!(a.windows(2).all(|w| (w[0].arrival_ms, w[0].id) <= (w[1].arrival_ms, w[1].id)));
        assert!(a.iter().all(|p| p.arrival_ms < 10_000.0));
        let ids: std::collections::HashSet<_> = a.iter().map(|p| p.id).collect();
        assert_eq!(ids.len(), a.len());
    }

    #[test]
    fn ue_assignment_roughly_uniform() {
        let ues: Vec<usize> = (0..10).collect();
        let p = generate_arrivals(&cfg(10.0, 1_000_000), 0, &ues, 2).unwrap();
        let mut counts = [0usize; 10];
        for p in &p {
            counts[p.ue] += 1;
        }
        let expected = p.len() as f64 / 10.0;
        for c in counts {
            assert!((c as f64 - expected).abs() < 4.0 * expected.sqrt(), "{counts:?}");
        }
    }

    fn packet(id: u64, direction: Direction, t: f64) -> Packet {
        Packet::new(id, direction, 0, 0, t, 4_000_000)
    }

    #[test]
    fn enqueue_routes_by_direction() {
        let mut b = CellBuffers::new();
        b.enqueue(packet(1, Direction::Dl, 1.0)).unwrap();
        assert_eq!(b.len(Direction::Dl), 1);
        assert_eq!(b.len(Direction::Ul), 0);
        assert_eq!(b.buffered_bits(Direction::Dl), 4_000_000);
    }

    #[test]
    fn enqueue_tie_ordered_by_id() {
        let mut b = CellBuffers::new();
        b.enqueue(packet(1, Direction::Dl, 5.0)).unwrap();
        b.enqueue(packet(2, Direction::Dl, 5.0)).unwrap();
        let ids: Vec<u64> = b.iter(Direction::Dl).map(|p| p.id.0).collect();
        assert_eq!(ids, [1, 2]);
        assert!(matches!(b.enqueue(packet(0, Direction::Dl, 5.0)), Err(Error::Ordering { .. })));
        assert!(matches!(b.enqueue(packet(9, Direction::Dl, 4.0)), Err(Error::Ordering { .. })));
        // The other direction has its own order.
        b.enqueue(packet(3, Direction::Ul, 0.5)).unwrap();
    }

    #[test]
    fn buffer_accounting() {
        let mut b = CellBuffers::new();
        assert_eq!(buffer_ratio(&b), BufferBits { dl_bits: 0, ul_bits: 0 });
        b.enqueue(packet(1, Direction::Dl, 1.0)).unwrap();
        b.enqueue(packet(2, Direction::Ul, 1.0)).unwrap();
        assert!(b.serve_head(Direction::Ul, 2_000_000, 2.0).is_none());
        assert_eq!(buffer_ratio(&b), BufferBits { dl_bits: 4_000_000, ul_bits: 2_000_000 });
        let done = b.serve_head(Direction::Ul, 3_000_000, 3.0).unwrap();
        assert_eq!(done.remaining_bits, 0);
        assert_eq!(done.completion_ms, Some(3.0));
        assert_eq!(buffer_ratio(&b), BufferBits { dl_bits: 4_000_000, ul_bits: 0 });
    }
}
