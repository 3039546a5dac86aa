//! Subframe-stepped simulation loop and packet-throughput metrics.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::channel::{dbm_to_w, draw_shadowing, ChannelConfig, FadingState, LinkGainTable, Node};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::phy::mcs::{block_outcome_from_uniform, lin_to_db};
use crate::phy::{
    compute_report, effective_sinr, transport_bits, ul_tx_power, Codebook, Covariance, CsiReport, McsId, Outcome,
    PhyConfig, PrecoderId, StreamSinrs, WhitenedGram,
};
use crate::rng;
use crate::scheduler::{
    apply_outcome, maybe_reconfigure, pick_transmission, subframe_direction, CellSchedulerState, SchemeId, SchemeSpec,
};
use crate::tddconf::FRAME_LEN;
use crate::topology::{generate_deployment, Deployment, GeometryConfig};
use crate::traffic::{generate_arrivals, CellBuffers, Direction, Packet, PacketId, TrafficConfig};

/// Deployment, propagation and link-level parameters shared by all runs of a
/// campaign.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub geometry: GeometryConfig,
    pub channel: ChannelConfig,
    pub phy: PhyConfig,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.channel.validate()?;
        self.phy.validate()
    }
}

/// Independent seeds of one run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RunSeeds {
    pub deployment: u64,
    pub traffic: u64,
    pub channel: u64,
    pub error: u64,
}

impl RunSeeds {
    /// Splits one campaign seed into named streams.
    pub fn from_seed(seed: u64) -> Self {
        RunSeeds {
            deployment: rng::derive(seed, &[rng::tag("deployment")]),
            traffic: rng::derive(seed, &[rng::tag("traffic")]),
            channel: rng::derive(seed, &[rng::tag("channel")]),
            error: rng::derive(seed, &[rng::tag("error")]),
        }
    }
}

/// Everything about a drop that does not depend on the scheme or the load:
/// node positions, link gains, fading and UL transmit powers.
#[derive(Clone, Debug)]
pub struct Network {
    model: ModelConfig,
    deployment: Deployment,
    gains: LinkGainTable,
    fading: FadingState,
    ues_by_pico: Vec<Vec<usize>>,
    ul_power_w: Vec<f64>,
    bs_power_w: f64,
    noise_ue_w: f64,
    noise_bs_w: f64,
    bs_codebook: Codebook,
    ue_codebook: Codebook,
}

impl Network {
    pub fn build(model: &ModelConfig, seeds: &RunSeeds) -> Result<Self> {
        model.validate()?;
        let deployment = generate_deployment(&model.geometry, seeds.deployment)?;
        Network::from_deployment(deployment, model, seeds.channel)
    }

    pub fn from_deployment(deployment: Deployment, model: &ModelConfig, channel_seed: u64) -> Result<Self> {
        model.channel.validate()?;
        model.phy.validate()?;
        let shadowing = draw_shadowing(&deployment, &model.channel, channel_seed);
        let gains = LinkGainTable::build(&deployment, &model.channel, &shadowing)?;
        let fading = FadingState::new(&model.channel, rng::derive(channel_seed, &[rng::tag("fading")]));
        let ul_power_w = deployment
            .ues()
            .iter()
            .enumerate()
            .map(|(u, ue)| {
                let loss = gains.loss_db(Node::Ue(u), Node::Bs(ue.pico))?;
                Ok(dbm_to_w(ul_tx_power(&model.phy.power, loss)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Network {
            ues_by_pico: deployment.ues_by_pico(),
            bs_power_w: dbm_to_w(model.phy.power.bs_tx_power_dbm),
            noise_ue_w: model.channel.noise_power_w(Node::Ue(0)),
            noise_bs_w: model.channel.noise_power_w(Node::Bs(0)),
            bs_codebook: Codebook::dft(model.channel.bs_antennas),
            ue_codebook: Codebook::dft(model.channel.ue_antennas),
            model: model.clone(),
            deployment,
            gains,
            fading,
            ul_power_w,
        })
    }

    pub fn model(&self) -> &ModelConfig {
        &self.model
    }

    pub fn deployment(&self) -> &Deployment {
        &self.deployment
    }

    pub fn gains(&self) -> &LinkGainTable {
        &self.gains
    }

    pub fn n_cells(&self) -> usize {
        self.ues_by_pico.len()
    }

    pub fn ul_power_w(&self, ue: usize) -> f64 {
        self.ul_power_w[ue]
    }

    #[inline]
    fn gain(&self, tx: Node, rx: Node) -> f64 {
        match (tx, rx) {
            (Node::Bs(b), Node::Ue(u)) | (Node::Ue(u), Node::Bs(b)) => self.gains.bs_ue(b, u),
            (Node::Bs(a), Node::Bs(b)) => self.gains.bs_bs(a, b),
            (Node::Ue(a), Node::Ue(b)) => self.gains.ue_ue(a, b),
        }
    }

    #[inline]
    fn channel(&self, tx: Node, rx: Node, subframe: u64) -> CMat {
        self.fading.matrix(tx, rx, subframe).scale(self.gain(tx, rx).sqrt())
    }

    fn codebook(&self, tx: Node) -> &Codebook {
        match tx {
            Node::Bs(_) => &self.bs_codebook,
            Node::Ue(_) => &self.ue_codebook,
        }
    }

    fn noise_w(&self, rx: Node) -> f64 {
        match rx {
            Node::Bs(_) => self.noise_bs_w,
            Node::Ue(_) => self.noise_ue_w,
        }
    }

    /// Transmitter, receiver and transmit power of a cell's link to `ue`.
    fn link(&self, cell: usize, ue: usize, direction: Direction) -> (Node, Node, f64) {
        match direction {
            Direction::Dl => (Node::Bs(cell), Node::Ue(ue), self.bs_power_w),
            Direction::Ul => (Node::Ue(ue), Node::Bs(cell), self.ul_power_w[ue]),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationRun {
    pub scheme: SchemeSpec,
    pub traffic: TrafficConfig,
    pub seeds: RunSeeds,
    pub duration_ms: u64,
    pub warmup_ms: u64,
}

impl SimulationRun {
    pub fn validate(&self) -> Result<()> {
        if self.duration_ms <= self.warmup_ms {
            return Err(Error::config("duration_ms", "must exceed warmup_ms"));
        }
        self.scheme.validate()?;
        self.traffic.validate()
    }
}

/// One scheduled link in a subframe.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Transmission {
    cell: usize,
    direction: Direction,
    ue: usize,
    tx: Node,
    rx: Node,
    power_w: f64,
    precoder: PrecoderId,
    mcs: McsId,
    reported_eff_db: f64,
}

/// Subframes before a measurement instant searched for one of the wanted
/// direction; one frame always contains both.
const MEASUREMENT_WINDOW: u64 = 10;

/// Directions and transmissions of all cells in one subframe.
#[derive(Clone, Debug)]
struct Snapshot {
    t: u64,
    directions: Vec<Direction>,
    txs: Vec<Option<Transmission>>,
}

/// An interfering transmitter seen by one receiver.
#[derive(Clone, Copy, Debug)]
struct Candidate {
    tx: Node,
    power_w: f64,
    precoder: PrecoderId,
    mean_w: f64,
    bs_to_bs: bool,
}

/// Per-reception detail, recorded only when tracing.
#[derive(Clone, Debug, PartialEq)]
pub struct ReceptionLog {
    pub cell: usize,
    pub direction: Direction,
    pub ue: usize,
    pub packet: PacketId,
    pub mcs: McsId,
    pub rank: usize,
    pub reported_eff_sinr_db: f64,
    pub eff_sinr_db: f64,
    /// Linear per-stream SINRs as received.
    pub sinr: StreamSinrs,
    /// The same reception with BS→BS terms kept, when the scheme cancels them.
    pub sinr_without_ic: Option<StreamSinrs>,
    /// Interfering base stations in DL at this UL receiver, before any IC.
    pub bs_to_bs_terms: usize,
    pub outcome: Outcome,
    pub bits: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SubframeLog {
    pub t: u64,
    pub active_links: usize,
    pub completed: usize,
    pub receptions: Vec<ReceptionLog>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThroughputRecord {
    pub packet: u64,
    pub direction: Direction,
    pub cell: usize,
    pub arrival_ms: f64,
    pub completion_ms: f64,
    pub throughput_bps: f64,
}

impl ThroughputRecord {
    fn from_packet(p: &Packet) -> Self {
        let completion_ms = p.completion_ms.expect("completed packet");
        ThroughputRecord {
            packet: p.id.0,
            direction: p.direction,
            cell: p.cell,
            arrival_ms: p.arrival_ms,
            completion_ms,
            throughput_bps: p.size_bits as f64 / ((completion_ms - p.arrival_ms) / 1000.0),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct DirectionStats {
    pub mean_bps: f64,
    pub p5_bps: f64,
    pub p50_bps: f64,
    pub p95_bps: f64,
    pub completed: usize,
    pub unfinished: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricsReport {
    pub scheme: SchemeId,
    pub lambda_dl: f64,
    pub dl: DirectionStats,
    pub ul: DirectionStats,
    /// Fraction of measured (cell, subframe) slots that were UL.
    pub ul_subframe_share: f64,
    pub records: Vec<ThroughputRecord>,
}

impl MetricsReport {
    pub fn stats(&self, direction: Direction) -> &DirectionStats {
        match direction {
            Direction::Dl => &self.dl,
            Direction::Ul => &self.ul,
        }
    }
}

/// Nearest-rank percentile of sorted values, `p` in (0, 100].
fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = ((p / 100.0) * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

/// Mean and nearest-rank percentiles of one direction's records. Empty input
/// gives zeros.
pub fn aggregate(records: &[ThroughputRecord], direction: Direction) -> DirectionStats {
    let mut v: Vec<f64> = records.iter().filter(|r| r.direction == direction).map(|r| r.throughput_bps).collect();
    v.sort_by(f64::total_cmp);
    let mean = if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
    DirectionStats {
        mean_bps: mean,
        p5_bps: nearest_rank(&v, 5.0),
        p50_bps: nearest_rank(&v, 50.0),
        p95_bps: nearest_rank(&v, 95.0),
        completed: v.len(),
        unfinished: 0,
    }
}

/// `(candidate - baseline) / baseline`.
pub fn relative_gain(baseline: f64, candidate: f64) -> Result<f64> {
    if baseline == 0.0 {
        return Err(Error::UndefinedGain);
    }
    Ok((candidate - baseline) / baseline)
}

/// Relative mean-throughput gain per direction, as fractions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gains {
    pub dl: f64,
    pub ul: f64,
}

pub fn compare(baseline: &MetricsReport, candidate: &MetricsReport) -> Result<Gains> {
    Ok(Gains {
        dl: relative_gain(baseline.dl.mean_bps, candidate.dl.mean_bps)?,
        ul: relative_gain(baseline.ul.mean_bps, candidate.ul.mean_bps)?,
    })
}

struct CellRuntime {
    sched: CellSchedulerState,
    buffers: CellBuffers,
    arrivals: Vec<Packet>,
    next_arrival: usize,
}

pub struct Engine<'a> {
    net: &'a Network,
    sim: SimulationRun,
    cells: Vec<CellRuntime>,
    t: u64,
    trace: bool,
    current: Vec<Option<Transmission>>,
    directions: Vec<Direction>,
    snapshots: VecDeque<Snapshot>,
    csi: Vec<Option<(u64, CsiReport)>>,
    olla_offset_db: Vec<f64>,
    scratch: Vec<Candidate>,
    records: Vec<ThroughputRecord>,
    generated: [usize; 2],
    ul_slots: u64,
    measured_slots: u64,
}

impl<'a> Engine<'a> {
    pub fn new(net: &'a Network, sim: SimulationRun) -> Result<Self> {
        sim.validate()?;
        let traffic = TrafficConfig { duration_ms: sim.duration_ms, ..sim.traffic.clone() };
        let mut generated = [0; 2];
        let mut cells = Vec::with_capacity(net.n_cells());
        for (c, ues) in net.ues_by_pico.iter().enumerate() {
            let arrivals = if ues.is_empty() { Vec::new() } else { generate_arrivals(&traffic, c, ues, sim.seeds.traffic)? };
            for p in &arrivals {
                if p.arrival_ms >= sim.warmup_ms as f64 {
                    generated[p.direction.index()] += 1;
                }
            }
            cells.push(CellRuntime {
                sched: CellSchedulerState::new(c, &sim.scheme),
                buffers: CellBuffers::new(),
                arrivals,
                next_arrival: 0,
            });
        }
        Ok(Engine {
            net,
            cells,
            t: 0,
            trace: false,
            current: vec![None; net.n_cells()],
            directions: vec![Direction::Dl; net.n_cells()],
            snapshots: VecDeque::new(),
            csi: vec![None; 2 * net.deployment.ues().len()],
            olla_offset_db: vec![0.0; 2 * net.deployment.ues().len()],
            scratch: Vec::new(),
            records: Vec::new(),
            generated,
            ul_slots: 0,
            measured_slots: 0,
            sim,
        })
    }

    /// Records per-reception detail in every [`SubframeLog`].
    pub fn with_trace(mut self, trace: bool) -> Self {
        self.trace = trace;
        self
    }

    pub fn now(&self) -> u64 {
        self.t
    }

    pub fn is_finished(&self) -> bool {
        self.t >= self.sim.duration_ms
    }

    pub fn cell_states(&self) -> impl Iterator<Item = &CellSchedulerState> {
        self.cells.iter().map(|c| &c.sched)
    }

    pub fn buffers(&self, cell: usize) -> &CellBuffers {
        &self.cells[cell].buffers
    }

    pub fn records(&self) -> &[ThroughputRecord] {
        &self.records
    }

    /// Advances one subframe.
    pub fn step_subframe(&mut self) -> Result<SubframeLog> {
        let t = self.t;
        let measured = t >= self.sim.warmup_ms && t < self.sim.duration_ms;
        let mut log = SubframeLog { t, ..Default::default() };

        // Phase 1: arrivals, reconfiguration, link selection.
        for c in 0..self.cells.len() {
            let cell = &mut self.cells[c];
            while let Some(p) = cell.arrivals.get(cell.next_arrival) {
                if p.arrival_ms > t as f64 {
                    break;
                }
                cell.buffers.enqueue(p.clone())?;
                cell.next_arrival += 1;
            }
            cell.sched = maybe_reconfigure(&cell.sched, &self.sim.scheme, &cell.buffers, t)?;
            let direction = subframe_direction(&cell.sched, t);
            self.directions[c] = direction;
            if measured {
                self.measured_slots += 1;
                if direction == Direction::Ul {
                    self.ul_slots += 1;
                }
            }
            self.current[c] = pick_transmission(&cell.buffers, direction).map(|p| (p.ue, direction)).map(|(ue, d)| {
                let (tx, rx, power_w) = self.net.link(c, ue, d);
                Transmission {
                    cell: c,
                    direction: d,
                    ue,
                    tx,
                    rx,
                    power_w,
                    precoder: PrecoderId::FIRST,
                    mcs: McsId(0),
                    reported_eff_db: f64::NEG_INFINITY,
                }
            });
        }
        for c in 0..self.current.len() {
            if let Some(mut tx) = self.current[c] {
                let report = self.report(tx.cell, tx.ue, tx.direction, t)?;
                let offset = self.olla_offset_db[2 * tx.ue + tx.direction.index()];
                tx.precoder = report.precoder;
                tx.mcs = self.net.model.phy.mcs.select(report.eff_sinr_db - offset);
                tx.reported_eff_db = report.eff_sinr_db;
                self.current[c] = Some(tx);
            }
        }
        let period = self.net.model.phy.csi.feedback_period_ms;
        if t % period == 0 || period - t % period <= MEASUREMENT_WINDOW {
            self.snapshots.push_back(Snapshot { t, directions: self.directions.clone(), txs: self.current.clone() });
        }

        // Phase 2: interference, SINR, block outcomes.
        let phy = &self.net.model.phy;
        let k = phy.max_explicit_interferers;
        for c in 0..self.current.len() {
            let Some(tx) = self.current[c] else { continue };
            log.active_links += 1;
            let ic = self.sim.scheme.ic_enabled && tx.direction == Direction::Ul;
            let mut cands = std::mem::take(&mut self.scratch);
            collect_interferers(self.net, &self.current, c, tx.rx, k, &mut cands);
            let h = self.net.channel(tx.tx, tx.rx, t);
            let q = self.net.codebook(tx.tx).precoder(tx.precoder);
            let sinr = reception_sinr(self.net, &h, tx.power_w, q, tx.rx, t, &cands, k, ic)?;
            let without_ic = if self.trace && ic {
                Some(reception_sinr(self.net, &h, tx.power_w, q, tx.rx, t, &cands, k, false)?)
            } else {
                None
            };
            let bs_to_bs_terms = cands.iter().filter(|x| x.bs_to_bs).count();
            self.scratch = cands;

            let eff_db = lin_to_db(effective_sinr(sinr.as_slice()));
            let u = unit_uniform(self.sim.seeds.error, c as u64, t);
            let outcome = block_outcome_from_uniform(&phy.mcs, tx.mcs, eff_db, phy.target_bler, u);
            let bits = transport_bits(&phy.mcs, tx.mcs, tx.precoder.rank, phy.n_data_re());
            let slot = 2 * tx.ue + tx.direction.index();
            self.olla_offset_db[slot] = phy.olla.update(self.olla_offset_db[slot], outcome);
            let packet = self.cells[c].buffers.head(tx.direction).map(|p| p.id).expect("scheduled packet");
            if let Some(done) = apply_outcome(&mut self.cells[c].buffers, tx.direction, bits, outcome, t) {
                log.completed += 1;
                if done.arrival_ms >= self.sim.warmup_ms as f64 {
                    self.records.push(ThroughputRecord::from_packet(&done));
                }
            }
            if self.trace {
                log.receptions.push(ReceptionLog {
                    cell: c,
                    direction: tx.direction,
                    ue: tx.ue,
                    packet,
                    mcs: tx.mcs,
                    rank: tx.precoder.rank,
                    reported_eff_sinr_db: tx.reported_eff_db,
                    eff_sinr_db: eff_db,
                    sinr,
                    sinr_without_ic: without_ic,
                    bs_to_bs_terms,
                    outcome,
                    bits,
                });
            }
        }
        self.t += 1;
        Ok(log)
    }

    /// The CSI report usable at `t` for `ue` in `direction`, computed on
    /// first use from the stored measurement-instant snapshot.
    fn report(&mut self, cell: usize, ue: usize, direction: Direction, t: u64) -> Result<CsiReport> {
        let phy = &self.net.model.phy;
        let Some(m) = phy.csi.usable_measurement_instant(t) else {
            return Ok(CsiReport::cold_start(&phy.mcs));
        };
        let slot = 2 * ue + direction.index();
        if let Some((at, r)) = self.csi[slot] {
            if at == m {
                return Ok(r);
            }
        }
        let oldest = m.saturating_sub(MEASUREMENT_WINDOW);
        while self.snapshots.front().is_some_and(|s| s.t < oldest) {
            self.snapshots.pop_front();
        }
        // The cell's latest subframe in `direction` at or before `m`.
        let snap = self
            .snapshots
            .iter()
            .rev()
            .filter(|s| s.t <= m)
            .find(|s| s.directions[cell] == direction)
            .or_else(|| self.snapshots.iter().find(|s| s.t == m))
            .expect("snapshot stored at every measurement instant");
        let (at, txs) = (snap.t, &snap.txs);
        let (tx, rx, power_w) = self.net.link(cell, ue, direction);
        let ic = self.sim.scheme.ic_enabled && direction == Direction::Ul;
        let k = phy.max_explicit_interferers;
        let mut cands = std::mem::take(&mut self.scratch);
        collect_interferers(self.net, txs, cell, rx, k, &mut cands);
        // Fading samples come from the same slot of earlier frames; the
        // interferer set is the one active at `at`.
        let samples = (0..phy.csi.measurement_samples as u64)
            .map(|n| {
                let s = at.wrapping_sub(n * FRAME_LEN as u64);
                let cov = covariance(self.net, rx, s, &cands, k, ic);
                Ok(WhitenedGram::new(&cov.factor()?, &self.net.channel(tx, rx, s)))
            })
            .collect::<Result<Vec<_>>>();
        self.scratch = cands;
        let report =
            compute_report(&samples?, power_w, self.net.codebook(tx), phy.csi.max_rank, &phy.mcs, phy.n_data_re())?;
        self.csi[slot] = Some((m, report));
        Ok(report)
    }

    /// Runs to the configured duration and aggregates the records.
    pub fn run(mut self) -> Result<MetricsReport> {
        while !self.is_finished() {
            self.step_subframe()?;
        }
        Ok(self.finish())
    }

    fn finish(self) -> MetricsReport {
        let mut dl = aggregate(&self.records, Direction::Dl);
        let mut ul = aggregate(&self.records, Direction::Ul);
        dl.unfinished = self.generated[0] - dl.completed;
        ul.unfinished = self.generated[1] - ul.completed;
        MetricsReport {
            scheme: self.sim.scheme.id,
            lambda_dl: self.sim.traffic.lambda_dl,
            dl,
            ul,
            ul_subframe_share: if self.measured_slots == 0 { 0.0 } else { self.ul_slots as f64 / self.measured_slots as f64 },
            records: self.records,
        }
    }
}

/// Runs one simulation on a prebuilt network.
pub fn run(net: &Network, sim: SimulationRun) -> Result<MetricsReport> {
    Engine::new(net, sim)?.run()
}

fn unit_uniform(seed: u64, cell: u64, t: u64) -> f64 {
    (rng::derive(seed, &[cell, t]) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Fills `out` with every other active transmitter as seen by `rx`, the `k`
/// strongest by mean received power first.
fn collect_interferers(
    net: &Network,
    txs: &[Option<Transmission>],
    own_cell: usize,
    rx: Node,
    k: usize,
    out: &mut Vec<Candidate>,
) {
    out.clear();
    for tx in txs.iter().flatten() {
        if tx.cell == own_cell {
            continue;
        }
        out.push(Candidate {
            tx: tx.tx,
            power_w: tx.power_w,
            precoder: tx.precoder,
            mean_w: tx.power_w * net.gain(tx.tx, rx),
            bs_to_bs: matches!((tx.tx, rx), (Node::Bs(_), Node::Bs(_))),
        });
    }
    if out.len() > k && k > 0 {
        out.select_nth_unstable_by(k - 1, |a, b| b.mean_w.total_cmp(&a.mean_w));
    }
}

/// Noise plus interference. The first `k` candidates enter with their
/// spatial signature, the rest as white power. With `ic`, BS→BS terms are
/// dropped from both parts.
fn covariance(net: &Network, rx: Node, subframe: u64, cands: &[Candidate], k: usize, ic: bool) -> Covariance {
    let n_rx = net.model.channel.antennas(rx);
    let mut cov = Covariance::white(n_rx, net.noise_w(rx));
    let keep = |c: &&Candidate| !(ic && c.bs_to_bs);
    let split = k.min(cands.len());
    let folded: f64 = cands[split..].iter().filter(keep).map(|c| c.mean_w).sum();
    cov.add_white(folded);
    for c in cands[..split].iter().filter(keep) {
        let g = net.channel(c.tx, rx, subframe);
        cov.add_transmitter(&g, c.power_w, net.codebook(c.tx).precoder(c.precoder));
    }
    cov
}

#[allow(clippy::too_many_arguments)]
fn reception_sinr(
    net: &Network,
    h: &CMat,
    power_w: f64,
    precoder: &CMat,
    rx: Node,
    t: u64,
    cands: &[Candidate],
    k: usize,
    ic: bool,
) -> Result<StreamSinrs> {
    let cov = covariance(net, rx, t, cands, k, ic);
    WhitenedGram::new(&cov.factor()?, h).stream_sinrs(power_w, precoder)
}
