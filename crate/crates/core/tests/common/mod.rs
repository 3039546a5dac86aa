// Checks shared by the engine tests and the acceptance harness.
#![allow(dead_code)]

use picotdd::engine::Engine;
use picotdd::phy::mcs::{McsEntry, Modulation};
use picotdd::phy::McsTable;
use picotdd::topology::{Deployment, GeometryConfig, Picocell, Point, Ue};
use picotdd::traffic::generate_arrivals;
use picotdd::{run, Direction, ModelConfig, Network, RunSeeds, SchemeId, SchemeSpec, SimulationRun, TrafficConfig};

pub fn sim(scheme: SchemeId, lambda: f64, seed: u64, duration_ms: u64, warmup_ms: u64) -> SimulationRun {
    SimulationRun {
        scheme: SchemeSpec::new(scheme),
        traffic: TrafficConfig { lambda_dl: lambda, ..Default::default() },
        seeds: RunSeeds::from_seed(seed),
        duration_ms,
        warmup_ms,
    }
}

/// Traces S4 at medium load and compares every UL reception's per-stream
/// SINR with and without cancellation. Returns (UL receptions, receptions
/// with BS interferers, violations).
pub fn ic_check(seed: u64, duration_ms: u64) -> (usize, usize, usize) {
    let net = Network::build(&ModelConfig::default(), &RunSeeds::from_seed(seed)).unwrap();
    let mut e = Engine::new(&net, sim(SchemeId::S4, 2.5, seed, duration_ms, 0)).unwrap().with_trace(true);
    let (mut checked, mut with_bs, mut bad) = (0, 0, 0);
    while !e.is_finished() {
        for rx in e.step_subframe().unwrap().receptions {
            if rx.direction == Direction::Dl {
                assert!(rx.sinr_without_ic.is_none());
                continue;
            }
            let without = rx.sinr_without_ic.expect("traced UL reception");
            let worse = rx.sinr.as_slice().iter().zip(without.as_slice()).any(|(a, b)| *a < *b * (1.0 - 1e-9));
            bad += worse as usize;
            checked += 1;
            with_bs += (rx.bs_to_bs_terms > 0) as usize;
        }
    }
    (checked, with_bs, bad)
}

// One picocell, one UE and a single-entry MCS table without block errors: each
// DL subframe moves exactly `per_subframe` bits, so completion times follow
// from the arrival times and the static pattern alone.
/// Returns the number of DL packets compared.
pub fn hand_trace_check() -> Result<usize, String> {
    const SE: f64 = 1.5;
    const DL_SLOTS: [u64; 6] = [0, 1, 4, 5, 6, 9];

    let geometry = GeometryConfig::default();
    let dep = Deployment::from_parts(
        geometry,
        vec![Point { x: 0.0, y: 0.0 }],
        Vec::new(),
        vec![Picocell { position: Point { x: 150.0, y: 0.0 }, macrocell: 0 }],
        vec![Ue { position: Point { x: 170.0, y: 0.0 }, pico: 0 }],
    );
    let mut model = ModelConfig::default();
    model.phy.target_bler = 0.0;
    model.phy.csi.max_rank = 1;
    model.phy.mcs = McsTable::new(vec![McsEntry {
        modulation: Modulation::Qam16,
        code_rate: 0.375,
        spectral_efficiency: SE,
        min_sinr_db: -60.0,
    }])
    .unwrap();
    let net = Network::from_deployment(dep, &model, 9).unwrap();

    let s = sim(SchemeId::S1, 2.0, 5, 12_000, 0);
    let traffic = TrafficConfig { duration_ms: s.duration_ms, ..s.traffic.clone() };
    let seeds = s.seeds;
    let r = run(&net, s).unwrap();

    let per_subframe = (SE * 6600.0).round() as u64;
    let arrivals: Vec<_> = generate_arrivals(&traffic, 0, &[0], seeds.traffic)
        .unwrap()
        .into_iter()
        .filter(|p| p.direction == Direction::Dl)
        .collect();
    if arrivals.len() < 10 {
        return Err(format!("only {} DL arrivals", arrivals.len()));
    }
    let mut t = 0u64;
    let mut expected = Vec::new();
    for p in &arrivals {
        t = t.max(p.arrival_ms.ceil() as u64);
        let mut left = p.size_bits;
        loop {
            if DL_SLOTS.contains(&(t % 10)) {
                left = left.saturating_sub(per_subframe);
                if left == 0 {
                    break;
                }
            }
            t += 1;
        }
        t += 1;
        if t > 12_000 {
            break;
        }
        expected.push((p.arrival_ms, t as f64));
    }
    let got: Vec<_> = r.records.iter().filter(|x| x.direction == Direction::Dl).collect();
    if got.len() != expected.len() {
        return Err(format!("{} DL records, expected {}", got.len(), expected.len()));
    }
    for (rec, (arrival, completion)) in got.iter().zip(&expected) {
        if rec.arrival_ms != *arrival || (rec.completion_ms - completion).abs() > 1.0 {
            return Err(format!("packet {}: completed at {} ms, expected {completion} ms", rec.packet, rec.completion_ms));
        }
        let tput = 4e6 / ((completion - arrival) / 1e3);
        let one_subframe = 4e6 / ((completion - arrival - 1.0).max(1e-3) / 1e3) - tput;
        if (rec.throughput_bps - tput).abs() > one_subframe {
            return Err(format!("packet {}: {} bps, expected {tput}", rec.packet, rec.throughput_bps));
        }
    }
    Ok(expected.len())
}
