// Per-stream MMSE SINR against the textbook formula
// SINR_k = p_k h_kᴴ R_k⁻¹ h_k, with R_k holding noise, the other streams and
// all interferers, evaluated with nalgebra's dense inverse.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use picotdd::linalg::CMat;
use picotdd::phy::{mmse_sinr, Codebook, Interferer, PrecoderId};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

fn random(rows: usize, cols: usize, rng: &mut Xoshiro256PlusPlus) -> CMat {
    CMat::from_fn(rows, cols, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
}

fn to_na(m: &CMat) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)])
}

fn oracle(h: &CMat, p: f64, q: &CMat, intf: &[Interferer], noise: f64) -> Vec<f64> {
    let n = h.rows();
    let hq = to_na(h) * to_na(q);
    let streams = q.cols();
    let mut base = DMatrix::<Complex64>::identity(n, n) * Complex64::from(noise);
    for i in intf {
        let g = to_na(&i.channel) * to_na(&i.precoder);
        base += &g * g.adjoint() * Complex64::from(i.tx_power_w / i.precoder.cols() as f64);
    }
    let ps = p / streams as f64;
    (0..streams)
        .map(|k| {
            let mut r = base.clone();
            for j in (0..streams).filter(|&j| j != k) {
                let c: DVector<Complex64> = hq.column(j).into();
                r += &c * c.adjoint() * Complex64::from(ps);
            }
            let hk: DVector<Complex64> = hq.column(k).into();
            let inv = r.try_inverse().unwrap();
            (hk.adjoint() * inv * &hk)[(0, 0)].re * ps
        })
        .collect()
}

fn check(n_rx: usize, n_tx: usize, rank: usize, seed: u64) {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let cb = Codebook::dft(n_tx);
    let q = *cb.precoder(PrecoderId { rank, index: 1 });
    let h = random(n_rx, n_tx, &mut rng);
    let intf: Vec<Interferer> = (0..3)
        .map(|i| {
            let icb = Codebook::dft(if i == 1 { 2 } else { n_tx });
            Interferer {
                channel: random(n_rx, icb.n_tx(), &mut rng),
                tx_power_w: 0.3 + i as f64,
                precoder: *icb.precoder(PrecoderId { rank: 1 + i % 2, index: 0 }),
            }
        })
        .collect();
    let got = mmse_sinr(&h, 2.0, &q, &intf, 0.05).unwrap();
    let want = oracle(&h, 2.0, &q, &intf, 0.05);
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() <= 1e-6 * w.abs().max(1.0), "{g} vs {w}");
    }
}

#[test]
fn downlink_two_by_four() {
    for seed in 0..20 {
        check(2, 4, 1, seed);
        check(2, 4, 2, seed);
    }
}

#[test]
fn uplink_four_by_two() {
    for seed in 0..20 {
        check(4, 2, 1, seed);
        check(4, 2, 2, seed);
    }
}
