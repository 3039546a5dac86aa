//! Wideband DFT precoder codebook standing in for the standard codebook:
//! 16 rank-1 beams and 8 orthogonal rank-2 pairs for 4 transmit antennas,
//! 4 beams and 2 pairs for 2 antennas.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg::CMat;

pub const MAX_RANK: usize = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct Codebook {
    n_tx: usize,
    rank1: Vec<CMat>,
    rank2: Vec<CMat>,
}

/// A codebook entry: rank and index within that rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrecoderId {
    pub rank: usize,
    pub index: usize,
}

impl PrecoderId {
    /// The cold-start choice: rank 1, first entry.
    pub const FIRST: PrecoderId = PrecoderId { rank: 1, index: 0 };
}

impl Codebook {
    pub fn dft(n_tx: usize) -> Self {
        assert!(n_tx >= 1 && n_tx <= crate::linalg::MAX_DIM);
        // 16 beams for 4 antennas, 4 for 2, 1 for a single antenna.
        let beams = match n_tx {
            1 => 1,
            2 => 4,
            _ => 16,
        };
        let norm = 1.0 / (n_tx as f64).sqrt();
        let beam = |m: usize| {
            CMat::from_fn(n_tx, 1, |k, _| Complex64::from_polar(norm, 2.0 * PI * (k * m) as f64 / beams as f64))
        };
        let rank1: Vec<CMat> = (0..beams).map(beam).collect();
        let rank2 = if n_tx >= 2 {
            (0..beams / 2)
                .map(|m| {
                    let a = beam(m);
                    let b = beam(m + beams / 2);
                    CMat::from_fn(n_tx, 2, |r, c| if c == 0 { a[(r, 0)] } else { b[(r, 0)] })
                })
                .collect()
        } else {
            Vec::new()
        };
        Codebook { n_tx, rank1, rank2 }
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn precoder(&self, id: PrecoderId) -> &CMat {
        match id.rank {
            1 => &self.rank1[id.index],
            2 => &self.rank2[id.index],
            r => panic!("rank {r} not in codebook"),
        }
    }

    pub fn len(&self, rank: usize) -> usize {
        match rank {
            1 => self.rank1.len(),
            2 => self.rank2.len(),
            _ => 0,
        }
    }

    /// All entries up to `max_rank`, rank 1 first.
    pub fn candidates(&self, max_rank: usize) -> impl Iterator<Item = PrecoderId> + '_ {
        (1..=max_rank.min(MAX_RANK)).flat_map(move |rank| (0..self.len(rank)).map(move |index| PrecoderId { rank, index }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let cb = Codebook::dft(4);
        assert_eq!((cb.len(1), cb.len(2)), (16, 8));
        let cb = Codebook::dft(2);
        assert_eq!((cb.len(1), cb.len(2)), (4, 2));
        assert_eq!(Codebook::dft(4).candidates(2).count(), 24);
        assert_eq!(Codebook::dft(4).candidates(1).count(), 16);
    }

    #[test]
    fn columns_orthonormal() {
        for n in [2, 4] {
            let cb = Codebook::dft(n);
            for i in 0..cb.len(2) {
                let q = cb.precoder(PrecoderId { rank: 2, index: i });
                let g = q.adjoint_mul(q);
                assert!((g[(0, 0)].re - 1.0).abs() < 1e-12);
                assert!((g[(1, 1)].re - 1.0).abs() < 1e-12);
                assert!(g[(0, 1)].norm() < 1e-12);
            }
        }
    }
}
