//! Linear MMSE receiver: per-stream post-equalisation SINR under an
//! interference-plus-noise covariance.

use crate::error::Result;
use crate::linalg::{inverse_diagonal_hpd, CMat, Cholesky, MAX_DIM};

/// One interfering transmission as seen by the receiver.
#[derive(Clone, Debug)]
pub struct Interferer {
    /// Channel from the interferer to the receiver, `(n_rx × n_tx)`.
    pub channel: CMat,
    pub tx_power_w: f64,
    /// Precoder with unit-norm columns; power is split equally over them.
    pub precoder: CMat,
}

/// Interference-plus-noise covariance `noise·I + Σ pᵢ/rᵢ · HᵢQᵢQᵢᴴHᵢᴴ`.
#[derive(Clone, Copy, Debug)]
pub struct Covariance {
    r: CMat,
}

impl Covariance {
    pub fn white(n_rx: usize, power_w: f64) -> Self {
        let mut r = CMat::zeros(n_rx, n_rx);
        r.add_diagonal(power_w);
        Covariance { r }
    }

    /// Adds spatially white power, e.g. the mean of weak interferers.
    pub fn add_white(&mut self, power_w: f64) {
        self.r.add_diagonal(power_w);
    }

    pub fn add_transmitter(&mut self, channel: &CMat, tx_power_w: f64, precoder: &CMat) {
        let effective = channel.mul(precoder);
        self.r.add_outer(&effective, tx_power_w / precoder.cols() as f64);
    }

    pub fn matrix(&self) -> &CMat {
        &self.r
    }

    pub fn factor(&self) -> Result<Cholesky> {
        Cholesky::new(&self.r)
    }
}

/// Per-stream SINRs (linear), at most `MAX_DIM` streams.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StreamSinrs {
    len: usize,
    values: [f64; MAX_DIM],
}

impl StreamSinrs {
    pub fn as_slice(&self) -> &[f64] {
        &self.values[..self.len]
    }
}

/// Whitened channel Gram matrix `Hᴴ R⁻¹ H` for one desired link. Evaluating
/// several precoders against the same covariance reuses it.
#[derive(Clone, Copy, Debug)]
pub struct WhitenedGram {
    gram: CMat,
}

impl WhitenedGram {
    pub fn new(covariance: &Cholesky, desired: &CMat) -> Self {
        WhitenedGram { gram: covariance.quad_form(desired) }
    }

    /// Per-stream SINRs for `precoder` at total transmit power `tx_power_w`.
    pub fn stream_sinrs(&self, tx_power_w: f64, precoder: &CMat) -> Result<StreamSinrs> {
        let rank = precoder.cols();
        let k = precoder.adjoint_mul(&self.gram.mul(precoder)).scale(tx_power_w / rank as f64);
        stream_sinrs_from_gram(&k)
    }
}

/// SINR of stream k is `1 / [(I + K)⁻¹]ₖₖ - 1` with `K = Aᴴ R⁻¹ A`.
fn stream_sinrs_from_gram(k: &CMat) -> Result<StreamSinrs> {
    let rank = k.rows();
    let mut shifted = *k;
    shifted.add_diagonal(1.0);
    let diag = inverse_diagonal_hpd(&shifted)?;
    let mut values = [0.0; MAX_DIM];
    for (v, d) in values.iter_mut().zip(diag.iter()).take(rank) {
        // Floors rounding noise for streams that are completely buried.
        *v = (1.0 / d - 1.0).max(f64::MIN_POSITIVE);
    }
    Ok(StreamSinrs { len: rank, values })
}

/// Per-stream SINRs for the desired link given its interferers and noise.
pub fn mmse_sinr(
    desired: &CMat,
    tx_power_w: f64,
    precoder: &CMat,
    interferers: &[Interferer],
    noise_power_w: f64,
) -> Result<Vec<f64>> {
    let mut cov = Covariance::white(desired.rows(), noise_power_w);
    for i in interferers {
        cov.add_transmitter(&i.channel, i.tx_power_w, &i.precoder);
    }
    let gram = WhitenedGram::new(&cov.factor()?, desired);
    Ok(gram.stream_sinrs(tx_power_w, precoder)?.as_slice().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scalar_matched_filter() {
        let h = CMat::from_rows(1, 1, &[c(0.6, -0.8)]);
        let q = CMat::identity(1);
        let s = mmse_sinr(&h, 2.0, &q, &[], 0.5).unwrap();
        assert!((s[0] - 2.0 * 1.0 / 0.5).abs() < 1e-12);
    }

    #[test]
    fn interferer_never_helps() {
        let h = CMat::from_rows(2, 2, &[c(1.0, 0.2), c(0.1, -0.5), c(-0.3, 0.4), c(0.9, 0.0)]);
        let g = CMat::from_rows(2, 1, &[c(0.4, 0.1), c(-0.2, 0.7)]);
        let q = CMat::identity(2);
        let base = mmse_sinr(&h, 1.0, &q, &[], 0.1).unwrap();
        let with = mmse_sinr(
            &h,
            1.0,
            &q,
            &[Interferer { channel: g, tx_power_w: 0.3, precoder: CMat::identity(1) }],
            0.1,
        )
        .unwrap();
        for (a, b) in base.iter().zip(&with) {
            assert!(b <= a);
        }
    }

    #[test]
    fn zero_noise_without_interference_is_conditioning_error() {
        let h = CMat::identity(2);
        assert_eq!(mmse_sinr(&h, 1.0, &CMat::identity(2), &[], 0.0), Err(Error::Conditioning));
    }

    #[test]
    fn white_covariance_adds_diagonal() {
        let mut cov = Covariance::white(3, 1.0);
        cov.add_white(0.5);
        assert_eq!(cov.matrix()[(2, 2)], c(1.5, 0.0));
        assert_eq!(cov.matrix()[(0, 1)], c(0.0, 0.0));
    }
}
