//! Large-scale link gains (pathloss, shadowing, coupling-loss floor) and
//! small-scale flat Rayleigh MIMO fading for the three link classes that
//! cross-link interference needs: BS-UE, BS-BS and UE-UE.

use std::f64::consts::FRAC_1_SQRT_2;
use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::rng;
use crate::topology::Deployment;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkClass {
    BsUe,
    BsBs,
    UeUe,
}

impl LinkClass {
    pub fn name(self) -> &'static str {
        match self {
            LinkClass::BsUe => "bs_ue",
            LinkClass::BsBs => "bs_bs",
            LinkClass::UeUe => "ue_ue",
        }
    }
}

/// Close-in branch used below a breakpoint distance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloseIn {
    pub breakpoint_m: f64,
    pub intercept_db: f64,
    pub slope_db: f64,
}

/// `loss = intercept + slope·log10(d_km)`, optionally with a close-in branch,
/// floored at the minimum coupling loss.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathlossModel {
    pub intercept_db: f64,
    pub slope_db: f64,
    pub min_coupling_loss_db: f64,
    pub shadowing_std_db: f64,
    pub close_in: Option<CloseIn>,
}

impl Default for PathlossModel {
    fn default() -> Self {
        PathlossModel {
            intercept_db: 140.7,
            slope_db: 36.7,
            min_coupling_loss_db: 45.0,
            shadowing_std_db: 10.0,
            close_in: None,
        }
    }
}

impl PathlossModel {
    /// Distance-dependent loss in dB, before shadowing and the floor.
    pub fn pathloss_db(&self, distance_m: f64) -> f64 {
        let d_km = distance_m / 1000.0;
        match &self.close_in {
            Some(ci) if distance_m <= ci.breakpoint_m => ci.intercept_db + ci.slope_db * d_km.log10(),
            _ => self.intercept_db + self.slope_db * d_km.log10(),
        }
    }

    fn validate(&self, key: &str) -> Result<()> {
        if !(self.slope_db > 0.0) {
            return Err(Error::config(format!("{key}.slope_db"), "must be positive"));
        }
        if !(self.shadowing_std_db >= 0.0) {
            return Err(Error::config(format!("{key}.shadowing_std_db"), "must be non-negative"));
        }
        if !(self.min_coupling_loss_db >= 0.0) {
            return Err(Error::config(format!("{key}.min_coupling_loss_db"), "must be non-negative"));
        }
        if let Some(ci) = &self.close_in {
            if !(ci.slope_db > 0.0) || !(ci.breakpoint_m > 0.0) {
                return Err(Error::config(format!("{key}.close_in"), "slope and breakpoint must be positive"));
            }
            let d_km = ci.breakpoint_m / 1000.0;
            let inner = ci.intercept_db + ci.slope_db * d_km.log10();
            let outer = self.intercept_db + self.slope_db * d_km.log10();
            if inner > outer + 1e-9 {
                return Err(Error::config(
                    format!("{key}.close_in"),
                    format!("loss drops from {inner:.2} dB to {outer:.2} dB at the breakpoint; loss must be non-decreasing in distance"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FadingMode {
    /// Fresh independent matrices every subframe.
    IidPerSubframe,
    /// One matrix per link for the whole run.
    BlockStatic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub carrier_bandwidth_hz: f64,
    pub thermal_noise_dbm_hz: f64,
    pub noise_figure_ue_db: f64,
    pub noise_figure_bs_db: f64,
    pub bs_antennas: usize,
    pub ue_antennas: usize,
    pub fading_mode: FadingMode,
    pub bs_ue: PathlossModel,
    pub bs_bs: PathlossModel,
    pub ue_ue: PathlossModel,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            carrier_bandwidth_hz: 10e6,
            thermal_noise_dbm_hz: -174.0,
            noise_figure_ue_db: 9.0,
            noise_figure_bs_db: 5.0,
            bs_antennas: 4,
            ue_antennas: 2,
            // Pedestrian channels barely move over one CSI period.
            fading_mode: FadingMode::BlockStatic,
            bs_ue: PathlossModel::default(),
            // Street-level NLOS between picocells.
            bs_bs: PathlossModel {
                intercept_db: 169.36,
                slope_db: 40.0,
                min_coupling_loss_db: 45.0,
                shadowing_std_db: 6.0,
                close_in: None,
            },
            // Free space up to 50 m, NLOS beyond.
            ue_ue: PathlossModel {
                intercept_db: 175.78,
                slope_db: 40.0,
                min_coupling_loss_db: 45.0,
                shadowing_std_db: 6.0,
                close_in: Some(CloseIn { breakpoint_m: 50.0, intercept_db: 98.45, slope_db: 20.0 }),
            },
        }
    }
}

impl ChannelConfig {
    pub fn model(&self, class: LinkClass) -> &PathlossModel {
        match class {
            LinkClass::BsUe => &self.bs_ue,
            LinkClass::BsBs => &self.bs_bs,
            LinkClass::UeUe => &self.ue_ue,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_bandwidth_hz > 0.0) {
            return Err(Error::config("channel.carrier_bandwidth_hz", "must be positive"));
        }
        for (key, n) in [("channel.bs_antennas", self.bs_antennas), ("channel.ue_antennas", self.ue_antennas)] {
            if n == 0 || n > crate::linalg::MAX_DIM {
                return Err(Error::config(key, format!("must be between 1 and {}", crate::linalg::MAX_DIM)));
            }
        }
        self.bs_ue.validate("channel.bs_ue")?;
        self.bs_bs.validate("channel.bs_bs")?;
        self.ue_ue.validate("channel.ue_ue")?;
        Ok(())
    }

    /// Thermal noise power over the carrier at a receiver, in watts.
    pub fn noise_power_w(&self, receiver: Node) -> f64 {
        let nf = match receiver {
            Node::Bs(_) => self.noise_figure_bs_db,
            Node::Ue(_) => self.noise_figure_ue_db,
        };
        dbm_to_w(self.thermal_noise_dbm_hz + 10.0 * self.carrier_bandwidth_hz.log10() + nf)
    }

    pub fn antennas(&self, node: Node) -> usize {
        match node {
            Node::Bs(_) => self.bs_antennas,
            Node::Ue(_) => self.ue_antennas,
        }
    }
}

pub fn dbm_to_w(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn w_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

/// Linear large-scale gain of one link.
pub fn large_scale_gain(class: LinkClass, distance_m: f64, shadow_db: f64, cfg: &ChannelConfig) -> Result<f64> {
    if !(distance_m > 0.0) {
        return Err(Error::Domain(distance_m));
    }
    let model = cfg.model(class);
    let loss = (model.pathloss_db(distance_m) + shadow_db).max(model.min_coupling_loss_db);
    Ok(10f64.powf(-loss / 10.0))
}

/// A transmitter or receiver: picocell base station or UE, by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Bs(usize),
    Ue(usize),
}

impl std::fmt::Display for Node {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Node::Bs(i) => write!(f, "bs{i}"),
            Node::Ue(i) => write!(f, "ue{i}"),
        }
    }
}

pub fn link_class(a: Node, b: Node) -> LinkClass {
    match (a, b) {
        (Node::Bs(_), Node::Bs(_)) => LinkClass::BsBs,
        (Node::Ue(_), Node::Ue(_)) => LinkClass::UeUe,
        _ => LinkClass::BsUe,
    }
}

/// Symmetric per-pair matrix stored densely.
#[derive(Clone, Debug, PartialEq)]
struct PairTable {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl PairTable {
    fn new(rows: usize, cols: usize) -> Self {
        PairTable { rows, cols, values: vec![0.0; rows * cols] }
    }

    #[inline]
    fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols + c]
    }

    #[inline]
    fn set(&mut self, r: usize, c: usize, v: f64) {
        self.values[r * self.cols + c] = v;
    }
}

/// Shadowing draws in dB; reciprocal links share one draw.
#[derive(Clone, Debug, PartialEq)]
pub struct ShadowingTable {
    bs_ue: PairTable,
    bs_bs: PairTable,
    ue_ue: PairTable,
}

impl ShadowingTable {
    pub fn get(&self, a: Node, b: Node) -> Option<f64> {
        match (a, b) {
            (Node::Bs(i), Node::Bs(j)) if i != j && i < self.bs_bs.rows && j < self.bs_bs.rows => {
                Some(self.bs_bs.get(i, j))
            }
            (Node::Ue(i), Node::Ue(j)) if i != j && i < self.ue_ue.rows && j < self.ue_ue.rows => {
                Some(self.ue_ue.get(i, j))
            }
            (Node::Bs(b), Node::Ue(u)) | (Node::Ue(u), Node::Bs(b)) if b < self.bs_ue.rows && u < self.bs_ue.cols => {
                Some(self.bs_ue.get(b, u))
            }
            _ => None,
        }
    }

    /// All draws of one class, one per unordered link.
    pub fn class_draws(&self, class: LinkClass) -> Vec<f64> {
        match class {
            LinkClass::BsUe => self.bs_ue.values.clone(),
            LinkClass::BsBs => upper_triangle(&self.bs_bs),
            LinkClass::UeUe => upper_triangle(&self.ue_ue),
        }
    }
}

fn upper_triangle(t: &PairTable) -> Vec<f64> {
    let mut out = Vec::with_capacity(t.rows * t.rows.saturating_sub(1) / 2);
    for i in 0..t.rows {
        for j in (i + 1)..t.cols {
            out.push(t.get(i, j));
        }
    }
    out
}

/// Zero-mean Gaussian shadowing per link, deterministic in `(deployment, seed)`.
pub fn draw_shadowing(deployment: &Deployment, cfg: &ChannelConfig, seed: u64) -> ShadowingTable {
    let n_bs = deployment.picocells().len();
    let n_ue = deployment.ues().len();
    let draw = |class: LinkClass| {
        let std = cfg.model(class).shadowing_std_db;
        let mut r = rng::stream(seed, &[rng::tag("shadowing"), rng::tag(class.name())]);
        move || {
            let z: f64 = r.sample(StandardNormal);
            z * std
        }
    };

    let mut bs_ue = PairTable::new(n_bs, n_ue);
    let mut next = draw(LinkClass::BsUe);
    for b in 0..n_bs {
        for u in 0..n_ue {
            bs_ue.set(b, u, next());
        }
    }

    let symmetric = |n: usize, next: &mut dyn FnMut() -> f64| {
        let mut t = PairTable::new(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = next();
                t.set(i, j, v);
                t.set(j, i, v);
            }
        }
        t
    };
    let bs_bs = symmetric(n_bs, &mut draw(LinkClass::BsBs));
    let ue_ue = symmetric(n_ue, &mut draw(LinkClass::UeUe));

    ShadowingTable { bs_ue, bs_bs, ue_ue }
}

/// Linear large-scale gains for every BS-UE, BS-BS and UE-UE pair.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkGainTable {
    bs_ue: PairTable,
    bs_bs: PairTable,
    ue_ue: PairTable,
    bs_ue_distance: PairTable,
}

impl LinkGainTable {
    pub fn build(deployment: &Deployment, cfg: &ChannelConfig, shadowing: &ShadowingTable) -> Result<Self> {
        cfg.validate()?;
        let wrap = deployment.wrap();
        let picos = deployment.picocells();
        let ues = deployment.ues();
        let (n_bs, n_ue) = (picos.len(), ues.len());
        // Coincident nodes fall back to the coupling-loss floor.
        let gain = |class, a, b, shadow| large_scale_gain(class, wrap.distance(a, b).max(1e-3), shadow, cfg);

        let mut bs_ue = PairTable::new(n_bs, n_ue);
        let mut bs_ue_distance = PairTable::new(n_bs, n_ue);
        for (b, pico) in picos.iter().enumerate() {
            for (u, ue) in ues.iter().enumerate() {
                bs_ue.set(b, u, gain(LinkClass::BsUe, pico.position, ue.position, shadowing.bs_ue.get(b, u))?);
                bs_ue_distance.set(b, u, wrap.distance(pico.position, ue.position));
            }
        }
        let mut bs_bs = PairTable::new(n_bs, n_bs);
        for i in 0..n_bs {
            for j in (i + 1)..n_bs {
                let g = gain(LinkClass::BsBs, picos[i].position, picos[j].position, shadowing.bs_bs.get(i, j))?;
                bs_bs.set(i, j, g);
                bs_bs.set(j, i, g);
            }
        }
        let mut ue_ue = PairTable::new(n_ue, n_ue);
        for i in 0..n_ue {
            for j in (i + 1)..n_ue {
                let g = gain(LinkClass::UeUe, ues[i].position, ues[j].position, shadowing.ue_ue.get(i, j))?;
                ue_ue.set(i, j, g);
                ue_ue.set(j, i, g);
            }
        }
        Ok(LinkGainTable { bs_ue, bs_bs, ue_ue, bs_ue_distance })
    }

    pub fn n_bs(&self) -> usize {
        self.bs_bs.rows
    }

    pub fn n_ue(&self) -> usize {
        self.ue_ue.rows
    }

    /// Gain of the link `tx → rx`; identical to `rx → tx`.
    pub fn gain(&self, tx: Node, rx: Node) -> Result<f64> {
        let ok = |i: usize, n: usize| i < n;
        match (tx, rx) {
            (Node::Bs(i), Node::Bs(j)) if i != j && ok(i, self.n_bs()) && ok(j, self.n_bs()) => Ok(self.bs_bs.get(i, j)),
            (Node::Ue(i), Node::Ue(j)) if i != j && ok(i, self.n_ue()) && ok(j, self.n_ue()) => Ok(self.ue_ue.get(i, j)),
            (Node::Bs(b), Node::Ue(u)) | (Node::Ue(u), Node::Bs(b)) if ok(b, self.n_bs()) && ok(u, self.n_ue()) => {
                Ok(self.bs_ue.get(b, u))
            }
            _ => Err(Error::UnknownLink(format!("{tx} -> {rx}"))),
        }
    }

    #[inline]
    pub(crate) fn bs_ue(&self, b: usize, u: usize) -> f64 {
        self.bs_ue.get(b, u)
    }

    #[inline]
    pub(crate) fn bs_bs(&self, a: usize, b: usize) -> f64 {
        self.bs_bs.get(a, b)
    }

    #[inline]
    pub(crate) fn ue_ue(&self, a: usize, b: usize) -> f64 {
        self.ue_ue.get(a, b)
    }

    /// Large-scale loss in dB including shadowing and the floor.
    pub fn loss_db(&self, tx: Node, rx: Node) -> Result<f64> {
        Ok(-10.0 * self.gain(tx, rx)?.log10())
    }

    /// Debug export of every unordered link: `class,a,b,loss_db`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "class,a,b,loss_db")?;
        for b in 0..self.n_bs() {
            for u in 0..self.n_ue() {
                writeln!(w, "bs_ue,bs{b},ue{u},{:.3}", -10.0 * self.bs_ue.get(b, u).log10())?;
            }
        }
        for i in 0..self.n_bs() {
            for j in (i + 1)..self.n_bs() {
                writeln!(w, "bs_bs,bs{i},bs{j},{:.3}", -10.0 * self.bs_bs.get(i, j).log10())?;
            }
        }
        for i in 0..self.n_ue() {
            for j in (i + 1)..self.n_ue() {
                writeln!(w, "ue_ue,ue{i},ue{j},{:.3}", -10.0 * self.ue_ue.get(i, j).log10())?;
            }
        }
        Ok(())
    }

    /// Wrap-around BS-UE distance, kept for diagnostics.
    pub fn bs_ue_distance_m(&self, b: usize, u: usize) -> f64 {
        self.bs_ue_distance.get(b, u)
    }
}

/// Seeded small-scale fading. Matrices are a pure function of
/// `(seed, link, subframe)`, so any link can be queried at any time without
/// replaying history. The two directions of a link see transposed matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct FadingState {
    seed: u64,
    mode: FadingMode,
    bs_antennas: usize,
    ue_antennas: usize,
}

impl FadingState {
    pub fn new(cfg: &ChannelConfig, seed: u64) -> Self {
        FadingState {
            seed,
            mode: cfg.fading_mode,
            bs_antennas: cfg.bs_antennas,
            ue_antennas: cfg.ue_antennas,
        }
    }

    pub fn mode(&self) -> FadingMode {
        self.mode
    }

    fn antennas(&self, n: Node) -> usize {
        match n {
            Node::Bs(_) => self.bs_antennas,
            Node::Ue(_) => self.ue_antennas,
        }
    }

    /// Unit-power fading matrix of shape `(rx antennas × tx antennas)`.
    pub fn matrix(&self, tx: Node, rx: Node, subframe: u64) -> CMat {
        let (a, b) = if tx <= rx { (tx, rx) } else { (rx, tx) };
        let key = |n: Node| match n {
            Node::Bs(i) => i as u64,
            Node::Ue(i) => (1u64 << 32) | i as u64,
        };
        let t = match self.mode {
            FadingMode::IidPerSubframe => subframe,
            FadingMode::BlockStatic => u64::MAX,
        };
        let mut r = rng::stream(self.seed, &[key(a), key(b), t]);
        // Canonical matrix describes a → b.
        let g = CMat::from_fn(self.antennas(b), self.antennas(a), |_, _| {
            let re: f64 = r.sample(StandardNormal);
            let im: f64 = r.sample(StandardNormal);
            Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
        });
        if tx == a {
            g
        } else {
            g.transpose()
        }
    }
}

/// Channel of `tx → rx` at `subframe`: `sqrt(large-scale gain) × fading`.
pub fn channel_matrix(tx: Node, rx: Node, subframe: u64, fading: &FadingState, gains: &LinkGainTable) -> Result<CMat> {
    let g = gains.gain(tx, rx)?;
    Ok(fading.matrix(tx, rx, subframe).scale(g.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{generate_deployment, GeometryConfig};

    fn small_geometry() -> GeometryConfig {
        GeometryConfig { n_sites: 1, picos_per_macrocell: 2, ues_per_pico: 4, ..Default::default() }
    }

    #[test]
    fn floor_applies_at_short_range() {
        let cfg = ChannelConfig::default();
        let g = large_scale_gain(LinkClass::BsUe, 0.01, 0.0, &cfg).unwrap();
        assert!((g - 10f64.powf(-4.5)).abs() < 1e-18);
    }

    #[test]
    fn bs_ue_at_40_m() {
        // 140.7 + 36.7·log10(0.04) = 140.7 - 51.305... = 89.395 dB
        let expected_loss = 140.7 + 36.7 * (0.04f64).log10();
        assert!((expected_loss - 89.3951).abs() < 1e-3);
        let g = large_scale_gain(LinkClass::BsUe, 40.0, 0.0, &ChannelConfig::default()).unwrap();
        assert!((-10.0 * g.log10() - 89.3951).abs() < 1e-3);
    }

    #[test]
    fn doubling_distance_adds_slope_log2() {
        let cfg = ChannelConfig::default();
        for class in [LinkClass::BsUe, LinkClass::BsBs] {
            let g1 = large_scale_gain(class, 200.0, 0.0, &cfg).unwrap();
            let g2 = large_scale_gain(class, 400.0, 0.0, &cfg).unwrap();
            let delta = 10.0 * (g1 / g2).log10();
            assert!((delta - cfg.model(class).slope_db * 2f64.log10()).abs() < 1e-9);
        }
    }

    #[test]
    fn nonpositive_distance_is_domain_error() {
        let cfg = ChannelConfig::default();
        assert_eq!(large_scale_gain(LinkClass::BsUe, 0.0, 0.0, &cfg), Err(Error::Domain(0.0)));
        assert!(large_scale_gain(LinkClass::UeUe, -3.0, 0.0, &cfg).is_err());
    }

    #[test]
    fn default_models_are_monotone() {
        let cfg = ChannelConfig::default();
        cfg.validate().unwrap();
        for class in [LinkClass::BsUe, LinkClass::BsBs, LinkClass::UeUe] {
            let mut prev = 0.0;
            for i in 1..2000 {
                let d = i as f64 * 0.5;
                let g = large_scale_gain(class, d, 0.0, &cfg).unwrap();
                assert!(g <= 1.0 && g > 0.0);
                if i > 1 {
                    assert!(g <= prev + 1e-15, "{class:?} not monotone at {d} m");
                }
                prev = g;
            }
        }
    }

    #[test]
    fn discontinuous_close_in_rejected() {
        let mut cfg = ChannelConfig::default();
        cfg.ue_ue = PathlossModel {
            intercept_db: 98.45,
            slope_db: 40.0,
            min_coupling_loss_db: 45.0,
            shadowing_std_db: 6.0,
            close_in: Some(CloseIn { breakpoint_m: 50.0, intercept_db: 175.78, slope_db: 40.0 }),
        };
        assert!(matches!(cfg.validate(), Err(Error::Config { .. })));
    }

    #[test]
    fn zero_std_gives_zero_shadowing() {
        let d = generate_deployment(&small_geometry(), 1).unwrap();
        let mut cfg = ChannelConfig::default();
        cfg.bs_ue.shadowing_std_db = 0.0;
        cfg.bs_bs.shadowing_std_db = 0.0;
        cfg.ue_ue.shadowing_std_db = 0.0;
        let s = draw_shadowing(&d, &cfg, 4);
        for class in [LinkClass::BsUe, LinkClass::BsBs, LinkClass::UeUe] {
            assert!(s.class_draws(class).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn shadowing_statistics() {
        // 84 x 840 BS-UE links with 10 dB std.
        let d = generate_deployment(&GeometryConfig::default(), 2).unwrap();
        let s = draw_shadowing(&d, &ChannelConfig::default(), 9);
        let v = s.class_draws(LinkClass::BsUe);
        assert!(v.len() >= 10_000);
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let std = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!(mean.abs() < 0.5, "mean {mean}");
        assert!((std - 10.0).abs() < 0.5, "std {std}");
    }

    #[test]
    fn shadowing_deterministic_and_reciprocal() {
        let d = generate_deployment(&small_geometry(), 1).unwrap();
        let cfg = ChannelConfig::default();
        let a = draw_shadowing(&d, &cfg, 5);
        assert_eq!(a, draw_shadowing(&d, &cfg, 5));
        assert_eq!(a.get(Node::Ue(1), Node::Ue(3)), a.get(Node::Ue(3), Node::Ue(1)));
        assert_eq!(a.get(Node::Bs(0), Node::Ue(2)), a.get(Node::Ue(2), Node::Bs(0)));
        assert_eq!(a.get(Node::Ue(1), Node::Ue(1)), None);
    }

    #[test]
    fn gains_reciprocal_and_bounded() {
        let d = generate_deployment(&small_geometry(), 1).unwrap();
        let cfg = ChannelConfig { fading_mode: FadingMode::IidPerSubframe, ..Default::default() };
        let gains = LinkGainTable::build(&d, &cfg, &draw_shadowing(&d, &cfg, 2)).unwrap();
        let nodes: Vec<Node> = (0..d.picocells().len())
            .map(Node::Bs)
            .chain((0..d.ues().len()).map(Node::Ue))
            .collect();
        for &a in &nodes {
            for &b in &nodes {
                if a == b {
                    assert!(gains.gain(a, b).is_err());
                    continue;
                }
                let g = gains.gain(a, b).unwrap();
                assert!(g > 0.0 && g <= 1.0);
                assert_eq!(g, gains.gain(b, a).unwrap());
            }
        }
        assert!(matches!(gains.gain(Node::Bs(0), Node::Ue(999)), Err(Error::UnknownLink(_))));
    }

    #[test]
    fn matrix_shapes_follow_antennas() {
        let d = generate_deployment(&small_geometry(), 1).unwrap();
        let cfg = ChannelConfig { fading_mode: FadingMode::IidPerSubframe, ..Default::default() };
        let gains = LinkGainTable::build(&d, &cfg, &draw_shadowing(&d, &cfg, 2)).unwrap();
        let fading = FadingState::new(&cfg, 3);
        let h = channel_matrix(Node::Bs(0), Node::Ue(0), 7, &fading, &gains).unwrap();
        assert_eq!((h.rows(), h.cols()), (2, 4));
        let h = channel_matrix(Node::Ue(0), Node::Bs(1), 7, &fading, &gains).unwrap();
        assert_eq!((h.rows(), h.cols()), (4, 2));
        let h = channel_matrix(Node::Bs(0), Node::Bs(1), 7, &fading, &gains).unwrap();
        assert_eq!((h.rows(), h.cols()), (4, 4));
        assert!(channel_matrix(Node::Bs(0), Node::Bs(0), 7, &fading, &gains).is_err());
    }

    #[test]
    fn reverse_link_is_transpose() {
        let cfg = ChannelConfig::default();
        let fading = FadingState::new(&cfg, 3);
        let fwd = fading.matrix(Node::Bs(2), Node::Ue(5), 11);
        let rev = fading.matrix(Node::Ue(5), Node::Bs(2), 11);
        assert_eq!(fwd.transpose(), rev);
    }

    #[test]
    fn iid_and_block_static_modes() {
        let mut cfg = ChannelConfig { fading_mode: FadingMode::IidPerSubframe, ..Default::default() };
        let fading = FadingState::new(&cfg, 3);
        assert_ne!(fading.matrix(Node::Bs(0), Node::Ue(0), 1), fading.matrix(Node::Bs(0), Node::Ue(0), 2));
        cfg.fading_mode = FadingMode::BlockStatic;
        let fading = FadingState::new(&cfg, 3);
        assert_eq!(fading.matrix(Node::Bs(0), Node::Ue(0), 1), fading.matrix(Node::Bs(0), Node::Ue(0), 2));
    }

    #[test]
    fn vanishing_gain_gives_zero_matrix() {
        let mut cfg = ChannelConfig::default();
        cfg.bs_ue.min_coupling_loss_db = 0.0;
        // 1e6 km away: loss ≈ 140.7 + 36.7·6 ≈ 361 dB.
        let g = large_scale_gain(LinkClass::BsUe, 1e9, 0.0, &cfg).unwrap();
        let h = FadingState::new(&cfg, 1).matrix(Node::Bs(0), Node::Ue(0), 0).scale(g.sqrt());
        assert!(h.frobenius_sq() < 1e-33);
    }

    #[test]
    fn energy_normalization() {
        let d = generate_deployment(&small_geometry(), 1).unwrap();
        let cfg = ChannelConfig { fading_mode: FadingMode::IidPerSubframe, ..Default::default() };
        let gains = LinkGainTable::build(&d, &cfg, &draw_shadowing(&d, &cfg, 2)).unwrap();
        let fading = FadingState::new(&cfg, 3);
        let g = gains.gain(Node::Bs(1), Node::Ue(2)).unwrap();
        let n = 10_000;
        let mut entry = 0.0;
        let mut frob = 0.0;
        for t in 0..n {
            let h = channel_matrix(Node::Bs(1), Node::Ue(2), t, &fading, &gains).unwrap();
            entry += h[(0, 0)].norm_sqr();
            frob += h.frobenius_sq();
        }
        let entry = entry / n as f64;
        let frob = frob / n as f64;
        assert!((entry / g - 1.0).abs() < 0.05, "entry power ratio {}", entry / g);
        assert!((frob / (g * 8.0) - 1.0).abs() < 0.05, "frobenius ratio {}", frob / (g * 8.0));
    }

    #[test]
    fn block_static_unit_power_across_links() {
        let fading = FadingState::new(&ChannelConfig::default(), 5);
        let n = 10_000;
        let total: f64 = (0..n).map(|u| fading.matrix(Node::Bs(0), Node::Ue(u), 0).frobenius_sq()).sum();
        let per_entry = total / (n as f64 * 8.0);
        assert!((per_entry - 1.0).abs() < 0.05, "{per_entry}");
    }
}
