//! Network layout: a hexagonal macro grid used purely as a placement frame,
//! picocells dropped at random inside each macro sector, and UEs dropped
//! uniformly around their picocell. Distances use a wrap-around metric over
//! the site cluster so that no node sits at a network edge.

use std::f64::consts::PI;
use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn polar(r: f64, angle_rad: f64) -> Self {
        Point::new(r * angle_rad.cos(), r * angle_rad.sin())
    }

    pub fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }

    pub fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        self.sub(o).norm()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    /// Macro sites in the wrap-around cluster (1 or 7).
    pub n_sites: usize,
    pub sectors_per_site: usize,
    pub inter_site_distance_m: f64,
    pub picos_per_macrocell: usize,
    pub pico_radius_m: f64,
    pub ues_per_pico: usize,
    pub min_pico_pico_distance_m: f64,
    pub min_pico_macrosite_distance_m: f64,
    pub min_ue_pico_distance_m: f64,
    /// Rejection-sampling budget per dropped picocell.
    pub max_drop_attempts: usize,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            n_sites: 7,
            sectors_per_site: 3,
            inter_site_distance_m: 500.0,
            picos_per_macrocell: 4,
            pico_radius_m: 40.0,
            ues_per_pico: 10,
            min_pico_pico_distance_m: 40.0,
            min_pico_macrosite_distance_m: 75.0,
            min_ue_pico_distance_m: 3.0,
            max_drop_attempts: 10_000,
        }
    }
}

impl GeometryConfig {
    pub fn n_macrocells(&self) -> usize {
        self.n_sites * self.sectors_per_site
    }

    pub fn n_picocells(&self) -> usize {
        self.n_macrocells() * self.picos_per_macrocell
    }

    pub fn n_ues(&self) -> usize {
        self.n_picocells() * self.ues_per_pico
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites != 1 && self.n_sites != 7 {
            return Err(Error::config("geometry.n_sites", "wrap-around cluster supports 1 or 7 sites"));
        }
        if self.sectors_per_site != 3 {
            return Err(Error::config("geometry.sectors_per_site", "only 3-sector sites are supported"));
        }
        let positive = [
            ("geometry.inter_site_distance_m", self.inter_site_distance_m),
            ("geometry.pico_radius_m", self.pico_radius_m),
            ("geometry.min_pico_pico_distance_m", self.min_pico_pico_distance_m),
            ("geometry.min_pico_macrosite_distance_m", self.min_pico_macrosite_distance_m),
            ("geometry.min_ue_pico_distance_m", self.min_ue_pico_distance_m),
        ];
        for (key, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(key, format!("must be a positive distance, got {v}")));
            }
        }
        if self.pico_radius_m >= self.inter_site_distance_m {
            return Err(Error::config("geometry.pico_radius_m", "must be smaller than the inter-site distance"));
        }
        if self.min_ue_pico_distance_m >= self.pico_radius_m {
            return Err(Error::config("geometry.min_ue_pico_distance_m", "must be smaller than the pico radius"));
        }
        if self.max_drop_attempts == 0 {
            return Err(Error::config("geometry.max_drop_attempts", "must be at least 1"));
        }
        Ok(())
    }

    /// Circumradius of one hexagonal macro sector.
    fn sector_radius(&self) -> f64 {
        self.inter_site_distance_m / 3.0
    }
}

/// Mirror translates of the site cluster, used for wrap-around distances.
#[derive(Clone, Debug)]
pub struct WrapAround {
    translates: [Point; 7],
    sites: Vec<Point>,
}

impl WrapAround {
    pub fn new(geometry: &GeometryConfig) -> Self {
        let d = geometry.inter_site_distance_m;
        // 7-site cluster tiles with shift vectors of length sqrt(7)·ISD; a
        // single site tiles with the site lattice itself.
        let (len, base_angle) = if geometry.n_sites == 7 {
            (d * 7f64.sqrt(), 2f64.atan2(3f64.sqrt()))
        } else {
            (d, PI / 6.0)
        };
        let mut translates = [Point::default(); 7];
        for (k, t) in translates.iter_mut().skip(1).enumerate() {
            *t = Point::polar(len, base_angle + k as f64 * PI / 3.0);
        }
        WrapAround {
            translates,
            sites: site_positions(geometry),
        }
    }

    pub fn translates(&self) -> &[Point; 7] {
        &self.translates
    }

    /// Minimum Euclidean distance over the centre image and the six mirrors.
    #[inline]
    pub fn distance(&self, a: Point, b: Point) -> f64 {
        let dx = a.x - b.x;
        let dy = a.y - b.y;
        let mut best = f64::INFINITY;
        for t in &self.translates {
            let ex = dx - t.x;
            let ey = dy - t.y;
            best = best.min(ex * ex + ey * ey);
        }
        best.sqrt()
    }

    /// Maps a point into the fundamental region: the image whose nearest
    /// cluster site is closest.
    pub fn fold(&self, p: Point) -> Point {
        let mut best = (f64::INFINITY, p);
        for t in &self.translates {
            let q = p.sub(*t);
            let d = self.sites.iter().map(|s| s.dist(q)).fold(f64::INFINITY, f64::min);
            if d < best.0 - 1e-9 {
                best = (d, q);
            }
        }
        best.1
    }

    /// True when `p` is already its own folded image.
    pub fn contains(&self, p: Point) -> bool {
        self.fold(p) == p
    }
}

/// Wrap-around distance between two positions of the fundamental region.
pub fn wraparound_distance(a: Point, b: Point, geometry: &GeometryConfig) -> f64 {
    WrapAround::new(geometry).distance(a, b)
}

fn site_positions(geometry: &GeometryConfig) -> Vec<Point> {
    let mut sites = vec![Point::default()];
    if geometry.n_sites == 7 {
        for k in 0..6 {
            sites.push(Point::polar(geometry.inter_site_distance_m, PI / 6.0 + k as f64 * PI / 3.0));
        }
    }
    sites
}

/// A macro sector: placement frame only, it carries no transmitter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Macrocell {
    pub site: usize,
    pub azimuth_deg: f64,
    pub center: Point,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Picocell {
    pub position: Point,
    pub macrocell: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ue {
    pub position: Point,
    /// Serving picocell; association is fixed by the drop.
    pub pico: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Deployment {
    sites: Vec<Point>,
    macrocells: Vec<Macrocell>,
    picocells: Vec<Picocell>,
    ues: Vec<Ue>,
    geometry: GeometryConfig,
}

impl Deployment {
    /// Assembles a deployment without checking it; see [`validate_deployment`].
    pub fn from_parts(
        geometry: GeometryConfig,
        sites: Vec<Point>,
        macrocells: Vec<Macrocell>,
        picocells: Vec<Picocell>,
        ues: Vec<Ue>,
    ) -> Self {
        Deployment { sites, macrocells, picocells, ues, geometry }
    }

    pub fn sites(&self) -> &[Point] {
        &self.sites
    }

    pub fn macrocells(&self) -> &[Macrocell] {
        &self.macrocells
    }

    pub fn picocells(&self) -> &[Picocell] {
        &self.picocells
    }

    pub fn ues(&self) -> &[Ue] {
        &self.ues
    }

    pub fn geometry(&self) -> &GeometryConfig {
        &self.geometry
    }

    pub fn wrap(&self) -> WrapAround {
        WrapAround::new(&self.geometry)
    }

    /// UE indices grouped by serving picocell.
    pub fn ues_by_pico(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.picocells.len()];
        for (i, ue) in self.ues.iter().enumerate() {
            if let Some(list) = out.get_mut(ue.pico) {
                list.push(i);
            }
        }
        out
    }

    /// Debug export with columns `node_type,id,parent_id,x_m,y_m`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "node_type,id,parent_id,x_m,y_m")?;
        for (i, s) in self.sites.iter().enumerate() {
            writeln!(w, "site,{i},,{:.3},{:.3}", s.x, s.y)?;
        }
        for (i, m) in self.macrocells.iter().enumerate() {
            writeln!(w, "macrocell,{i},{},{:.3},{:.3}", m.site, m.center.x, m.center.y)?;
        }
        for (i, p) in self.picocells.iter().enumerate() {
            writeln!(w, "pico,{i},{},{:.3},{:.3}", p.macrocell, p.position.x, p.position.y)?;
        }
        for (i, u) in self.ues.iter().enumerate() {
            writeln!(w, "ue,{i},{},{:.3},{:.3}", u.pico, u.position.x, u.position.y)?;
        }
        Ok(())
    }
}

fn in_pointy_hexagon(p: Point, center: Point, radius: f64) -> bool {
    let dx = (p.x - center.x).abs();
    let dy = (p.y - center.y).abs();
    dx <= radius * 3f64.sqrt() / 2.0 && dy <= radius - dx / 3f64.sqrt()
}

fn uniform_in_hexagon<R: Rng>(rng: &mut R, center: Point, radius: f64) -> Point {
    let half_w = radius * 3f64.sqrt() / 2.0;
    loop {
        let p = Point::new(
            center.x + rng.gen_range(-half_w..=half_w),
            center.y + rng.gen_range(-radius..=radius),
        );
        if in_pointy_hexagon(p, center, radius) {
            return p;
        }
    }
}

/// Drops picocells and UEs for the configured layout. A pure function of
/// `(cfg, seed)`.
pub fn generate_deployment(cfg: &GeometryConfig, seed: u64) -> Result<Deployment> {
    cfg.validate()?;
    let wrap = WrapAround::new(cfg);
    let sites = site_positions(cfg);
    let sector_r = cfg.sector_radius();

    let mut macrocells = Vec::with_capacity(cfg.n_macrocells());
    for (s, site) in sites.iter().enumerate() {
        for k in 0..cfg.sectors_per_site {
            let az = 30.0 + 120.0 * k as f64;
            macrocells.push(Macrocell {
                site: s,
                azimuth_deg: az,
                center: site.add(Point::polar(sector_r, az.to_radians())),
            });
        }
    }

    let mut rng = rng::stream(seed, &[rng::tag("picocells")]);
    let mut picocells: Vec<Picocell> = Vec::with_capacity(cfg.n_picocells());
    for (m, macro_cell) in macrocells.iter().enumerate() {
        for _ in 0..cfg.picos_per_macrocell {
            let mut attempts = 0;
            let mut last_violation = "min_pico_pico_distance";
            let position = loop {
                if attempts == cfg.max_drop_attempts {
                    return Err(Error::Generation { constraint: last_violation, attempts });
                }
                attempts += 1;
                let candidate = wrap.fold(uniform_in_hexagon(&mut rng, macro_cell.center, sector_r));
                if sites.iter().any(|s| wrap.distance(*s, candidate) < cfg.min_pico_macrosite_distance_m) {
                    last_violation = "min_pico_macrosite_distance";
                    continue;
                }
                if picocells
                    .iter()
                    .any(|p| wrap.distance(p.position, candidate) < cfg.min_pico_pico_distance_m)
                {
                    last_violation = "min_pico_pico_distance";
                    continue;
                }
                break candidate;
            };
            picocells.push(Picocell { position, macrocell: m });
        }
    }

    let mut rng = rng::stream(seed, &[rng::tag("ues")]);
    let r_min2 = cfg.min_ue_pico_distance_m.powi(2);
    let r_max2 = cfg.pico_radius_m.powi(2);
    let mut ues = Vec::with_capacity(cfg.n_ues());
    for (p, pico) in picocells.iter().enumerate() {
        for _ in 0..cfg.ues_per_pico {
            // Uniform over the annulus [min_ue_pico, pico_radius].
            let r = rng.gen_range(r_min2..=r_max2).sqrt();
            let angle = rng.gen_range(0.0..2.0 * PI);
            let position = wrap.fold(pico.position.add(Point::polar(r, angle)));
            ues.push(Ue { position, pico: p });
        }
    }

    Ok(Deployment {
        sites,
        macrocells,
        picocells,
        ues,
        geometry: cfg.clone(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    UeOutsidePicoRadius { ue: usize, pico: usize, distance_m: f64 },
    UeTooCloseToPico { ue: usize, pico: usize, distance_m: f64 },
    UnknownServingPico { ue: usize, pico: usize },
    PicoSeparation { a: usize, b: usize, distance_m: f64 },
    PicoTooCloseToSite { pico: usize, site: usize, distance_m: f64 },
    CountMismatch { what: &'static str, expected: usize, found: usize },
}

impl Violation {
    /// Name of the violated constraint.
    pub fn constraint(&self) -> &'static str {
        match self {
            Violation::UeOutsidePicoRadius { .. } => "pico_radius",
            Violation::UeTooCloseToPico { .. } => "min_ue_pico_distance",
            Violation::UnknownServingPico { .. } => "serving_pico",
            Violation::PicoSeparation { .. } => "min_pico_pico_distance",
            Violation::PicoTooCloseToSite { .. } => "min_pico_macrosite_distance",
            Violation::CountMismatch { .. } => "node_count",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn mentions(&self, constraint: &str) -> bool {
        self.violations.iter().any(|v| v.constraint() == constraint)
    }
}

/// Lists every violated deployment invariant.
pub fn validate_deployment(d: &Deployment) -> ValidationReport {
    // Slack for coordinates that went through folding.
    const EPS: f64 = 1e-6;
    let cfg = &d.geometry;
    let wrap = d.wrap();
    let mut violations = Vec::new();

    for (what, expected, found) in [
        ("macrocells", cfg.n_macrocells(), d.macrocells.len()),
        ("picocells", cfg.n_picocells(), d.picocells.len()),
        ("ues", cfg.n_ues(), d.ues.len()),
    ] {
        if expected != found {
            violations.push(Violation::CountMismatch { what, expected, found });
        }
    }

    for (i, ue) in d.ues.iter().enumerate() {
        let Some(pico) = d.picocells.get(ue.pico) else {
            violations.push(Violation::UnknownServingPico { ue: i, pico: ue.pico });
            continue;
        };
        let dist = wrap.distance(ue.position, pico.position);
        if dist > cfg.pico_radius_m + EPS {
            violations.push(Violation::UeOutsidePicoRadius { ue: i, pico: ue.pico, distance_m: dist });
        } else if dist < cfg.min_ue_pico_distance_m - EPS {
            violations.push(Violation::UeTooCloseToPico { ue: i, pico: ue.pico, distance_m: dist });
        }
    }

    for (a, pa) in d.picocells.iter().enumerate() {
        for (b, pb) in d.picocells.iter().enumerate().skip(a + 1) {
            let dist = wrap.distance(pa.position, pb.position);
            if dist < cfg.min_pico_pico_distance_m - EPS {
                violations.push(Violation::PicoSeparation { a, b, distance_m: dist });
            }
        }
        for (s, site) in d.sites.iter().enumerate() {
            let dist = wrap.distance(pa.position, *site);
            if dist < cfg.min_pico_macrosite_distance_m - EPS {
                violations.push(Violation::PicoTooCloseToSite { pico: a, site: s, distance_m: dist });
            }
        }
    }

    ValidationReport { violations }
}
