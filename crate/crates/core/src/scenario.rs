//! Scenario construction: node placement, large-scale fading, Rician splits,
//! and LoS steering components — the statistical CSI for one frame.
//!
//! Conventions (documented here once, used everywhere):
//!
//! * All powers are linear watts internally. Scenario files carry dBm (and
//!   dB for the reference path loss); conversion happens on load.
//! * Azimuth at node `a` toward node `b` is `atan2(b.y - a.y, b.x - a.x)`.
//! * Elevation for UPA responses is the polar angle from the vertical axis,
//!   `acos(dz / d)`; BS ULA responses depend on azimuth only.
//! * Node heights are fixed per class (BS / RIS / UE) and configurable.

use crate::channel::{steering_ula, steering_upa};
use crate::error::CoreError;
use crate::linalg::{C64, CMat};
use crate::seqrng::rng_for;
use crate::Result;
use rand::Rng;

/// Convert dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

/// Convert dB to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// How LoS angles are derived from the layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleMode {
    /// Azimuth/elevation computed geometrically from node positions.
    Geometric,
    /// Angles drawn uniformly at random (ablation mode); seeded separately.
    UniformRandom { seed: u64 },
}

/// All scalar system parameters.
#[derive(Debug, Clone)]
pub struct SystemConfig {
    /// Number of BSs.
    pub s: usize,
    /// Antennas per BS (ULA).
    pub m: usize,
    /// Number of RISs. Zero is allowed and degenerates to a direct-only network.
    pub l: usize,
    /// RIS grid rows; `n = n_r * n_c`.
    pub n_r: usize,
    /// RIS grid columns.
    pub n_c: usize,
    /// Number of single-antenna users.
    pub k: usize,
    /// Per-BS transmit power budget, watts.
    pub p_max: f64,
    /// Noise power, watts.
    pub n0: f64,
    /// Per-user priority weights, length `k`.
    pub mu: Vec<f64>,
    /// Reference path loss at 1 m, linear.
    pub c0: f64,
    /// Path-loss exponent, direct BS-UE links.
    pub alpha_d: f64,
    /// Path-loss exponent, BS-RIS links.
    pub alpha_br: f64,
    /// Path-loss exponent, RIS-UE links.
    pub alpha_ru: f64,
    /// Rician K factor, BS-RIS links.
    pub k_bs_ris: f64,
    /// Rician K factor, RIS-UE links.
    pub k_ris_ue: f64,
    /// Rician K factor, direct links.
    pub k_direct: f64,
    /// BS antenna spacing over wavelength.
    pub d1_over_lambda: f64,
    /// RIS element spacing over wavelength.
    pub d2_over_lambda: f64,
    /// Deployment square side, meters.
    pub area_side: f64,
    /// Node heights, meters.
    pub height_bs: f64,
    pub height_ris: f64,
    pub height_ue: f64,
    /// LoS angle derivation mode.
    pub angle_mode: AngleMode,
}

impl SystemConfig {
    /// Elements per RIS.
    pub fn n(&self) -> usize {
        self.n_r * self.n_c
    }

    /// Check the documented invariants.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CoreError::Config(msg));
        if self.s < 1 || self.m < 1 || self.k < 1 {
            return bad(format!("counts must be >= 1 (s={}, m={}, k={})", self.s, self.m, self.k));
        }
        if self.l > 0 && (self.n_r < 1 || self.n_c < 1) {
            return bad("n_r and n_c must be >= 1 when l >= 1".into());
        }
        if !(self.p_max > 0.0) || !(self.n0 > 0.0) || !(self.c0 > 0.0) {
            return bad("p_max, n0 and c0 must be positive".into());
        }
        if !(self.alpha_d > 0.0 && self.alpha_br > 0.0 && self.alpha_ru > 0.0) {
            return bad("path-loss exponents must be positive".into());
        }
        if self.k_bs_ris < 0.0 || self.k_ris_ue < 0.0 || self.k_direct < 0.0 {
            return bad("Rician K factors must be nonnegative".into());
        }
        if self.mu.len() != self.k {
            return bad(format!("mu has length {}, expected k={}", self.mu.len(), self.k));
        }
        if self.mu.iter().any(|&w| !(w > 0.0)) {
            return bad("all priority weights must be positive".into());
        }
        if !(self.area_side > 0.0) {
            return bad("area_side must be positive".into());
        }
        Ok(())
    }
}

/// Simulation defaults: 3 BSs with 4 antennas, 3 RISs of 8x8 elements,
/// 4 users, 10 dBm budget per BS, -80 dBm noise, K factors 3 + sqrt(12).
pub fn default_config() -> SystemConfig {
    let k_factor = 3.0 + 12f64.sqrt();
    SystemConfig {
        s: 3,
        m: 4,
        l: 3,
        n_r: 8,
        n_c: 8,
        k: 4,
        p_max: dbm_to_watts(10.0),
        n0: dbm_to_watts(-80.0),
        mu: vec![1.0; 4],
        c0: db_to_linear(-30.0),
        alpha_d: 3.5,
        alpha_br: 2.2,
        alpha_ru: 2.8,
        k_bs_ris: k_factor,
        k_ris_ue: k_factor,
        k_direct: k_factor,
        d1_over_lambda: 0.5,
        d2_over_lambda: 0.5,
        area_side: 100.0,
        height_bs: 10.0,
        height_ris: 5.0,
        height_ue: 1.5,
        angle_mode: AngleMode::Geometric,
    }
}

/// Distance-dependent path loss `c0 * d^(-alpha)` with `d` in meters
/// relative to the 1 m reference distance.
pub fn path_loss(d: f64, alpha: f64, c0: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(CoreError::Geometry(format!("path_loss needs d > 0, got {d}")));
    }
    Ok(c0 * d.powf(-alpha))
}

/// Node placement request.
#[derive(Debug, Clone)]
pub enum LayoutSpec {
    /// All node classes uniform over the deployment square.
    UniformRandom,
    /// Explicit planar coordinates for every node.
    Fixed { bs: Vec<[f64; 2]>, ris: Vec<[f64; 2]>, ue: Vec<[f64; 2]> },
    /// Users clustered at `(x +- 2, y +- 2)`; BS/RIS at explicit coordinates
    /// (fall back to [`default_fixed_layout`] when empty).
    UeClusterAt { x: f64, y: f64, bs: Vec<[f64; 2]>, ris: Vec<[f64; 2]> },
}

/// Documented default BS/RIS coordinates for fixed-layout experiments:
/// BSs on a circle of radius `0.3 * side`, RISs on a circle of radius
/// `0.42 * side`, both centered in the square.
pub fn default_fixed_layout(side: f64, s: usize, l: usize) -> (Vec<[f64; 2]>, Vec<[f64; 2]>) {
    let center = side / 2.0;
    let ring = |count: usize, radius: f64, offset: f64| -> Vec<[f64; 2]> {
        (0..count)
            .map(|i| {
                let ang = offset + 2.0 * std::f64::consts::PI * i as f64 / count.max(1) as f64;
                [center + radius * ang.cos(), center + radius * ang.sin()]
            })
            .collect()
    };
    (ring(s, 0.30 * side, std::f64::consts::FRAC_PI_2), ring(l, 0.42 * side, 0.0))
}

/// 3-D node positions.
#[derive(Debug, Clone)]
pub struct NetworkGeometry {
    pub bs: Vec<[f64; 3]>,
    pub ris: Vec<[f64; 3]>,
    pub ue: Vec<[f64; 3]>,
}

impl NetworkGeometry {
    fn all_nodes(&self) -> impl Iterator<Item = &[f64; 3]> {
        self.bs.iter().chain(self.ris.iter()).chain(self.ue.iter())
    }

    /// Planar bounds and pairwise-distinctness checks.
    pub fn validate(&self, side: f64) -> Result<()> {
        for p in self.all_nodes() {
            if !(0.0..=side).contains(&p[0]) || !(0.0..=side).contains(&p[1]) {
                return Err(CoreError::Geometry(format!(
                    "node ({}, {}) outside [0, {side}]^2",
                    p[0], p[1]
                )));
            }
        }
        let nodes: Vec<&[f64; 3]> = self.all_nodes().collect();
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                if dist(nodes[i], nodes[j]) <= 0.0 {
                    return Err(CoreError::Geometry(format!("nodes {i} and {j} coincide")));
                }
            }
        }
        Ok(())
    }
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn lift(planar: &[[f64; 2]], h: f64) -> Vec<[f64; 3]> {
    planar.iter().map(|p| [p[0], p[1], h]).collect()
}

/// Place nodes according to `layout`. Deterministic for a fixed seed.
pub fn place_nodes(config: &SystemConfig, layout: &LayoutSpec, seed: u64) -> Result<NetworkGeometry> {
    config.validate()?;
    let side = config.area_side;
    let geom = match layout {
        LayoutSpec::UniformRandom => {
            let draw = |stream: u64, count: usize, h: f64| -> Vec<[f64; 3]> {
                let mut rng = rng_for(seed, stream);
                (0..count).map(|_| [rng.gen::<f64>() * side, rng.gen::<f64>() * side, h]).collect()
            };
            NetworkGeometry {
                bs: draw(1, config.s, config.height_bs),
                ris: draw(2, config.l, config.height_ris),
                ue: draw(3, config.k, config.height_ue),
            }
        }
        LayoutSpec::Fixed { bs, ris, ue } => {
            if bs.len() != config.s || ris.len() != config.l || ue.len() != config.k {
                return Err(CoreError::Geometry(format!(
                    "fixed layout sizes ({}, {}, {}) do not match config ({}, {}, {})",
                    bs.len(),
                    ris.len(),
                    ue.len(),
                    config.s,
                    config.l,
                    config.k
                )));
            }
            NetworkGeometry {
                bs: lift(bs, config.height_bs),
                ris: lift(ris, config.height_ris),
                ue: lift(ue, config.height_ue),
            }
        }
        LayoutSpec::UeClusterAt { x, y, bs, ris } => {
            let (dbs, dris) = default_fixed_layout(side, config.s, config.l);
            let bs2 = if bs.is_empty() { dbs } else { bs.clone() };
            let ris2 = if ris.is_empty() { dris } else { ris.clone() };
            if bs2.len() != config.s || ris2.len() != config.l {
                return Err(CoreError::Geometry("cluster layout BS/RIS counts mismatch".into()));
            }
            let ue = cluster_ue(*x, *y, config.k);
            NetworkGeometry {
                bs: lift(&bs2, config.height_bs),
                ris: lift(&ris2, config.height_ris),
                ue: lift(&ue, config.height_ue),
            }
        }
    };
    geom.validate(side)?;
    Ok(geom)
}

/// Four users sit at `(x-2, y-2), (x-2, y+2), (x+2, y-2), (x+2, y+2)`;
/// other counts are spread on a circle of radius `2*sqrt(2)`.
fn cluster_ue(x: f64, y: f64, k: usize) -> Vec<[f64; 2]> {
    if k == 4 {
        return vec![[x - 2.0, y - 2.0], [x - 2.0, y + 2.0], [x + 2.0, y - 2.0], [x + 2.0, y + 2.0]];
    }
    let r = 2.0 * 2f64.sqrt();
    (0..k)
        .map(|i| {
            let ang = std::f64::consts::FRAC_PI_4 + 2.0 * std::f64::consts::PI * i as f64 / k as f64;
            [x + r * ang.cos(), y + r * ang.sin()]
        })
        .collect()
}

/// Large-scale statistics of a single link.
#[derive(Debug, Clone, Copy)]
pub struct LinkStatistics {
    /// Path loss, linear.
    pub beta: f64,
    /// Rician K factor.
    pub k_factor: f64,
    /// LoS amplitude `sqrt(beta * K / (K + 1))`.
    pub a: f64,
    /// NLoS amplitude `sqrt(beta / (K + 1))`.
    pub b: f64,
}

impl LinkStatistics {
    pub fn new(beta: f64, k_factor: f64) -> Self {
        let a = (beta * k_factor / (k_factor + 1.0)).sqrt();
        let b = (beta / (k_factor + 1.0)).sqrt();
        Self { beta, k_factor, a, b }
    }
}

/// Statistical CSI for one frame: link statistics, LoS components, and the
/// per-(user, BS) scalar aggregates used by the closed-form rate.
#[derive(Debug, Clone)]
pub struct StatisticalCsi {
    pub config: SystemConfig,
    /// `(l, s)` indexed `l * s_count + s`.
    pub bs_ris: Vec<LinkStatistics>,
    /// LoS of the BS->RIS channel, `N x M`, same indexing.
    pub bs_ris_los: Vec<CMat>,
    /// `(l, k)` indexed `l * k_count + k`.
    pub ris_ue: Vec<LinkStatistics>,
    /// LoS of the RIS->UE channel, length `N`, same indexing.
    pub ris_ue_los: Vec<Vec<C64>>,
    /// `(k, s)` indexed `k * s_count + s`.
    pub direct: Vec<LinkStatistics>,
    /// LoS of the direct channel, length `M`, same indexing.
    pub direct_los: Vec<Vec<C64>>,
    /// Aggregates per `(k, s)`, same indexing as `direct`.
    pub alpha1: Vec<f64>,
    pub alpha2: Vec<f64>,
    pub alpha3: Vec<f64>,
    pub chi: Vec<f64>,
}

impl StatisticalCsi {
    #[inline]
    pub fn idx_ls(&self, l: usize, s: usize) -> usize {
        l * self.config.s + s
    }
    #[inline]
    pub fn idx_lk(&self, l: usize, k: usize) -> usize {
        l * self.config.k + k
    }
    #[inline]
    pub fn idx_ks(&self, k: usize, s: usize) -> usize {
        k * self.config.s + s
    }
}

struct AngleDraw {
    rng: Option<rand_chacha::ChaCha12Rng>,
}

impl AngleDraw {
    fn new(mode: AngleMode) -> Self {
        match mode {
            AngleMode::Geometric => Self { rng: None },
            AngleMode::UniformRandom { seed } => Self { rng: Some(rng_for(seed, 0xA11)) },
        }
    }

    /// Azimuth/elevation at `at` looking toward `toward`.
    fn pair(&mut self, at: &[f64; 3], toward: &[f64; 3]) -> (f64, f64) {
        if let Some(rng) = self.rng.as_mut() {
            let az = rng.gen::<f64>() * 2.0 * std::f64::consts::PI - std::f64::consts::PI;
            let el = rng.gen::<f64>() * std::f64::consts::PI;
            return (az, el);
        }
        let dx = toward[0] - at[0];
        let dy = toward[1] - at[1];
        let dz = toward[2] - at[2];
        let d = (dx * dx + dy * dy + dz * dz).sqrt();
        (dy.atan2(dx), (dz / d).acos())
    }
}

/// Build the statistical CSI from a config and a geometry.
pub fn build_statistics(config: &SystemConfig, geom: &NetworkGeometry) -> Result<StatisticalCsi> {
    config.validate()?;
    if geom.bs.len() != config.s || geom.ris.len() != config.l || geom.ue.len() != config.k {
        return Err(CoreError::Geometry("geometry does not match config counts".into()));
    }
    geom.validate(config.area_side)?;

    let (s_count, l_count, k_count) = (config.s, config.l, config.k);
    let n = config.n();
    let mut angles = AngleDraw::new(config.angle_mode);

    let mut bs_ris = Vec::with_capacity(l_count * s_count);
    let mut bs_ris_los = Vec::with_capacity(l_count * s_count);
    for l in 0..l_count {
        for s in 0..s_count {
            let d = dist(&geom.ris[l], &geom.bs[s]);
            let beta = path_loss(d, config.alpha_br, config.c0)?;
            bs_ris.push(LinkStatistics::new(beta, config.k_bs_ris));
            // AoA at the RIS (azimuth + elevation), AoD at the BS (azimuth only).
            let (az_aoa, el_aoa) = angles.pair(&geom.ris[l], &geom.bs[s]);
            let (az_aod, _) = angles.pair(&geom.bs[s], &geom.ris[l]);
            let upa = steering_upa(config.n_r, config.n_c, az_aoa, el_aoa, config.d2_over_lambda);
            let ula = steering_ula(config.m, az_aod, config.d1_over_lambda);
            bs_ris_los.push(CMat::from_fn(n, config.m, |i, j| upa[i] * ula[j]));
        }
    }

    let mut ris_ue = Vec::with_capacity(l_count * k_count);
    let mut ris_ue_los = Vec::with_capacity(l_count * k_count);
    for l in 0..l_count {
        for k in 0..k_count {
            let d = dist(&geom.ris[l], &geom.ue[k]);
            let beta = path_loss(d, config.alpha_ru, config.c0)?;
            ris_ue.push(LinkStatistics::new(beta, config.k_ris_ue));
            let (az, el) = angles.pair(&geom.ris[l], &geom.ue[k]);
            ris_ue_los.push(steering_upa(config.n_r, config.n_c, az, el, config.d2_over_lambda));
        }
    }

    let mut direct = Vec::with_capacity(k_count * s_count);
    let mut direct_los = Vec::with_capacity(k_count * s_count);
    for k in 0..k_count {
        for s in 0..s_count {
            let d = dist(&geom.bs[s], &geom.ue[k]);
            let beta = path_loss(d, config.alpha_d, config.c0)?;
            direct.push(LinkStatistics::new(beta, config.k_direct));
            let (az, _) = angles.pair(&geom.bs[s], &geom.ue[k]);
            direct_los.push(steering_ula(config.m, az, config.d1_over_lambda));
        }
    }

    // Scalar aggregates per (k, s).
    let nf = n as f64;
    let mut alpha1 = vec![0.0; k_count * s_count];
    let mut alpha2 = vec![0.0; k_count * s_count];
    let mut alpha3 = vec![0.0; k_count * s_count];
    let mut chi = vec![0.0; k_count * s_count];
    for k in 0..k_count {
        for s in 0..s_count {
            let ks = k * s_count + s;
            let (mut a1, mut a2, mut a3) = (0.0, 0.0, 0.0);
            for l in 0..l_count {
                let ls = &bs_ris[l * s_count + s];
                let lk = &ris_ue[l * k_count + k];
                a1 += lk.a.powi(2) * ls.b.powi(2);
                a2 += ls.a.powi(2) * lk.b.powi(2);
                a3 += ls.b.powi(2) * lk.b.powi(2);
            }
            alpha1[ks] = a1;
            alpha2[ks] = a2;
            alpha3[ks] = a3;
            let bd = direct[ks].b;
            chi[ks] = bd * bd + nf * (a1 + a2 + a3);
        }
    }

    Ok(StatisticalCsi {
        config: config.clone(),
        bs_ris,
        bs_ris_los,
        ris_ue,
        ris_ue_los,
        direct,
        direct_los,
        alpha1,
        alpha2,
        alpha3,
        chi,
    })
}

/// Parse a flat `key = value` scenario file. Keys mirror [`SystemConfig`]
/// fields; powers are in dBm (`p_max_dbm`, `n0_dbm`), the reference path
/// loss in dB (`c0_db`). Position lists use `x,y; x,y; ...`.
pub fn parse_scenario_str(text: &str) -> Result<(SystemConfig, LayoutSpec)> {
    let mut cfg = default_config();
    let mut layout_kind = String::from("uniform");
    let mut cluster = [50.0, 50.0];
    let mut bs_pos: Vec<[f64; 2]> = Vec::new();
    let mut ris_pos: Vec<[f64; 2]> = Vec::new();
    let mut ue_pos: Vec<[f64; 2]> = Vec::new();
    let mut mu_override: Option<Vec<f64>> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CoreError::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim();
        let value = value.trim();
        let parse_f = |v: &str| -> Result<f64> {
            v.parse::<f64>().map_err(|_| CoreError::Config(format!("line {}: bad number '{v}'", lineno + 1)))
        };
        let parse_u = |v: &str| -> Result<usize> {
            v.parse::<usize>().map_err(|_| CoreError::Config(format!("line {}: bad count '{v}'", lineno + 1)))
        };
        match key {
            "s" => cfg.s = parse_u(value)?,
            "m" => cfg.m = parse_u(value)?,
            "l" => cfg.l = parse_u(value)?,
            "n_r" => cfg.n_r = parse_u(value)?,
            "n_c" => cfg.n_c = parse_u(value)?,
            "k" => cfg.k = parse_u(value)?,
            "p_max_dbm" => cfg.p_max = dbm_to_watts(parse_f(value)?),
            "n0_dbm" => cfg.n0 = dbm_to_watts(parse_f(value)?),
            "c0_db" => cfg.c0 = db_to_linear(parse_f(value)?),
            "alpha_d" => cfg.alpha_d = parse_f(value)?,
            "alpha_br" => cfg.alpha_br = parse_f(value)?,
            "alpha_ru" => cfg.alpha_ru = parse_f(value)?,
            "k_bs_ris" => cfg.k_bs_ris = parse_f(value)?,
            "k_ris_ue" => cfg.k_ris_ue = parse_f(value)?,
            "k_direct" => cfg.k_direct = parse_f(value)?,
            "d1_over_lambda" => cfg.d1_over_lambda = parse_f(value)?,
            "d2_over_lambda" => cfg.d2_over_lambda = parse_f(value)?,
            "area_side" => cfg.area_side = parse_f(value)?,
            "height_bs" => cfg.height_bs = parse_f(value)?,
            "height_ris" => cfg.height_ris = parse_f(value)?,
            "height_ue" => cfg.height_ue = parse_f(value)?,
            "mu" => {
                let vals: Result<Vec<f64>> = value.split(',').map(|v| parse_f(v.trim())).collect();
                mu_override = Some(vals?);
            }
            "angle_mode" => {
                cfg.angle_mode = match value {
                    "geometric" => AngleMode::Geometric,
                    v if v.starts_with("random:") => AngleMode::UniformRandom {
                        seed: v[7..]
                            .parse()
                            .map_err(|_| CoreError::Config(format!("bad angle seed '{v}'")))?,
                    },
                    other => return Err(CoreError::Config(format!("unknown angle_mode '{other}'"))),
                }
            }
            "layout" => layout_kind = value.to_string(),
            "cluster_x" => cluster[0] = parse_f(value)?,
            "cluster_y" => cluster[1] = parse_f(value)?,
            "bs_positions" => bs_pos = parse_positions(value, lineno + 1)?,
            "ris_positions" => ris_pos = parse_positions(value, lineno + 1)?,
            "ue_positions" => ue_pos = parse_positions(value, lineno + 1)?,
            other => return Err(CoreError::Config(format!("line {}: unknown key '{other}'", lineno + 1))),
        }
    }

    cfg.mu = mu_override.unwrap_or_else(|| vec![1.0; cfg.k]);
    cfg.validate()?;
    let layout = match layout_kind.as_str() {
        "uniform" => LayoutSpec::UniformRandom,
        "fixed" => LayoutSpec::Fixed { bs: bs_pos, ris: ris_pos, ue: ue_pos },
        "cluster" => LayoutSpec::UeClusterAt { x: cluster[0], y: cluster[1], bs: bs_pos, ris: ris_pos },
        other => return Err(CoreError::Config(format!("unknown layout '{other}'"))),
    };
    Ok((cfg, layout))
}

fn parse_positions(value: &str, lineno: usize) -> Result<Vec<[f64; 2]>> {
    value
        .split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|pair| {
            let coords: Vec<&str> = pair.split(',').map(|c| c.trim()).collect();
            if coords.len() != 2 {
                return Err(CoreError::Config(format!("line {lineno}: position '{pair}' is not x,y")));
            }
            let x = coords[0]
                .parse::<f64>()
                .map_err(|_| CoreError::Config(format!("line {lineno}: bad coordinate '{}'", coords[0])))?;
            let y = coords[1]
                .parse::<f64>()
                .map_err(|_| CoreError::Config(format!("line {lineno}: bad coordinate '{}'", coords[1])))?;
            Ok([x, y])
        })
        .collect()
}

/// Load a scenario file from disk.
pub fn load_scenario(path: &std::path::Path) -> Result<(SystemConfig, LayoutSpec)> {
    parse_scenario_str(&std::fs::read_to_string(path)?)
}
