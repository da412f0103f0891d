//! Steering vectors, small-scale Rician sampling, effective channel assembly
//! under a RIS phase configuration, and MR precoding.
//!
//! UPA elements are stacked row-major with the row index outermost: element
//! `(n_r, n_c)` sits at position `n_r * N_c + n_c`. This ordering is a
//! convention of this crate and is relied on by the dump format.

use crate::error::CoreError;
use crate::linalg::{vec as cvec, C64, CMat};
use crate::scenario::StatisticalCsi;
use crate::seqrng::{fill_complex_gaussian, rng_for};
use crate::Result;
use std::f64::consts::PI;
use std::hash::{Hash, Hasher};
use std::io::Write;

/// ULA response: entry `m` is `exp(j 2 pi (d1/lambda) m sin(theta))`.
pub fn steering_ula(m: usize, theta: f64, spacing_over_lambda: f64) -> Vec<C64> {
    let step = 2.0 * PI * spacing_over_lambda * theta.sin();
    (0..m).map(|i| C64::from_polar(1.0, step * i as f64)).collect()
}

/// UPA response: entry `(n_r, n_c)` is
/// `exp(j 2 pi (d2/lambda) (n_r cos(theta) sin(phi) + n_c sin(theta) sin(phi)))`,
/// stacked row-major with `n_r` outermost.
pub fn steering_upa(n_r: usize, n_c: usize, theta: f64, phi: f64, spacing_over_lambda: f64) -> Vec<C64> {
    let scale = 2.0 * PI * spacing_over_lambda * phi.sin();
    let (row_step, col_step) = (scale * theta.cos(), scale * theta.sin());
    let mut v = Vec::with_capacity(n_r * n_c);
    for r in 0..n_r {
        for c in 0..n_c {
            v.push(C64::from_polar(1.0, row_step * r as f64 + col_step * c as f64));
        }
    }
    v
}

/// Stacked unit-modulus RIS phases: `u = [Diag(Theta_1); ...; Diag(Theta_L)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfig {
    u: Vec<C64>,
    l: usize,
    n: usize,
}

impl PhaseConfig {
    /// Project an arbitrary complex vector onto the unit-modulus manifold.
    /// Zero entries map to `1 + 0j`.
    pub fn project(raw: &[C64], l: usize, n: usize) -> Result<Self> {
        if raw.len() != l * n {
            return Err(CoreError::Dimension(format!(
                "phase vector has length {}, expected l*n = {}",
                raw.len(),
                l * n
            )));
        }
        let u = raw
            .iter()
            .map(|z| {
                let r = z.norm();
                if r == 0.0 {
                    C64::new(1.0, 0.0)
                } else {
                    z / r
                }
            })
            .collect();
        Ok(Self { u, l, n })
    }

    /// All phases zero (`Theta_l = I`).
    pub fn identity(l: usize, n: usize) -> Self {
        Self { u: vec![C64::new(1.0, 0.0); l * n], l, n }
    }

    pub fn from_phases(phases: &[f64], l: usize, n: usize) -> Result<Self> {
        let raw: Vec<C64> = phases.iter().map(|&p| C64::from_polar(1.0, p)).collect();
        Self::project(&raw, l, n)
    }

    /// Uniform random phases on `[0, 2 pi)`, deterministic per seed.
    pub fn random(l: usize, n: usize, seed: u64) -> Self {
        use rand::Rng;
        let mut rng = rng_for(seed, 0x9_0001);
        let u = (0..l * n).map(|_| C64::from_polar(1.0, rng.gen::<f64>() * 2.0 * PI)).collect();
        Self { u, l, n }
    }

    pub fn num_ris(&self) -> usize {
        self.l
    }

    pub fn elements_per_ris(&self) -> usize {
        self.n
    }

    /// The stacked vector `u`.
    pub fn stacked(&self) -> &[C64] {
        &self.u
    }

    /// Diagonal of `Theta_l`.
    pub fn theta(&self, l: usize) -> &[C64] {
        &self.u[l * self.n..(l + 1) * self.n]
    }

    /// Hash of the exact bit pattern, used to tag cached effective channels.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        for z in &self.u {
            z.re.to_bits().hash(&mut h);
            z.im.to_bits().hash(&mut h);
        }
        h.finish()
    }
}

/// One draw of all small-scale channels. LoS-composed channels are stored
/// together with the raw unit-variance NLoS draws (the latter feed the
/// moment oracles).
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub s: usize,
    pub m: usize,
    pub l: usize,
    pub n: usize,
    pub k: usize,
    /// Composite `G_ls`, `N x M`, indexed `l * S + s`.
    pub g: Vec<CMat>,
    /// Composite `h_r,lk`, length `N`, indexed `l * K + k`.
    pub h_r: Vec<Vec<C64>>,
    /// Composite `h_d,ks`, length `M`, indexed `k * S + s`.
    pub h_d: Vec<Vec<C64>>,
    /// Raw NLoS draws (unit-variance entries), same indexing.
    pub g_tilde: Vec<CMat>,
    pub h_r_tilde: Vec<Vec<C64>>,
    pub h_d_tilde: Vec<Vec<C64>>,
}

/// Draw one channel realization: each link is `a * LoS + b * W` with `W`
/// i.i.d. unit-variance circularly-symmetric complex Gaussian.
pub fn sample_channels(stats: &StatisticalCsi, seed: u64) -> ChannelRealization {
    let cfg = &stats.config;
    let (s_count, m, l_count, n, k_count) = (cfg.s, cfg.m, cfg.l, cfg.n(), cfg.k);

    let mut g = Vec::with_capacity(l_count * s_count);
    let mut g_tilde = Vec::with_capacity(l_count * s_count);
    for l in 0..l_count {
        for s in 0..s_count {
            let idx = stats.idx_ls(l, s);
            let mut rng = rng_for(seed, 0x47_0000 + idx as u64);
            let mut w = CMat::zeros(n, m);
            fill_complex_gaussian(&mut rng, &mut w.data);
            let ls = stats.bs_ris[idx];
            let los = &stats.bs_ris_los[idx];
            let mut composite = los.scale(C64::new(ls.a, 0.0));
            composite.add_scaled(C64::new(ls.b, 0.0), &w);
            g.push(composite);
            g_tilde.push(w);
        }
    }

    let mut h_r = Vec::with_capacity(l_count * k_count);
    let mut h_r_tilde = Vec::with_capacity(l_count * k_count);
    for l in 0..l_count {
        for k in 0..k_count {
            let idx = stats.idx_lk(l, k);
            let mut rng = rng_for(seed, 0x68_0000 + idx as u64);
            let mut w = cvec::zeros(n);
            fill_complex_gaussian(&mut rng, &mut w);
            let lk = stats.ris_ue[idx];
            let v: Vec<C64> = stats.ris_ue_los[idx]
                .iter()
                .zip(&w)
                .map(|(los, wi)| lk.a * los + lk.b * wi)
                .collect();
            h_r.push(v);
            h_r_tilde.push(w);
        }
    }

    let mut h_d = Vec::with_capacity(k_count * s_count);
    let mut h_d_tilde = Vec::with_capacity(k_count * s_count);
    for k in 0..k_count {
        for s in 0..s_count {
            let idx = stats.idx_ks(k, s);
            let mut rng = rng_for(seed, 0x64_0000 + idx as u64);
            let mut w = cvec::zeros(m);
            fill_complex_gaussian(&mut rng, &mut w);
            let ks = stats.direct[idx];
            let v: Vec<C64> = stats.direct_los[idx]
                .iter()
                .zip(&w)
                .map(|(los, wi)| ks.a * los + ks.b * wi)
                .collect();
            h_d.push(v);
            h_d_tilde.push(w);
        }
    }

    ChannelRealization { s: s_count, m, l: l_count, n, k: k_count, g, h_r, h_d, g_tilde, h_r_tilde, h_d_tilde }
}

/// Effective per-(user, BS) channels under one phase configuration,
/// tagged with the phase vector it was assembled under.
#[derive(Debug, Clone)]
pub struct EffectiveChannels {
    pub s: usize,
    pub m: usize,
    pub k: usize,
    /// `h_ks`, length `M`, indexed `k * S + s`.
    pub h: Vec<Vec<C64>>,
    pub phase_fingerprint: u64,
}

impl EffectiveChannels {
    #[inline]
    pub fn h_ks(&self, k: usize, s: usize) -> &[C64] {
        &self.h[k * self.s + s]
    }
}

/// Assemble `h_ks = sum_l G_ls^T Theta_l h_r,lk + h_d,ks`.
pub fn effective_channel(real: &ChannelRealization, phases: &PhaseConfig) -> Result<EffectiveChannels> {
    if phases.num_ris() != real.l || (real.l > 0 && phases.elements_per_ris() != real.n) {
        return Err(CoreError::Dimension(format!(
            "phase config ({} x {}) does not match realization ({} x {})",
            phases.num_ris(),
            phases.elements_per_ris(),
            real.l,
            real.n
        )));
    }
    let mut h = Vec::with_capacity(real.k * real.s);
    for k in 0..real.k {
        for s in 0..real.s {
            let mut hk = real.h_d[k * real.s + s].clone();
            for l in 0..real.l {
                let theta = phases.theta(l);
                let g = &real.g[l * real.s + s];
                let hr = &real.h_r[l * real.k + k];
                // (h_r^T Theta G)^T = G^T Theta h_r with diagonal Theta.
                for (i, v) in hr.iter().enumerate() {
                    let c = theta[i] * v;
                    for (mi, hkm) in hk.iter_mut().enumerate() {
                        *hkm += g.at(i, mi) * c;
                    }
                }
            }
            h.push(hk);
        }
    }
    Ok(EffectiveChannels { s: real.s, m: real.m, k: real.k, h, phase_fingerprint: phases.fingerprint() })
}

/// Nonnegative per-(user, BS) power-control coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    /// `eta_ks`, indexed `k * S + s`.
    pub eta: Vec<f64>,
    pub k: usize,
    pub s: usize,
}

impl PowerAllocation {
    pub fn new(eta: Vec<f64>, k: usize, s: usize) -> Result<Self> {
        if eta.len() != k * s {
            return Err(CoreError::Dimension(format!("eta has length {}, expected {}", eta.len(), k * s)));
        }
        if eta.iter().any(|&e| e < 0.0 || !e.is_finite()) {
            return Err(CoreError::Power("eta entries must be finite and nonnegative".into()));
        }
        Ok(Self { eta, k, s })
    }

    pub fn zeros(k: usize, s: usize) -> Self {
        Self { eta: vec![0.0; k * s], k, s }
    }

    #[inline]
    pub fn get(&self, k: usize, s: usize) -> f64 {
        self.eta[k * self.s + s]
    }

    /// Per-BS load `sum_k eta_ks ||h_ks||^2`.
    pub fn bs_loads(&self, eff: &EffectiveChannels) -> Vec<f64> {
        (0..self.s)
            .map(|s| (0..self.k).map(|k| self.get(k, s) * cvec::norm2(eff.h_ks(k, s))).sum())
            .collect()
    }

    /// Check `sum_k eta_ks ||h_ks||^2 <= p_max (1 + tol)` for every BS.
    pub fn is_feasible(&self, eff: &EffectiveChannels, p_max: f64, tol: f64) -> bool {
        self.bs_loads(eff).iter().all(|&load| load <= p_max * (1.0 + tol))
    }
}

/// MR precoders `w_ks = sqrt(eta_ks) conj(h_ks)`, indexed `k * S + s`.
pub fn mr_precoder(eff: &EffectiveChannels, eta: &PowerAllocation) -> Result<Vec<Vec<C64>>> {
    if eta.k != eff.k || eta.s != eff.s {
        return Err(CoreError::Dimension("power allocation does not match channels".into()));
    }
    let mut w = Vec::with_capacity(eff.k * eff.s);
    for k in 0..eff.k {
        for s in 0..eff.s {
            let e = eta.get(k, s);
            if e < 0.0 {
                return Err(CoreError::Power(format!("eta[{k},{s}] = {e} is negative")));
            }
            let root = e.sqrt();
            w.push(eff.h_ks(k, s).iter().map(|z| root * z.conj()).collect());
        }
    }
    Ok(w)
}

/// Dump a realization as CSV: a dimensions header line, then one row per
/// matrix entry in row-major order with `re` and `im` columns.
pub fn dump_realization(real: &ChannelRealization, mut out: impl Write) -> Result<()> {
    writeln!(out, "# dims,s={},m={},l={},n={},k={}", real.s, real.m, real.l, real.n, real.k)?;
    writeln!(out, "block,index,row,col,re,im")?;
    for (idx, g) in real.g.iter().enumerate() {
        for r in 0..g.rows {
            for c in 0..g.cols {
                let z = g.at(r, c);
                writeln!(out, "g,{idx},{r},{c},{:.17e},{:.17e}", z.re, z.im)?;
            }
        }
    }
    for (idx, v) in real.h_r.iter().enumerate() {
        for (r, z) in v.iter().enumerate() {
            writeln!(out, "h_r,{idx},{r},0,{:.17e},{:.17e}", z.re, z.im)?;
        }
    }
    for (idx, v) in real.h_d.iter().enumerate() {
        for (r, z) in v.iter().enumerate() {
            writeln!(out, "h_d,{idx},{r},0,{:.17e},{:.17e}", z.re, z.im)?;
        }
    }
    Ok(())
}
