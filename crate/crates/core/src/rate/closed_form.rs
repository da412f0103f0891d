//! Moment-based closed form of the ergodic rate.
//!
//! `A_k` is the exact second moment of the coherent MR signal term
//! `sum_s sqrt(eta_ks) ||h_ks||^2` and `B_{k,i}` the exact second moment of
//! the interference term `sum_s sqrt(eta_is) h_ks^T h_is^*`, both taken over
//! the Rician small-scale fading with the RIS phases held fixed. The ergodic
//! rate approximation is `log2(1 + A_k / (sum_{i != k} B_{k,i} + N0))`.
//!
//! The derivation conditions on the RIS-user fading vectors: given those,
//! every channel is Gaussian with isotropic covariance, so each moment
//! splits into products and covariances of scalar quadratic forms
//! (`Cov(h^H A h, h^H B h) = tr(A B)` plus the linear-term couplings).
//! Every term is validated against a Monte-Carlo oracle in the test suite.

use crate::channel::{PhaseConfig, PowerAllocation};
use crate::error::CoreError;
use crate::linalg::{vec as cvec, C64};
use crate::rate::RateReport;
use crate::scenario::{StatisticalCsi, SystemConfig};
use crate::Result;

/// Phase- and power-independent per-scenario precomputations.
///
/// `tr4[((l*L + m)*S + s)*S + t] = tr(G_ls^* G_ms^T G_mt^* G_lt^T)` over the
/// BS-RIS LoS matrices, and `uu[(l*K + i)*K + k] = h_r,li^H h_r,lk` over the
/// RIS-user LoS vectors.
#[derive(Debug, Clone)]
pub struct RateCache {
    tr4: Vec<C64>,
    uu: Vec<C64>,
    l: usize,
    s: usize,
    k: usize,
}

impl RateCache {
    #[inline]
    fn tr4(&self, l: usize, m: usize, s: usize, t: usize) -> C64 {
        self.tr4[((l * self.l + m) * self.s + s) * self.s + t]
    }
    #[inline]
    fn uu(&self, l: usize, i: usize, k: usize) -> C64 {
        self.uu[(l * self.k + i) * self.k + k]
    }
    /// `tr(G_ls^* G_ms^T G_mt^* G_lt^T)` for external consumers.
    pub fn tr4_at(&self, l: usize, m: usize, s: usize, t: usize) -> C64 {
        self.tr4(l, m, s, t)
    }
    /// `h_r,li^H h_r,lk` for external consumers.
    pub fn uu_at(&self, l: usize, i: usize, k: usize) -> C64 {
        self.uu(l, i, k)
    }
}

/// Build the [`RateCache`] for a scenario.
pub fn build_rate_cache(stats: &StatisticalCsi) -> RateCache {
    let cfg = &stats.config;
    let (l_count, s_count, k_count) = (cfg.l, cfg.s, cfg.k);
    let mut tr4 = vec![C64::new(0.0, 0.0); l_count * l_count * s_count * s_count];
    for l in 0..l_count {
        for m in 0..l_count {
            for s in 0..s_count {
                // X = G_ls^* G_ms^T depends on (l, m, s) only.
                let x = stats.bs_ris_los[stats.idx_ls(l, s)]
                    .conj()
                    .mul(&stats.bs_ris_los[stats.idx_ls(m, s)].transpose());
                for t in 0..s_count {
                    let y = stats.bs_ris_los[stats.idx_ls(m, t)]
                        .conj()
                        .mul(&stats.bs_ris_los[stats.idx_ls(l, t)].transpose());
                    tr4[((l * l_count + m) * s_count + s) * s_count + t] = x.trace_mul(&y);
                }
            }
        }
    }
    let mut uu = vec![C64::new(0.0, 0.0); l_count * k_count * k_count];
    for l in 0..l_count {
        for i in 0..k_count {
            for k in 0..k_count {
                uu[(l * k_count + i) * k_count + k] =
                    cvec::dot_h(&stats.ris_ue_los[stats.idx_lk(l, i)], &stats.ris_ue_los[stats.idx_lk(l, k)]);
            }
        }
    }
    RateCache { tr4, uu, l: l_count, s: s_count, k: k_count }
}

/// Closed-form signal/interference moments for one phase configuration and
/// power allocation.
#[derive(Debug, Clone)]
pub struct ClosedFormTerms {
    /// Signal second moment `A_k`.
    pub a: Vec<f64>,
    /// Interference second moments `B_{k,i}`, indexed `k * K + i`, zero on
    /// the diagonal.
    pub b: Vec<f64>,
    /// `sum_{i != k} B_{k,i}`.
    pub b_sum: Vec<f64>,
    /// Statistical mean channels `h_bar_ks`, indexed `k * S + s`.
    pub h_bar: Vec<Vec<C64>>,
    /// First moment of the signal term,
    /// `sum_s sqrt(eta_ks) (||h_bar_ks||^2 + M chi_ks)`.
    pub mean_gain: Vec<f64>,
    pub n0: f64,
    pub mu: Vec<f64>,
    pub k: usize,
    pub s: usize,
}

/// Per-user working quantities shared by the A and B assemblies.
struct UserAtoms {
    /// `m_ks = h_bar_ks`, indexed by `s`.
    m: Vec<Vec<C64>>,
    /// `zm[l][s] = G_ls^* m_ks`.
    zm: Vec<Vec<Vec<C64>>>,
    /// `mw[l][s] = m_ks^H (G_ls^T u_lk)` with `u_lk = Theta_l h_bar_r,lk`.
    mw: Vec<Vec<C64>>,
    /// `E q_s = ||m_ks||^2 + M N alpha2`.
    eq: Vec<f64>,
    /// `E r_s = b_d^2 + N (alpha1 + alpha3)`.
    er: Vec<f64>,
    /// `E P_s = ||m_ks||^2 + M chi`.
    ep: Vec<f64>,
}

fn user_atoms(stats: &StatisticalCsi, phases: &PhaseConfig, k: usize) -> UserAtoms {
    let cfg = &stats.config;
    let (s_count, l_count, n, m_ant) = (cfg.s, cfg.l, cfg.n(), cfg.m as f64);
    let nf = n as f64;

    // u_lk = Theta_l h_bar_r,lk (diagonal Theta).
    let u_lk: Vec<Vec<C64>> = (0..l_count)
        .map(|l| {
            stats.ris_ue_los[stats.idx_lk(l, k)]
                .iter()
                .zip(phases.theta(l))
                .map(|(h, t)| h * t)
                .collect()
        })
        .collect();

    let mut m = Vec::with_capacity(s_count);
    let mut zm = vec![Vec::with_capacity(s_count); l_count];
    let mut mw = vec![Vec::with_capacity(s_count); l_count];
    // wv[l][s] = G_ls^T u_lk
    let mut wv = vec![Vec::new(); l_count];
    for (l, wv_l) in wv.iter_mut().enumerate() {
        for s in 0..s_count {
            let g = &stats.bs_ris_los[stats.idx_ls(l, s)];
            let mut v = cvec::zeros(cfg.m);
            for i in 0..n {
                let c = u_lk[l][i];
                for (j, vj) in v.iter_mut().enumerate() {
                    *vj += g.at(i, j) * c;
                }
            }
            wv_l.push(v);
        }
    }
    for s in 0..s_count {
        let ks = stats.idx_ks(k, s);
        let mut ms = cvec::scale(&stats.direct_los[ks], C64::new(stats.direct[ks].a, 0.0));
        for l in 0..l_count {
            let coeff = stats.ris_ue[stats.idx_lk(l, k)].a * stats.bs_ris[stats.idx_ls(l, s)].a;
            cvec::axpy(&mut ms, C64::new(coeff, 0.0), &wv[l][s]);
        }
        m.push(ms);
    }
    for l in 0..l_count {
        for s in 0..s_count {
            let g = &stats.bs_ris_los[stats.idx_ls(l, s)];
            // zm = G^* m
            let z: Vec<C64> = (0..n)
                .map(|i| (0..cfg.m).map(|j| g.at(i, j).conj() * m[s][j]).sum())
                .collect();
            zm[l].push(z);
            mw[l].push(cvec::dot_h(&m[s], &wv[l][s]));
        }
    }

    let mut eq = Vec::with_capacity(s_count);
    let mut er = Vec::with_capacity(s_count);
    let mut ep = Vec::with_capacity(s_count);
    for s in 0..s_count {
        let ks = stats.idx_ks(k, s);
        let nn = cvec::norm2(&m[s]);
        eq.push(nn + m_ant * nf * stats.alpha2[ks]);
        er.push(stats.direct[ks].b.powi(2) + nf * (stats.alpha1[ks] + stats.alpha3[ks]));
        ep.push(nn + m_ant * stats.chi[ks]);
    }
    UserAtoms { m, zm, mw, eq, er, ep }
}

/// Exact `A_k` and `B_{k,i}` for the given phases and powers. Builds the
/// scenario cache internally; use [`closed_form_terms_cached`] in loops.
pub fn closed_form_terms(
    stats: &StatisticalCsi,
    phases: &PhaseConfig,
    eta: &PowerAllocation,
) -> Result<ClosedFormTerms> {
    let cache = build_rate_cache(stats);
    closed_form_terms_cached(stats, &cache, phases, eta)
}

pub fn closed_form_terms_cached(
    stats: &StatisticalCsi,
    cache: &RateCache,
    phases: &PhaseConfig,
    eta: &PowerAllocation,
) -> Result<ClosedFormTerms> {
    let cfg = &stats.config;
    let (k_count, s_count, l_count, n) = (cfg.k, cfg.s, cfg.l, cfg.n());
    if eta.k != k_count || eta.s != s_count {
        return Err(CoreError::Dimension("eta does not match scenario".into()));
    }
    if phases.num_ris() != l_count || (l_count > 0 && phases.elements_per_ris() != n) {
        return Err(CoreError::Dimension("phases do not match scenario".into()));
    }
    let m_ant = cfg.m as f64;
    let nf = n as f64;

    let atoms: Vec<UserAtoms> = (0..k_count).map(|k| user_atoms(stats, phases, k)).collect();

    // Link-amplitude shorthands.
    let a_ls = |l: usize, s: usize| stats.bs_ris[stats.idx_ls(l, s)].a;
    let b_ls = |l: usize, s: usize| stats.bs_ris[stats.idx_ls(l, s)].b;
    let ar = |l: usize, k: usize| stats.ris_ue[stats.idx_lk(l, k)].a;
    let br = |l: usize, k: usize| stats.ris_ue[stats.idx_lk(l, k)].b;

    let mut a_out = Vec::with_capacity(k_count);
    let mut b_out = vec![0.0; k_count * k_count];
    let mut mean_gain = Vec::with_capacity(k_count);

    for k in 0..k_count {
        let at = &atoms[k];
        let root_eta: Vec<f64> = (0..s_count).map(|s| eta.get(k, s).sqrt()).collect();

        mean_gain.push((0..s_count).map(|s| root_eta[s] * at.ep[s]).sum());

        // Covariance pieces as closures over (s, t).
        let c_qq = |s: usize, t: usize| -> C64 {
            let mut lin = C64::new(0.0, 0.0);
            for l in 0..l_count {
                lin += br(l, k).powi(2) * a_ls(l, s) * a_ls(l, t) * cvec::dot_h(&at.zm[l][s], &at.zm[l][t]);
            }
            let mut tr = C64::new(0.0, 0.0);
            for l in 0..l_count {
                for m in 0..l_count {
                    tr += br(l, k).powi(2)
                        * br(m, k).powi(2)
                        * a_ls(l, s)
                        * a_ls(m, s)
                        * a_ls(m, t)
                        * a_ls(l, t)
                        * cache.tr4(l, m, s, t);
                }
            }
            C64::new(2.0 * lin.re, 0.0) + tr
        };
        let c_qr = |s: usize, t: usize| -> f64 {
            let mut lin = C64::new(0.0, 0.0);
            let mut cst = 0.0;
            for l in 0..l_count {
                lin += a_ls(l, s) * ar(l, k) * br(l, k).powi(2) * b_ls(l, t).powi(2) * at.mw[l][s];
                cst += a_ls(l, s).powi(2) * b_ls(l, t).powi(2) * br(l, k).powi(4);
            }
            2.0 * lin.re + m_ant * nf * cst
        };
        let c_rr = |s: usize, t: usize| -> f64 {
            let mut acc = 0.0;
            for l in 0..l_count {
                let bb = b_ls(l, s).powi(2) * b_ls(l, t).powi(2);
                acc += (2.0 * ar(l, k).powi(2) * br(l, k).powi(2) + br(l, k).powi(4)) * bb;
            }
            nf * acc
        };

        let mut a_acc = C64::new(0.0, 0.0);
        for s in 0..s_count {
            for t in 0..s_count {
                let w = root_eta[s] * root_eta[t];
                if w == 0.0 {
                    continue;
                }
                let pair = C64::new(
                    at.ep[s] * at.ep[t] + m_ant * (c_qr(s, t) + c_qr(t, s)) + m_ant * m_ant * c_rr(s, t),
                    0.0,
                ) + c_qq(s, t);
                a_acc += w * pair;
            }
            let e = eta.get(k, s);
            if e > 0.0 {
                a_acc += e
                    * (2.0 * at.eq[s] * at.er[s]
                        + 2.0 * c_qr(s, s)
                        + m_ant * at.er[s] * at.er[s]
                        + m_ant * c_rr(s, s));
            }
        }
        debug_assert!(a_acc.im.abs() <= 1e-9 * a_acc.re.abs().max(1e-300), "A imag {}", a_acc.im);
        a_out.push(a_acc.re);

        // Interference moments against every other user i.
        for i in 0..k_count {
            if i == k {
                continue;
            }
            let ai = &atoms[i];
            let root_eta_i: Vec<f64> = (0..s_count).map(|s| eta.get(i, s).sqrt()).collect();

            let k0: Vec<C64> = (0..s_count)
                .map(|s| {
                    let mut v = cvec::dot_h(&ai.m[s], &at.m[s]);
                    for l in 0..l_count {
                        v += m_ant * b_ls(l, s).powi(2) * ar(l, i) * ar(l, k) * cache.uu(l, i, k);
                    }
                    v
                })
                .collect();

            let pp = |s: usize, t: usize| -> C64 {
                let mut acc = C64::new(0.0, 0.0);
                for l in 0..l_count {
                    let brk2 = br(l, k).powi(2);
                    acc += brk2
                        * (a_ls(l, s) * a_ls(l, t) * cvec::dot_h(&ai.zm[l][s], &ai.zm[l][t])
                            + m_ant * b_ls(l, t).powi(2) * ar(l, i) * a_ls(l, s) * ai.mw[l][s]
                            + m_ant * b_ls(l, s).powi(2) * ar(l, i) * a_ls(l, t) * ai.mw[l][t].conj()
                            + C64::new(
                                m_ant * m_ant
                                    * b_ls(l, s).powi(2)
                                    * b_ls(l, t).powi(2)
                                    * ar(l, i).powi(2)
                                    * nf,
                                0.0,
                            ));
                }
                acc
            };
            let dd = |s: usize, t: usize| -> C64 {
                let mut acc = C64::new(0.0, 0.0);
                for l in 0..l_count {
                    let bri2 = br(l, i).powi(2);
                    acc += bri2
                        * (a_ls(l, t) * a_ls(l, s) * cvec::dot_h(&at.zm[l][t], &at.zm[l][s])
                            + m_ant * b_ls(l, s).powi(2) * ar(l, k) * a_ls(l, t) * at.mw[l][t]
                            + m_ant * b_ls(l, t).powi(2) * ar(l, k) * a_ls(l, s) * at.mw[l][s].conj()
                            + C64::new(
                                m_ant * m_ant
                                    * b_ls(l, s).powi(2)
                                    * b_ls(l, t).powi(2)
                                    * ar(l, k).powi(2)
                                    * nf,
                                0.0,
                            ));
                }
                acc
            };
            let tr_b = |s: usize, t: usize| -> C64 {
                let mut acc = C64::new(0.0, 0.0);
                for l in 0..l_count {
                    for m in 0..l_count {
                        acc += br(l, i).powi(2)
                            * br(m, k).powi(2)
                            * a_ls(l, s)
                            * a_ls(m, s)
                            * a_ls(m, t)
                            * a_ls(l, t)
                            * cache.tr4(l, m, s, t);
                    }
                    let rr = br(l, i).powi(2) * br(l, k).powi(2);
                    acc += C64::new(
                        m_ant
                            * m_ant
                            * nf
                            * rr
                            * (a_ls(l, s).powi(2) * b_ls(l, t).powi(2)
                                + a_ls(l, t).powi(2) * b_ls(l, s).powi(2)
                                + b_ls(l, s).powi(2) * b_ls(l, t).powi(2)),
                        0.0,
                    );
                }
                acc
            };

            let mut b_acc = C64::new(0.0, 0.0);
            for s in 0..s_count {
                for t in 0..s_count {
                    let w = root_eta_i[s] * root_eta_i[t];
                    if w == 0.0 {
                        continue;
                    }
                    b_acc += w * (k0[s] * k0[t].conj() + pp(s, t) + dd(s, t) + tr_b(s, t));
                }
                let e = eta.get(i, s);
                if e > 0.0 {
                    b_acc += e
                        * (ai.eq[s] * at.er[s] + at.eq[s] * ai.er[s] + m_ant * at.er[s] * ai.er[s]);
                }
            }
            debug_assert!(b_acc.im.abs() <= 1e-9 * b_acc.re.abs().max(1e-300), "B imag {}", b_acc.im);
            b_out[k * k_count + i] = b_acc.re;
        }
    }

    let b_sum: Vec<f64> = (0..k_count)
        .map(|k| (0..k_count).filter(|&i| i != k).map(|i| b_out[k * k_count + i]).sum())
        .collect();
    let h_bar: Vec<Vec<C64>> = atoms
        .iter()
        .flat_map(|at| at.m.iter().cloned())
        .collect();

    Ok(ClosedFormTerms {
        a: a_out,
        b: b_out,
        b_sum,
        h_bar,
        mean_gain,
        n0: cfg.n0,
        mu: cfg.mu.clone(),
        k: k_count,
        s: s_count,
    })
}

/// Ergodic rate from the closed-form moments:
/// `C_k = log2(1 + A_k / (sum_{i != k} B_{k,i} + N0))`.
pub fn closed_form_rate(terms: &ClosedFormTerms, config: &SystemConfig) -> RateReport {
    let mut sinr = Vec::with_capacity(terms.k);
    let mut rate = Vec::with_capacity(terms.k);
    let mut weighted_sum = 0.0;
    for k in 0..terms.k {
        let g = terms.a[k] / (terms.b_sum[k] + terms.n0);
        let r = (1.0 + g).log2();
        weighted_sum += config.mu[k] * r;
        sinr.push(g);
        rate.push(r);
    }
    RateReport {
        sinr,
        rate,
        weighted_sum,
        signal: terms.a.clone(),
        interference: terms.b_sum.clone(),
        noise: terms.n0,
    }
}

/// Weighted sum-rate from the closed form, the objective driven by the
/// statistical RIS optimization.
pub fn closed_form_wsr(terms: &ClosedFormTerms) -> f64 {
    (0..terms.k)
        .map(|k| terms.mu[k] * (1.0 + terms.a[k] / (terms.b_sum[k] + terms.n0)).log2())
        .sum()
}

/// Rate in the special case without LoS paths (all K factors zero). The
/// expression involves no phase matrices, so the output is independent of
/// any RIS configuration.
pub fn nlos_rate(stats: &StatisticalCsi, eta: &PowerAllocation, config: &SystemConfig) -> Result<RateReport> {
    if config.k_bs_ris != 0.0 || config.k_ris_ue != 0.0 || config.k_direct != 0.0 {
        return Err(CoreError::Config("nlos_rate requires all Rician K factors to be zero".into()));
    }
    if eta.k != config.k || eta.s != config.s {
        return Err(CoreError::Dimension("eta does not match scenario".into()));
    }
    let (k_count, s_count, l_count, n) = (config.k, config.s, config.l, config.n());
    let (m_ant, nf) = (config.m as f64, n as f64);
    let b_ls = |l: usize, s: usize| stats.bs_ris[stats.idx_ls(l, s)].b;
    let br = |l: usize, k: usize| stats.ris_ue[stats.idx_lk(l, k)].b;
    let bd = |k: usize, s: usize| stats.direct[stats.idx_ks(k, s)].b;
    let gamma_bar = |k: usize, s: usize| bd(k, s).powi(2) + nf * stats.alpha3[stats.idx_ks(k, s)];

    let mut sinr = Vec::with_capacity(k_count);
    let mut rate = Vec::with_capacity(k_count);
    let mut signal = Vec::with_capacity(k_count);
    let mut interference = Vec::with_capacity(k_count);
    let mut weighted_sum = 0.0;
    for k in 0..k_count {
        let mut a = 0.0;
        for s in 0..s_count {
            for t in 0..s_count {
                let w = (eta.get(k, s) * eta.get(k, t)).sqrt();
                let mut ris = 0.0;
                for l in 0..l_count {
                    ris += b_ls(l, s).powi(2) * br(l, k).powi(4) * b_ls(l, t).powi(2);
                }
                a += w * (nf * m_ant * m_ant * ris + m_ant * m_ant * gamma_bar(k, s) * gamma_bar(k, t));
            }
            let mut quartic = 0.0;
            for l in 0..l_count {
                quartic += b_ls(l, s).powi(4) * br(l, k).powi(4);
            }
            a += eta.get(k, s) * (m_ant * gamma_bar(k, s).powi(2) + m_ant * nf * quartic);
        }
        let mut b_total = 0.0;
        for i in 0..k_count {
            if i == k {
                continue;
            }
            let mut b = 0.0;
            for s in 0..s_count {
                for t in 0..s_count {
                    let w = (eta.get(i, s) * eta.get(i, t)).sqrt();
                    let mut ris = 0.0;
                    for l in 0..l_count {
                        ris += b_ls(l, s).powi(2) * b_ls(l, t).powi(2) * br(l, k).powi(2) * br(l, i).powi(2);
                    }
                    b += w * m_ant * m_ant * nf * ris;
                }
                b += eta.get(i, s) * m_ant * gamma_bar(k, s) * gamma_bar(i, s);
            }
            b_total += b;
        }
        let g = a / (b_total + config.n0);
        let r = (1.0 + g).log2();
        weighted_sum += config.mu[k] * r;
        sinr.push(g);
        rate.push(r);
        signal.push(a);
        interference.push(b_total);
    }
    Ok(RateReport { sinr, rate, weighted_sum, signal, interference, noise: config.n0 })
}
