//! Stacked block operators for the statistical phase objective.
//!
//! The objective treats the stacked phase vector `v` (length `L*N`) through
//! a small set of affine atoms, all precomputable from the statistical CSI:
//!
//! * `T_ks v + d_ks` is the mean channel `h_bar_ks(v)`;
//! * `Phi_ks` maps the rotated RIS-user fading onto the BS array;
//! * diagonal operators (`psi`, `de`, `delta`, ...) collect the per-element
//!   couplings that survive the fading expectations.
//!
//! `gg_s`, `gg_ks`, `gg_hat_ks`, `hh_r_k`, `hh_r_ks`, `hh_r_hat_ks` and
//! `hh_d_ks` are the stacked blocks in their conventional grouping;
//! `t_ks = gg_s * diag(hh_r_k)` is kept materialized because every assembly
//! consumes it.

use crate::linalg::{vec as cvec, C64, CMat};
use crate::rate::{build_rate_cache, RateCache};
use crate::scenario::StatisticalCsi;

/// Per-scenario operator blocks (independent of phases, powers, weights).
#[derive(Debug, Clone)]
pub struct PddBlocks {
    pub l: usize,
    pub n: usize,
    pub s: usize,
    pub k: usize,
    pub m: usize,
    /// `GG_s = [a_1s G_1s^T, ..., a_Ls G_Ls^T]`, `M x LN`, per `s`.
    pub gg_s: Vec<CMat>,
    /// Diagonal of `hh_r,k = diag(a_r,lk diag(h_r,lk))`, length `LN`, per `k`.
    pub hh_r_k: Vec<Vec<C64>>,
    /// `hh_d,ks = a_d,ks h_d,ks`, per `(k, s)` indexed `k * S + s`.
    pub hh_d_ks: Vec<Vec<C64>>,
    /// `GG_ks = [a_1s b_r,1k G_1s^T, ...]`, per `(k, s)`.
    pub gg_ks: Vec<CMat>,
    /// `GG_hat_ks = [a_1s b_r,1k^2 G_1s^T, ...]`, per `(k, s)`.
    pub gg_hat_ks: Vec<CMat>,
    /// Diagonal of `hh_r,ks` (blocks `a_r,lk b_ls^2 diag(h_r,lk)`), per `(k, s)`.
    pub hh_r_ks: Vec<Vec<C64>>,
    /// `hh_r_hat_ks = [b_1s a_r,1k h_r,1k; ...]` stacked vector, per `(k, s)`.
    pub hh_r_hat_ks: Vec<Vec<C64>>,
    /// `T_ks = GG_s diag(hh_r_k)`, `M x LN`, per `(k, s)`.
    pub t_ks: Vec<CMat>,
    /// Gram `T_ks^H T_ks`, per `(k, s)`.
    pub tt_gram: Vec<CMat>,
    /// `T_ks^H hh_d_ks`, per `(k, s)`.
    pub ttd: Vec<Vec<C64>>,
    /// `Phi_ks^H hh_d_ks`, per `(k, s)`.
    pub e_ks: Vec<Vec<C64>>,
    /// Diagonal of `Psi_ks` (blocks `b_ls^2 a_r,lk b_r,lk diag(h_r,lk)`).
    pub psi: Vec<Vec<C64>>,
    /// Real diagonal `b_ls^2 a_r,lk^2` (per element), per `(k, s)`.
    pub de: Vec<Vec<f64>>,
    /// `M b_ls^2 a_r,li a_r,lk conj(h_r,li) .* h_r,lk`, per `(k, i, s)`.
    pub delta: Vec<Vec<C64>>,
    /// `M b_ls^2 a_r,li b_r,lk h_r,li`, per `(k, i, s)` (x-side coupling).
    pub p_diag: Vec<Vec<C64>>,
    /// `M b_ls^2 b_r,li a_r,lk h_r,lk`, per `(k, i, s)` (u-side coupling).
    pub q_diag: Vec<Vec<C64>>,
    /// Per-user constants, indexed `k * S + s`.
    pub c_er: Vec<f64>,
    pub mn_alpha2: Vec<f64>,
    pub mn_alpha23: Vec<f64>,
    pub mbd2: Vec<f64>,
    pub d_norm2: Vec<f64>,
    /// `tau_ks = M N sum_l a_ls^2 b_ls^2 b_r,lk^4`.
    pub tau: Vec<f64>,
    /// `M N sum_l b_ls^4 b_r,lk^4` (the noise-noise variance constant).
    pub lam2: Vec<f64>,
    /// `tr(Xi_ks Xi_kt)`, indexed `(k * S + s) * S + t`.
    pub tr_xi: Vec<C64>,
    /// Interference trace constants, indexed `((k * K + i) * S + s) * S + t`.
    pub tr_b: Vec<C64>,
}

impl PddBlocks {
    #[inline]
    pub fn ks(&self, k: usize, s: usize) -> usize {
        k * self.s + s
    }
    #[inline]
    pub fn kis(&self, k: usize, i: usize, s: usize) -> usize {
        (k * self.k + i) * self.s + s
    }
}

/// Build every stacked/diagonal block from the statistical CSI.
pub fn assemble_blocks(stats: &StatisticalCsi) -> PddBlocks {
    let cache = build_rate_cache(stats);
    assemble_blocks_cached(stats, &cache)
}

pub fn assemble_blocks_cached(stats: &StatisticalCsi, cache: &RateCache) -> PddBlocks {
    let cfg = &stats.config;
    let (l_count, n, s_count, k_count, m) = (cfg.l, cfg.n(), cfg.s, cfg.k, cfg.m);
    let ln = l_count * n;
    let (m_f, n_f) = (m as f64, n as f64);

    let a_ls = |l: usize, s: usize| stats.bs_ris[stats.idx_ls(l, s)].a;
    let b_ls = |l: usize, s: usize| stats.bs_ris[stats.idx_ls(l, s)].b;
    let ar = |l: usize, k: usize| stats.ris_ue[stats.idx_lk(l, k)].a;
    let br = |l: usize, k: usize| stats.ris_ue[stats.idx_lk(l, k)].b;

    // GG_s: horizontal stack of scaled transposed LoSblocks.
    let mut gg_s = Vec::with_capacity(s_count);
    for s in 0..s_count {
        let mut mat = CMat::zeros(m, ln);
        for l in 0..l_count {
            let g = &stats.bs_ris_los[stats.idx_ls(l, s)];
            let a = a_ls(l, s);
            for row in 0..m {
                for col in 0..n {
                    mat.set(row, l * n + col, a * g.at(col, row));
                }
            }
        }
        gg_s.push(mat);
    }

    let mut hh_r_k = Vec::with_capacity(k_count);
    for k in 0..k_count {
        let mut diag = Vec::with_capacity(ln);
        for l in 0..l_count {
            let h = &stats.ris_ue_los[stats.idx_lk(l, k)];
            let a = ar(l, k);
            diag.extend(h.iter().map(|z| a * z));
        }
        hh_r_k.push(diag);
    }

    let stack_gg = |weight: &dyn Fn(usize, usize) -> f64, s: usize| -> CMat {
        let mut mat = CMat::zeros(m, ln);
        for l in 0..l_count {
            let g = &stats.bs_ris_los[stats.idx_ls(l, s)];
            let w = weight(l, s);
            for row in 0..m {
                for col in 0..n {
                    mat.set(row, l * n + col, w * g.at(col, row));
                }
            }
        }
        mat
    };

    let mut hh_d_ks = Vec::with_capacity(k_count * s_count);
    let mut gg_ks = Vec::with_capacity(k_count * s_count);
    let mut gg_hat_ks = Vec::with_capacity(k_count * s_count);
    let mut hh_r_ks = Vec::with_capacity(k_count * s_count);
    let mut hh_r_hat_ks = Vec::with_capacity(k_count * s_count);
    let mut t_ks = Vec::with_capacity(k_count * s_count);
    let mut tt_gram = Vec::with_capacity(k_count * s_count);
    let mut ttd = Vec::with_capacity(k_count * s_count);
    let mut e_ks = Vec::with_capacity(k_count * s_count);
    let mut psi = Vec::with_capacity(k_count * s_count);
    let mut de = Vec::with_capacity(k_count * s_count);
    let mut c_er = Vec::with_capacity(k_count * s_count);
    let mut mn_alpha2 = Vec::with_capacity(k_count * s_count);
    let mut mn_alpha23 = Vec::with_capacity(k_count * s_count);
    let mut mbd2 = Vec::with_capacity(k_count * s_count);
    let mut d_norm2 = Vec::with_capacity(k_count * s_count);
    let mut tau = Vec::with_capacity(k_count * s_count);
    let mut lam2 = Vec::with_capacity(k_count * s_count);

    for k in 0..k_count {
        for s in 0..s_count {
            let ks = stats.idx_ks(k, s);
            let d: Vec<C64> =
                stats.direct_los[ks].iter().map(|z| stats.direct[ks].a * z).collect();

            let phi = stack_gg(&|l, s| a_ls(l, s) * br(l, k), s);
            let phi_hat = stack_gg(&|l, s| a_ls(l, s) * br(l, k).powi(2), s);

            // T_ks = GG_s diag(hh_r_k): column j of GG_s scaled by hh_r_k[j].
            let mut t = gg_s[s].clone();
            for row in 0..m {
                for col in 0..ln {
                    let v = t.at(row, col) * hh_r_k[k][col];
                    t.set(row, col, v);
                }
            }

            let mut hh_r_ks_diag = Vec::with_capacity(ln);
            let mut hh_r_hat = Vec::with_capacity(ln);
            let mut psi_diag = Vec::with_capacity(ln);
            let mut de_diag = Vec::with_capacity(ln);
            for l in 0..l_count {
                let h = &stats.ris_ue_los[stats.idx_lk(l, k)];
                let bl = b_ls(l, s);
                for z in h {
                    hh_r_ks_diag.push(ar(l, k) * bl * bl * z);
                    hh_r_hat.push(bl * ar(l, k) * z);
                    psi_diag.push(bl * bl * ar(l, k) * br(l, k) * z);
                    de_diag.push(bl * bl * ar(l, k) * ar(l, k));
                }
            }

            let gram = t.adjoint_mul(&t);
            let ttd_v = t.adjoint_mul_vec(&d);
            let e_v = phi.adjoint_mul_vec(&d);

            let bd = stats.direct[ks].b;
            c_er.push(bd * bd + n_f * stats.alpha3[ks]);
            mn_alpha2.push(m_f * n_f * stats.alpha2[ks]);
            mn_alpha23.push(m_f * n_f * (stats.alpha2[ks] + stats.alpha3[ks]));
            mbd2.push(m_f * bd * bd);
            d_norm2.push(cvec::norm2(&d));
            let mut tau_v = 0.0;
            let mut lam2_v = 0.0;
            for l in 0..l_count {
                tau_v += a_ls(l, s).powi(2) * b_ls(l, s).powi(2) * br(l, k).powi(4);
                lam2_v += b_ls(l, s).powi(4) * br(l, k).powi(4);
            }
            tau.push(m_f * n_f * tau_v);
            lam2.push(m_f * n_f * lam2_v);

            hh_d_ks.push(d);
            gg_ks.push(phi);
            gg_hat_ks.push(phi_hat);
            hh_r_ks.push(hh_r_ks_diag);
            hh_r_hat_ks.push(hh_r_hat);
            t_ks.push(t);
            tt_gram.push(gram);
            ttd.push(ttd_v);
            e_ks.push(e_v);
            psi.push(psi_diag);
            de.push(de_diag);
        }
    }

    let mut delta = Vec::with_capacity(k_count * k_count * s_count);
    let mut p_diag = Vec::with_capacity(k_count * k_count * s_count);
    let mut q_diag = Vec::with_capacity(k_count * k_count * s_count);
    for k in 0..k_count {
        for i in 0..k_count {
            for s in 0..s_count {
                let mut dv = Vec::with_capacity(ln);
                let mut pv = Vec::with_capacity(ln);
                let mut qv = Vec::with_capacity(ln);
                for l in 0..l_count {
                    let hi = &stats.ris_ue_los[stats.idx_lk(l, i)];
                    let hk = &stats.ris_ue_los[stats.idx_lk(l, k)];
                    let b2 = b_ls(l, s).powi(2);
                    for idx in 0..n {
                        dv.push(m_f * b2 * ar(l, i) * ar(l, k) * hi[idx].conj() * hk[idx]);
                        pv.push(m_f * b2 * ar(l, i) * br(l, k) * hi[idx]);
                        qv.push(m_f * b2 * br(l, i) * ar(l, k) * hk[idx]);
                    }
                }
                delta.push(dv);
                p_diag.push(pv);
                q_diag.push(qv);
            }
        }
    }

    // Trace constants.
    let mut tr_xi = vec![C64::new(0.0, 0.0); k_count * s_count * s_count];
    let mut tr_b = vec![C64::new(0.0, 0.0); k_count * k_count * s_count * s_count];
    for k in 0..k_count {
        for s in 0..s_count {
            for t in 0..s_count {
                let mut acc = C64::new(0.0, 0.0);
                for l in 0..l_count {
                    for mm in 0..l_count {
                        acc += br(l, k).powi(2)
                            * br(mm, k).powi(2)
                            * a_ls(l, s)
                            * a_ls(mm, s)
                            * a_ls(mm, t)
                            * a_ls(l, t)
                            * cache.tr4_at(l, mm, s, t);
                    }
                    let r4 = br(l, k).powi(4);
                    acc += C64::new(
                        m_f * m_f
                            * n_f
                            * r4
                            * (a_ls(l, s).powi(2) * b_ls(l, t).powi(2)
                                + a_ls(l, t).powi(2) * b_ls(l, s).powi(2)
                                + b_ls(l, s).powi(2) * b_ls(l, t).powi(2)),
                        0.0,
                    );
                }
                tr_xi[(k * s_count + s) * s_count + t] = acc;
            }
        }
        for i in 0..k_count {
            for s in 0..s_count {
                for t in 0..s_count {
                    let mut acc = C64::new(0.0, 0.0);
                    for l in 0..l_count {
                        for mm in 0..l_count {
                            acc += br(l, i).powi(2)
                                * br(mm, k).powi(2)
                                * a_ls(l, s)
                                * a_ls(mm, s)
                                * a_ls(mm, t)
                                * a_ls(l, t)
                                * cache.tr4_at(l, mm, s, t);
                        }
                        let rr = br(l, i).powi(2) * br(l, k).powi(2);
                        acc += C64::new(
                            m_f * m_f
                                * n_f
                                * rr
                                * (a_ls(l, s).powi(2) * b_ls(l, t).powi(2)
                                    + a_ls(l, t).powi(2) * b_ls(l, s).powi(2)
                                    + b_ls(l, s).powi(2) * b_ls(l, t).powi(2)),
                            0.0,
                        );
                    }
                    tr_b[((k * k_count + i) * s_count + s) * s_count + t] = acc;
                }
            }
        }
    }

    PddBlocks {
        l: l_count,
        n,
        s: s_count,
        k: k_count,
        m,
        gg_s,
        hh_r_k,
        hh_d_ks,
        gg_ks,
        gg_hat_ks,
        hh_r_ks,
        hh_r_hat_ks,
        t_ks,
        tt_gram,
        ttd,
        e_ks,
        psi,
        de,
        delta,
        p_diag,
        q_diag,
        c_er,
        mn_alpha2,
        mn_alpha23,
        mbd2,
        d_norm2,
        tau,
        lam2,
        tr_xi,
        tr_b,
    }
}
