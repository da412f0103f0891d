//! Moment-identity oracle: closed-form channel moments against Monte-Carlo
//! estimates over the decomposed channel components.
//!
//! The effective channel splits as `h_ks = h_bar_ks + x1 + x2 + x3 + x4`,
//! where `x1` is the direct NLoS part, `x2` the (BS-RIS NLoS, RIS-UE LoS)
//! product, `x3` the (BS-RIS LoS, RIS-UE NLoS) product, and `x4` the
//! all-NLoS product. Each row of the oracle table states one analytic
//! moment of these components and its empirical estimate with a standard
//! error; `z = |empirical - analytic| / se`.

use crate::channel::{sample_channels, ChannelRealization, PhaseConfig};
use crate::error::CoreError;
use crate::linalg::{vec as cvec, C64};
use crate::rate::closed_form::build_rate_cache;
use crate::scenario::StatisticalCsi;
use crate::seqrng::{mean_se_complex, mix};
use crate::Result;
use rayon::prelude::*;

/// One validated identity.
#[derive(Debug, Clone)]
pub struct MomentRow {
    pub identity: String,
    pub analytic: f64,
    pub empirical: f64,
    pub se: f64,
    /// `|empirical - analytic| / se`, with the complex deviation folded in
    /// for identities whose sampled statistic is complex.
    pub z: f64,
}

/// Decomposed NLoS components of user `k`, BS `s` for one realization.
fn components(
    stats: &StatisticalCsi,
    real: &ChannelRealization,
    phases: &PhaseConfig,
    k: usize,
    s: usize,
) -> [Vec<C64>; 4] {
    let cfg = &stats.config;
    let (l_count, n, m) = (cfg.l, cfg.n(), cfg.m);
    let ks = stats.idx_ks(k, s);
    let x1: Vec<C64> = real.h_d_tilde[ks].iter().map(|z| z * stats.direct[ks].b).collect();
    let mut x2 = cvec::zeros(m);
    let mut x3 = cvec::zeros(m);
    let mut x4 = cvec::zeros(m);
    for l in 0..l_count {
        let ls = stats.idx_ls(l, s);
        let lk = stats.idx_lk(l, k);
        let theta = phases.theta(l);
        let a_ls = stats.bs_ris[ls].a;
        let b_ls = stats.bs_ris[ls].b;
        let ar = stats.ris_ue[lk].a;
        let br = stats.ris_ue[lk].b;
        let g_bar = &stats.bs_ris_los[ls];
        let g_tilde = &real.g_tilde[ls];
        let h_bar = &stats.ris_ue_los[lk];
        let h_tilde = &real.h_r_tilde[lk];
        for i in 0..n {
            let rot_bar = theta[i] * h_bar[i];
            let rot_tilde = theta[i] * h_tilde[i];
            for j in 0..m {
                x2[j] += ar * b_ls * g_tilde.at(i, j) * rot_bar;
                x3[j] += br * a_ls * g_bar.at(i, j) * rot_tilde;
                x4[j] += br * b_ls * g_tilde.at(i, j) * rot_tilde;
            }
        }
    }
    [x1, x2, x3, x4]
}

struct Identity {
    name: &'static str,
    analytic: C64,
    /// Per-draw statistic.
    sample: Box<dyn Fn(&Draw) -> C64 + Sync>,
}

/// Components computed once per draw for the index set under test.
struct Draw {
    /// `[x1..x4]` for (k, s), (k, t), (i, s), (i, t).
    ks: [Vec<C64>; 4],
    kt: [Vec<C64>; 4],
    is: [Vec<C64>; 4],
    it: [Vec<C64>; 4],
    h_bar_ks: Vec<C64>,
    h_bar_is: Vec<C64>,
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    cvec::dot_h(a, b)
}

/// Evaluate the moment-identity table at user pair `(k, i) = (0, 1 % K)`
/// and BS pair `(s, t) = (0, 1 % S)` over `n_samples` draws.
///
/// Requires `n_samples >= 1000` so the reported standard errors are
/// meaningful.
pub fn moment_oracle(
    stats: &StatisticalCsi,
    phases: &PhaseConfig,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<MomentRow>> {
    if n_samples < 1000 {
        return Err(CoreError::Spec("moment_oracle needs n_samples >= 1000".into()));
    }
    let cfg = &stats.config;
    let (k_count, s_count, l_count, n) = (cfg.k, cfg.s, cfg.l, cfg.n());
    let (m_f, n_f) = (cfg.m as f64, n as f64);
    let (k, i, s, t) = (0usize, 1 % k_count, 0usize, 1 % s_count);
    let cache = build_rate_cache(stats);

    let a_ls = |l: usize, s: usize| stats.bs_ris[stats.idx_ls(l, s)].a;
    let b_ls = |l: usize, s: usize| stats.bs_ris[stats.idx_ls(l, s)].b;
    let ar = |l: usize, u: usize| stats.ris_ue[stats.idx_lk(l, u)].a;
    let br = |l: usize, u: usize| stats.ris_ue[stats.idx_lk(l, u)].b;
    let alpha1 = |u: usize, s: usize| stats.alpha1[stats.idx_ks(u, s)];
    let alpha2 = |u: usize, s: usize| stats.alpha2[stats.idx_ks(u, s)];
    let alpha3 = |u: usize, s: usize| stats.alpha3[stats.idx_ks(u, s)];
    let bd = |u: usize, s: usize| stats.direct[stats.idx_ks(u, s)].b;
    let uu = |l: usize, a: usize, b: usize| {
        cvec::dot_h(&stats.ris_ue_los[stats.idx_lk(l, a)], &stats.ris_ue_los[stats.idx_lk(l, b)])
    };
    let re = |x: f64| C64::new(x, 0.0);

    let mut identities: Vec<Identity> = Vec::new();

    identities.push(Identity {
        name: "x1_norm2",
        analytic: re(m_f * bd(k, s).powi(2)),
        sample: Box::new(move |d| re(cvec::norm2(&d.ks[0]))),
    });
    identities.push(Identity {
        name: "x2_norm2",
        analytic: re(m_f * n_f * alpha1(k, s)),
        sample: Box::new(move |d| re(cvec::norm2(&d.ks[1]))),
    });
    identities.push(Identity {
        name: "x3_norm2",
        analytic: re(m_f * n_f * alpha2(k, s)),
        sample: Box::new(move |d| re(cvec::norm2(&d.ks[2]))),
    });
    identities.push(Identity {
        name: "x4_norm2",
        analytic: re(m_f * n_f * alpha3(k, s)),
        sample: Box::new(move |d| re(cvec::norm2(&d.ks[3]))),
    });

    // |x2^H x4|^2 at one BS.
    {
        let mut cst = 0.0;
        for l in 0..l_count {
            cst += ar(l, k).powi(2) * br(l, k).powi(2) * b_ls(l, s).powi(4);
        }
        identities.push(Identity {
            name: "x2x4_same_bs",
            analytic: re(n_f * n_f * m_f * alpha1(k, s) * alpha3(k, s) + m_f * m_f * n_f * cst),
            sample: Box::new(move |d| {
                let v = dot(&d.ks[1], &d.ks[3]);
                re(v.norm_sqr())
            }),
        });
    }
    // x2^H x4 correlation across BSs.
    if t != s {
        let mut cst = 0.0;
        for l in 0..l_count {
            cst += ar(l, k).powi(2) * br(l, k).powi(2) * b_ls(l, s).powi(2) * b_ls(l, t).powi(2);
        }
        identities.push(Identity {
            name: "x2x4_cross_bs",
            analytic: re(m_f * m_f * n_f * cst),
            sample: Box::new(move |d| dot(&d.ks[1], &d.ks[3]) * dot(&d.kt[3], &d.kt[1])),
        });
    }
    // ||x3||^2 correlation across BSs (trace identity).
    if t != s {
        let mut tr = C64::new(0.0, 0.0);
        for l in 0..l_count {
            for m in 0..l_count {
                let mut x = C64::new(0.0, 0.0);
                // tr(G_ls^* G_ms^T G_mt^* G_lt^T)
                let gls = &stats.bs_ris_los[stats.idx_ls(l, s)];
                let gms = &stats.bs_ris_los[stats.idx_ls(m, s)];
                let gmt = &stats.bs_ris_los[stats.idx_ls(m, t)];
                let glt = &stats.bs_ris_los[stats.idx_ls(l, t)];
                let p1 = gls.conj().mul(&gms.transpose());
                let p2 = gmt.conj().mul(&glt.transpose());
                x += p1.trace_mul(&p2);
                tr += br(l, k).powi(2) * br(m, k).powi(2) * a_ls(l, s) * a_ls(m, s) * a_ls(m, t) * a_ls(l, t) * x;
            }
        }
        identities.push(Identity {
            name: "x3_norm2_cross_bs",
            analytic: tr + re(m_f * m_f * n_f * n_f * alpha2(k, s) * alpha2(k, t)),
            sample: Box::new(move |d| re(cvec::norm2(&d.ks[2]) * cvec::norm2(&d.kt[2]))),
        });
    }
    // ||x4||^2 correlation across BSs.
    if t != s {
        let mut cst = 0.0;
        for l in 0..l_count {
            cst += br(l, k).powi(4) * b_ls(l, s).powi(2) * b_ls(l, t).powi(2);
        }
        identities.push(Identity {
            name: "x4_norm2_cross_bs",
            analytic: re(m_f * m_f * n_f * n_f * alpha3(k, s) * alpha3(k, t) + m_f * m_f * n_f * cst),
            sample: Box::new(move |d| re(cvec::norm2(&d.ks[3]) * cvec::norm2(&d.kt[3]))),
        });
    }
    // Sum of fourth moments of all components at one BS.
    {
        let mut tr = 0.0;
        for l in 0..l_count {
            for m in 0..l_count {
                tr += a_ls(l, s).powi(2)
                    * a_ls(m, s).powi(2)
                    * br(l, k).powi(2)
                    * br(m, k).powi(2)
                    * cache_tr4(&cache, l, m, s, s).re;
            }
        }
        let mut quartic = 0.0;
        for l in 0..l_count {
            quartic += b_ls(l, s).powi(4) * br(l, k).powi(4);
        }
        let m2m = m_f * m_f + m_f;
        let analytic = m2m * (bd(k, s).powi(4) + n_f * n_f * alpha1(k, s).powi(2))
            + m_f * m_f * n_f * n_f * alpha2(k, s).powi(2)
            + tr
            + m2m * (n_f * n_f * alpha3(k, s).powi(2) + n_f * quartic);
        identities.push(Identity {
            name: "fourth_moments",
            analytic: re(analytic),
            sample: Box::new(move |d| {
                re(d.ks.iter().map(|x| cvec::norm2(x).powi(2)).sum::<f64>())
            }),
        });
    }
    // |x3^H x4|^2 at one BS.
    {
        let mut cst = 0.0;
        for l in 0..l_count {
            cst += br(l, k).powi(4) * a_ls(l, s).powi(2) * b_ls(l, s).powi(2);
        }
        identities.push(Identity {
            name: "x3x4_same_bs",
            analytic: re(n_f * n_f * m_f * alpha2(k, s) * alpha3(k, s) + m_f * n_f * cst),
            sample: Box::new(move |d| {
                let v = dot(&d.ks[2], &d.ks[3]);
                re(v.norm_sqr())
            }),
        });
    }

    // Interference-side identities need a second user.
    if i != k {
        let z2_mean = |s: usize| -> C64 {
            let mut acc = C64::new(0.0, 0.0);
            for l in 0..l_count {
                acc += m_f * ar(l, i) * ar(l, k) * b_ls(l, s).powi(2) * uu(l, i, k);
            }
            acc
        };
        // (x2_is^H x2_ks)(x2_it^H x2_kt)^* across BSs: product of means.
        if t != s {
            let analytic = z2_mean(s) * z2_mean(t).conj();
            identities.push(Identity {
                name: "b1_x2_cross_bs",
                analytic,
                sample: Box::new(move |d| dot(&d.is[1], &d.ks[1]) * dot(&d.it[1], &d.kt[1]).conj()),
            });
        }
        // |x2_is^H x2_ks|^2 at one BS: |mean|^2 plus the fluctuation term.
        {
            let analytic = re(z2_mean(s).norm_sqr() + m_f * n_f * n_f * alpha1(k, s) * alpha1(i, s));
            identities.push(Identity {
                name: "b1_x2_same_bs",
                analytic,
                sample: Box::new(move |d| re(dot(&d.is[1], &d.ks[1]).norm_sqr())),
            });
        }
        // x4/x2 mixed second moments across BSs.
        if t != s {
            let mut cst = 0.0;
            for l in 0..l_count {
                cst += b_ls(l, s).powi(2)
                    * b_ls(l, t).powi(2)
                    * (br(l, k).powi(2) * br(l, i).powi(2)
                        + ar(l, i).powi(2) * br(l, k).powi(2)
                        + ar(l, k).powi(2) * br(l, i).powi(2));
            }
            identities.push(Identity {
                name: "b2_x4x2_cross_bs",
                analytic: re(m_f * m_f * n_f * cst),
                sample: Box::new(move |d| {
                    dot(&d.is[3], &d.ks[3]) * dot(&d.it[3], &d.kt[3]).conj()
                        + dot(&d.is[1], &d.ks[3]) * dot(&d.it[1], &d.kt[3]).conj()
                        + dot(&d.is[3], &d.ks[1]) * dot(&d.it[3], &d.kt[1]).conj()
                }),
            });
        }
        // Mean-sandwich plus pairwise |x_n^H x_n'|^2 group at one BS.
        {
            let sum_a = |u: usize, s: usize| alpha1(u, s) + alpha2(u, s) + alpha3(u, s);
            let analytic = re(m_f * bd(k, s).powi(2) * bd(i, s).powi(2)
                + m_f * n_f * bd(k, s).powi(2) * sum_a(i, s)
                + m_f * n_f * bd(i, s).powi(2) * sum_a(k, s)
                + n_f * n_f * m_f
                    * (alpha1(k, s) * alpha2(i, s)
                        + alpha2(k, s) * alpha1(i, s)
                        + alpha2(k, s) * alpha3(i, s)
                        + alpha3(k, s) * alpha2(i, s)));
            // The mean-sandwich part depends on the LoS means; add it from
            // the per-draw h_bar vectors instead (they are deterministic).
            identities.push(Identity {
                name: "b3_noise_group",
                analytic,
                sample: Box::new(move |d| {
                    let mut acc = C64::new(0.0, 0.0);
                    // h_bar sandwiches, centered analytically below.
                    let sandwich = |hb: &[C64], xs: &[Vec<C64>; 4]| -> f64 {
                        [0usize, 1, 3]
                            .iter()
                            .map(|&n| dot(&xs[n], hb).norm_sqr())
                            .sum::<f64>()
                    };
                    acc += re(sandwich(&d.h_bar_ks, &d.is) + sandwich(&d.h_bar_is, &d.ks));
                    let pairs: [(usize, usize); 11] = [
                        (0, 0),
                        (0, 1),
                        (1, 0),
                        (2, 0),
                        (2, 1),
                        (0, 2),
                        (1, 2),
                        (3, 0),
                        (0, 3),
                        (2, 3),
                        (3, 2),
                    ];
                    for (nk, ni) in pairs {
                        acc += re(dot(&d.ks[nk], &d.is[ni]).norm_sqr());
                    }
                    acc
                }),
            });
        }
    }

    // h_bar means for the b3 sandwich: compute via the closed-form atoms.
    let cf = crate::rate::closed_form_terms_cached(
        stats,
        &cache,
        phases,
        &crate::channel::PowerAllocation::new(vec![1.0; k_count * s_count], k_count, s_count)?,
    )?;
    let h_bar_ks = cf.h_bar[k * s_count + s].clone();
    let h_bar_is = cf.h_bar[i * s_count + s].clone();
    // Complete the b3 analytic value with the mean-sandwich expectations:
    // E{h_bar_ks^H (sum x_n,is x_n,is^H) h_bar_ks} and vice versa.
    if i != k {
        let nk2 = cvec::norm2(&h_bar_ks);
        let ni2 = cvec::norm2(&h_bar_is);
        let extra = nk2 * (bd(i, s).powi(2) + n_f * alpha1(i, s) + n_f * alpha3(i, s))
            + ni2 * (bd(k, s).powi(2) + n_f * alpha1(k, s) + n_f * alpha3(k, s));
        if let Some(row) = identities.iter_mut().find(|r| r.name == "b3_noise_group") {
            row.analytic += re(extra);
        }
    }

    // Sample all identities.
    let draws: Vec<Vec<C64>> = (0..n_samples as u64)
        .into_par_iter()
        .map(|di| {
            let real = sample_channels(stats, mix(seed, di));
            let d = Draw {
                ks: components(stats, &real, phases, k, s),
                kt: components(stats, &real, phases, k, t),
                is: components(stats, &real, phases, i, s),
                it: components(stats, &real, phases, i, t),
                h_bar_ks: h_bar_ks.clone(),
                h_bar_is: h_bar_is.clone(),
            };
            identities.iter().map(|id| (id.sample)(&d)).collect()
        })
        .collect();

    let rows = identities
        .iter()
        .enumerate()
        .map(|(idx, id)| {
            let series: Vec<C64> = draws.iter().map(|d| d[idx]).collect();
            let (mean, se) = mean_se_complex(&series);
            let dev = (mean - id.analytic).norm();
            MomentRow {
                identity: id.name.to_string(),
                analytic: id.analytic.re,
                empirical: mean.re,
                se,
                z: if se > 0.0 { dev / se } else { 0.0 },
            }
        })
        .collect();
    Ok(rows)
}

fn cache_tr4(cache: &crate::rate::RateCache, l: usize, m: usize, s: usize, t: usize) -> C64 {
    cache.tr4_at(l, m, s, t)
}

/// Render moment rows as CSV with the documented columns.
pub fn moment_rows_to_csv(rows: &[MomentRow]) -> String {
    let mut out = String::from("identity,analytic,empirical,se,z\n");
    for r in rows {
        out.push_str(&format!("{},{:.10e},{:.10e},{:.4e},{:.3}\n", r.identity, r.analytic, r.empirical, r.se, r.z));
    }
    out
}
