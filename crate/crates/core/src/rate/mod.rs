//! Achievable-rate evaluation: instantaneous SINR under MR precoding,
//! Monte-Carlo ergodic estimates, the moment-based closed form, and the
//! moment oracle table used to validate it.
//!
//! Throughout, the interference denominator uses the coherent combination
//! `|sum_s sqrt(eta_is) h_ks^T h_is^*|^2`; the incoherent per-BS variant
//! that appears once in some derivation steps is treated as a typo.

mod closed_form;
mod monte_carlo;
mod moments;

pub use closed_form::{
    build_rate_cache, closed_form_rate, closed_form_terms, closed_form_terms_cached, closed_form_wsr,
    nlos_rate, ClosedFormTerms, RateCache,
};
pub use monte_carlo::{mc_signal_interference_moments, monte_carlo_rate, McEstimate, McMode, McMoments};
pub use moments::{moment_oracle, moment_rows_to_csv, MomentRow};

use crate::channel::{EffectiveChannels, PowerAllocation};
use crate::error::CoreError;
use crate::linalg::{vec as cvec, C64};
use crate::scenario::SystemConfig;
use crate::Result;

/// Per-user SINR/rate breakdown for one channel realization.
#[derive(Debug, Clone)]
pub struct RateReport {
    /// Linear SINR per user.
    pub sinr: Vec<f64>,
    /// `log2(1 + sinr)` per user, bits/s/Hz.
    pub rate: Vec<f64>,
    /// `sum_k mu_k rate_k`.
    pub weighted_sum: f64,
    /// Coherent signal power per user.
    pub signal: Vec<f64>,
    /// Total interference power per user.
    pub interference: Vec<f64>,
    /// Noise power used in the denominator.
    pub noise: f64,
}

/// Signal and interference powers of user `k` under MR precoding:
/// `sig = (sum_s sqrt(eta_ks) ||h_ks||^2)^2` and
/// `int = sum_{i != k} |sum_s sqrt(eta_is) h_ks^T h_is^*|^2`.
pub fn signal_interference(eff: &EffectiveChannels, eta: &PowerAllocation, k: usize) -> (f64, f64) {
    let s_count = eff.s;
    let mut amp = 0.0;
    for s in 0..s_count {
        amp += eta.get(k, s).sqrt() * cvec::norm2(eff.h_ks(k, s));
    }
    let mut interference = 0.0;
    for i in 0..eff.k {
        if i == k {
            continue;
        }
        let mut acc = C64::new(0.0, 0.0);
        for s in 0..s_count {
            // h_ks^T h_is^* = h_is^H h_ks
            acc += eta.get(i, s).sqrt() * cvec::dot_h(eff.h_ks(i, s), eff.h_ks(k, s));
        }
        interference += acc.norm_sqr();
    }
    (amp * amp, interference)
}

/// Instantaneous per-user rates for one effective-channel realization.
pub fn instantaneous_rate(
    eff: &EffectiveChannels,
    eta: &PowerAllocation,
    config: &SystemConfig,
) -> Result<RateReport> {
    if eta.k != eff.k || eta.s != eff.s {
        return Err(CoreError::Dimension("power allocation does not match channels".into()));
    }
    if config.k != eff.k || config.s != eff.s {
        return Err(CoreError::Dimension("config does not match channels".into()));
    }
    if eta.eta.iter().any(|&e| e < 0.0) {
        return Err(CoreError::Power("negative eta".into()));
    }
    let mut sinr = Vec::with_capacity(eff.k);
    let mut rate = Vec::with_capacity(eff.k);
    let mut signal = Vec::with_capacity(eff.k);
    let mut interference = Vec::with_capacity(eff.k);
    let mut weighted_sum = 0.0;
    for k in 0..eff.k {
        let (sig, int) = signal_interference(eff, eta, k);
        let g = sig / (int + config.n0);
        let r = (1.0 + g).log2();
        weighted_sum += config.mu[k] * r;
        sinr.push(g);
        rate.push(r);
        signal.push(sig);
        interference.push(int);
    }
    Ok(RateReport { sinr, rate, weighted_sum, signal, interference, noise: config.n0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{effective_channel, sample_channels, PhaseConfig};
    use crate::scenario::{build_statistics, default_config, place_nodes, LayoutSpec};
    use rand::Rng;

    /// Naive scalar re-implementation used as the oracle: everything with
    /// explicit loops over antenna entries, no shared helpers.
    fn naive_report(eff: &crate::channel::EffectiveChannels, eta: &PowerAllocation, n0: f64) -> Vec<f64> {
        let (kc, sc, mc) = (eff.k, eff.s, eff.m);
        let mut out = Vec::new();
        for k in 0..kc {
            let mut amp = 0.0;
            for s in 0..sc {
                let mut nrm = 0.0;
                for a in 0..mc {
                    let z = eff.h_ks(k, s)[a];
                    nrm += z.re * z.re + z.im * z.im;
                }
                amp += eta.get(k, s).sqrt() * nrm;
            }
            let mut int = 0.0;
            for i in 0..kc {
                if i == k {
                    continue;
                }
                let (mut acc_re, mut acc_im) = (0.0, 0.0);
                for s in 0..sc {
                    let root = eta.get(i, s).sqrt();
                    for a in 0..mc {
                        let hk = eff.h_ks(k, s)[a];
                        let hi = eff.h_ks(i, s)[a];
                        // h_ks[a] * conj(h_is[a])
                        acc_re += root * (hk.re * hi.re + hk.im * hi.im);
                        acc_im += root * (hk.im * hi.re - hk.re * hi.im);
                    }
                }
                int += acc_re * acc_re + acc_im * acc_im;
            }
            out.push(amp * amp / (int + n0));
        }
        out
    }

    #[test]
    fn matches_naive_oracle_on_random_instances() {
        let mut cfg = default_config();
        cfg.n_r = 2;
        cfg.n_c = 2;
        let geom = place_nodes(&cfg, &LayoutSpec::UniformRandom, 20).unwrap();
        let stats = build_statistics(&cfg, &geom).unwrap();
        let mut rng = crate::seqrng::rng_for(99, 0);
        for trial in 0..100 {
            let real = sample_channels(&stats, trial);
            let phases = PhaseConfig::random(cfg.l, cfg.n(), trial + 1);
            let eff = effective_channel(&real, &phases).unwrap();
            let eta_vals: Vec<f64> = (0..cfg.k * cfg.s).map(|_| rng.gen::<f64>() * 1e3).collect();
            let eta = PowerAllocation::new(eta_vals, cfg.k, cfg.s).unwrap();
            let report = instantaneous_rate(&eff, &eta, &cfg).unwrap();
            let want = naive_report(&eff, &eta, cfg.n0);
            for k in 0..cfg.k {
                let rel = (report.sinr[k] - want[k]).abs() / want[k].max(1e-300);
                assert!(rel < 1e-10, "trial {trial}: sinr[{k}] {} vs {}", report.sinr[k], want[k]);
            }
        }
    }

    #[test]
    fn single_user_has_no_interference() {
        let mut cfg = default_config();
        cfg.k = 1;
        cfg.mu = vec![1.0];
        cfg.n_r = 2;
        cfg.n_c = 2;
        let geom = place_nodes(&cfg, &LayoutSpec::UniformRandom, 21).unwrap();
        let stats = build_statistics(&cfg, &geom).unwrap();
        let real = sample_channels(&stats, 0);
        let eff = effective_channel(&real, &PhaseConfig::identity(cfg.l, cfg.n())).unwrap();
        let eta = PowerAllocation::new(vec![1.0; cfg.s], 1, cfg.s).unwrap();
        let rep = instantaneous_rate(&eff, &eta, &cfg).unwrap();
        assert_eq!(rep.interference[0], 0.0);
        let mut amp = 0.0;
        for s in 0..cfg.s {
            amp += cvec::norm2(eff.h_ks(0, s));
        }
        assert!((rep.sinr[0] - amp * amp / cfg.n0).abs() < 1e-10 * rep.sinr[0]);
    }

    #[test]
    fn zero_power_means_zero_rate() {
        let cfg = default_config();
        let geom = place_nodes(&cfg, &LayoutSpec::UniformRandom, 22).unwrap();
        let stats = build_statistics(&cfg, &geom).unwrap();
        let real = sample_channels(&stats, 0);
        let eff = effective_channel(&real, &PhaseConfig::identity(cfg.l, cfg.n())).unwrap();
        let eta = PowerAllocation::zeros(cfg.k, cfg.s);
        let rep = instantaneous_rate(&eff, &eta, &cfg).unwrap();
        assert!(rep.rate.iter().all(|&r| r == 0.0));
        assert_eq!(rep.weighted_sum, 0.0);
    }
}
