//! Monte-Carlo ergodic-rate estimation.
//!
//! Two modes:
//! * `TrueErgodic` averages `log2(1 + SINR)` over channel draws.
//! * `MomentRatio` averages signal and interference powers separately and
//!   forms `log2(1 + mean_signal / (mean_interference + N0))` — the quantity
//!   the closed form approximates.
//!
//! Draws are independent with per-draw sub-seeds and can run in parallel;
//! accumulation collects per-draw records in draw order and reduces them
//! sequentially, so results are reproducible regardless of worker count.

use crate::channel::{effective_channel, sample_channels, PhaseConfig, PowerAllocation};
use crate::error::CoreError;
use crate::rate::signal_interference;
use crate::scenario::StatisticalCsi;
use crate::seqrng::{mean_se, mix};
use crate::Result;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McMode {
    TrueErgodic,
    MomentRatio,
}

/// Per-user rate estimates with standard errors.
#[derive(Debug, Clone)]
pub struct McEstimate {
    pub mode: McMode,
    pub rate: Vec<f64>,
    pub se: Vec<f64>,
    pub weighted_sum: f64,
    pub weighted_sum_se: f64,
    pub n_samples: usize,
}

/// Raw signal / interference moment estimates (the Monte-Carlo oracle for
/// the closed-form `A_k` and `sum_i B_{k,i}`).
#[derive(Debug, Clone)]
pub struct McMoments {
    pub signal_mean: Vec<f64>,
    pub signal_se: Vec<f64>,
    pub interference_mean: Vec<f64>,
    pub interference_se: Vec<f64>,
    /// Per-draw covariance between signal and interference, per user.
    pub cov: Vec<f64>,
    pub n_samples: usize,
}

fn per_draw_records(
    stats: &StatisticalCsi,
    phases: &PhaseConfig,
    eta: &PowerAllocation,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<Vec<(f64, f64)>>> {
    if n_samples < 1 {
        return Err(CoreError::Spec("n_samples must be >= 1".into()));
    }
    let records: Vec<Vec<(f64, f64)>> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let real = sample_channels(stats, mix(seed, i));
            let eff = effective_channel(&real, phases).expect("dimensions fixed by scenario");
            (0..stats.config.k).map(|k| signal_interference(&eff, eta, k)).collect()
        })
        .collect();
    Ok(records)
}

/// Estimate signal and interference second moments per user.
pub fn mc_signal_interference_moments(
    stats: &StatisticalCsi,
    phases: &PhaseConfig,
    eta: &PowerAllocation,
    n_samples: usize,
    seed: u64,
) -> Result<McMoments> {
    let records = per_draw_records(stats, phases, eta, n_samples, seed)?;
    let k_count = stats.config.k;
    let mut signal_mean = Vec::with_capacity(k_count);
    let mut signal_se = Vec::with_capacity(k_count);
    let mut interference_mean = Vec::with_capacity(k_count);
    let mut interference_se = Vec::with_capacity(k_count);
    let mut cov = Vec::with_capacity(k_count);
    for k in 0..k_count {
        let sig: Vec<f64> = records.iter().map(|r| r[k].0).collect();
        let int: Vec<f64> = records.iter().map(|r| r[k].1).collect();
        let (ms, ses) = mean_se(&sig);
        let (mi, sei) = mean_se(&int);
        let c = if n_samples > 1 {
            sig.iter().zip(&int).map(|(a, b)| (a - ms) * (b - mi)).sum::<f64>() / (n_samples as f64 - 1.0)
        } else {
            0.0
        };
        signal_mean.push(ms);
        signal_se.push(ses);
        interference_mean.push(mi);
        interference_se.push(sei);
        cov.push(c);
    }
    Ok(McMoments { signal_mean, signal_se, interference_mean, interference_se, cov, n_samples })
}

/// Monte-Carlo per-user rates. Deterministic per seed.
pub fn monte_carlo_rate(
    stats: &StatisticalCsi,
    phases: &PhaseConfig,
    eta: &PowerAllocation,
    n_samples: usize,
    seed: u64,
    mode: McMode,
) -> Result<McEstimate> {
    let cfg = &stats.config;
    let k_count = cfg.k;
    match mode {
        McMode::TrueErgodic => {
            let records = per_draw_records(stats, phases, eta, n_samples, seed)?;
            let mut rate = Vec::with_capacity(k_count);
            let mut se = Vec::with_capacity(k_count);
            let mut wsum_draws = vec![0.0; n_samples];
            for k in 0..k_count {
                let draws: Vec<f64> = records
                    .iter()
                    .map(|r| (1.0 + r[k].0 / (r[k].1 + cfg.n0)).log2())
                    .collect();
                for (w, d) in wsum_draws.iter_mut().zip(&draws) {
                    *w += cfg.mu[k] * d;
                }
                let (m, s) = mean_se(&draws);
                rate.push(m);
                se.push(s);
            }
            let (wm, wse) = mean_se(&wsum_draws);
            Ok(McEstimate { mode, rate, se, weighted_sum: wm, weighted_sum_se: wse, n_samples })
        }
        McMode::MomentRatio => {
            let m = mc_signal_interference_moments(stats, phases, eta, n_samples, seed)?;
            let mut rate = Vec::with_capacity(k_count);
            let mut se = Vec::with_capacity(k_count);
            let mut weighted_sum = 0.0;
            let mut wvar = 0.0;
            for k in 0..k_count {
                let den = m.interference_mean[k] + cfg.n0;
                let r = m.signal_mean[k] / den;
                let rk = (1.0 + r).log2();
                // Delta method on the ratio of means.
                let var_ratio = (m.signal_se[k].powi(2) + r * r * m.interference_se[k].powi(2)
                    - 2.0 * r * m.cov[k] / m.n_samples as f64)
                    / (den * den);
                let se_rate = var_ratio.max(0.0).sqrt() / ((1.0 + r) * std::f64::consts::LN_2);
                weighted_sum += cfg.mu[k] * rk;
                wvar += (cfg.mu[k] * se_rate).powi(2);
                rate.push(rk);
                se.push(se_rate);
            }
            Ok(McEstimate {
                mode,
                rate,
                se,
                weighted_sum,
                weighted_sum_se: wvar.sqrt(),
                n_samples,
            })
        }
    }
}
