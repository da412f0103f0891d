//! Monte-Carlo validation of the closed-form signal/interference moments.
//!
//! `A_k` must match the sampled mean of `(sum_s sqrt(eta_ks) ||h_ks||^2)^2`
//! and `B_sum_k` the sampled mean of the coherent interference power, within
//! three standard errors. These are the ground-truth checks for every term
//! of the closed form.

use cellfree_ris::channel::{PhaseConfig, PowerAllocation};
use cellfree_ris::rate::{closed_form_rate, closed_form_terms, mc_signal_interference_moments, nlos_rate};
use cellfree_ris::scenario::{build_statistics, default_config, place_nodes, LayoutSpec, SystemConfig};
use rand::Rng;

fn small_config(seed_mark: u64) -> SystemConfig {
    let mut cfg = default_config();
    cfg.s = 2;
    cfg.l = 2;
    cfg.m = 2;
    cfg.n_r = 2;
    cfg.n_c = 2;
    cfg.k = 2;
    cfg.mu = vec![1.0; 2];
    // Vary the Rician K factors per scenario so different term groups dominate.
    cfg.k_bs_ris = 1.0 + (seed_mark % 5) as f64;
    cfg.k_ris_ue = 0.5 + (seed_mark % 3) as f64;
    cfg.k_direct = (seed_mark % 4) as f64;
    cfg
}

fn random_eta(cfg: &SystemConfig, seed: u64) -> PowerAllocation {
    let mut rng = cellfree_ris::seqrng::rng_for(seed, 0xE7A);
    let eta: Vec<f64> = (0..cfg.k * cfg.s).map(|_| rng.gen::<f64>() * 2e3).collect();
    PowerAllocation::new(eta, cfg.k, cfg.s).unwrap()
}

#[test]
fn signal_moment_matches_monte_carlo_at_3_sigma() {
    for scenario in 0..3u64 {
        let cfg = small_config(scenario);
        let geom = place_nodes(&cfg, &LayoutSpec::UniformRandom, 100 + scenario).unwrap();
        let stats = build_statistics(&cfg, &geom).unwrap();
        let phases = PhaseConfig::random(cfg.l, cfg.n(), 200 + scenario);
        let eta = random_eta(&cfg, 300 + scenario);

        let terms = closed_form_terms(&stats, &phases, &eta).unwrap();
        let mc = mc_signal_interference_moments(&stats, &phases, &eta, 100_000, 400 + scenario).unwrap();

        for k in 0..cfg.k {
            let dev = (terms.a[k] - mc.signal_mean[k]).abs();
            assert!(
                dev <= 3.0 * mc.signal_se[k],
                "scenario {scenario} user {k}: A = {} vs MC {} +- {} (z = {:.2})",
                terms.a[k],
                mc.signal_mean[k],
                mc.signal_se[k],
                dev / mc.signal_se[k]
            );
        }
    }
}

#[test]
fn interference_moment_matches_monte_carlo_at_3_sigma() {
    for scenario in 0..3u64 {
        let cfg = small_config(scenario);
        let geom = place_nodes(&cfg, &LayoutSpec::UniformRandom, 500 + scenario).unwrap();
        let stats = build_statistics(&cfg, &geom).unwrap();
        let phases = PhaseConfig::random(cfg.l, cfg.n(), 600 + scenario);
        let eta = random_eta(&cfg, 700 + scenario);

        let terms = closed_form_terms(&stats, &phases, &eta).unwrap();
        let mc = mc_signal_interference_moments(&stats, &phases, &eta, 100_000, 800 + scenario).unwrap();

        for k in 0..cfg.k {
            let dev = (terms.b_sum[k] - mc.interference_mean[k]).abs();
            assert!(
                dev <= 3.0 * mc.interference_se[k],
                "scenario {scenario} user {k}: B = {} vs MC {} +- {} (z = {:.2})",
                terms.b_sum[k],
                mc.interference_mean[k],
                mc.interference_se[k],
                dev / mc.interference_se[k]
            );
        }
    }
}

#[test]
fn nlos_special_case_reduction_is_exact_at_zero_k_factors() {
    let mut cfg = small_config(0);
    cfg.k_bs_ris = 0.0;
    cfg.k_ris_ue = 0.0;
    cfg.k_direct = 0.0;
    let geom = place_nodes(&cfg, &LayoutSpec::UniformRandom, 9).unwrap();
    let stats = build_statistics(&cfg, &geom).unwrap();
    let eta = random_eta(&cfg, 10);

    let nl = nlos_rate(&stats, &eta, &cfg).unwrap();
    for phase_seed in 0..5 {
        let phases = PhaseConfig::random(cfg.l, cfg.n(), phase_seed);
        let terms = closed_form_terms(&stats, &phases, &eta).unwrap();
        let full = closed_form_rate(&terms, &cfg);
        for k in 0..cfg.k {
            let rel = (full.rate[k] - nl.rate[k]).abs() / nl.rate[k].max(1e-300);
            assert!(rel < 1e-10, "user {k}: NLoS {} vs closed form {}", nl.rate[k], full.rate[k]);
        }
    }
    // Bit-identical output under phase change: the NLoS expression never
    // touches the phases.
    let again = nlos_rate(&stats, &eta, &cfg).unwrap();
    assert_eq!(nl.rate, again.rate);
}
