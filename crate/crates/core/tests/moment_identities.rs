//! Moment-identity table: every implemented identity must sit within three
//! standard errors of its Monte-Carlo estimate on random small scenarios.

use cellfree_ris::channel::PhaseConfig;
use cellfree_ris::rate::{moment_oracle, moment_rows_to_csv};
use cellfree_ris::scenario::{build_statistics, default_config, place_nodes, LayoutSpec, SystemConfig};

fn small_config(mark: u64) -> SystemConfig {
    let mut cfg = default_config();
    cfg.s = 2;
    cfg.l = 2;
    cfg.m = 2;
    cfg.n_r = 2;
    cfg.n_c = 2;
    cfg.k = 2;
    cfg.mu = vec![1.0; 2];
    cfg.k_bs_ris = 0.7 + (mark % 4) as f64;
    cfg.k_ris_ue = 1.3 + (mark % 3) as f64;
    cfg.k_direct = 0.2 + (mark % 5) as f64;
    cfg
}

#[test]
fn identities_pass_three_sigma_on_random_scenarios() {
    for mark in 0..2u64 {
        let cfg = small_config(mark);
        let geom = place_nodes(&cfg, &LayoutSpec::UniformRandom, 40 + mark).unwrap();
        let stats = build_statistics(&cfg, &geom).unwrap();
        let phases = PhaseConfig::random(cfg.l, cfg.n(), 50 + mark);
        let rows = moment_oracle(&stats, &phases, 10_000, 60 + mark).unwrap();
        assert!(rows.len() >= 12, "expected a full identity table, got {}", rows.len());
        for row in &rows {
            assert!(
                row.z <= 3.0,
                "scenario {mark}: identity {} failed, analytic {:.6e} empirical {:.6e} se {:.2e} z {:.2}",
                row.identity,
                row.analytic,
                row.empirical,
                row.se,
                row.z
            );
        }
        let csv = moment_rows_to_csv(&rows);
        assert!(csv.starts_with("identity,analytic,empirical,se,z\n"));
    }
}

#[test]
fn oracle_rejects_tiny_sample_counts() {
    let cfg = small_config(0);
    let geom = place_nodes(&cfg, &LayoutSpec::UniformRandom, 1).unwrap();
    let stats = build_statistics(&cfg, &geom).unwrap();
    let phases = PhaseConfig::identity(cfg.l, cfg.n());
    assert!(moment_oracle(&stats, &phases, 10, 0).is_err());
}
