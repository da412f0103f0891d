//! Experiment-level integration tests. The full cluster sweep mirrors the
//! with/without-RIS comparison at full scale and is ignored by
//! default (minutes of runtime); the smoke test keeps the pipeline honest
//! on every run.

use cellfree_ris::harness::{run_experiment, Algo, AoOpts, ExperimentSpec, SweepAxis};
use cellfree_ris::power_pds::PdsOpts;
use cellfree_ris::ris_pdd::PddOpts;
use cellfree_ris::scenario::{default_config, LayoutSpec};

fn fast_ao() -> AoOpts {
    AoOpts {
        max_rounds: 6,
        tol: 5e-3,
        pdd: PddOpts { inner_max: 15, alg1_max: 1, block_cg_iters: 8, penalty_decay: 0.5, ..Default::default() },
        alg1_first: 2,
        pds: PdsOpts { max_iters: 300, ..Default::default() },
        init_phases: None,
        seed: 0,
    }
}

#[test]
fn sweep_pipeline_smoke() {
    let mut cfg = default_config();
    cfg.s = 2;
    cfg.l = 1;
    cfg.m = 2;
    cfg.n_r = 2;
    cfg.n_c = 2;
    cfg.k = 2;
    cfg.mu = vec![1.0; 2];
    let spec = ExperimentSpec {
        base: cfg,
        layout: LayoutSpec::UniformRandom,
        axis: SweepAxis::PowerDbm(vec![0.0, 10.0]),
        algos: vec![Algo::Proposed, Algo::RandomPhases, Algo::NoRis],
        drops: 3,
        intervals: 3,
        seed: 7,
        ao: fast_ao(),
    };
    let result = run_experiment(&spec).unwrap();
    assert_eq!(result.rows.len(), 6);
    let csv = result.to_csv();
    assert!(csv.starts_with("sweep_value,algo,mean_wsr_bps_hz,stderr,iters_to_converge,wallclock_s\n"));
    for row in &result.rows {
        assert!(row.mean_wsr.is_finite() && row.mean_wsr > 0.0);
        assert_eq!(row.failures, 0);
        assert_eq!(row.per_drop.len(), 3);
    }
    // More transmit power never hurts the mean for a fixed algorithm.
    for algo in [Algo::Proposed, Algo::RandomPhases, Algo::NoRis] {
        let vals: Vec<f64> = result
            .rows
            .iter()
            .filter(|r| r.algo == algo)
            .map(|r| r.mean_wsr)
            .collect();
        assert!(vals[1] > vals[0], "{}: {vals:?}", algo.name());
    }
}

#[test]
fn das_and_centralized_variants_run() {
    let mut cfg = default_config();
    cfg.s = 2;
    cfg.l = 1;
    cfg.m = 2;
    cfg.n_r = 2;
    cfg.n_c = 1;
    cfg.k = 2;
    cfg.mu = vec![1.0; 2];
    let spec = ExperimentSpec {
        base: cfg,
        layout: LayoutSpec::UniformRandom,
        axis: SweepAxis::None,
        algos: vec![Algo::DasLayout, Algo::CentralizedLayout],
        drops: 2,
        intervals: 2,
        seed: 9,
        ao: fast_ao(),
    };
    let result = run_experiment(&spec).unwrap();
    assert_eq!(result.rows.len(), 2);
    for row in &result.rows {
        assert!(row.mean_wsr.is_finite() && row.mean_wsr > 0.0, "{}", row.algo.name());
    }
}

/// Users clustered along a line, with and without RISs: the RIS-assisted
/// runs must win at every sweep point (paired drops).
#[test]
#[ignore]
fn cluster_sweep_with_ris_dominates_without() {
    let mut cfg = default_config();
    cfg.k = 4;
    cfg.mu = vec![1.0; 4];
    // Tight tolerance: where the users sit far from a surface the RIS gain
    // is small, so the optimizer's stopping noise must sit well below it
    // for the point-wise comparison to be meaningful. The surfaces line the
    // sweep path, which is what creates the near-surface signal hot spots
    // this experiment looks for.
    let ao = AoOpts { tol: 2e-3, alg1_first: 4, ..Default::default() };
    let spec = ExperimentSpec {
        base: cfg,
        layout: LayoutSpec::UeClusterAt {
            x: 50.0,
            y: 50.0,
            bs: vec![],
            ris: vec![[20.0, 60.0], [50.0, 40.0], [80.0, 60.0]],
        },
        axis: SweepAxis::UeClusterX(vec![15.0, 35.0, 50.0, 65.0, 85.0]),
        algos: vec![Algo::Proposed, Algo::NoRis],
        drops: 20,
        intervals: 10,
        seed: 77,
        ao,
    };
    let result = run_experiment(&spec).unwrap();
    for x in [15.0, 35.0, 50.0, 65.0, 85.0] {
        let get = |algo: Algo| {
            result
                .rows
                .iter()
                .find(|r| r.algo == algo && (r.sweep_value - x).abs() < 1e-9)
                .map(|r| r.mean_wsr)
                .unwrap()
        };
        let with_ris = get(Algo::Proposed);
        let without = get(Algo::NoRis);
        println!("x = {x}: with RIS {with_ris:.3}, without {without:.3}");
        assert!(with_ris >= without, "x = {x}: {with_ris} < {without}");
    }
}
