//! Diagnostics for the PDD loop at full scale (run with --ignored).

use cellfree_ris::channel::{PhaseConfig, PowerAllocation};
use cellfree_ris::rate::{build_rate_cache, closed_form_terms_cached, closed_form_wsr};
use cellfree_ris::ris_pdd::{assemble_blocks_cached, minimize_g, optimize_phases, PddContext, PddOpts};
use cellfree_ris::scenario::{build_statistics, default_config, place_nodes, LayoutSpec};
use cellfree_ris::wmmse;
use std::time::Instant;

#[test]
#[ignore]
fn profile_single_pdd_run() {
    let cfg = default_config();
    let geom = place_nodes(&cfg, &LayoutSpec::UniformRandom, 4).unwrap();
    let stats = build_statistics(&cfg, &geom).unwrap();
    let cache = build_rate_cache(&stats);
    let blocks = assemble_blocks_cached(&stats, &cache);
    let phases = PhaseConfig::random(cfg.l, cfg.n(), 9);
    let eta = PowerAllocation::new(vec![2e4; cfg.k * cfg.s], cfg.k, cfg.s).unwrap();
    let terms = closed_form_terms_cached(&stats, &cache, &phases, &eta).unwrap();
    println!("wsr before: {}", closed_form_wsr(&terms));
    let ws = wmmse::update(&terms).unwrap();
    let t0 = Instant::now();
    let ctx = PddContext::new(&blocks, &eta, &ws.r, &ws.kappa, &cfg.mu, cfg.n0).unwrap();
    println!("context build: {:?}", t0.elapsed());

    let opts = PddOpts { inner_max: 25, block_cg_iters: 10, ..Default::default() };
    let t1 = Instant::now();
    let run = minimize_g(&ctx, phases.stacked(), &opts);
    println!(
        "minimize_g: {:?}, inner iters {}, outers {}, converged {}",
        t1.elapsed(),
        run.state.inner_iterations,
        run.state.outer_iterations,
        run.converged
    );
    println!("g trace head: {:?}", &run.g_trace[..8.min(run.g_trace.len())]);
    println!("g trace tail: {:?}", &run.g_trace[run.g_trace.len().saturating_sub(6)..]);
    let projected = PhaseConfig::project(&run.state.u, cfg.l, cfg.n()).unwrap();
    let terms2 = closed_form_terms_cached(&stats, &cache, &projected, &eta).unwrap();
    println!("wsr after one PDD: {}", closed_form_wsr(&terms2));

    let t2 = Instant::now();
    let mut o2 = opts.clone();
    o2.alg1_max = 3;
    o2.alg1_tol = 1e-6;
    let (best, trace) = optimize_phases(&stats, &cache, &eta, &phases, &o2).unwrap();
    println!("optimize_phases: {:?}", t2.elapsed());
    for row in &trace.rows {
        println!(
            "round {} wsr {:.6} rx {:.2e} rz {:.2e}",
            row.round, row.objective, row.residual_x, row.residual_z
        );
    }
    let terms3 = closed_form_terms_cached(&stats, &cache, &best, &eta).unwrap();
    println!("final wsr: {}", closed_form_wsr(&terms3));
}
