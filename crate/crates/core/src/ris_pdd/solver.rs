//! Penalty-dual-decomposition solver for the statistical phase design, and
//! the outer alternating loop that re-tightens the MSE surrogate.
//!
//! Inner loop: block-coordinate sweeps on the augmented objective
//! `G(u, x, z) = F(u, x) + (1/2 xi)(||x - u + xi l1||^2 + ||z - u + xi l2||^2)`.
//! The `u` and `x` subproblems are convex quadratics, solved per sweep by
//! warm-started preconditioned CG (every CG iteration is one O((LN)^2)
//! matvec and decreases the quadratic, so each sweep is monotone); the `z`
//! block has the closed-form unit-modulus projection. Outer loop:
//! multiplier ascent `l <- l + residual / xi` and geometric penalty decay
//! `xi <- c xi`.
//!
//! The phase-design wrapper alternates `(r, kappa)` updates with one PDD run
//! per round and accepts a candidate phase vector only when the closed-form
//! weighted sum-rate does not decrease, so the reported trace is monotone.

use crate::channel::{PhaseConfig, PowerAllocation};
use crate::error::CoreError;
use crate::linalg::{vec as cvec, C64};
use crate::rate::{closed_form_terms_cached, closed_form_wsr, RateCache};
use crate::ris_pdd::blocks::{assemble_blocks_cached, PddBlocks};
use crate::ris_pdd::objective::{eval_g, grad_g1, grad_g2, penalty, PddContext, QuadraticAssembly};
use crate::scenario::StatisticalCsi;
use crate::seqrng::mix;
use crate::wmmse;
use crate::Result;

/// Iteration state of the PDD loops.
#[derive(Debug, Clone)]
pub struct PddState {
    pub u: Vec<C64>,
    pub x: Vec<C64>,
    pub z: Vec<C64>,
    pub lambda1: Vec<C64>,
    pub lambda2: Vec<C64>,
    pub xi: f64,
    pub inner_iterations: usize,
    pub outer_iterations: usize,
}

impl PddState {
    /// Start from a consensus point `u0` with zero multipliers.
    pub fn from_phases(u0: &[C64], xi0: f64) -> Self {
        Self {
            u: u0.to_vec(),
            x: u0.to_vec(),
            z: u0.to_vec(),
            lambda1: cvec::zeros(u0.len()),
            lambda2: cvec::zeros(u0.len()),
            xi: xi0,
            inner_iterations: 0,
            outer_iterations: 0,
        }
    }

    pub fn residual_x(&self) -> f64 {
        cvec::norm2(&cvec::sub(&self.x, &self.u))
    }

    pub fn residual_z(&self) -> f64 {
        cvec::norm2(&cvec::sub(&self.z, &self.u))
    }
}

/// Solver options. The inner loop stops on a `1e-6` relative objective
/// change (or a vanishing sweep step) or 200 iterations; the outer loop
/// stops when `max(||x-u||^2, ||z-u||^2) < 1e-6 * LN`, with up to 60
/// penalty rounds to cover the scale-adaptive continuation.
#[derive(Debug, Clone)]
pub struct PddOpts {
    pub inner_max: usize,
    pub inner_tol: f64,
    pub outer_max: usize,
    pub outer_tol_per_element: f64,
    pub alg1_max: usize,
    pub alg1_tol: f64,
    pub xi0: f64,
    pub penalty_decay: f64,
    /// CG iterations per block solve inside one sweep.
    pub block_cg_iters: usize,
    /// Extra random restarts of the whole loop (best iterate kept).
    pub restarts: usize,
    /// Solve the `x` and `z` blocks concurrently. They are independent
    /// given the fresh `u`, so results are identical to the sequential
    /// sweep.
    pub parallel_blocks: bool,
    pub seed: u64,
}

impl Default for PddOpts {
    fn default() -> Self {
        Self {
            inner_max: 200,
            inner_tol: 1e-6,
            outer_max: 60,
            outer_tol_per_element: 1e-6,
            alg1_max: 8,
            alg1_tol: 1e-5,
            // Nonpositive selects the scale-adaptive start (see minimize_g).
            xi0: -1.0,
            penalty_decay: 0.7,
            block_cg_iters: 15,
            restarts: 1,
            parallel_blocks: false,
            seed: 0,
        }
    }
}

/// One multiplier/penalty update (the outer-loop step):
/// `l1 += (x - u)/xi`, `l2 += (z - u)/xi`, `xi *= c`.
pub fn outer_update(state: &mut PddState, penalty_decay: f64) {
    let xi = state.xi;
    for idx in 0..state.u.len() {
        state.lambda1[idx] += (state.x[idx] - state.u[idx]) / xi;
        state.lambda2[idx] += (state.z[idx] - state.u[idx]) / xi;
    }
    state.xi = penalty_decay * xi;
    state.outer_iterations += 1;
}

/// Closed-form unit-modulus block: `z = phase(u - xi * lambda2)`, mapping
/// zero entries to `1 + 0j`.
pub fn update_z(u: &[C64], lambda2: &[C64], xi: f64) -> Vec<C64> {
    u.iter()
        .zip(lambda2)
        .map(|(ui, li)| {
            let y = ui - xi * li;
            let r = y.norm();
            if r == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                y / r
            }
        })
        .collect()
}

/// Warm-started preconditioned conjugate-gradient solve of one block
/// subproblem `min_y y^H (H + curv I) y + 2 Re(tau'^H y) + c`, entered via
/// the current gradient. Jacobi preconditioning; every CG iteration
/// decreases the quadratic, so truncated solves keep the outer sweep
/// monotone.
fn pcg_block(quad: &QuadraticAssembly, y: &mut [C64], grad: &[C64], curv: f64, max_iters: usize) {
    let n = y.len();
    let precond = |r: &[C64]| -> Vec<C64> {
        (0..n).map(|i| r[i] / (quad.h.at(i, i).re + curv).max(1e-300)).collect()
    };
    let mut r: Vec<C64> = grad.iter().map(|g| -g).collect();
    let mut z = precond(&r);
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(ri, zi)| (ri.conj() * zi).re).sum();
    let rz0 = rz.abs().max(1e-300);
    for _ in 0..max_iters {
        if rz.abs() <= 1e-10 * rz0 || rz <= 0.0 {
            break;
        }
        let mut ap = quad.h.mul_vec(&p);
        for (api, pi) in ap.iter_mut().zip(&p) {
            *api += curv * pi;
        }
        let pap: f64 = p.iter().zip(&ap).map(|(pi, api)| (pi.conj() * api).re).sum();
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            y[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        z = precond(&r);
        let rz_new: f64 = r.iter().zip(&z).map(|(ri, zi)| (ri.conj() * zi).re).sum();
        let beta = rz_new / rz;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        rz = rz_new;
    }
}

/// Diagnostics of one PDD run.
#[derive(Debug, Clone)]
pub struct PddRun {
    pub state: PddState,
    pub converged: bool,
    pub g_trace: Vec<f64>,
}

/// Algorithm core: nested inner/outer loops minimizing `G` for fixed
/// `(r, kappa, eta)`.
///
/// A nonpositive `opts.xi0` selects the automatic start
/// `xi0 = 10 LN / tr(H)`, which makes the initial consensus penalty an
/// order of magnitude softer than the mean objective curvature (the
/// penalty weight starts weak and tightens geometrically).
pub fn minimize_g(ctx: &PddContext, u0: &[C64], opts: &PddOpts) -> PddRun {
    let ln = u0.len();
    let xi0 = if opts.xi0 > 0.0 {
        opts.xi0
    } else {
        let h = ctx.build_r_t_fast(u0);
        let trace = h.h.trace().re.max(1e-300);
        (10.0 * ln as f64 / trace).clamp(1e-6, 1e12)
    };
    let mut st = PddState::from_phases(u0, xi0);
    let mut g_trace = Vec::new();

    for _outer in 0..opts.outer_max {
        let mut g_prev = eval_g(ctx, &st.u, &st.x, &st.z, &st.lambda1, &st.lambda2, st.xi);
        g_trace.push(g_prev);
        let mut inner_converged = false;
        for _inner in 0..opts.inner_max {
            st.inner_iterations += 1;
            let (g_new, step_norm2) =
                sweep(ctx, &mut st, g_prev, opts.block_cg_iters, opts.parallel_blocks);
            g_trace.push(g_new);
            let drop = g_prev - g_new;
            let scale2 = cvec::norm2(&st.u) + cvec::norm2(&st.x) + cvec::norm2(&st.z);
            if drop.abs() <= opts.inner_tol * g_prev.abs().max(1e-300)
                || step_norm2 <= 1e-16 * scale2
            {
                inner_converged = true;
                break;
            }
            g_prev = g_new;
        }
        if inner_converged
            && st.residual_x().max(st.residual_z()) < opts.outer_tol_per_element * ln as f64
        {
            break;
        }
        outer_update(&mut st, opts.penalty_decay);
    }
    let converged =
        st.residual_x().max(st.residual_z()) < opts.outer_tol_per_element * ln as f64;
    PddRun { state: st, converged, g_trace }
}

/// One u/x/z sweep with exact delta accounting of `G`; returns the new `G`
/// and the squared norm of the combined update. After the `u` solve the `x`
/// and `z` blocks are mutually independent, so `parallel` evaluates them
/// concurrently with identical arithmetic.
fn sweep(
    ctx: &PddContext,
    st: &mut PddState,
    g_before: f64,
    cg_iters: usize,
    parallel: bool,
) -> (f64, f64) {
    let mut g = g_before;
    let mut step2 = 0.0;

    let quad_u = ctx.build_r_t_fast(&st.x);
    let gu = grad_g1(&quad_u, &st.u, &st.x, &st.z, &st.lambda1, &st.lambda2, st.xi);
    let before = quad_u.eval(&st.u) + penalty(&st.u, &st.x, &st.z, &st.lambda1, &st.lambda2, st.xi);
    let u_old = st.u.clone();
    pcg_block(&quad_u, &mut st.u, &gu, 1.0 / st.xi, cg_iters);
    step2 += cvec::norm2(&cvec::sub(&st.u, &u_old));
    let after = quad_u.eval(&st.u) + penalty(&st.u, &st.x, &st.z, &st.lambda1, &st.lambda2, st.xi);
    g += after - before;

    let pen_x = |x: &[C64], st: &PddState| -> f64 {
        let mut p = 0.0;
        for idx in 0..x.len() {
            p += (x[idx] - st.u[idx] + st.xi * st.lambda1[idx]).norm_sqr();
        }
        p / (2.0 * st.xi)
    };
    let pen_z = |z: &[C64], st: &PddState| -> f64 {
        let mut p = 0.0;
        for idx in 0..z.len() {
            p += (z[idx] - st.u[idx] + st.xi * st.lambda2[idx]).norm_sqr();
        }
        p / (2.0 * st.xi)
    };

    let solve_x = |st: &PddState| -> (Vec<C64>, f64) {
        let quad_x = ctx.build_q_a_fast(&st.u);
        let gx = grad_g2(&quad_x, &st.x, &st.u, &st.lambda1, st.xi);
        let before = quad_x.eval(&st.x) + pen_x(&st.x, st);
        let mut x_new = st.x.clone();
        pcg_block(&quad_x, &mut x_new, &gx, 0.5 / st.xi, cg_iters);
        let delta = quad_x.eval(&x_new) + pen_x(&x_new, st) - before;
        (x_new, delta)
    };
    let solve_z = |st: &PddState| -> (Vec<C64>, f64) {
        let z_new = update_z(&st.u, &st.lambda2, st.xi);
        let delta = pen_z(&z_new, st) - pen_z(&st.z, st);
        (z_new, delta)
    };

    let ((x_new, dgx), (z_new, dgz)) = if parallel {
        rayon::join(|| solve_x(st), || solve_z(st))
    } else {
        (solve_x(st), solve_z(st))
    };
    step2 += cvec::norm2(&cvec::sub(&x_new, &st.x)) + cvec::norm2(&cvec::sub(&z_new, &st.z));
    st.x = x_new;
    st.z = z_new;
    g += dgx + dgz;
    (g, step2)
}

/// One row of the phase-design trace.
#[derive(Debug, Clone)]
pub struct PhaseTraceRow {
    pub round: usize,
    /// Closed-form weighted sum-rate of the accepted iterate.
    pub objective: f64,
    pub residual_x: f64,
    pub residual_z: f64,
    pub xi: f64,
}

/// Outcome of the phase design.
#[derive(Debug, Clone)]
pub struct PhaseTrace {
    pub rows: Vec<PhaseTraceRow>,
    pub converged: bool,
    pub final_residual_x: f64,
    pub final_residual_z: f64,
}

impl PhaseTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,objective,residual_x,residual_z,xi\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.10e},{:.3e},{:.3e},{:.3e}\n",
                r.round, r.objective, r.residual_x, r.residual_z, r.xi
            ));
        }
        out
    }
}

/// Statistical-CSI phase design: alternate `(r, kappa)` updates with PDD
/// runs, accept candidates that do not decrease the closed-form weighted
/// sum-rate, and return the best unit-modulus configuration.
pub fn optimize_phases(
    stats: &StatisticalCsi,
    cache: &RateCache,
    eta: &PowerAllocation,
    init: &PhaseConfig,
    opts: &PddOpts,
) -> Result<(PhaseConfig, PhaseTrace)> {
    let cfg = &stats.config;
    if cfg.l == 0 {
        let terms = closed_form_terms_cached(stats, cache, init, eta)?;
        let wsr = closed_form_wsr(&terms);
        return Ok((
            init.clone(),
            PhaseTrace {
                rows: vec![PhaseTraceRow { round: 0, objective: wsr, residual_x: 0.0, residual_z: 0.0, xi: opts.xi0 }],
                converged: true,
                final_residual_x: 0.0,
                final_residual_z: 0.0,
            },
        ));
    }
    let blocks = assemble_blocks_cached(stats, cache);

    let mut best: Option<(PhaseConfig, f64)> = None;
    let mut rows = Vec::new();
    let mut converged = false;
    let mut final_rx = 0.0;
    let mut final_rz = 0.0;

    for restart in 0..opts.restarts.max(1) {
        let start = if restart == 0 {
            init.clone()
        } else {
            PhaseConfig::random(cfg.l, cfg.n(), mix(opts.seed, restart as u64))
        };
        let (phases, trace) = design_once(stats, cache, &blocks, eta, &start, opts)?;
        let terms = closed_form_terms_cached(stats, cache, &phases, eta)?;
        let wsr = closed_form_wsr(&terms);
        if best.as_ref().map_or(true, |(_, b)| wsr > *b) {
            best = Some((phases, wsr));
        }
        if restart == 0 {
            rows = trace.rows;
            converged = trace.converged;
            final_rx = trace.final_residual_x;
            final_rz = trace.final_residual_z;
        }
    }
    let (phases, _) = best.expect("at least one restart");
    Ok((phases, PhaseTrace { rows, converged, final_residual_x: final_rx, final_residual_z: final_rz }))
}

fn design_once(
    stats: &StatisticalCsi,
    cache: &RateCache,
    blocks: &PddBlocks,
    eta: &PowerAllocation,
    init: &PhaseConfig,
    opts: &PddOpts,
) -> Result<(PhaseConfig, PhaseTrace)> {
    let cfg = &stats.config;
    let (l, n) = (cfg.l, cfg.n());

    let mut current = init.clone();
    let mut terms = closed_form_terms_cached(stats, cache, &current, eta)?;
    let mut best_wsr = closed_form_wsr(&terms);
    let mut rows = Vec::new();
    let mut last_run: Option<PddRun> = None;

    for round in 0..opts.alg1_max {
        let ws = wmmse::update(&terms)?;
        let ctx = PddContext::new(blocks, eta, &ws.r, &ws.kappa, &cfg.mu, cfg.n0)?;
        let run = minimize_g(&ctx, current.stacked(), opts);
        let candidate = PhaseConfig::project(&run.state.u, l, n)?;
        let cand_terms = closed_form_terms_cached(stats, cache, &candidate, eta)?;
        let cand_wsr = closed_form_wsr(&cand_terms);

        let improved = cand_wsr >= best_wsr * (1.0 - 1e-12);
        if improved {
            current = candidate;
            terms = cand_terms;
        }
        rows.push(PhaseTraceRow {
            round,
            objective: if improved { cand_wsr } else { best_wsr },
            residual_x: run.state.residual_x(),
            residual_z: run.state.residual_z(),
            xi: run.state.xi,
        });
        let gain = if improved { cand_wsr - best_wsr } else { 0.0 };
        if improved {
            best_wsr = cand_wsr;
        }
        let stop = !improved || gain.abs() <= opts.alg1_tol * best_wsr.abs().max(1e-300);
        last_run = Some(run);
        if stop {
            break;
        }
    }

    let (converged, rx, rz) = match &last_run {
        Some(run) => (run.converged, run.state.residual_x(), run.state.residual_z()),
        None => (true, 0.0, 0.0),
    };
    if !converged && rx.max(rz) > 1e-3 * (l * n) as f64 {
        return Err(CoreError::NonConvergence {
            algorithm: "ris-pdd",
            detail: format!("consensus residuals x={rx:.3e} z={rz:.3e}"),
        });
    }
    Ok((current, PhaseTrace { rows, converged, final_residual_x: rx, final_residual_z: rz }))
}
