//! Instantaneous-CSI power allocation: fractional-programming transforms,
//! QCQP assembly, and a primal-dual subgradient iteration on the augmented
//! Lagrangian of the per-BS power constraints.
//!
//! The optimization variable is the real vector
//! `eta_bar = [sqrt(eta_11), ..., sqrt(eta_KS)]` in user-major order. Two
//! auxiliary updates linearize the weighted sum-rate: `epsilon_k = gamma_k`
//! moves the SINRs out of the logarithms, and the quadratic-transform
//! scalars `y_k` turn the ratio objective into the QCQP
//! `min f(eta_bar) = eta_bar^T Xi eta_bar - 2 Re(varpi^T eta_bar) + delta`
//! subject to `eta_bar^T Pi_s eta_bar <= P_max`.
//!
//! Rates are in bits; the dual-transform surrogate carries the `1/ln 2`
//! factors required for its stationary point to sit at `epsilon = gamma`.

use crate::channel::{EffectiveChannels, PowerAllocation};
use crate::error::CoreError;
use crate::linalg::{vec as cvec, C64, CMat};
use crate::rate::signal_interference;
use crate::scenario::SystemConfig;
use crate::Result;
use std::f64::consts::LN_2;

/// Primal/dual iterates of the PDS loop.
#[derive(Debug, Clone)]
pub struct PdsState {
    /// `sqrt(eta_ks)` in user-major order (`k * S + s`).
    pub eta_bar: Vec<f64>,
    /// Per-BS multipliers, nonnegative.
    pub zeta: Vec<f64>,
    /// Penalty weight of the augmented Lagrangian.
    pub rho: f64,
    /// Current step size.
    pub alpha: f64,
    /// SINR auxiliaries (`epsilon = gamma` at the update point).
    pub epsilon: Vec<f64>,
    /// Quadratic-transform auxiliaries.
    pub y: Vec<C64>,
}

/// QCQP data for fixed `(epsilon, y)`.
#[derive(Debug, Clone)]
pub struct QcqpData {
    /// Block-diagonal PSD matrix, `KS x KS` (complex Hermitian; the
    /// optimization uses its real part since `eta_bar` is real).
    pub xi: CMat,
    /// Linear coefficient vector.
    pub varpi: Vec<C64>,
    /// Constant `sum_k |y_k|^2 N0`.
    pub delta: f64,
    /// Diagonal of each per-BS constraint matrix `Pi_s` (length `KS`).
    pub pi_diag: Vec<Vec<f64>>,
    pub k: usize,
    pub s: usize,
}

impl QcqpData {
    /// `f(eta_bar) = eta_bar^T Xi eta_bar - 2 Re(varpi^T eta_bar) + delta`.
    pub fn objective(&self, eta_bar: &[f64]) -> f64 {
        let y: Vec<C64> = eta_bar.iter().map(|&e| C64::new(e, 0.0)).collect();
        let xy = self.xi.mul_vec(&y);
        let quad: f64 = y.iter().zip(&xy).map(|(a, b)| (a.conj() * b).re).sum();
        let lin: f64 = self.varpi.iter().zip(eta_bar).map(|(v, e)| v.re * e).sum();
        quad - 2.0 * lin + self.delta
    }

    /// `g_s(eta_bar) = eta_bar^T Pi_s eta_bar - p_max`.
    pub fn constraint(&self, eta_bar: &[f64], s: usize, p_max: f64) -> f64 {
        self.pi_diag[s].iter().zip(eta_bar).map(|(p, e)| p * e * e).sum::<f64>() - p_max
    }
}

/// Instantaneous SINRs under MR precoding (the shared rate-module
/// definition).
pub fn compute_gamma(eff: &EffectiveChannels, eta: &PowerAllocation, n0: f64) -> Vec<f64> {
    (0..eff.k)
        .map(|k| {
            let (sig, int) = signal_interference(eff, eta, k);
            sig / (int + n0)
        })
        .collect()
}

/// Lagrangian-dual auxiliaries: `epsilon = gamma` elementwise.
pub fn dual_transform_eps(gamma: &[f64]) -> Vec<f64> {
    gamma.to_vec()
}

/// The dual-transform surrogate in bits:
/// `sum_k mu_k [log2(1 + eps_k) + (-eps_k + (1 + eps_k) gamma_k / (1 + gamma_k)) / ln 2]`.
pub fn dual_transform_surrogate(gamma: &[f64], epsilon: &[f64], mu: &[f64]) -> f64 {
    gamma
        .iter()
        .zip(epsilon)
        .zip(mu)
        .map(|((&g, &e), &m)| {
            m * ((1.0 + e).log2() + (-e + (1.0 + e) * g / (1.0 + g)) / LN_2)
        })
        .sum()
}

/// Quadratic-transform auxiliaries
/// `y_k = sqrt(mu_k (1 + eps_k)) sum_s sqrt(eta_ks) ||h_ks||^2 / (sum_i |...|^2 + N0)`.
pub fn quadratic_transform_y(
    eff: &EffectiveChannels,
    eta: &PowerAllocation,
    epsilon: &[f64],
    mu: &[f64],
    n0: f64,
) -> Result<Vec<C64>> {
    (0..eff.k)
        .map(|k| {
            let (sig, int) = signal_interference(eff, eta, k);
            let den = sig + int + n0;
            if !(den > 0.0) {
                return Err(CoreError::Power(format!("user {k}: zero quadratic-transform denominator")));
            }
            // sig = (sum_s sqrt(eta) ||h||^2)^2; the numerator is its root.
            Ok(C64::new((mu[k] * (1.0 + epsilon[k])).sqrt() * sig.sqrt() / den, 0.0))
        })
        .collect()
}

/// The quadratic-transform surrogate
/// `sum_k 2 sqrt(mu_k (1+eps_k)) Re(y_k^* a_k) - |y_k|^2 (b_k + N0)` with
/// `a_k` the coherent amplitude and `b_k` the full (self-inclusive)
/// interference power.
pub fn quadratic_transform_surrogate(
    eff: &EffectiveChannels,
    eta: &PowerAllocation,
    epsilon: &[f64],
    y: &[C64],
    mu: &[f64],
    n0: f64,
) -> f64 {
    let mut total = 0.0;
    for k in 0..eff.k {
        let (sig, int) = signal_interference(eff, eta, k);
        let den = sig + int + n0;
        total += 2.0 * (mu[k] * (1.0 + epsilon[k])).sqrt() * (y[k].conj() * sig.sqrt()).re
            - y[k].norm_sqr() * den;
    }
    total
}

/// Assemble the QCQP for fixed `(epsilon, y)`.
pub fn assemble_qcqp(
    eff: &EffectiveChannels,
    epsilon: &[f64],
    y: &[C64],
    mu: &[f64],
    n0: f64,
) -> QcqpData {
    let (k_count, s_count) = (eff.k, eff.s);
    let dim = k_count * s_count;
    let mut xi = CMat::zeros(dim, dim);
    // D_i = sum_k |y_k|^2 d_ki d_ki^H with d_ki[s] = h_ks^T h_is^*.
    for i in 0..k_count {
        for k in 0..k_count {
            let w = y[k].norm_sqr();
            if w == 0.0 {
                continue;
            }
            let d_ki: Vec<C64> =
                (0..s_count).map(|s| cvec::dot_h(eff.h_ks(i, s), eff.h_ks(k, s))).collect();
            for a in 0..s_count {
                for b in 0..s_count {
                    let idx = (i * s_count + a) * dim + i * s_count + b;
                    xi.data[idx] += w * d_ki[a] * d_ki[b].conj();
                }
            }
        }
    }
    let mut varpi = Vec::with_capacity(dim);
    for k in 0..k_count {
        let w = (mu[k] * (1.0 + epsilon[k])).sqrt() * y[k].conj();
        for s in 0..s_count {
            varpi.push(w * cvec::norm2(eff.h_ks(k, s)));
        }
    }
    let delta = y.iter().map(|yk| yk.norm_sqr()).sum::<f64>() * n0;
    let mut pi_diag = Vec::with_capacity(s_count);
    for s in 0..s_count {
        let mut diag = vec![0.0; dim];
        for k in 0..k_count {
            diag[k * s_count + s] = cvec::norm2(eff.h_ks(k, s));
        }
        pi_diag.push(diag);
    }
    QcqpData { xi, varpi, delta, pi_diag, k: k_count, s: s_count }
}

/// Augmented Lagrangian
/// `L = f + zeta^T g+ + (rho/2) ||g+||^2` with `g_s+ = max(0, g_s)`.
pub fn lagrangian(qcqp: &QcqpData, eta_bar: &[f64], zeta: &[f64], rho: f64, p_max: f64) -> f64 {
    let mut val = qcqp.objective(eta_bar);
    for s in 0..qcqp.s {
        let g = qcqp.constraint(eta_bar, s, p_max).max(0.0);
        val += zeta[s] * g + 0.5 * rho * g * g;
    }
    val
}

/// Real gradient of the augmented Lagrangian in `eta_bar` (the `omega_s`
/// case split uses the zero branch at the kink `g_s = 0`).
pub fn lagrangian_grad(
    qcqp: &QcqpData,
    eta_bar: &[f64],
    zeta: &[f64],
    rho: f64,
    p_max: f64,
) -> Vec<f64> {
    let y: Vec<C64> = eta_bar.iter().map(|&e| C64::new(e, 0.0)).collect();
    let xy = qcqp.xi.mul_vec(&y);
    let mut grad: Vec<f64> = (0..eta_bar.len()).map(|j| 2.0 * xy[j].re - 2.0 * qcqp.varpi[j].re).collect();
    for s in 0..qcqp.s {
        let g = qcqp.constraint(eta_bar, s, p_max);
        if g > 0.0 {
            let w = zeta[s] + rho * g;
            for (j, gj) in grad.iter_mut().enumerate() {
                *gj += w * 2.0 * qcqp.pi_diag[s][j] * eta_bar[j];
            }
        }
    }
    grad
}

/// One simultaneous primal-descent / dual-ascent step with projections onto
/// the nonnegative orthants.
pub fn pds_step(state: &mut PdsState, qcqp: &QcqpData, p_max: f64) {
    let grad = lagrangian_grad(qcqp, &state.eta_bar, &state.zeta, state.rho, p_max);
    let g_plus: Vec<f64> =
        (0..qcqp.s).map(|s| qcqp.constraint(&state.eta_bar, s, p_max).max(0.0)).collect();
    for (e, g) in state.eta_bar.iter_mut().zip(&grad) {
        *e = (*e - state.alpha * g).max(0.0);
    }
    for (z, g) in state.zeta.iter_mut().zip(&g_plus) {
        *z = (*z + state.alpha * g).max(0.0);
    }
}

/// Options for [`optimize_power`].
#[derive(Debug, Clone)]
pub struct PdsOpts {
    pub max_iters: usize,
    pub tol: f64,
    pub rho: f64,
    pub alpha0: f64,
}

impl Default for PdsOpts {
    fn default() -> Self {
        Self { max_iters: 500, tol: 1e-6, rho: 10.0, alpha0: 1e-3 }
    }
}

/// Trace of the power optimization.
#[derive(Debug, Clone)]
pub struct PowerTrace {
    /// Weighted sum-rate of the incumbent (best feasible) allocation.
    pub objective: Vec<f64>,
    /// Maximum relative constraint violation of the raw iterate.
    pub max_violation: Vec<f64>,
    pub step: Vec<f64>,
    pub iterations: usize,
}

impl PowerTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,objective,max_violation,step\n");
        for i in 0..self.objective.len() {
            out.push_str(&format!(
                "{},{:.10e},{:.3e},{:.3e}\n",
                i, self.objective[i], self.max_violation[i], self.step[i]
            ));
        }
        out
    }
}

/// Scale each BS column of `eta_bar` onto its power budget.
fn project_feasible(eff: &EffectiveChannels, eta_bar: &[f64], p_max: f64) -> Vec<f64> {
    let (k_count, s_count) = (eff.k, eff.s);
    let mut out = eta_bar.to_vec();
    for s in 0..s_count {
        let load: f64 =
            (0..k_count).map(|k| out[k * s_count + s].powi(2) * cvec::norm2(eff.h_ks(k, s))).sum();
        if load > p_max {
            let scale = (p_max / load).sqrt();
            for k in 0..k_count {
                out[k * s_count + s] *= scale;
            }
        }
    }
    out
}

fn wsr(eff: &EffectiveChannels, eta_bar: &[f64], config: &SystemConfig) -> f64 {
    let eta: Vec<f64> = eta_bar.iter().map(|e| e * e).collect();
    let alloc = PowerAllocation { eta, k: eff.k, s: eff.s };
    (0..eff.k)
        .map(|k| {
            let (sig, int) = signal_interference(eff, &alloc, k);
            config.mu[k] * (1.0 + sig / (int + config.n0)).log2()
        })
        .sum()
}

/// Equal-received-power start: `eta_ks = P_max / (K ||h_ks||^2)`.
pub fn equal_power_init(eff: &EffectiveChannels, p_max: f64) -> PowerAllocation {
    let mut eta = vec![0.0; eff.k * eff.s];
    for k in 0..eff.k {
        for s in 0..eff.s {
            eta[k * eff.s + s] = p_max / (eff.k as f64 * cvec::norm2(eff.h_ks(k, s)));
        }
    }
    PowerAllocation { eta, k: eff.k, s: eff.s }
}

/// Per-interval power design: iterate `(epsilon, y)` updates, QCQP assembly,
/// and one PDS step, keeping the best feasible allocation seen. The weighted
/// sum-rate is not concave in `eta_bar`, so the solver restarts from the
/// supplied point, the equal-power point, and each single-user allocation,
/// returning the best run. The returned allocation satisfies every per-BS
/// budget within `1e-6` relative.
pub fn optimize_power(
    eff: &EffectiveChannels,
    init: &PowerAllocation,
    config: &SystemConfig,
    opts: &PdsOpts,
) -> Result<(PowerAllocation, PowerTrace)> {
    if init.k != eff.k || init.s != eff.s {
        return Err(CoreError::Dimension("init allocation does not match channels".into()));
    }
    let mut starts = vec![init.clone(), equal_power_init(eff, config.p_max)];
    for k in 0..eff.k {
        let mut eta = vec![0.0; eff.k * eff.s];
        for s in 0..eff.s {
            eta[k * eff.s + s] = config.p_max / cvec::norm2(eff.h_ks(k, s));
        }
        starts.push(PowerAllocation { eta, k: eff.k, s: eff.s });
    }
    // Pairwise splits reach optima that park the power on two users; the
    // sum-rate along a pair's budget line can hold several stationary
    // points, so seed three ratios per pair.
    if eff.k >= 3 && eff.k <= 8 {
        for a in 0..eff.k {
            for b in (a + 1)..eff.k {
                for t in [0.25, 0.5, 0.75] {
                    let mut eta = vec![0.0; eff.k * eff.s];
                    for s in 0..eff.s {
                        eta[a * eff.s + s] = t * config.p_max / cvec::norm2(eff.h_ks(a, s));
                        eta[b * eff.s + s] = (1.0 - t) * config.p_max / cvec::norm2(eff.h_ks(b, s));
                    }
                    starts.push(PowerAllocation { eta, k: eff.k, s: eff.s });
                }
            }
        }
    }
    let mut best: Option<(PowerAllocation, PowerTrace, f64)> = None;
    for start in &starts {
        let (eta, trace) = optimize_power_single(eff, start, config, opts)?;
        let value = *trace.objective.last().unwrap_or(&0.0);
        if best.as_ref().map_or(true, |(_, _, b)| value > *b) {
            best = Some((eta, trace, value));
        }
    }
    let (eta, trace, _) = best.expect("at least one start");
    Ok((eta, trace))
}

fn optimize_power_single(
    eff: &EffectiveChannels,
    init: &PowerAllocation,
    config: &SystemConfig,
    opts: &PdsOpts,
) -> Result<(PowerAllocation, PowerTrace)> {
    let (k_count, s_count) = (eff.k, eff.s);
    let p_max = config.p_max;

    let start = project_feasible(eff, &init.eta.iter().map(|e| e.sqrt()).collect::<Vec<_>>(), p_max);
    let mut state = PdsState {
        eta_bar: start.clone(),
        zeta: vec![0.0; s_count],
        rho: opts.rho,
        alpha: opts.alpha0,
        epsilon: vec![0.0; k_count],
        y: vec![C64::new(0.0, 0.0); k_count],
    };

    let mut best_bar = start;
    let mut best_wsr = wsr(eff, &best_bar, config);
    let mut objective = vec![best_wsr];
    let mut max_violation = vec![0.0];
    let mut steps = vec![state.alpha];
    let mut iterations = 0;

    for _iter in 0..opts.max_iters {
        iterations += 1;
        let eta = PowerAllocation {
            eta: state.eta_bar.iter().map(|e| e * e).collect(),
            k: k_count,
            s: s_count,
        };
        let gamma = compute_gamma(eff, &eta, config.n0);
        state.epsilon = dual_transform_eps(&gamma);
        state.y = quadratic_transform_y(eff, &eta, &state.epsilon, &config.mu, config.n0)?;
        let qcqp = assemble_qcqp(eff, &state.epsilon, &state.y, &config.mu, config.n0);

        // Backtracking on the augmented Lagrangian for the primal step.
        let l0 = lagrangian(&qcqp, &state.eta_bar, &state.zeta, state.rho, p_max);
        let mut alpha = state.alpha;
        let mut accepted = false;
        for _ in 0..60 {
            let mut trial = state.clone();
            trial.alpha = alpha;
            pds_step(&mut trial, &qcqp, p_max);
            let l1 = lagrangian(&qcqp, &trial.eta_bar, &trial.zeta, trial.rho, p_max);
            if l1 <= l0 {
                state = trial;
                state.alpha = alpha * 2.0;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            state.alpha = alpha;
        }

        let feasible = project_feasible(eff, &state.eta_bar, p_max);
        let cand_wsr = wsr(eff, &feasible, config);
        let viol = (0..s_count)
            .map(|s|

                {
                    let load: f64 = (0..k_count)
                        .map(|k| state.eta_bar[k * s_count + s].powi(2) * cvec::norm2(eff.h_ks(k, s)))
                        .sum();
                    (load / p_max - 1.0).max(0.0)
                })
            .fold(0.0f64, f64::max);

        let improved = cand_wsr > best_wsr;
        if improved {
            best_wsr = cand_wsr;
            best_bar = feasible;
        }
        objective.push(best_wsr);
        max_violation.push(viol);
        steps.push(state.alpha);

        // Stop once the incumbent has been flat for a sustained stretch.
        let window = objective.len().saturating_sub(25);
        let rel_change = (objective[objective.len() - 1] - objective[window]).abs()
            / objective[window].abs().max(1e-300);
        if iterations > 30 && rel_change < opts.tol && viol < opts.tol {
            break;
        }
    }

    let eta = PowerAllocation {
        eta: best_bar.iter().map(|e| e * e).collect(),
        k: k_count,
        s: s_count,
    };
    // The incumbent is feasible by construction; double-check.
    if !eta.is_feasible(eff, p_max, 1e-6) {
        return Err(CoreError::NonConvergence {
            algorithm: "power-pds",
            detail: format!("constraint residuals {:?}", eta.bs_loads(eff)),
        });
    }
    Ok((eta, PowerTrace { objective, max_violation, step: steps, iterations }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{effective_channel, sample_channels, PhaseConfig};
    use crate::rate::instantaneous_rate;
    use crate::scenario::{build_statistics, default_config, place_nodes, LayoutSpec, SystemConfig};
    use rand::Rng;

    fn tiny_config(k: usize, s: usize) -> SystemConfig {
        let mut cfg = default_config();
        cfg.k = k;
        cfg.s = s;
        cfg.mu = vec![1.0; k];
        cfg.m = 2;
        cfg.l = 1;
        cfg.n_r = 2;
        cfg.n_c = 1;
        cfg
    }

    fn effective(cfg: &SystemConfig, seed: u64) -> EffectiveChannels {
        let geom = place_nodes(cfg, &LayoutSpec::UniformRandom, seed).unwrap();
        let stats = build_statistics(cfg, &geom).unwrap();
        let real = sample_channels(&stats, seed + 1);
        effective_channel(&real, &PhaseConfig::random(cfg.l, cfg.n(), seed + 2)).unwrap()
    }

    #[test]
    fn gamma_matches_rate_module() {
        let cfg = default_config();
        let geom = place_nodes(&cfg, &LayoutSpec::UniformRandom, 60).unwrap();
        let stats = build_statistics(&cfg, &geom).unwrap();
        let real = sample_channels(&stats, 61);
        let eff = effective_channel(&real, &PhaseConfig::random(cfg.l, cfg.n(), 62)).unwrap();
        let mut rng = crate::seqrng::rng_for(63, 0);
        let eta = PowerAllocation::new(
            (0..cfg.k * cfg.s).map(|_| rng.gen::<f64>() * 1e4).collect(),
            cfg.k,
            cfg.s,
        )
        .unwrap();
        let gamma = compute_gamma(&eff, &eta, cfg.n0);
        let report = instantaneous_rate(&eff, &eta, &cfg).unwrap();
        for k in 0..cfg.k {
            assert!((gamma[k] - report.sinr[k]).abs() <= 1e-12 * report.sinr[k]);
        }
        // Zero power, zero SINR.
        let zero = compute_gamma(&eff, &PowerAllocation::zeros(cfg.k, cfg.s), cfg.n0);
        assert!(zero.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn dual_transform_identity_and_stationarity() {
        let gamma = vec![1.0, 2.0];
        let eps = dual_transform_eps(&gamma);
        assert_eq!(eps, gamma);
        let mu = vec![1.0, 1.5];
        let at_opt = dual_transform_surrogate(&gamma, &eps, &mu);
        let truth: f64 =
            gamma.iter().zip(&mu).map(|(&g, &m)| m * (1.0 + g).log2()).sum();
        assert!((at_opt - truth).abs() < 1e-12);
        // Perturbing epsilon decreases the surrogate.
        for k in 0..2 {
            for delta in [-0.05, 0.05] {
                let mut e2 = eps.clone();
                e2[k] += delta;
                assert!(dual_transform_surrogate(&gamma, &e2, &mu) < at_opt);
            }
        }
    }

    #[test]
    fn quadratic_transform_identities() {
        let cfg = tiny_config(2, 2);
        let eff = effective(&cfg, 70);
        let mut rng = crate::seqrng::rng_for(71, 0);
        for trial in 0..10 {
            let eta = PowerAllocation::new(
                (0..cfg.k * cfg.s).map(|_| rng.gen::<f64>() * 1e4).collect(),
                cfg.k,
                cfg.s,
            )
            .unwrap();
            let gamma = compute_gamma(&eff, &eta, cfg.n0);
            let eps = dual_transform_eps(&gamma);
            let y = quadratic_transform_y(&eff, &eta, &eps, &cfg.mu, cfg.n0).unwrap();
            let at_opt = quadratic_transform_surrogate(&eff, &eta, &eps, &y, &cfg.mu, cfg.n0);
            // Optimal-y value equals sum (1 + eps) mu sig / (sig + int + N0).
            let mut want = 0.0;
            for k in 0..cfg.k {
                let (sig, int) = signal_interference(&eff, &eta, k);
                want += cfg.mu[k] * (1.0 + eps[k]) * sig / (sig + int + cfg.n0);
            }
            assert!(
                (at_opt - want).abs() <= 1e-10 * want.abs().max(1e-30),
                "trial {trial}: {at_opt} vs {want}"
            );
            // eta = 0 gives y = 0.
            let zero = PowerAllocation::zeros(cfg.k, cfg.s);
            let y0 =
                quadratic_transform_y(&eff, &zero, &vec![0.0; cfg.k], &cfg.mu, cfg.n0).unwrap();
            assert!(y0.iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn qcqp_matches_negated_surrogate() {
        let cfg = tiny_config(2, 2);
        let eff = effective(&cfg, 80);
        let mut rng = crate::seqrng::rng_for(81, 0);
        let base = PowerAllocation::new(
            (0..cfg.k * cfg.s).map(|_| rng.gen::<f64>() * 1e4).collect(),
            cfg.k,
            cfg.s,
        )
        .unwrap();
        let gamma = compute_gamma(&eff, &base, cfg.n0);
        let eps = dual_transform_eps(&gamma);
        let y = quadratic_transform_y(&eff, &base, &eps, &cfg.mu, cfg.n0).unwrap();
        let qcqp = assemble_qcqp(&eff, &eps, &y, &cfg.mu, cfg.n0);

        for _ in 0..50 {
            let eta_bar: Vec<f64> = (0..cfg.k * cfg.s).map(|_| rng.gen::<f64>() * 200.0).collect();
            let eta = PowerAllocation {
                eta: eta_bar.iter().map(|e| e * e).collect(),
                k: cfg.k,
                s: cfg.s,
            };
            let f = qcqp.objective(&eta_bar);
            let surr = quadratic_transform_surrogate(&eff, &eta, &eps, &y, &cfg.mu, cfg.n0);
            assert!(
                (f + surr).abs() <= 1e-10 * surr.abs().max(1e-30),
                "f = {f}, surrogate = {surr}"
            );
            // Pi quadratic form equals the BS load.
            for s in 0..cfg.s {
                let quad: f64 = qcqp.pi_diag[s]
                    .iter()
                    .zip(&eta_bar)
                    .map(|(p, e)| p * e * e)
                    .sum();
                let load: f64 = (0..cfg.k)
                    .map(|k| eta.get(k, s) * cvec::norm2(eff.h_ks(k, s)))
                    .sum();
                assert!((quad - load).abs() <= 1e-12 * load.max(1e-30));
            }
        }
    }

    #[test]
    fn single_user_single_bs_xi_is_scalar_norm4() {
        let cfg = tiny_config(1, 1);
        let eff = effective(&cfg, 90);
        let y = vec![C64::new(0.7, -0.2)];
        let qcqp = assemble_qcqp(&eff, &[1.5], &y, &cfg.mu, cfg.n0);
        let h4 = cvec::norm2(eff.h_ks(0, 0)).powi(2);
        assert!((qcqp.xi.at(0, 0).re - y[0].norm_sqr() * h4).abs() <= 1e-12 * h4);
        assert!(qcqp.xi.at(0, 0).im.abs() <= 1e-15 * h4);
    }

    #[test]
    fn xi_is_positive_semidefinite() {
        let cfg = tiny_config(3, 2);
        let mut rng = crate::seqrng::rng_for(91, 0);
        for trial in 0..20 {
            let eff = effective(&cfg, 92 + trial);
            let eps: Vec<f64> = (0..cfg.k).map(|_| rng.gen::<f64>() * 10.0).collect();
            let y: Vec<C64> =
                (0..cfg.k).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
            let qcqp = assemble_qcqp(&eff, &eps, &y, &cfg.mu, cfg.n0);
            for _ in 0..10 {
                let v: Vec<C64> = (0..cfg.k * cfg.s)
                    .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                    .collect();
                let xv = qcqp.xi.mul_vec(&v);
                let q: f64 = v.iter().zip(&xv).map(|(a, b)| (a.conj() * b).re).sum();
                let scale = qcqp.xi.frobenius_norm() * cvec::norm2(&v);
                assert!(q >= -1e-9 * scale);
            }
        }
    }

    #[test]
    fn pds_step_branches() {
        let cfg = tiny_config(1, 1);
        let eff = effective(&cfg, 95);
        let h2 = cvec::norm2(eff.h_ks(0, 0));
        let y = vec![C64::new(1.0, 0.0)];
        let qcqp = assemble_qcqp(&eff, &[1.0], &y, &cfg.mu, cfg.n0);
        let p_max = cfg.p_max;

        // Interior point, zero multiplier: dual unchanged, primal follows
        // the unconstrained gradient.
        let eta_int = (0.25 * p_max / h2).sqrt();
        let mut st = PdsState {
            eta_bar: vec![eta_int],
            zeta: vec![0.0],
            rho: 1.0,
            alpha: 1e-9,
            epsilon: vec![1.0],
            y,
        };
        let grad = lagrangian_grad(&qcqp, &st.eta_bar, &st.zeta, st.rho, p_max);
        let unconstrained = 2.0 * qcqp.xi.at(0, 0).re * eta_int - 2.0 * qcqp.varpi[0].re;
        assert!((grad[0] - unconstrained).abs() <= 1e-12 * unconstrained.abs().max(1e-30));
        let before = st.eta_bar[0];
        pds_step(&mut st, &qcqp, p_max);
        assert_eq!(st.zeta[0], 0.0);
        assert!((st.eta_bar[0] - (before - st.alpha * grad[0])).abs() < 1e-18);

        // Violated constraint: dual increases by alpha * g+.
        let eta_out = (4.0 * p_max / h2).sqrt();
        let mut st2 = PdsState {
            eta_bar: vec![eta_out],
            zeta: vec![0.0],
            rho: 1.0,
            alpha: 1e-9,
            epsilon: vec![1.0],
            y: vec![C64::new(1.0, 0.0)],
        };
        let g = qcqp.constraint(&st2.eta_bar, 0, p_max);
        assert!(g > 0.0);
        pds_step(&mut st2, &qcqp, p_max);
        assert!((st2.zeta[0] - st2.alpha * g).abs() <= 1e-18);
    }

    #[test]
    fn lagrangian_gradient_matches_finite_differences() {
        let cfg = tiny_config(2, 2);
        let eff = effective(&cfg, 96);
        let mut rng = crate::seqrng::rng_for(97, 0);
        let base = PowerAllocation::new(
            (0..cfg.k * cfg.s).map(|_| rng.gen::<f64>() * 1e4).collect(),
            cfg.k,
            cfg.s,
        )
        .unwrap();
        let gamma = compute_gamma(&eff, &base, cfg.n0);
        let eps = dual_transform_eps(&gamma);
        let y = quadratic_transform_y(&eff, &base, &eps, &cfg.mu, cfg.n0).unwrap();
        let qcqp = assemble_qcqp(&eff, &eps, &y, &cfg.mu, cfg.n0);
        let zeta = vec![0.3, 0.9];
        let rho = 7.0;

        let mut checked = 0;
        let dim = cfg.k * cfg.s;
        'outer: for trial in 0..200 {
            let eta_bar: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() * 300.0).collect();
            // Exclude points near the kink for any BS.
            for s in 0..cfg.s {
                let g = qcqp.constraint(&eta_bar, s, cfg.p_max);
                if g.abs() < 1e-3 * cfg.p_max {
                    continue 'outer;
                }
            }
            let grad = lagrangian_grad(&qcqp, &eta_bar, &zeta, rho, cfg.p_max);
            let scale: f64 = eta_bar.iter().map(|e| e.abs()).fold(0.0, f64::max);
            let step = 1e-6 * scale.max(1.0);
            for j in 0..dim {
                let mut ep = eta_bar.clone();
                let mut em = eta_bar.clone();
                ep[j] += step;
                em[j] -= step;
                let want = (lagrangian(&qcqp, &ep, &zeta, rho, cfg.p_max)
                    - lagrangian(&qcqp, &em, &zeta, rho, cfg.p_max))
                    / (2.0 * step);
                let denom = want.abs().max(grad[j].abs()).max(1e-9);
                assert!(
                    (want - grad[j]).abs() / denom <= 1e-5,
                    "trial {trial} coord {j}: fd {want} vs {}",
                    grad[j]
                );
            }
            checked += 1;
            if checked >= 50 {
                break;
            }
        }
        assert!(checked >= 50, "only {checked} gradient checks ran");
    }

    #[test]
    fn single_user_full_power_is_optimal() {
        let cfg = tiny_config(1, 1);
        for seed in 0..5 {
            let eff = effective(&cfg, 200 + seed);
            let init = equal_power_init(&eff, cfg.p_max);
            let (eta, trace) = optimize_power(&eff, &init, &cfg, &PdsOpts::default()).unwrap();
            let h2 = cvec::norm2(eff.h_ks(0, 0));
            let want = cfg.p_max / h2;
            assert!(
                (eta.get(0, 0) - want).abs() <= 5e-3 * want,
                "seed {seed}: eta {} vs full power {want}",
                eta.get(0, 0)
            );
            assert!(trace.objective.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9)));
        }
    }

    #[test]
    fn equal_power_start_saturates_each_budget() {
        let cfg = tiny_config(3, 2);
        let eff = effective(&cfg, 300);
        let eta = equal_power_init(&eff, cfg.p_max);
        for s in 0..cfg.s {
            let load: f64 =
                (0..cfg.k).map(|k| eta.get(k, s) * cvec::norm2(eff.h_ks(k, s))).sum();
            assert!((load - cfg.p_max).abs() <= 1e-12 * cfg.p_max);
        }
    }

    #[test]
    fn two_user_allocation_approaches_grid_optimum() {
        let cfg = tiny_config(2, 1);
        let mut worst_gap = 0.0f64;
        for seed in 0..10 {
            let eff = effective(&cfg, 400 + seed);
            let init = equal_power_init(&eff, cfg.p_max);
            let opts = PdsOpts { max_iters: 1500, ..Default::default() };
            let (eta, _) = optimize_power(&eff, &init, &cfg, &opts).unwrap();
            let got = wsr(&eff, &eta.eta.iter().map(|e| e.sqrt()).collect::<Vec<_>>(), &cfg);

            // Dense grid over the feasible budget-fraction simplex.
            let h1 = cvec::norm2(eff.h_ks(0, 0));
            let h2 = cvec::norm2(eff.h_ks(1, 0));
            let mut best = 0.0f64;
            let n_grid = 400;
            for i in 0..=n_grid {
                for j in 0..=(n_grid - i) {
                    let e1 = cfg.p_max * i as f64 / n_grid as f64 / h1;
                    let e2 = cfg.p_max * j as f64 / n_grid as f64 / h2;
                    let alloc = PowerAllocation { eta: vec![e1, e2], k: 2, s: 1 };
                    let mut v = 0.0;
                    for k in 0..2 {
                        let (sig, int) = signal_interference(&eff, &alloc, k);
                        v += cfg.mu[k] * (1.0 + sig / (int + cfg.n0)).log2();
                    }
                    best = best.max(v);
                }
            }
            let gap = (best - got) / best;
            worst_gap = worst_gap.max(gap);
            assert!(gap <= 0.01, "seed {seed}: PDS {got} vs grid {best} (gap {gap:.4})");
        }
        eprintln!("worst grid gap: {worst_gap:.5}");
    }
}
