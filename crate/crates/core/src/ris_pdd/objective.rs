//! The split statistical objective `F(u, x)` and its quadratic subproblem
//! assemblies.
//!
//! With the receive scalars and WMMSE weights held fixed, the weighted-MSE
//! objective is a quartic in the phase vector. The consensus split assigns
//! the unconjugated channel factors to `u` and the conjugated ones to `x`,
//! which makes `F` a quadratic in each argument with `F(u, u)` equal to the
//! exact weighted MSE (including all constants). Every second-order piece is
//! a Gram form times a nonnegative weight, so the subproblem Hessians are
//! positive semidefinite by construction.

use crate::channel::PowerAllocation;
use crate::error::CoreError;
use crate::linalg::{vec as cvec, C64, CMat};
use crate::ris_pdd::blocks::PddBlocks;
use crate::Result;

/// Quadratic model of one subproblem: `q(y) = y^H H y + 2 Re(tau^H y) + c0`
/// with `H` Hermitian PSD. The conventional pair `(R, t)` with
/// `q = y^T R y^* + y^T t + t^H y^*` is exposed through [`Self::r_matrix`]
/// and [`Self::t_vector`].
#[derive(Debug, Clone)]
pub struct QuadraticAssembly {
    pub h: CMat,
    pub tau: Vec<C64>,
    pub c0: f64,
}

impl QuadraticAssembly {
    /// Evaluate the quadratic (real by construction).
    pub fn eval(&self, y: &[C64]) -> f64 {
        let hy = self.h.mul_vec(y);
        let quad: C64 = y.iter().zip(&hy).map(|(a, b)| a.conj() * b).sum();
        let lin: C64 = self.tau.iter().zip(y).map(|(t, yi)| t.conj() * yi).sum();
        quad.re + 2.0 * lin.re + self.c0
    }

    /// Gradient (conjugate Wirtinger, i.e. the steepest-descent direction is
    /// its negative): `H y + tau`.
    pub fn grad(&self, y: &[C64]) -> Vec<C64> {
        let mut g = self.h.mul_vec(y);
        for (gi, t) in g.iter_mut().zip(&self.tau) {
            *gi += t;
        }
        g
    }

    /// The matrix of the `y^T R y^*` convention (`R = H^T`, Hermitian).
    pub fn r_matrix(&self) -> CMat {
        self.h.transpose()
    }

    /// The vector of the `y^T t + t^H y^*` convention (`t = conj(tau)`).
    pub fn t_vector(&self) -> Vec<C64> {
        self.tau.iter().map(|z| z.conj()).collect()
    }
}

/// Objective context: blocks plus the powers, receive scalars, and weights
/// that stay fixed during one phase-design round.
pub struct PddContext<'a> {
    pub blocks: &'a PddBlocks,
    pub eta: PowerAllocation,
    pub r: Vec<f64>,
    pub kappa: Vec<f64>,
    pub mu: Vec<f64>,
    pub n0: f64,
    /// `c_k = kappa_k mu_k r_k^2`.
    c: Vec<f64>,
    /// `rr_k = kappa_k mu_k r_k`.
    rr: Vec<f64>,
    root_eta: Vec<f64>,
    /// `D_ki` / `f_ki`: u-side interference map and offset, indexed `k*K + i`.
    d_map: Vec<CMat>,
    f_vec: Vec<Vec<C64>>,
    /// `P_ki` / `g_ki`: x-side interference map and offset.
    p_map: Vec<CMat>,
    g_vec: Vec<Vec<C64>>,
    /// Constant Hessian parts (Gram sums) for each side.
    r_const: CMat,
    q_const: CMat,
    /// Constant linear parts for each side.
    tau_r_const: Vec<C64>,
    tau_q_const: Vec<C64>,
}

/// Which subproblem an assembly targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    U,
    X,
}

impl<'a> PddContext<'a> {
    pub fn new(
        blocks: &'a PddBlocks,
        eta: &PowerAllocation,
        r: &[f64],
        kappa: &[f64],
        mu: &[f64],
        n0: f64,
    ) -> Result<Self> {
        let (k_count, s_count, ln, m) = (blocks.k, blocks.s, blocks.l * blocks.n, blocks.m);
        if eta.k != k_count || eta.s != s_count {
            return Err(CoreError::Dimension("eta does not match blocks".into()));
        }
        if r.len() != k_count || kappa.len() != k_count || mu.len() != k_count {
            return Err(CoreError::Dimension("r/kappa/mu length mismatch".into()));
        }
        let m_f = m as f64;
        let c: Vec<f64> = (0..k_count).map(|k| kappa[k] * mu[k] * r[k] * r[k]).collect();
        let rr: Vec<f64> = (0..k_count).map(|k| kappa[k] * mu[k] * r[k]).collect();
        let root_eta: Vec<f64> = eta.eta.iter().map(|e| e.sqrt()).collect();

        let mut j_k = Vec::with_capacity(k_count);
        let mut e_k = Vec::with_capacity(k_count);
        for k in 0..k_count {
            let mut j = CMat::zeros(ln, ln);
            let mut e = cvec::zeros(ln);
            for s in 0..s_count {
                let w = root_eta[k * s_count + s];
                if w == 0.0 {
                    continue;
                }
                let ks = blocks.ks(k, s);
                let phi_t = blocks.gg_ks[ks].adjoint_mul(&blocks.t_ks[ks]);
                j.add_scaled(C64::new(w, 0.0), &phi_t);
                for (idx, p) in blocks.psi[ks].iter().enumerate() {
                    let v = j.at(idx, idx) + w * m_f * p;
                    j.set(idx, idx, v);
                }
                cvec::axpy(&mut e, C64::new(w, 0.0), &blocks.e_ks[ks]);
            }
            j_k.push(j);
            e_k.push(e);
        }

        let zero_mat = CMat::zeros(0, 0);
        let mut d_map = vec![zero_mat.clone(); k_count * k_count];
        let mut f_vec = vec![Vec::new(); k_count * k_count];
        let mut p_map = vec![zero_mat; k_count * k_count];
        let mut g_vec = vec![Vec::new(); k_count * k_count];
        for k in 0..k_count {
            for i in 0..k_count {
                if i == k {
                    continue;
                }
                let mut dm = CMat::zeros(ln, ln);
                let mut fv = cvec::zeros(ln);
                let mut pm = CMat::zeros(ln, ln);
                let mut gv = cvec::zeros(ln);
                for s in 0..s_count {
                    let w = root_eta[i * s_count + s];
                    if w == 0.0 {
                        continue;
                    }
                    let ks = blocks.ks(k, s);
                    let is = blocks.ks(i, s);
                    let kis = blocks.kis(k, i, s);
                    // d_s(u) = Phi_is^H (T_ks u + d_ks) + q_diag .* u
                    let phi_t = blocks.gg_ks[is].adjoint_mul(&blocks.t_ks[ks]);
                    dm.add_scaled(C64::new(w, 0.0), &phi_t);
                    for (idx, q) in blocks.q_diag[kis].iter().enumerate() {
                        let v = dm.at(idx, idx) + w * q;
                        dm.set(idx, idx, v);
                    }
                    cvec::axpy(
                        &mut fv,
                        C64::new(w, 0.0),
                        &blocks.gg_ks[is].adjoint_mul_vec(&blocks.hh_d_ks[ks]),
                    );
                    // p_s(x) = Phi_ks^H (T_is x + d_is) + p_diag .* x
                    let phi_t2 = blocks.gg_ks[ks].adjoint_mul(&blocks.t_ks[is]);
                    pm.add_scaled(C64::new(w, 0.0), &phi_t2);
                    for (idx, p) in blocks.p_diag[kis].iter().enumerate() {
                        let v = pm.at(idx, idx) + w * p;
                        pm.set(idx, idx, v);
                    }
                    cvec::axpy(
                        &mut gv,
                        C64::new(w, 0.0),
                        &blocks.gg_ks[ks].adjoint_mul_vec(&blocks.hh_d_ks[is]),
                    );
                }
                d_map[k * k_count + i] = dm;
                f_vec[k * k_count + i] = fv;
                p_map[k * k_count + i] = pm;
                g_vec[k * k_count + i] = gv;
            }
        }

        let mut r_const = CMat::zeros(ln, ln);
        let mut q_const = CMat::zeros(ln, ln);
        let mut tau_r_const = cvec::zeros(ln);
        let mut tau_q_const = cvec::zeros(ln);
        for k in 0..k_count {
            let ck = C64::new(c[k], 0.0);
            let jj = j_k[k].adjoint_mul(&j_k[k]);
            r_const.add_scaled(ck, &jj);
            q_const.add_scaled(ck, &jj);
            cvec::axpy(&mut tau_r_const, ck, &j_k[k].adjoint_mul_vec(&e_k[k]));
            cvec::axpy(&mut tau_q_const, ck, &j_k[k].adjoint_mul_vec(&e_k[k]));
            for i in 0..k_count {
                if i == k {
                    continue;
                }
                let ki = k * k_count + i;
                r_const.add_scaled(ck, &d_map[ki].adjoint_mul(&d_map[ki]));
                cvec::axpy(&mut tau_r_const, ck, &d_map[ki].adjoint_mul_vec(&f_vec[ki]));
                q_const.add_scaled(ck, &p_map[ki].adjoint_mul(&p_map[ki]));
                cvec::axpy(&mut tau_q_const, ck, &p_map[ki].adjoint_mul_vec(&g_vec[ki]));
            }
        }

        Ok(Self {
            blocks,
            eta: eta.clone(),
            r: r.to_vec(),
            kappa: kappa.to_vec(),
            mu: mu.to_vec(),
            n0,
            c,
            rr,
            root_eta,
            d_map,
            f_vec,
            p_map,
            g_vec,
            r_const,
            q_const,
            tau_r_const,
            tau_q_const,
        })
    }

    #[inline]
    fn root_eta(&self, k: usize, s: usize) -> f64 {
        self.root_eta[k * self.blocks.s + s]
    }

    /// `h_bar_ks(y) = T_ks y + d_ks`.
    fn mean_channel(&self, k: usize, s: usize, y: &[C64]) -> Vec<C64> {
        let ks = self.blocks.ks(k, s);
        let mut v = self.blocks.t_ks[ks].mul_vec(y);
        for (vi, di) in v.iter_mut().zip(&self.blocks.hh_d_ks[ks]) {
            *vi += di;
        }
        v
    }

    /// Affine u-coefficients of `sum_s sqrt(eta_ks) EZ_s(u, x)`:
    /// returns `(w, z)` with the aggregate equal to `w^H u + z`.
    fn signal_affine(&self, k: usize, other: &[C64]) -> (Vec<C64>, C64) {
        let b = self.blocks;
        let ln = b.l * b.n;
        let m_f = b.m as f64;
        let mut w = cvec::zeros(ln);
        let mut z = C64::new(0.0, 0.0);
        for s in 0..b.s {
            let re = self.root_eta(k, s);
            if re == 0.0 {
                continue;
            }
            let ks = b.ks(k, s);
            let mx = self.mean_channel(k, s, other);
            // T^H (T other + d)
            let tm = b.t_ks[ks].adjoint_mul_vec(&mx);
            for idx in 0..ln {
                w[idx] += re * (tm[idx] + m_f * b.de[ks][idx] * other[idx]);
            }
            z += re
                * (cvec::dot_h(&mx, &b.hh_d_ks[ks])
                    + C64::new(b.mbd2[ks] + b.mn_alpha23[ks], 0.0));
        }
        (w, z)
    }

    /// Interference affine u-coefficients for pair `(k, i)`:
    /// `sum_s sqrt(eta_is) K0_s(u, x) = w^H u + z` with `x` fixed.
    fn interference_affine_u(&self, k: usize, i: usize, x: &[C64]) -> (Vec<C64>, C64) {
        let b = self.blocks;
        let ln = b.l * b.n;
        let mut w = cvec::zeros(ln);
        let mut z = C64::new(0.0, 0.0);
        for s in 0..b.s {
            let re = self.root_eta(i, s);
            if re == 0.0 {
                continue;
            }
            let ks = b.ks(k, s);
            let kis = b.kis(k, i, s);
            let mix = self.mean_channel(i, s, x);
            let tm = b.t_ks[ks].adjoint_mul_vec(&mix);
            for idx in 0..ln {
                w[idx] += re * (tm[idx] + b.delta[kis][idx].conj() * x[idx]);
            }
            z += re * cvec::dot_h(&mix, &b.hh_d_ks[ks]);
        }
        (w, z)
    }

    /// Mirrored x-side: `sum_s sqrt(eta_is) K0_s(u, x) = x^H w + conj(z)`
    /// with `u` fixed. The returned `z` keeps the u-side convention
    /// (`z = aggregate-with-x-zeroed, conjugated`), so the shared linear-term
    /// formula `tau += c w z` applies to both sides.
    fn interference_affine_x(&self, k: usize, i: usize, u: &[C64]) -> (Vec<C64>, C64) {
        let b = self.blocks;
        let ln = b.l * b.n;
        let mut w = cvec::zeros(ln);
        let mut z = C64::new(0.0, 0.0);
        for s in 0..b.s {
            let re = self.root_eta(i, s);
            if re == 0.0 {
                continue;
            }
            let is = b.ks(i, s);
            let kis = b.kis(k, i, s);
            let mku = self.mean_channel(k, s, u);
            let tm = b.t_ks[is].adjoint_mul_vec(&mku);
            for idx in 0..ln {
                w[idx] += re * (tm[idx] + b.delta[kis][idx] * u[idx]);
            }
            // conj(d_is^H (T_ks u + d_ks))
            z += re * cvec::dot_h(&mku, &b.hh_d_ks[is]);
        }
        (w, z)
    }

    /// `Eq_ks(y) = ||T y + d||^2 + M N alpha2` and
    /// `Er_ks(y) = b_d^2 + N alpha3 + y^H De y`.
    fn eq_er(&self, k: usize, s: usize, y: &[C64]) -> (f64, f64) {
        let b = self.blocks;
        let ks = b.ks(k, s);
        let mx = self.mean_channel(k, s, y);
        let eq = cvec::norm2(&mx) + b.mn_alpha2[ks];
        let er = b.c_er[ks]
            + b.de[ks].iter().zip(y).map(|(d, yi)| d * yi.norm_sqr()).sum::<f64>();
        (eq, er)
    }

    /// `xq_ks(y) = Phi_ks^H (T y + d)` and `psi_ks(y) = Psi .* y`.
    fn xq(&self, k: usize, s: usize, y: &[C64]) -> Vec<C64> {
        let ks = self.blocks.ks(k, s);
        self.blocks.gg_ks[ks].adjoint_mul_vec(&self.mean_channel(k, s, y))
    }
    fn psi_vec(&self, k: usize, s: usize, y: &[C64]) -> Vec<C64> {
        let ks = self.blocks.ks(k, s);
        self.blocks.psi[ks].iter().zip(y).map(|(p, yi)| p * yi).collect()
    }

    fn assemble(&self, fixed: &[C64], side: Side, pin_const: bool) -> QuadraticAssembly {
        let b = self.blocks;
        let (k_count, s_count, ln) = (b.k, b.s, b.l * b.n);
        let m_f = b.m as f64;
        let mut h = match side {
            Side::U => self.r_const.clone(),
            Side::X => self.q_const.clone(),
        };
        let mut tau = match side {
            Side::U => self.tau_r_const.clone(),
            Side::X => self.tau_q_const.clone(),
        };

        // Scalar evaluations of the fixed side, reused across rows.
        let eq_fixed: Vec<f64> = (0..k_count * s_count)
            .map(|ks| self.eq_er(ks / s_count, ks % s_count, fixed).0)
            .collect();
        let er_fixed: Vec<f64> = (0..k_count * s_count)
            .map(|ks| self.eq_er(ks / s_count, ks % s_count, fixed).1)
            .collect();

        // Per-(user, s) coefficients multiplying the cached Gram/diag parts.
        let mut diag_coef = vec![0.0; k_count * s_count];
        let mut tt_coef = vec![0.0; k_count * s_count];

        for k in 0..k_count {
            let ck = self.c[k];

            // Signal block: Gram of the affine coefficients plus the linear
            // offset, and the mean-gain coupling from the -2 r S term.
            let (w, z) = self.signal_affine(k, fixed);
            h.add_outer(C64::new(ck, 0.0), &w);
            let lin = C64::new(ck, 0.0) * z - C64::new(self.rr[k], 0.0);
            for (ti, wi) in tau.iter_mut().zip(&w) {
                *ti += lin * wi;
            }

            for s in 0..s_count {
                let e_own = self.eta.get(k, s);
                if e_own > 0.0 {
                    let own = k * s_count + s;
                    diag_coef[own] += ck * e_own * (eq_fixed[own] + m_f * er_fixed[own]);
                    tt_coef[own] += ck * e_own * er_fixed[own];
                    // Cross-linear terms of the own-user extras.
                    let ks = b.ks(k, s);
                    let xq_f = self.xq(k, s, fixed);
                    let psi_f = self.psi_vec(k, s, fixed);
                    let phi_psi = b.gg_ks[ks].mul_vec(&psi_f);
                    let t_phi_psi = b.t_ks[ks].adjoint_mul_vec(&phi_psi);
                    let cw = C64::new(ck * e_own, 0.0);
                    for idx in 0..ln {
                        tau[idx] += cw
                            * (b.psi[ks][idx].conj() * xq_f[idx]
                                + t_phi_psi[idx]
                                + m_f * b.psi[ks][idx].conj() * psi_f[idx]);
                    }
                }
                for i in 0..k_count {
                    if i == k {
                        continue;
                    }
                    let e_i = self.eta.get(i, s);
                    if e_i == 0.0 {
                        continue;
                    }
                    match side {
                        Side::U => {
                            // Hessian in u attaches to the user-k operators.
                            let own = k * s_count + s;
                            let oth = i * s_count + s;
                            diag_coef[own] += ck * e_i * (eq_fixed[oth] + m_f * er_fixed[oth]);
                            tt_coef[own] += ck * e_i * er_fixed[oth];
                        }
                        Side::X => {
                            // Hessian in x attaches to the user-i operators.
                            let own = k * s_count + s;
                            let oth = i * s_count + s;
                            diag_coef[oth] += ck * e_i * (eq_fixed[own] + m_f * er_fixed[own]);
                            tt_coef[oth] += ck * e_i * er_fixed[own];
                        }
                    }
                }
            }

            // Interference Gram blocks.
            for i in 0..k_count {
                if i == k {
                    continue;
                }
                let (wb, zb) = match side {
                    Side::U => self.interference_affine_u(k, i, fixed),
                    Side::X => self.interference_affine_x(k, i, fixed),
                };
                h.add_outer(C64::new(ck, 0.0), &wb);
                let lin = C64::new(ck, 0.0) * zb;
                for (ti, wi) in tau.iter_mut().zip(&wb) {
                    *ti += lin * wi;
                }
            }
        }

        // Fold the accumulated per-(user, s) coefficients.
        for u in 0..k_count {
            for s in 0..s_count {
                let us = u * s_count + s;
                if diag_coef[us] != 0.0 {
                    h.add_diag(diag_coef[us], &b.de[us]);
                }
                if tt_coef[us] != 0.0 {
                    h.add_scaled(C64::new(tt_coef[us], 0.0), &b.tt_gram[us]);
                    cvec::axpy(&mut tau, C64::new(tt_coef[us], 0.0), &b.ttd[us]);
                }
            }
        }

        let mut asm = QuadraticAssembly { h, tau, c0: 0.0 };
        if pin_const {
            // Pin the constant so the quadratic reproduces F exactly.
            let zero = cvec::zeros(ln);
            let f_at_zero = match side {
                Side::U => eval_f(self, &zero, fixed),
                Side::X => eval_f(self, fixed, &zero),
            };
            asm.c0 = f_at_zero - asm.eval(&zero);
        }
        asm
    }

    /// Quadratic in `u` with `x` fixed; `q.eval(u) = F(u, x)` exactly.
    pub fn build_r_t(&self, x: &[C64]) -> QuadraticAssembly {
        self.assemble(x, Side::U, true)
    }

    /// Quadratic in `x` with `u` fixed; `q.eval(x) = F(u, x)` exactly.
    pub fn build_q_a(&self, u: &[C64]) -> QuadraticAssembly {
        self.assemble(u, Side::X, true)
    }

    /// Constant-free variants for the inner loop (descent steps only need
    /// the Hessian and linear parts).
    pub(crate) fn build_r_t_fast(&self, x: &[C64]) -> QuadraticAssembly {
        self.assemble(x, Side::U, false)
    }
    pub(crate) fn build_q_a_fast(&self, u: &[C64]) -> QuadraticAssembly {
        self.assemble(u, Side::X, false)
    }
}

/// Direct evaluation of the split objective `F(u, x)`. `F(u, u)` equals the
/// weighted sum of exact MSEs, `sum_k kappa_k mu_k mse_k(u)`, with the
/// first-moment gain in the linear term.
pub fn eval_f(ctx: &PddContext, u: &[C64], x: &[C64]) -> f64 {
    let b = ctx.blocks;
    let (k_count, s_count, ln) = (b.k, b.s, b.l * b.n);
    let m_f = b.m as f64;
    let mut total = 0.0;

    for k in 0..k_count {
        let c = ctx.c[k];
        let km = ctx.kappa[k] * ctx.mu[k];

        // Signal second moment, split form.
        let (w_sig, z_sig) = ctx.signal_affine(k, x);
        let ez: C64 = cvec::dot_h(&w_sig, u) + z_sig;
        let mut a_hat = ez.norm_sqr();

        let mut phi_u = cvec::zeros(ln);
        let mut phi_x = cvec::zeros(ln);
        for s in 0..s_count {
            let re = ctx.root_eta(k, s);
            if re == 0.0 {
                continue;
            }
            let mut fu = ctx.xq(k, s, u);
            let psi_u = ctx.psi_vec(k, s, u);
            for idx in 0..ln {
                fu[idx] += m_f * psi_u[idx];
            }
            cvec::axpy(&mut phi_u, C64::new(re, 0.0), &fu);
            let mut fx = ctx.xq(k, s, x);
            let psi_x = ctx.psi_vec(k, s, x);
            for idx in 0..ln {
                fx[idx] += m_f * psi_x[idx];
            }
            cvec::axpy(&mut phi_x, C64::new(re, 0.0), &fx);
        }
        a_hat += cvec::norm2(&phi_u) + cvec::norm2(&phi_x);

        // Trace constant.
        let mut tr_a = C64::new(0.0, 0.0);
        for s in 0..s_count {
            for t in 0..s_count {
                tr_a += ctx.root_eta(k, s)
                    * ctx.root_eta(k, t)
                    * b.tr_xi[(k * s_count + s) * s_count + t];
            }
        }
        a_hat += tr_a.re;

        // Own-user extras.
        for s in 0..s_count {
            let e_own = ctx.eta.get(k, s);
            if e_own == 0.0 {
                continue;
            }
            let ks = b.ks(k, s);
            let (eq_u, er_u) = ctx.eq_er(k, s, u);
            let (eq_x, er_x) = ctx.eq_er(k, s, x);
            let xq_u = ctx.xq(k, s, u);
            let xq_x = ctx.xq(k, s, x);
            let psi_u = ctx.psi_vec(k, s, u);
            let psi_x = ctx.psi_vec(k, s, x);
            let cross = 2.0 * cvec::dot_h(&psi_u, &xq_x).re
                + 2.0 * cvec::dot_h(&psi_x, &xq_u).re
                + 2.0 * m_f * cvec::dot_h(&psi_u, &psi_x).re;
            a_hat += e_own
                * (er_u * eq_x + er_x * eq_u + m_f * er_u * er_x + cross + 2.0 * b.tau[ks] + b.lam2[ks]);
        }

        // Interference moments.
        let mut b_hat = 0.0;
        for i in 0..k_count {
            if i == k {
                continue;
            }
            let ki = k * k_count + i;
            let (wb, zb) = ctx.interference_affine_u(k, i, x);
            let k0: C64 = cvec::dot_h(&wb, u) + zb;
            let mut bi = k0.norm_sqr();

            // p(x) and d(u) Gram values via the context maps.
            let mut dv = ctx.d_map[ki].mul_vec(u);
            for (d, f) in dv.iter_mut().zip(&ctx.f_vec[ki]) {
                *d += f;
            }
            let mut pv = ctx.p_map[ki].mul_vec(x);
            for (p, g) in pv.iter_mut().zip(&ctx.g_vec[ki]) {
                *p += g;
            }
            bi += cvec::norm2(&dv) + cvec::norm2(&pv);

            let mut tr_b = C64::new(0.0, 0.0);
            for s in 0..s_count {
                for t in 0..s_count {
                    tr_b += ctx.root_eta(i, s)
                        * ctx.root_eta(i, t)
                        * b.tr_b[((k * k_count + i) * s_count + s) * s_count + t];
                }
            }
            bi += tr_b.re;

            for s in 0..s_count {
                let e_i = ctx.eta.get(i, s);
                if e_i == 0.0 {
                    continue;
                }
                let (eq_ku, er_ku) = ctx.eq_er(k, s, u);
                let (eq_ix, er_ix) = ctx.eq_er(i, s, x);
                bi += e_i * (eq_ix * er_ku + eq_ku * er_ix + m_f * er_ku * er_ix);
            }
            b_hat += bi;
        }

        total += c * (a_hat + b_hat + ctx.n0) - 2.0 * ctx.rr[k] * ez.re + km;
    }
    total
}

/// Full augmented objective `G(u, x, z) = F(u, x) + (1/2 xi)(||x - u + xi l1||^2
/// + ||z - u + xi l2||^2)`.
pub fn eval_g(
    ctx: &PddContext,
    u: &[C64],
    x: &[C64],
    z: &[C64],
    lambda1: &[C64],
    lambda2: &[C64],
    xi: f64,
) -> f64 {
    eval_f(ctx, u, x) + penalty(u, x, z, lambda1, lambda2, xi)
}

/// The two consensus penalty terms.
pub fn penalty(u: &[C64], x: &[C64], z: &[C64], lambda1: &[C64], lambda2: &[C64], xi: f64) -> f64 {
    let mut p1 = 0.0;
    let mut p2 = 0.0;
    for idx in 0..u.len() {
        p1 += (x[idx] - u[idx] + xi * lambda1[idx]).norm_sqr();
        p2 += (z[idx] - u[idx] + xi * lambda2[idx]).norm_sqr();
    }
    (p1 + p2) / (2.0 * xi)
}

/// Descent gradient of `G1(u)`: `H u + tau + (1/xi) u - (1/(2 xi))(x + z +
/// xi l1 + xi l2)` (conjugate Wirtinger convention).
pub fn grad_g1(
    quad: &QuadraticAssembly,
    u: &[C64],
    x: &[C64],
    z: &[C64],
    lambda1: &[C64],
    lambda2: &[C64],
    xi: f64,
) -> Vec<C64> {
    let mut g = quad.grad(u);
    let hx = 0.5 / xi;
    for idx in 0..u.len() {
        g[idx] += hx * (u[idx] - x[idx] - xi * lambda1[idx]) + hx * (u[idx] - z[idx] - xi * lambda2[idx]);
    }
    g
}

/// Descent gradient of `G2(x)`: `H x + tau + (1/(2 xi))(x - u + xi l1)`.
pub fn grad_g2(quad: &QuadraticAssembly, x: &[C64], u: &[C64], lambda1: &[C64], xi: f64) -> Vec<C64> {
    let mut g = quad.grad(x);
    let hx = 0.5 / xi;
    for idx in 0..x.len() {
        g[idx] += hx * (x[idx] - u[idx] + xi * lambda1[idx]);
    }
    g
}
