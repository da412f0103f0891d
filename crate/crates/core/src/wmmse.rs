//! Scalar MMSE machinery linking the closed-form rate to a weighted-MSE
//! objective: receive scalars `r_k`, the average MSE quadratic, and the
//! WMMSE weights `kappa_k = 1 / mse_k`.
//!
//! The scalar channel behind these quantities carries the rms signal
//! amplitude `sqrt(A_k)` (square root of the exact signal second moment),
//! so the MMSE error equals `(sum_{i != k} B_{k,i} + N0) / (A_k + sum B + N0)`
//! identically and the rate identity `C_k = log2(1 / mse_k)` is exact. The
//! first-moment gain `sum_s sqrt(eta_ks)(||h_bar_ks||^2 + M chi_ks)` stays
//! available as [`ClosedFormTerms::mean_gain`]; it is what enters the
//! statistical phase objective, where the mean couples linearly.
//!
//! Rate-style quantities are reported in bits: the variational surrogate is
//! `(ln kappa - kappa * mse + 1) / ln 2`, whose maximizer over `kappa` is
//! `1 / mse` with value `log2(1 / mse)`.

use crate::error::CoreError;
use crate::rate::ClosedFormTerms;
use crate::Result;

/// Receive scalars, weights, and per-user MSE for one set of closed-form
/// terms.
#[derive(Debug, Clone)]
pub struct WmmseState {
    /// MMSE receive scalar per user (real under this channel model).
    pub r: Vec<f64>,
    /// WMMSE weight per user, `kappa_k > 0`.
    pub kappa: Vec<f64>,
    /// Average MSE per user at the supplied receiver.
    pub mse: Vec<f64>,
    /// `A_k + sum_{i != k} B_{k,i} + N0` per user.
    pub denom: Vec<f64>,
}

/// Average-MSE quadratic in the receive scalar `r` for a scalar channel
/// with amplitude `gain` and total received power `total`:
/// `mse(r) = r^2 total - 2 r gain + 1`.
pub fn mse_quadratic(r: f64, gain: f64, total: f64) -> f64 {
    r * r * total - 2.0 * r * gain + 1.0
}

/// Rate surrogate `(ln kappa - kappa * mse + 1) / ln 2`; equals the rate in
/// bits at `kappa = 1 / mse`.
pub fn rate_surrogate(kappa: f64, mse: f64) -> f64 {
    (kappa.ln() - kappa * mse + 1.0) / std::f64::consts::LN_2
}

/// MMSE receive scalars `r_k = sqrt(A_k) / (A_k + sum B + N0)`.
pub fn mmse_receiver(terms: &ClosedFormTerms) -> Result<Vec<f64>> {
    (0..terms.k)
        .map(|k| {
            let d = terms.a[k] + terms.b_sum[k] + terms.n0;
            if !(d > 0.0) {
                return Err(CoreError::Power(format!("user {k}: zero MSE denominator")));
            }
            Ok(terms.a[k].sqrt() / d)
        })
        .collect()
}

/// Average MSE per user for the given receive scalars.
pub fn average_mse(r: &[f64], terms: &ClosedFormTerms) -> Result<Vec<f64>> {
    if r.len() != terms.k {
        return Err(CoreError::Dimension("r length does not match users".into()));
    }
    Ok((0..terms.k)
        .map(|k| mse_quadratic(r[k], terms.a[k].sqrt(), terms.a[k] + terms.b_sum[k] + terms.n0))
        .collect())
}

/// WMMSE weights `kappa_k = 1 / mse_k`. The MSE must be positive.
pub fn wmmse_weight(mse: &[f64]) -> Result<Vec<f64>> {
    mse.iter()
        .map(|&e| {
            if !(e > 0.0) {
                return Err(CoreError::Power(format!("nonpositive MSE {e}")));
            }
            Ok(1.0 / e)
        })
        .collect()
}

/// One full `(r, kappa)` update from the current closed-form terms.
pub fn update(terms: &ClosedFormTerms) -> Result<WmmseState> {
    let r = mmse_receiver(terms)?;
    let mse = average_mse(&r, terms)?;
    let kappa = wmmse_weight(&mse)?;
    let denom = (0..terms.k).map(|k| terms.a[k] + terms.b_sum[k] + terms.n0).collect();
    Ok(WmmseState { r, kappa, mse, denom })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{PhaseConfig, PowerAllocation};
    use crate::rate::{closed_form_rate, closed_form_terms};
    use crate::scenario::{build_statistics, default_config, place_nodes, LayoutSpec};
    use rand::Rng;

    fn toy_terms(a: Vec<f64>, b_sum: Vec<f64>, n0: f64) -> ClosedFormTerms {
        let k = a.len();
        ClosedFormTerms {
            a,
            b: vec![0.0; k * k],
            b_sum,
            h_bar: vec![],
            mean_gain: vec![0.0; k],
            n0,
            mu: vec![1.0; k],
            k,
            s: 1,
        }
    }

    fn random_instance(seed: u64) -> ClosedFormTerms {
        let mut cfg = default_config();
        cfg.n_r = 2;
        cfg.n_c = 2;
        let geom = place_nodes(&cfg, &LayoutSpec::UniformRandom, seed).unwrap();
        let stats = build_statistics(&cfg, &geom).unwrap();
        let phases = PhaseConfig::random(cfg.l, cfg.n(), seed + 1);
        let mut rng = crate::seqrng::rng_for(seed, 2);
        let eta: Vec<f64> = (0..cfg.k * cfg.s).map(|_| rng.gen::<f64>() * 5e3).collect();
        let eta = PowerAllocation::new(eta, cfg.k, cfg.s).unwrap();
        closed_form_terms(&stats, &phases, &eta).unwrap()
    }

    #[test]
    fn receiver_is_amplitude_over_total_power() {
        // Amplitude 2 (A = 4), total power 4 -> r = 0.5.
        let t = toy_terms(vec![4.0], vec![0.0], 0.0);
        let r = mmse_receiver(&t).unwrap();
        assert!((r[0] - 0.5).abs() < 1e-15);

        // No transmit power, zero receiver.
        let t = toy_terms(vec![0.0], vec![1.0], 1.0);
        assert_eq!(mmse_receiver(&t).unwrap()[0], 0.0);
    }

    #[test]
    fn mmse_error_reference_values() {
        // A = 3, sum B = 0, N0 = 1 -> error 1/4 at the MMSE receiver.
        let t = toy_terms(vec![3.0], vec![0.0], 1.0);
        let r = mmse_receiver(&t).unwrap();
        let e = average_mse(&r, &t).unwrap();
        assert!((e[0] - 0.25).abs() < 1e-12);
        // r = 0 -> error = 1.
        assert_eq!(average_mse(&[0.0], &t).unwrap()[0], 1.0);
    }

    #[test]
    fn weights_invert_the_error() {
        assert_eq!(wmmse_weight(&[1.0]).unwrap(), vec![1.0]);
        assert_eq!(wmmse_weight(&[0.25]).unwrap(), vec![4.0]);
        assert!(wmmse_weight(&[0.0]).is_err());
        assert!(wmmse_weight(&[-0.5]).is_err());
    }

    #[test]
    fn rate_mse_identity_is_exact() {
        let cfg = default_config();
        for seed in 0..5 {
            let terms = random_instance(seed);
            let st = update(&terms).unwrap();
            let report = closed_form_rate(&terms, &cfg);
            for k in 0..terms.k {
                let via_mse = (1.0 / st.mse[k]).log2();
                let rel = (via_mse - report.rate[k]).abs() / report.rate[k].max(1e-300);
                assert!(rel < 1e-10, "seed {seed} user {k}: {via_mse} vs {}", report.rate[k]);
                assert!((st.kappa[k] * st.mse[k] - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn mmse_receiver_minimizes_the_quadratic() {
        let terms = random_instance(7);
        let st = update(&terms).unwrap();
        let mut rng = crate::seqrng::rng_for(8, 0);
        for k in 0..terms.k {
            let base = st.mse[k];
            for delta in [-1e-3, 1e-3] {
                let mut r = st.r.clone();
                r[k] += delta * (1.0 + st.r[k].abs());
                let e = average_mse(&r, &terms).unwrap();
                assert!(e[k] > base, "perturbation {delta} did not increase the error");
            }
            for _ in 0..100 {
                let mut r = st.r.clone();
                r[k] = rng.gen::<f64>() * 2.0 * st.r[k].max(1e-12);
                let e = average_mse(&r, &terms).unwrap();
                assert!(e[k] >= base - 1e-15 * base.abs());
            }
        }
    }

    #[test]
    fn kappa_maximizes_the_surrogate_on_a_scan() {
        let terms = random_instance(11);
        let st = update(&terms).unwrap();
        for k in 0..terms.k {
            let best = rate_surrogate(st.kappa[k], st.mse[k]);
            // Surrogate value at the optimum equals the rate.
            assert!((best - (1.0 / st.mse[k]).log2()).abs() < 1e-10 * best.abs());
            for step in 1..=60 {
                let factor = 0.05 + 0.05 * step as f64;
                if (factor - 1.0).abs() < 1e-12 {
                    continue;
                }
                let v = rate_surrogate(st.kappa[k] * factor, st.mse[k]);
                assert!(v < best, "kappa scan found a better point at factor {factor}");
            }
        }
    }
}
