//! Simulator and optimizer for multi-RIS assisted cell-free downlink networks.
//!
//! The crate models a network of `S` multi-antenna base stations serving `K`
//! single-antenna users with the help of `L` reconfigurable intelligent
//! surfaces (RIS), each a UPA of `N` passive phase-shifting elements. All
//! channels are Rician; maximum-ratio precoding is used at the BSs.
//!
//! Functionality is split by timescale:
//!
//! * [`scenario`] builds the *statistical* CSI (placement, path loss, Rician
//!   splits, LoS steering components) that stays constant over a frame.
//! * [`channel`] draws small-scale fading realizations and assembles the
//!   effective per-(user, BS) channels under a RIS phase configuration.
//! * [`rate`] evaluates the instantaneous weighted sum-rate, its Monte-Carlo
//!   ergodic estimates, and a closed-form moment-based approximation of the
//!   ergodic rate (exact second moments of the MR signal/interference terms).
//! * [`wmmse`] provides the scalar MMSE receiver / weight machinery that turns
//!   rate maximization into weighted MSE minimization.
//! * [`ris_pdd`] optimizes RIS phases on statistical CSI with a penalty dual
//!   decomposition (consensus splitting, subgradient inner loop, closed-form
//!   unit-modulus projection, multiplier/penalty outer loop).
//! * [`power_pds`] optimizes per-(user, BS) power-control coefficients on
//!   instantaneous CSI via fractional programming and a primal-dual
//!   subgradient method on a QCQP.
//! * [`harness`] runs the two-timescale alternating-optimization driver,
//!   baselines, and sweep experiments with CSV emission.

pub mod channel;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod power_pds;
pub mod rate;
pub mod ris_pdd;
pub mod scenario;
pub mod seqrng;
pub mod wmmse;

pub use error::CoreError;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CoreError>;
