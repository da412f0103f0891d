//! Statistical-CSI RIS phase-shift design via penalty dual decomposition.
//!
//! The weighted sum-rate objective is first turned into a weighted-MSE
//! minimization (see [`crate::wmmse`]), then split over a consensus triple
//! `(u, x, z)`: `u` and `x` carry the two channel factors of each quadratic
//! coupling and roam freely, `z` carries the unit-modulus constraint through
//! a closed-form projection. An augmented Lagrangian ties the three
//! together; multipliers and the penalty weight update in an outer loop.

mod blocks;
mod objective;
mod solver;

pub use blocks::{assemble_blocks, assemble_blocks_cached, PddBlocks};
pub use objective::{eval_f, eval_g, grad_g1, grad_g2, penalty, PddContext, QuadraticAssembly};
pub use solver::{
    minimize_g, optimize_phases, outer_update, update_z, PddOpts, PddRun, PddState, PhaseTrace,
    PhaseTraceRow,
};
