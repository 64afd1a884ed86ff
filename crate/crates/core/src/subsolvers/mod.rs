//! Closed-form block updates of the consensus ADMM.
//!
//! Every update is a pure function of its inputs; [`SubcarrierState`]
//! only bundles the per-subcarrier primal auxiliaries and scaled duals the
//! orchestrator threads between them.
//!
//! Layout conventions (per subcarrier `k`):
//! * `C = [H_1^H w_1, ..., H_U^H w_U]` (`M_t x U`) so that
//!   `w_u^H H_u y_i = (C^H Y)[(u, i)]`.
//! * Sidelobe auxiliaries are the columns of a `U x S` matrix (`h_s`),
//!   mainlobe auxiliaries the columns of a `U x M` matrix (`g_m`).

mod analog;
mod consensus;
mod digital;
mod duals;
mod mainlobe;
mod qos;
mod sidelobe;

pub use analog::{analog_objective, element_psi, optimal_element, solve_frf_ccd, CcdReport};
pub use consensus::{solve_y, YProblem, YSolution};
pub use digital::solve_fk;
pub use duals::{constraint_gaps, update_duals, ConstraintGaps};
pub use mainlobe::{floor_objective, solve_g_eps_sd, solve_g_tt, FloorCase};
pub use qos::{solve_gain_row, solve_gains, GainsSolution};
pub use sidelobe::{ceiling_objective, solve_h_eta_tt, solve_h_sd, CeilingCase};

use crate::CMat;

/// Primal auxiliaries and scaled duals of one subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcarrierState {
    /// `Y_k` (`M_t x U`), consensus copy of `F_RF F_k`.
    pub y: CMat,
    /// `G_{k,u}^{k,i}` at `[(u, i)]`, copy of `w_u^H H_u y_i`.
    pub gains: CMat,
    /// `h_{k,s}` as columns (`U x S`), copy of `Y^H a(f_k, theta_s)`.
    pub side: CMat,
    /// `g_{k,m}` as columns (`U x M`), copy of `Y^H a(f_k, theta_m)`.
    pub main: CMat,
    /// Peak-sidelobe bound `eta_k`.
    pub eta: f64,
    /// Minimum-mainlobe bound `epsilon_k`.
    pub eps: f64,
    /// Dual of `Y = F_RF F_k`.
    pub dual_y: CMat,
    /// Dual of the gain copies.
    pub dual_gains: CMat,
    /// Dual of the sidelobe copies.
    pub dual_side: CMat,
    /// Dual of the mainlobe copies.
    pub dual_main: CMat,
    /// Previous sidelobe iterate, the linearization point of the integrated
    /// sidelobe term.
    pub side_anchor: Option<CMat>,
    /// Previous mainlobe iterate, the linearization point of the integrated
    /// mainlobe term.
    pub main_anchor: Option<CMat>,
}

impl SubcarrierState {
    /// Consistent state at `Y = y` with zero duals: every copy equals the
    /// quantity it tracks.
    pub fn consistent(y: CMat, combined: &CMat, side_steer: &CMat, main_steer: &CMat) -> Self {
        let users = y.ncols();
        let gains = combined.adjoint() * &y;
        let side = y.adjoint() * side_steer;
        let main = y.adjoint() * main_steer;
        let eta = side.column_iter().map(|c| c.norm_squared()).fold(0.0, f64::max);
        let eps = main.column_iter().map(|c| c.norm_squared()).fold(f64::INFINITY, f64::min);
        Self {
            dual_y: CMat::zeros(y.nrows(), users),
            dual_gains: CMat::zeros(users, users),
            dual_side: CMat::zeros(users, side.ncols()),
            dual_main: CMat::zeros(users, main.ncols()),
            y,
            gains,
            side,
            main,
            eta,
            eps,
            side_anchor: None,
            main_anchor: None,
        }
    }
}
