use super::SubcarrierState;
use crate::CMat;

/// Primal gaps of the four consensus constraint families on one subcarrier.
#[derive(Debug, Clone)]
pub struct ConstraintGaps {
    /// `Y - F_RF F_k`
    pub y: CMat,
    /// `G - C^H Y`
    pub gains: CMat,
    /// `h - Y^H A_S`
    pub side: CMat,
    /// `g - Y^H A_M`
    pub main: CMat,
}

impl ConstraintGaps {
    /// Frobenius norm of each family.
    pub fn norms(&self) -> [f64; 4] {
        [self.y.norm(), self.gains.norm(), self.side.norm(), self.main.norm()]
    }
}

pub fn constraint_gaps(
    state: &SubcarrierState,
    effective: &CMat,
    combined: &CMat,
    side_steer: &CMat,
    main_steer: &CMat,
) -> ConstraintGaps {
    let y_h = state.y.adjoint();
    ConstraintGaps {
        y: &state.y - effective,
        gains: &state.gains - combined.adjoint() * &state.y,
        side: &state.side - &y_h * side_steer,
        main: &state.main - &y_h * main_steer,
    }
}

/// Scaled dual ascent: every dual grows by its constraint gap.
pub fn update_duals(state: &mut SubcarrierState, gaps: &ConstraintGaps) {
    state.dual_y += &gaps.y;
    state.dual_gains += &gaps.gains;
    state.dual_side += &gaps.side;
    state.dual_main += &gaps.main;
}
