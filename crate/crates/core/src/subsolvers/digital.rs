use crate::error::{HbfError, Result};
use crate::CMat;

/// Least-squares digital beamformer `F_k = (F_RF^H F_RF)^{-1} F_RF^H V_k`.
pub fn solve_fk(f_rf: &CMat, v: &CMat) -> Result<CMat> {
    let gram = f_rf.adjoint() * f_rf;
    let rhs = f_rf.adjoint() * v;
    if let Some(chol) = gram.clone().cholesky() {
        return Ok(chol.solve(&rhs));
    }
    gram.lu().solve(&rhs).ok_or(HbfError::Singular("analog Gram matrix"))
}
