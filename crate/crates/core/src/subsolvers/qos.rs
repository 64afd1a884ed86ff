use num_complex::Complex64;

use crate::error::{HbfError, Result};
use crate::roots::decreasing_root;
use crate::{CMat, CVec};

/// Gain copies of one subcarrier together with the multipliers of the QoS balls.
#[derive(Debug, Clone)]
pub struct GainsSolution {
    /// `[(u, i)]`, same layout as `SubcarrierState::gains`.
    pub gains: CMat,
    /// `phi[u] = 0` when the unconstrained point is already feasible.
    pub phi: Vec<f64>,
}

/// Projects `center = (C^H Y)[(u, :)] - dual[(u, :)]` onto the QoS ball
/// `|G_u - 1|^2 + sum_{i != u} |G_i|^2 <= xi` along the path
/// `G(phi) = (center + phi e_u) / (1 + phi)`.
pub fn solve_gain_row(center: &CVec, u: usize, xi: f64, tol_root: f64) -> Result<(CVec, f64)> {
    if !(xi >= 0.0) {
        return Err(HbfError::InvalidConfig(format!("QoS radius {xi} must be nonnegative")));
    }
    let mut offset = center.clone();
    offset[u] -= Complex64::new(1.0, 0.0);
    let dist2 = offset.norm_squared();
    if dist2 <= xi {
        return Ok((center.clone(), 0.0));
    }
    let at = |phi: f64| {
        let mut g = center.clone();
        g[u] += Complex64::from(phi);
        g / Complex64::from(1.0 + phi)
    };
    if xi == 0.0 {
        let mut g = CVec::zeros(center.len());
        g[u] = Complex64::new(1.0, 0.0);
        return Ok((g, f64::INFINITY));
    }
    let f = |phi: f64| {
        let s = 1.0 + phi;
        (dist2 / (s * s) - xi, -2.0 * dist2 / (s * s * s))
    };
    let hi = (dist2 / xi).sqrt();
    let phi = decreasing_root(f, 0.0, hi, tol_root * xi.max(1.0))?;
    Ok((at(phi), phi))
}

/// QoS-constrained gain copies for every user of subcarrier `k`. `projected`
/// is `C^H Y` (`U x U`), `dual` the scaled dual of the gain copies.
pub fn solve_gains(k: usize, projected: &CMat, dual: &CMat, xi: &[f64], tol_root: f64) -> Result<GainsSolution> {
    let users = projected.nrows();
    let mut gains = CMat::zeros(users, projected.ncols());
    let mut phi = Vec::with_capacity(users);
    for (u, &radius) in xi.iter().enumerate().take(users) {
        if radius < 0.0 {
            return Err(HbfError::InfeasibleQos { subcarrier: k, user: u, xi: radius });
        }
        let center = (projected.row(u) - dual.row(u)).transpose();
        let (row, p) = solve_gain_row(&center, u, radius, tol_root)?;
        gains.set_row(u, &row.transpose());
        phi.push(p);
    }
    Ok(GainsSolution { gains, phi })
}
