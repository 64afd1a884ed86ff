//! Mainlobe copies `g_{k,m}`.
//!
//! Scan/detect raises every mainlobe copy above a common floor `eps`;
//! tracking maximizes the integrated mainlobe through a linearized
//! `-log ||t||^2` term.

use num_complex::Complex64;

use super::sidelobe::breakpoints;
use crate::error::{HbfError, Result};
use crate::CMat;

/// Branch of the per-interval analysis that produced the selected floor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FloorCase {
    Collapsed,
    /// Stationary point at or left of the interval.
    Lower,
    /// Stationary point at or right of the interval.
    Upper,
    Interior,
}

/// `-2 ln iota + rho/2 sum_m max(iota - n_m, 0)^2`.
pub fn floor_objective(norms: &[f64], rho: f64, iota: f64) -> f64 {
    let deficit: f64 = norms.iter().map(|&n| (iota - n).max(0.0).powi(2)).sum();
    -2.0 * iota.ln() + 0.5 * rho * deficit
}

/// Minimum-mainlobe subproblem over `iota = sqrt(eps)` restricted to the
/// range spanned by the mainlobe norms. Returns `(g, eps, case)`; columns
/// below the floor are lifted onto it.
pub fn solve_g_eps_sd(k: usize, t_hat: &CMat, rho: f64, tol_zero: f64) -> Result<(CMat, f64, FloorCase)> {
    let norms: Vec<f64> = t_hat.column_iter().map(|c| c.norm()).collect();
    if norms.iter().all(|&n| n < tol_zero) {
        return Err(HbfError::Degenerate(format!("subcarrier {k}: no mainlobe energy")));
    }
    let pts = breakpoints(&norms, tol_zero);
    let (iota, case) = if pts.len() == 1 {
        (pts[0], FloorCase::Collapsed)
    } else {
        let mut best = (f64::INFINITY, pts[0], FloorCase::Lower);
        for w in pts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let (count, sum) =
                norms.iter().filter(|&&n| n.max(tol_zero) <= lo).fold((0.0, 0.0), |(c, s), &n| (c + 1.0, s + n));
            // rho count iota^2 - rho sum iota - 2 = 0 has exactly one positive root
            let (a, b) = (rho * count, -rho * sum);
            let v1 = (-b + (b * b + 8.0 * a).sqrt()) / (2.0 * a);
            let (cand, case) = if v1 <= lo {
                (lo, FloorCase::Lower)
            } else if v1 >= hi {
                (hi, FloorCase::Upper)
            } else {
                (v1, FloorCase::Interior)
            };
            let val = floor_objective(&norms, rho, cand);
            if val < best.0 || (val == best.0 && cand < best.1) {
                best = (val, cand, case);
            }
        }
        (best.1, best.2)
    };

    let mut g = t_hat.clone();
    for (mut col, &n) in g.column_iter_mut().zip(&norms) {
        if n < iota {
            if n > 0.0 {
                col *= Complex64::from(iota / n);
            } else {
                col.fill(Complex64::new(0.0, 0.0));
                col[0] = Complex64::from(iota);
            }
        }
    }
    Ok((g, iota * iota, case))
}

/// Minimizer of the linearized integrated-mainlobe subproblem:
/// `t* = t_hat + anchor / (rho ||anchor||^2)`.
pub fn solve_g_tt(k: usize, t_hat: &CMat, anchor: &CMat, rho: f64, tol_zero: f64) -> Result<CMat> {
    let energy = anchor.norm_squared();
    if energy.sqrt() < tol_zero {
        return Err(HbfError::LinearizationPoint(k));
    }
    Ok(t_hat + anchor * Complex64::from(1.0 / (rho * energy)))
}
