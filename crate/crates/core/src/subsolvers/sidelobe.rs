//! Sidelobe copies `h_{k,s}`.
//!
//! Scan/detect keeps the integrated sidelobe level small through a
//! linearized `log ||r||^2` term; tracking bounds every sidelobe copy by a
//! common ceiling `eta`, chosen by minimizing
//! `f(kappa) = 2 ln kappa + rho/2 sum_s max(n_s - kappa, 0)^2` with
//! `kappa = sqrt(eta)` and `n_s = ||h_hat_s||`.

use log::warn;
use num_complex::Complex64;

use crate::error::{HbfError, Result};
use crate::CMat;

/// Minimizer of the linearized integrated-sidelobe subproblem:
/// `r* = r_hat - anchor / (rho ||anchor||^2)`.
pub fn solve_h_sd(k: usize, r_hat: &CMat, anchor: &CMat, rho: f64, tol_zero: f64) -> Result<CMat> {
    let energy = anchor.norm_squared();
    if energy.sqrt() < tol_zero {
        return Err(HbfError::LinearizationPoint(k));
    }
    Ok(r_hat - anchor * Complex64::from(1.0 / (rho * energy)))
}

/// Which branch of the per-interval analysis produced the selected ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CeilingCase {
    /// All norms coincide; the search interval is a single point.
    Collapsed,
    /// No sidelobe energy at all.
    Degenerate,
    /// `f` increasing on the winning interval.
    Increasing,
    /// `f` decreasing on the winning interval.
    Decreasing,
    /// Interior local minimum at the larger stationary point.
    Interior,
    /// Larger stationary point beyond the interval; endpoints compared.
    Endpoints,
    /// Lower endpoint compared with the interior local minimum.
    EndpointOrInterior,
}

/// `2 ln kappa + rho/2 sum_s max(n_s - kappa, 0)^2`.
pub fn ceiling_objective(norms: &[f64], rho: f64, kappa: f64) -> f64 {
    let excess: f64 = norms.iter().map(|&n| (n - kappa).max(0.0).powi(2)).sum();
    2.0 * kappa.ln() + 0.5 * rho * excess
}

/// Ascending norms with exact-duplicate (up to relative 1e-12) merging.
pub(crate) fn breakpoints(norms: &[f64], floor: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = norms.iter().map(|&n| n.max(floor)).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    pts
}

/// Peak-sidelobe subproblem: returns `(h, eta, case)`. Columns of `r_hat`
/// with norm above `sqrt(eta)` are shrunk onto the ceiling, the rest are
/// kept.
pub fn solve_h_eta_tt(r_hat: &CMat, rho: f64, tol_zero: f64) -> (CMat, f64, CeilingCase) {
    let norms: Vec<f64> = r_hat.column_iter().map(|c| c.norm()).collect();
    if norms.iter().all(|&n| n < tol_zero) {
        warn!("sidelobe copies vanish; ceiling set to {tol_zero:e}");
        return (CMat::zeros(r_hat.nrows(), r_hat.ncols()), tol_zero, CeilingCase::Degenerate);
    }
    let pts = breakpoints(&norms, tol_zero);
    let (kappa, case) = if pts.len() == 1 {
        (pts[0], CeilingCase::Collapsed)
    } else {
        let mut best = (f64::INFINITY, pts[0], CeilingCase::Increasing);
        for w in pts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let (count, sum) = norms.iter().filter(|&&n| n >= hi).fold((0.0, 0.0), |(c, s), &n| (c + 1.0, s + n));
            let (cand, case) =
                interval_candidate(lo, hi, rho * count, -rho * sum, |x| ceiling_objective(&norms, rho, x));
            let val = ceiling_objective(&norms, rho, cand);
            if val < best.0 || (val == best.0 && cand < best.1) {
                best = (val, cand, case);
            }
        }
        (best.1, best.2)
    };

    let mut h = r_hat.clone();
    for (mut col, &n) in h.column_iter_mut().zip(&norms) {
        if n > kappa {
            col *= Complex64::from(kappa / n);
        }
    }
    (h, kappa * kappa, case)
}

/// Five-case minimization of `f` on `[lo, hi]` where
/// `kappa f'(kappa) = a kappa^2 + b kappa + 2`.
fn interval_candidate(lo: f64, hi: f64, a: f64, b: f64, f: impl Fn(f64) -> f64) -> (f64, CeilingCase) {
    let disc = b * b - 8.0 * a;
    if disc <= 0.0 {
        return (lo, CeilingCase::Increasing);
    }
    let root = disc.sqrt();
    let (v1, v2) = ((-b - root) / (2.0 * a), (-b + root) / (2.0 * a));
    if v2 <= lo || v1 >= hi {
        (lo, CeilingCase::Increasing)
    } else if v1 <= lo && v2 >= hi {
        (hi, CeilingCase::Decreasing)
    } else if v1 <= lo {
        (v2, CeilingCase::Interior)
    } else if v2 >= hi {
        let pick = if f(hi) < f(lo) { hi } else { lo };
        (pick, CeilingCase::Endpoints)
    } else {
        let pick = if f(v2) < f(lo) { v2 } else { lo };
        (pick, CeilingCase::EndpointOrInterior)
    }
}
