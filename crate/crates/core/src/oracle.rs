//! Brute-force reference solvers for the closed-form block updates.
//!
//! Nothing here calls into [`crate::subsolvers`]: every oracle scans a
//! dense grid with its own arithmetic, so agreement is evidence rather than
//! tautology.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{CMat, CVec};

/// Dense uniform scan of `f` over `[lo, hi]` with `n >= 2` points. Returns
/// `(argmin, min)`, the first minimizer on ties.
pub fn grid_min_1d(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> (f64, f64) {
    let n = n.max(2);
    let step = (hi - lo) / (n - 1) as f64;
    let mut best = (lo, f(lo));
    for i in 1..n {
        let x = if i == n - 1 { hi } else { lo + step * i as f64 };
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}

/// Positive definiteness through the real embedding `[[A_r, -A_i], [A_i, A_r]]`:
/// real Cholesky rejects non-positive pivots, whereas the complex
/// factorization happily takes square roots of negative ones.
fn positive_definite(a: &CMat) -> bool {
    let n = a.nrows();
    let real = DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let z = a[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    real.cholesky().is_some()
}

fn shifted_solve(xi: &CMat, psi: &CMat, mu: f64) -> Option<CMat> {
    let n = xi.nrows();
    let shifted = xi + DMatrix::<Complex64>::identity(n, n) * Complex64::from(mu);
    if !positive_definite(&shifted) {
        return None;
    }
    shifted.lu().solve(psi)
}

/// Reference solution of `min tr(Y^H Xi Y) - 2 Re tr(Y^H Psi)` on the sphere
/// `||Y||_F^2 = power`: scans `mu` on a log-spaced grid above the smallest
/// shift that keeps `Xi + mu I` positive definite, then bisects the bracket
/// around the power crossing.
pub fn mu_scan_y(xi: &CMat, psi: &CMat, power: f64, n_grid: usize) -> CMat {
    // smallest admissible shift, located by Cholesky feasibility
    let bound = xi.iter().map(|z| z.norm()).sum::<f64>() + 1.0;
    let (mut bad, mut good) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (bad + good);
        if shifted_solve(xi, psi, mid).is_some() {
            good = mid;
        } else {
            bad = mid;
        }
    }
    let floor = good;
    let pw = |mu: f64| shifted_solve(xi, psi, mu).map_or(f64::INFINITY, |y| y.norm_squared());

    let scale = bound + psi.norm() / power.sqrt();
    let grid: Vec<f64> =
        (0..n_grid).map(|i| floor + scale * 10f64.powf(-14.0 + 16.0 * i as f64 / (n_grid - 1) as f64)).collect();
    let mut lo = floor;
    let mut hi = *grid.last().unwrap();
    for w in grid.windows(2) {
        if pw(w[0]) >= power && pw(w[1]) <= power {
            lo = w[0];
            hi = w[1];
            break;
        }
    }
    // power is decreasing in mu
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if pw(mid) > power {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y = shifted_solve(xi, psi, 0.5 * (lo + hi)).expect("shift above floor");
    let s = (power / y.norm_squared()).sqrt();
    y * Complex64::from(s)
}

/// Phase `gamma` in `(0, 2 pi]` minimizing `f(exp(-j gamma))` over `n` uniform points.
pub fn phase_scan(f: impl Fn(Complex64) -> f64, n: usize) -> f64 {
    let mut best = (TAU, f(Complex64::new(1.0, 0.0)));
    for i in 1..n {
        let g = TAU * i as f64 / n as f64;
        let v = f(Complex64::from_polar(1.0, -g));
        if v < best.1 {
            best = (g, v);
        }
    }
    best.0
}

/// `sum_k ||V_k - F_RF F_k||^2` by explicit loops.
pub fn analog_loss(f_rf: &CMat, f_bb: &[CMat], v: &[CMat]) -> f64 {
    let mut total = 0.0;
    for (fk, vk) in f_bb.iter().zip(v) {
        for i in 0..vk.nrows() {
            for u in 0..vk.ncols() {
                let mut acc = -vk[(i, u)];
                for n in 0..f_rf.ncols() {
                    acc += f_rf[(i, n)] * fk[(n, u)];
                }
                total += acc.norm_sqr();
            }
        }
    }
    total
}

fn qos_excess(g: &CVec, u: usize) -> f64 {
    g.iter()
        .enumerate()
        .map(|(i, z)| if i == u { (z - Complex64::new(1.0, 0.0)).norm_sqr() } else { z.norm_sqr() })
        .sum()
}

/// Feasibility-filtered scan over the path `G(phi) = (c + phi e_u)/(1 + phi)`,
/// `phi in [0, phi_max]`, keeping the feasible point closest to `c`; the
/// winning cell is refined by repeated sub-gridding.
pub fn phi_scan_g(center: &CVec, u: usize, xi: f64, phi_max: f64, n_grid: usize) -> CVec {
    let at = |phi: f64| {
        let mut g = center.clone();
        g[u] += Complex64::from(phi);
        g / Complex64::from(1.0 + phi)
    };
    let cost = |phi: f64| {
        let g = at(phi);
        if qos_excess(&g, u) <= xi {
            (g - center).norm_squared()
        } else {
            f64::INFINITY
        }
    };
    let (mut lo, mut hi) = (0.0, phi_max);
    let mut best = 0.0;
    for _ in 0..8 {
        let (x, v) = grid_min_1d(cost, lo, hi, n_grid);
        if !v.is_finite() {
            break;
        }
        best = x;
        let cell = (hi - lo) / (n_grid - 1) as f64;
        lo = (x - cell).max(0.0);
        hi = x + cell;
    }
    at(best)
}

/// `ln eta + rho/2 sum_s ||proj_eta(h_s) - h_s||^2` with the projection onto
/// the ball of radius `sqrt(eta)` carried out explicitly.
pub fn ceiling_cost(columns: &CMat, rho: f64, eta: f64) -> f64 {
    let r = eta.sqrt();
    let mut pen = 0.0;
    for c in columns.column_iter() {
        let n = c.norm();
        if n > r {
            let p = c * Complex64::from(r / n);
            pen += (p - c).norm_squared();
        }
    }
    eta.ln() + 0.5 * rho * pen
}

/// `-ln eps + rho/2 sum_m ||lift_eps(g_m) - g_m||^2`.
pub fn floor_cost(columns: &CMat, rho: f64, eps: f64) -> f64 {
    let r = eps.sqrt();
    let mut pen = 0.0;
    for c in columns.column_iter() {
        let n = c.norm();
        if n < r && n > 0.0 {
            let p = c * Complex64::from(r / n);
            pen += (p - c).norm_squared();
        }
    }
    -eps.ln() + 0.5 * rho * pen
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_argmin() {
        let (x, v) = grid_min_1d(|x| x * x, -1.0, 1.0, 10001);
        assert!(x.abs() <= 1e-4);
        assert!(v <= 1e-8);
    }

    #[test]
    fn monotone_argmin_at_lower_end() {
        let (x, _) = grid_min_1d(|x| x.exp(), 0.5, 3.0, 101);
        assert_eq!(x, 0.5);
    }

    #[test]
    fn ceiling_example() {
        // norms {1, 2}, rho = 2 has its minimum at eta = 1
        let cols = CMat::from_row_slice(1, 2, &[Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)]);
        let (eta, _) = grid_min_1d(|e| ceiling_cost(&cols, 2.0, e), 1.0, 4.0, 100_001);
        assert!((eta - 1.0).abs() < 1e-4);
    }

    #[test]
    fn indefinite_shift_rejected() {
        let a = CMat::from_diagonal(&CVec::from_vec(vec![Complex64::new(2.0, 0.0), Complex64::new(-1.0, 0.0)]));
        assert!(!positive_definite(&a));
        let b = CMat::from_row_slice(
            2,
            2,
            &[Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0), Complex64::new(2.0, 0.0)],
        );
        assert!(positive_definite(&b));
    }

    #[test]
    fn diagonal_secular_equation() {
        // Xi = diag(1, 3), Psi = [2; 0], P = 1: y1 = 2/(1+mu) = 1 gives mu = 1
        let xi = CMat::from_diagonal(&CVec::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(3.0, 0.0)]));
        let psi = CMat::from_column_slice(2, 1, &[Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)]);
        let y = mu_scan_y(&xi, &psi, 1.0, 2000);
        assert!((y[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        assert!(y[(1, 0)].norm() < 1e-12);
    }

    #[test]
    fn identity_xi_projects_psi() {
        let xi = CMat::identity(3, 3) * Complex64::from(0.5);
        let psi = CMat::from_fn(3, 2, |i, j| Complex64::new(i as f64 + 1.0, j as f64 - 0.5));
        let y = mu_scan_y(&xi, &psi, 2.0, 2000);
        let expect = &psi * Complex64::from((2.0 / psi.norm_squared()).sqrt());
        assert!((y - expect).norm() < 1e-8);
    }

    #[test]
    fn phase_scan_examples() {
        let g1 = phase_scan(|x| 2.0 * x.re, 3600);
        assert!((g1 - std::f64::consts::PI).abs() <= TAU / 3600.0);
        let j = Complex64::new(0.0, 1.0);
        let g2 = phase_scan(|x| 2.0 * (x * j).re, 3600);
        assert!((g2 - 1.5 * std::f64::consts::PI).abs() <= TAU / 3600.0);
    }

    #[test]
    fn phi_scan_scalar_boundary() {
        let c = CVec::from_vec(vec![Complex64::new(3.0, 0.0)]);
        let g = phi_scan_g(&c, 0, 1.0, 10.0, 2001);
        assert!((g[0] - Complex64::new(2.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn phi_scan_feasible_center() {
        let c = CVec::from_vec(vec![Complex64::new(1.2, 0.1), Complex64::new(0.1, 0.0)]);
        let g = phi_scan_g(&c, 0, 1.0, 10.0, 2001);
        assert_eq!(g, c);
    }
}
