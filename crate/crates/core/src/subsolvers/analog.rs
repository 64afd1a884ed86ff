use std::f64::consts::PI;

use num_complex::Complex64;

use crate::CMat;

/// `sum_k ||V_k - F_RF F_k||_F^2`.
pub fn analog_objective(f_rf: &CMat, f_bb: &[CMat], v: &[CMat]) -> f64 {
    f_bb.iter().zip(v).map(|(fk, vk)| (vk - f_rf * fk).norm_squared()).sum()
}

/// Coefficient `psi` of the single-element objective
/// `const + 2 Re(x psi)` in `x = F_RF(i, j)`, summed over subcarriers.
pub fn element_psi(f_rf: &CMat, f_bb: &[CMat], v: &[CMat], i: usize, j: usize) -> Complex64 {
    let mut psi = Complex64::new(0.0, 0.0);
    for (fk, vk) in f_bb.iter().zip(v) {
        for u in 0..fk.ncols() {
            let mut rest = -vk[(i, u)];
            for n in 0..f_rf.ncols() {
                if n != j {
                    rest += f_rf[(i, n)] * fk[(n, u)];
                }
            }
            psi += fk[(j, u)] * rest.conj();
        }
    }
    psi
}

/// Unit-modulus minimizer of `Re(x psi)`: `exp(-j(arg psi + pi))`.
/// `None` when `psi = 0` and every phase is optimal.
pub fn optimal_element(psi: Complex64) -> Option<Complex64> {
    if psi == Complex64::new(0.0, 0.0) {
        None
    } else {
        Some(Complex64::from_polar(1.0, -(psi.arg() + PI)))
    }
}

#[derive(Debug, Clone, Default)]
pub struct CcdReport {
    pub sweeps: usize,
    pub objective: f64,
    /// Objective after every element update, filled only when requested.
    pub history: Vec<f64>,
}

/// Cyclic coordinate descent over the entries of `F_RF` in row-major order.
/// Stops after `ccd_max` sweeps or once a sweep lowers the objective by less
/// than `tol` relative.
pub fn solve_frf_ccd(
    f_rf_init: &CMat,
    f_bb: &[CMat],
    v: &[CMat],
    ccd_max: usize,
    tol: f64,
    record: bool,
) -> (CMat, CcdReport) {
    let mut f_rf = f_rf_init.clone();
    // residuals R_k = F_RF F_k - V_k, updated one row at a time
    let mut resid: Vec<CMat> = f_bb.iter().zip(v).map(|(fk, vk)| &f_rf * fk - vk).collect();
    let mut objective: f64 = resid.iter().map(|r| r.norm_squared()).sum();
    let mut report = CcdReport { history: if record { vec![objective] } else { Vec::new() }, ..Default::default() };

    for _ in 0..ccd_max {
        let start = objective;
        for i in 0..f_rf.nrows() {
            for j in 0..f_rf.ncols() {
                let old = f_rf[(i, j)];
                let mut psi = Complex64::new(0.0, 0.0);
                for (fk, rk) in f_bb.iter().zip(&resid) {
                    for u in 0..fk.ncols() {
                        psi += fk[(j, u)] * (rk[(i, u)] - old * fk[(j, u)]).conj();
                    }
                }
                let Some(new) = optimal_element(psi) else { continue };
                let delta = new - old;
                for (fk, rk) in f_bb.iter().zip(resid.iter_mut()) {
                    for u in 0..fk.ncols() {
                        let before = rk[(i, u)].norm_sqr();
                        rk[(i, u)] += delta * fk[(j, u)];
                        objective += rk[(i, u)].norm_sqr() - before;
                    }
                }
                f_rf[(i, j)] = new;
                if record {
                    report.history.push(analog_objective(&f_rf, f_bb, v));
                }
            }
        }
        report.sweeps += 1;
        if start - objective <= tol * start.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    report.objective = analog_objective(&f_rf, f_bb, v);
    (f_rf, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_cmat, random_phases, rng};

    #[test]
    fn unit_psi_gives_minus_one() {
        let x = optimal_element(Complex64::new(1.0, 0.0)).unwrap();
        assert!((x - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!(((x * Complex64::new(1.0, 0.0)).re * 2.0 + 2.0).abs() < 1e-15);
        assert!(optimal_element(Complex64::new(0.0, 0.0)).is_none());
    }

    #[test]
    fn single_stream_recovers_phases() {
        let mut r = rng(11);
        let truth = random_phases(&mut r, 6, 1);
        let f = vec![CMat::from_element(1, 1, Complex64::new(0.8, 0.0))];
        let v = vec![&truth * &f[0]];
        let init = random_phases(&mut r, 6, 1);
        let (out, _) = solve_frf_ccd(&init, &f, &v, 1, 0.0, false);
        assert!((out - truth).norm() < 1e-10);
    }

    #[test]
    fn psi_matches_direct_expansion() {
        let mut r = rng(12);
        let f_rf = random_phases(&mut r, 4, 3);
        let f_bb: Vec<CMat> = (0..2).map(|_| random_cmat(&mut r, 3, 2)).collect();
        let v: Vec<CMat> = (0..2).map(|_| random_cmat(&mut r, 4, 2)).collect();
        let psi = element_psi(&f_rf, &f_bb, &v, 2, 1);
        // objective(x) - objective(-x) = 4 Re(x psi)
        let x = Complex64::from_polar(1.0, 0.7);
        let mut a = f_rf.clone();
        a[(2, 1)] = x;
        let mut b = f_rf.clone();
        b[(2, 1)] = -x;
        let diff = analog_objective(&a, &f_bb, &v) - analog_objective(&b, &f_bb, &v);
        assert!((diff - 4.0 * (x * psi).re).abs() < 1e-10);
    }

    #[test]
    fn objective_history_is_monotone() {
        let mut r = rng(13);
        let f_rf = random_phases(&mut r, 5, 2);
        let f_bb: Vec<CMat> = (0..3).map(|_| random_cmat(&mut r, 2, 2)).collect();
        let v: Vec<CMat> = (0..3).map(|_| random_cmat(&mut r, 5, 2)).collect();
        let (out, rep) = solve_frf_ccd(&f_rf, &f_bb, &v, 5, 0.0, true);
        assert!(rep.history.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0]));
        assert!(out.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        assert!((rep.objective - analog_objective(&out, &f_bb, &v)).abs() < 1e-12);
    }
}
