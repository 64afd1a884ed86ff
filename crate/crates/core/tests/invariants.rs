mod common;

use common::*;
use dfrc_hbf::subsolvers::{
    analog_objective, element_psi, optimal_element, solve_frf_ccd, solve_g_eps_sd, solve_g_tt, solve_gain_row,
    solve_h_eta_tt, solve_h_sd, solve_y,
};
use dfrc_hbf::testutil::{random_cmat, random_cvec, rng};
use dfrc_hbf::CMat;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn shifted_power(xi: &CMat, psi: &CMat, mu: f64) -> f64 {
    let n = xi.nrows();
    let shifted = xi + DMatrix::<Complex64>::identity(n, n) * Complex64::from(mu);
    shifted.lu().solve(psi).expect("nonsingular shift").norm_squared()
}

fn min_eigenvalue(a: &CMat) -> f64 {
    let sym = (a + a.adjoint()) * Complex64::from(0.5);
    sym.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn consensus_copy_on_power_sphere(seed in any::<u64>()) {
        let inst = YInstance::random(&mut rng(seed));
        let sol = solve_y(&inst.problem(), TOL_ROOT).unwrap();
        let rel = (sol.y.norm_squared() - inst.power).abs() / inst.power;
        prop_assert!(rel <= 1e-8, "power error {rel:e}");
    }

    #[test]
    fn secular_function_changes_sign_at_multiplier(seed in any::<u64>()) {
        let inst = YInstance::random(&mut rng(seed));
        let problem = inst.problem();
        let sol = solve_y(&problem, TOL_ROOT).unwrap();
        let (xi, psi) = problem.quadratic_form();
        let floor = -min_eigenvalue(&xi);
        prop_assume!(sol.mu > floor);
        let step = 1e-4 * (sol.mu - floor).min(1.0);
        let below = shifted_power(&xi, &psi, sol.mu - step);
        let above = shifted_power(&xi, &psi, sol.mu + step);
        prop_assert!(below > inst.power && above < inst.power, "{below} / {} / {above}", inst.power);
    }

    #[test]
    fn gains_inside_qos_ball(seed in any::<u64>(), users in 1usize..=6, xi in 0.0f64..2.0) {
        let mut r = rng(seed);
        let u = r.random_range(0..users);
        let center = random_cvec(&mut r, users) * Complex64::from(3.0);
        let (g, phi) = solve_gain_row(&center, u, xi, TOL_ROOT).unwrap();
        let mut offset = g.clone();
        offset[u] -= Complex64::new(1.0, 0.0);
        prop_assert!(offset.norm_squared() <= xi + 1e-8 * xi.max(1.0));
        prop_assert!(phi >= 0.0);
    }

    #[test]
    fn sidelobe_copies_under_ceiling(seed in any::<u64>(), users in 1usize..=4, s in 1usize..=6, rho in 0.1f64..10.0) {
        let r_hat = random_cmat(&mut rng(seed), users, s);
        let (h, eta, _) = solve_h_eta_tt(&r_hat, rho, TOL_ZERO);
        let norms: Vec<f64> = r_hat.column_iter().map(|c| c.norm()).collect();
        let (lo, hi) = norms.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &n| (a.min(n), b.max(n)));
        prop_assert!(eta >= lo * lo * (1.0 - 1e-12) && eta <= hi * hi * (1.0 + 1e-12));
        for (col, orig) in h.column_iter().zip(r_hat.column_iter()) {
            prop_assert!(col.norm_squared() <= eta * (1.0 + 1e-12));
            // shrinkage keeps direction
            prop_assert!((orig.dotc(&col)).im.abs() <= 1e-12 * orig.norm_squared().max(1.0));
        }
    }

    #[test]
    fn mainlobe_copies_above_floor(seed in any::<u64>(), users in 1usize..=4, m in 1usize..=6, rho in 0.1f64..10.0) {
        let t_hat = random_cmat(&mut rng(seed), users, m);
        let (g, eps, _) = solve_g_eps_sd(0, &t_hat, rho, TOL_ZERO).unwrap();
        for col in g.column_iter() {
            prop_assert!(col.norm_squared() >= eps * (1.0 - 1e-12));
        }
    }

    #[test]
    fn linearized_updates_are_stationary(seed in any::<u64>(), rho in 0.1f64..10.0) {
        // gradient of rho/2 ||x - x_hat||^2 +/- <anchor, x>/||anchor||^2 vanishes
        let mut r = rng(seed);
        let hat = random_cmat(&mut r, 3, 4);
        let anchor = random_cmat(&mut r, 3, 4);
        let e = anchor.norm_squared();
        let h = solve_h_sd(0, &hat, &anchor, rho, TOL_ZERO).unwrap();
        let grad_h = (&h - &hat) * Complex64::from(rho) + &anchor * Complex64::from(1.0 / e);
        prop_assert!(grad_h.norm() <= 1e-10);
        let g = solve_g_tt(0, &hat, &anchor, rho, TOL_ZERO).unwrap();
        let grad_g = (&g - &hat) * Complex64::from(rho) - &anchor * Complex64::from(1.0 / e);
        prop_assert!(grad_g.norm() <= 1e-10);
    }

    #[test]
    fn analog_descent_is_monotone(seed in any::<u64>(), sweeps in 1usize..=5) {
        let inst = AnalogInstance::random(&mut rng(seed));
        let (f_rf, report) = solve_frf_ccd(&inst.f_rf, &inst.f_bb, &inst.v, sweeps, 0.0, true);
        for w in report.history.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12, "{} -> {}", w[0], w[1]);
        }
        prop_assert!(f_rf.iter().all(|z| (z.norm() - 1.0).abs() <= 1e-12));
        prop_assert!((report.objective - analog_objective(&f_rf, &inst.f_bb, &inst.v)).abs() <= 1e-9 * report.objective.max(1.0));
    }

    #[test]
    fn analog_sweep_equals_sequential_element_updates(seed in any::<u64>()) {
        let inst = AnalogInstance::random(&mut rng(seed));
        let (swept, _) = solve_frf_ccd(&inst.f_rf, &inst.f_bb, &inst.v, 1, 0.0, false);
        let mut f = inst.f_rf.clone();
        for i in 0..f.nrows() {
            for j in 0..f.ncols() {
                if let Some(x) = optimal_element(element_psi(&f, &inst.f_bb, &inst.v, i, j)) {
                    f[(i, j)] = x;
                }
            }
        }
        prop_assert!((swept - f).norm() <= 1e-9);
    }
}
