//! Randomized solver-versus-oracle comparisons shared by the integration suites.

#![allow(dead_code)]

use std::f64::consts::TAU;

use dfrc_hbf::metrics::{mmse_combiner, mse, rate, rate_wmmse};
use dfrc_hbf::oracle::{analog_loss, ceiling_cost, floor_cost, grid_min_1d, mu_scan_y, phase_scan, phi_scan_g};
use dfrc_hbf::subsolvers::{
    element_psi, optimal_element, solve_g_eps_sd, solve_gain_row, solve_h_eta_tt, solve_y, YProblem,
};
use dfrc_hbf::testutil::{random_cmat, random_cvec, random_phases, rng};
use dfrc_hbf::{CMat, CVec};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const TOL_ROOT: f64 = 1e-10;
pub const TOL_ZERO: f64 = 1e-12;

/// Signed gap `(solver - oracle) / max(|oracle|, 1)`.
pub fn rel_gap(solver: f64, oracle: f64) -> f64 {
    (solver - oracle) / oracle.abs().max(1.0)
}

#[derive(Debug, Clone, Copy)]
pub struct GapReport {
    pub instances: usize,
    /// Largest `|rel_gap|` seen.
    pub worst: f64,
}

impl GapReport {
    fn collect(gaps: impl Iterator<Item = f64>) -> Self {
        let mut instances = 0;
        let mut worst: f64 = 0.0;
        for g in gaps {
            instances += 1;
            worst = worst.max(g.abs());
        }
        Self { instances, worst }
    }
}

/// Zooming scan: a coarse uniform grid followed by repeated refinement around
/// the incumbent, each round on a window of two coarse cells.
pub fn zoom_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize, rounds: usize) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut best = grid_min_1d(&f, a, b, n);
    for _ in 0..rounds {
        let cell = (b - a) / (n - 1) as f64;
        a = (best.0 - cell).max(lo);
        b = (best.0 + cell).min(hi);
        let cand = grid_min_1d(&f, a, b, n);
        if cand.1 <= best.1 {
            best = cand;
        }
    }
    best
}

fn scaled(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    let s: f64 = rng.random_range(0.3..3.0);
    random_cmat(rng, rows, cols) * Complex64::from(s)
}

pub struct YInstance {
    pub target: CMat,
    pub combined: CMat,
    pub gains_target: CMat,
    pub side_steer: CMat,
    pub side_target: CMat,
    pub main_steer: CMat,
    pub main_target: CMat,
    pub rho: [f64; 4],
    pub power: f64,
}

impl YInstance {
    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        let m_t = rng.random_range(2..=6);
        let users = rng.random_range(1..=3);
        let s = rng.random_range(1..=6);
        let m = rng.random_range(1..=6);
        Self {
            target: scaled(rng, m_t, users),
            combined: scaled(rng, m_t, users),
            gains_target: scaled(rng, users, users),
            side_steer: random_phases(rng, m_t, s),
            side_target: scaled(rng, users, s),
            main_steer: random_phases(rng, m_t, m),
            main_target: scaled(rng, users, m),
            rho: [(); 4].map(|_| rng.random_range(0.1..10.0)),
            power: rng.random_range(0.5..3.0),
        }
    }

    pub fn problem(&self) -> YProblem<'_> {
        YProblem {
            target: self.target.clone(),
            combined: self.combined.clone(),
            gains_target: self.gains_target.clone(),
            side_steer: &self.side_steer,
            side_target: self.side_target.clone(),
            main_steer: &self.main_steer,
            main_target: self.main_target.clone(),
            rho: self.rho,
            power: self.power,
        }
    }

    /// Quadratic and linear coefficients assembled from the raw blocks, up
    /// to a common factor that does not move the minimizer.
    pub fn oracle_form(&self) -> (CMat, CMat) {
        let [r1, r2, r3, r4] = self.rho.map(Complex64::from);
        let n = self.target.nrows();
        let xi = DMatrix::<Complex64>::identity(n, n) * r1
            + &self.combined * self.combined.adjoint() * r2
            + &self.side_steer * self.side_steer.adjoint() * r3
            + &self.main_steer * self.main_steer.adjoint() * r4;
        let psi = &self.target * r1
            + &self.combined * &self.gains_target * r2
            + &self.side_steer * self.side_target.adjoint() * r3
            + &self.main_steer * self.main_target.adjoint() * r4;
        (xi, psi)
    }
}

pub fn y_gaps(seed: u64, n: usize) -> GapReport {
    let mut rng = rng(seed);
    GapReport::collect((0..n).map(|_| {
        let inst = YInstance::random(&mut rng);
        let problem = inst.problem();
        let y = solve_y(&problem, TOL_ROOT).expect("solve_y").y;
        let (xi, psi) = inst.oracle_form();
        let y_ref = mu_scan_y(&xi, &psi, inst.power, 4000);
        rel_gap(problem.objective(&y), problem.objective(&y_ref))
    }))
}

pub fn gain_gaps(seed: u64, n: usize) -> GapReport {
    let mut rng = rng(seed);
    GapReport::collect((0..n).map(|_| {
        let users = rng.random_range(1..=6);
        let u = rng.random_range(0..users);
        let scale: f64 = rng.random_range(0.2..3.0);
        let center: CVec = random_cvec(&mut rng, users) * Complex64::from(scale);
        let xi: f64 = rng.random_range(0.05..2.0);
        let (g, _) = solve_gain_row(&center, u, xi, TOL_ROOT).expect("solve_gain_row");
        let mut offset = center.clone();
        offset[u] -= Complex64::new(1.0, 0.0);
        let phi_max = (offset.norm() / xi.sqrt()).max(1.0);
        let g_ref = phi_scan_g(&center, u, xi, phi_max, 2001);
        rel_gap((g - &center).norm_squared(), (g_ref - &center).norm_squared())
    }))
}

fn norm_range(columns: &CMat) -> (f64, f64) {
    columns.column_iter().map(|c| c.norm()).fold((f64::INFINITY, 0.0), |(lo, hi), n| (lo.min(n), hi.max(n)))
}

pub fn ceiling_gaps(seed: u64, n: usize) -> GapReport {
    let mut rng = rng(seed);
    GapReport::collect((0..n).map(|_| {
        let users = rng.random_range(1..=4);
        let s = rng.random_range(1..=6);
        let r_hat = scaled(&mut rng, users, s);
        let rho = rng.random_range(0.1..10.0);
        let (_, eta, _) = solve_h_eta_tt(&r_hat, rho, TOL_ZERO);
        let (lo, hi) = norm_range(&r_hat);
        let (_, best) = zoom_min(|e| ceiling_cost(&r_hat, rho, e), lo * lo, hi * hi, 100_001, 4);
        rel_gap(ceiling_cost(&r_hat, rho, eta), best)
    }))
}

pub fn floor_gaps(seed: u64, n: usize) -> GapReport {
    let mut rng = rng(seed);
    GapReport::collect((0..n).map(|_| {
        let users = rng.random_range(1..=4);
        let m = rng.random_range(1..=6);
        let t_hat = scaled(&mut rng, users, m);
        let rho = rng.random_range(0.1..10.0);
        let (_, eps, _) = solve_g_eps_sd(0, &t_hat, rho, TOL_ZERO).expect("solve_g_eps_sd");
        let (lo, hi) = norm_range(&t_hat);
        let (_, best) = zoom_min(|e| floor_cost(&t_hat, rho, e), lo * lo, hi * hi, 100_001, 4);
        rel_gap(floor_cost(&t_hat, rho, eps), best)
    }))
}

pub struct AnalogInstance {
    pub f_rf: CMat,
    pub f_bb: Vec<CMat>,
    pub v: Vec<CMat>,
}

impl AnalogInstance {
    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        let m_t = rng.random_range(1..=6);
        let n_t = rng.random_range(1..=4);
        let users = rng.random_range(1..=3);
        let k = rng.random_range(1..=3);
        Self {
            f_rf: random_phases(rng, m_t, n_t),
            f_bb: (0..k).map(|_| random_cmat(rng, n_t, users)).collect(),
            v: (0..k).map(|_| scaled(rng, m_t, users)).collect(),
        }
    }
}

/// Single-element updates against a phase scan refined by zooming.
pub fn ccd_element_gaps(seed: u64, n: usize) -> GapReport {
    let mut rng = rng(seed);
    GapReport::collect((0..n).map(|_| {
        let inst = AnalogInstance::random(&mut rng);
        let i = rng.random_range(0..inst.f_rf.nrows());
        let j = rng.random_range(0..inst.f_rf.ncols());
        let loss_at = |x: Complex64| {
            let mut f = inst.f_rf.clone();
            f[(i, j)] = x;
            analog_loss(&f, &inst.f_bb, &inst.v)
        };
        let x = optimal_element(element_psi(&inst.f_rf, &inst.f_bb, &inst.v, i, j)).unwrap_or(inst.f_rf[(i, j)]);
        let coarse = phase_scan(loss_at, 3600);
        let cell = TAU / 3600.0;
        let (_, best) = zoom_min(|g| loss_at(Complex64::from_polar(1.0, -g)), coarse - cell, coarse + cell, 10_001, 3);
        rel_gap(loss_at(x), best)
    }))
}

/// Largest `|rate - rate_wmmse(1/e, e)|` at the MMSE combiner.
pub fn wmmse_identity_error(seed: u64, n: usize) -> f64 {
    let mut rng = rng(seed);
    (0..n)
        .map(|_| {
            let m_r = rng.random_range(1..=4);
            let m_t = rng.random_range(2..=6);
            let users = rng.random_range(1..=3);
            let sigma_n2: f64 = rng.random_range(0.05..2.0);
            let h = random_cmat(&mut rng, m_r, m_t);
            let b = scaled(&mut rng, m_t, users);
            let u = rng.random_range(0..users);
            let w = mmse_combiner(&h, &b, sigma_n2, u).unwrap();
            let e = mse(&h, &b, &w, sigma_n2, u).unwrap();
            let r = rate(&h, &b, &w, sigma_n2, u).unwrap();
            (r - rate_wmmse(1.0 / e, e)).abs()
        })
        .fold(0.0, f64::max)
}
