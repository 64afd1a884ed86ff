use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{HbfError, Result};
use crate::roots::decreasing_root;
use crate::CMat;

/// Power-constrained least-squares subproblem for the consensus copy `Y_k`:
///
/// ```text
/// min  r1/2 ||Y - M||^2 + r2/2 ||G - C^H Y||^2
///    + r3/2 ||Q - Y^H A_S||^2 + r4/2 ||N - Y^H A_M||^2
/// s.t. ||Y||_F^2 = P
/// ```
#[derive(Debug, Clone)]
pub struct YProblem<'a> {
    /// `M = F_RF F_k - dual_y`.
    pub target: CMat,
    /// `C = [H_u^H w_u]`.
    pub combined: CMat,
    /// `G + dual_gains`, indexed `[(u, i)]`.
    pub gains_target: CMat,
    pub side_steer: &'a CMat,
    /// `h + dual_side` as columns.
    pub side_target: CMat,
    pub main_steer: &'a CMat,
    /// `g + dual_main` as columns.
    pub main_target: CMat,
    pub rho: [f64; 4],
    pub power: f64,
}

#[derive(Debug, Clone)]
pub struct YSolution {
    pub y: CMat,
    /// Multiplier of the power equality.
    pub mu: f64,
}

impl YProblem<'_> {
    /// Objective value at `y`, summed term by term.
    pub fn objective(&self, y: &CMat) -> f64 {
        let [r1, r2, r3, r4] = self.rho;
        let t1 = (y - &self.target).norm_squared();
        let t2 = (&self.gains_target - self.combined.adjoint() * y).norm_squared();
        let t3 = (&self.side_target - y.adjoint() * self.side_steer).norm_squared();
        let t4 = (&self.main_target - y.adjoint() * self.main_steer).norm_squared();
        0.5 * (r1 * t1 + r2 * t2 + r3 * t3 + r4 * t4)
    }

    /// `(Xi, Psi)` such that the objective equals
    /// `tr(Y^H Xi Y) - 2 Re tr(Y^H Psi) + const`.
    pub fn quadratic_form(&self) -> (CMat, CMat) {
        let [r1, r2, r3, r4] = self.rho.map(|r| Complex64::from(0.5 * r));
        let m_t = self.target.nrows();
        let xi = DMatrix::<Complex64>::identity(m_t, m_t) * r1
            + &self.combined * self.combined.adjoint() * r2
            + self.side_steer * self.side_steer.adjoint() * r3
            + self.main_steer * self.main_steer.adjoint() * r4;
        let psi = &self.target * r1
            + &self.combined * &self.gains_target * r2
            + self.side_steer * self.side_target.adjoint() * r3
            + self.main_steer * self.main_target.adjoint() * r4;
        (xi, psi)
    }
}

/// Solves the `Y_k` subproblem in closed form up to the scalar multiplier
/// `mu`, which is the root of the secular equation
/// `sum_m c_m / (sigma_m + mu)^2 = P` with `c_m = ||[D^H Psi]_m||^2`.
pub fn solve_y(problem: &YProblem<'_>, tol_root: f64) -> Result<YSolution> {
    let power = problem.power;
    if !(power > 0.0) {
        return Err(HbfError::Degenerate(format!("power budget {power} must be positive")));
    }
    let (xi, psi) = problem.quadratic_form();
    if psi.norm_squared() == 0.0 {
        return Err(HbfError::Degenerate("Psi = 0: power sphere unreachable".into()));
    }
    let sym = (&xi + xi.adjoint()) * Complex64::from(0.5);
    let eig = SymmetricEigen::new(sym);
    let sigma: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let rotated = eig.eigenvectors.adjoint() * &psi;
    let weight: Vec<f64> = rotated.row_iter().map(|r| r.norm_squared()).collect();

    let (i_min, sigma_min) =
        sigma.iter().copied().enumerate().fold((0, f64::INFINITY), |b, (i, s)| if s < b.1 { (i, s) } else { b });
    let secular = |mu: f64| -> (f64, f64) {
        let (mut p, mut dp) = (0.0, 0.0);
        for (&s, &c) in sigma.iter().zip(&weight) {
            if c == 0.0 {
                continue;
            }
            let d = s + mu;
            p += c / (d * d);
            dp -= 2.0 * c / (d * d * d);
        }
        (p, dp)
    };

    let inv_sqrt_p = power.sqrt().recip();
    let f = |mu: f64| {
        let (p, dp) = secular(mu);
        // decreasing in mu; ~linear near the root
        (inv_sqrt_p - p.sqrt().recip(), 0.5 * dp / (p * p.sqrt()))
    };

    let psi_norm = psi.norm();
    let hi = psi_norm / power.sqrt() - sigma_min;
    let c_min = weight[i_min];
    let mu = if c_min > 0.0 {
        let lo = (c_min / power).sqrt() - sigma_min;
        decreasing_root(f, lo, hi, tol_root * inv_sqrt_p)?
    } else {
        // Hard case candidate: no component along the smallest eigenvector.
        let lo = -sigma_min;
        let (p_lo, _) = secular(lo);
        if p_lo < power {
            return Ok(hard_case(&eig.eigenvectors, &sigma, &rotated, i_min, sigma_min, power, p_lo));
        }
        decreasing_root(f, lo, hi, tol_root * inv_sqrt_p)?
    };

    let scale = DMatrix::from_fn(sigma.len(), rotated.ncols(), |m, u| rotated[(m, u)] / (sigma[m] + mu));
    Ok(YSolution { y: &eig.eigenvectors * scale, mu })
}

fn hard_case(
    vectors: &CMat,
    sigma: &[f64],
    rotated: &CMat,
    i_min: usize,
    sigma_min: f64,
    power: f64,
    partial: f64,
) -> YSolution {
    let mut coeff = DMatrix::from_fn(sigma.len(), rotated.ncols(), |m, u| {
        let d = sigma[m] - sigma_min;
        if d > 0.0 {
            rotated[(m, u)] / d
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    coeff[(i_min, 0)] = Complex64::from((power - partial).sqrt());
    YSolution { y: vectors * coeff, mu: -sigma_min }
}
