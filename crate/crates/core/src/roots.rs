//! Safeguarded Newton iteration for monotonically decreasing scalar
//! functions on a sign-changing bracket.

use crate::error::{HbfError, Result};

pub const NEWTON_CAP: usize = 50;
pub const BISECTION_CAP: usize = 200;

/// Finds the root of a strictly decreasing `f` inside `[lo, hi]`, where
/// `f(lo) >= 0 >= f(hi)`. `f` returns `(value, derivative)`.
///
/// Newton steps are taken while they stay inside the current bracket; any
/// step that leaves it, or every step once `NEWTON_CAP` is used up, is
/// replaced by bisection. Terminates when `|f| <= tol`, when the bracket
/// collapses to machine precision, or errors after `BISECTION_CAP` bisections.
pub fn decreasing_root<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if !(flo >= 0.0 && fhi <= 0.0) {
        return Err(HbfError::Convergence(format!(
            "no sign change on [{lo:.6e}, {hi:.6e}]: f = ({flo:.3e}, {fhi:.3e})"
        )));
    }
    if flo.abs() <= tol {
        return Ok(lo);
    }
    if fhi.abs() <= tol {
        return Ok(hi);
    }

    let mut x = 0.5 * (lo + hi);
    let (mut newton, mut bisections) = (0usize, 0usize);
    loop {
        let (fx, dfx) = f(x);
        if !fx.is_finite() {
            return Err(HbfError::Convergence(format!("non-finite residual at {x:.6e}")));
        }
        if fx.abs() <= tol {
            return Ok(x);
        }
        if fx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE) {
            return Ok(x);
        }

        let step = if newton < NEWTON_CAP && dfx < 0.0 && dfx.is_finite() { Some(x - fx / dfx) } else { None };
        match step {
            Some(next) if next > lo && next < hi => {
                newton += 1;
                x = next;
            }
            _ => {
                bisections += 1;
                if bisections > BISECTION_CAP {
                    return Err(HbfError::Convergence(format!(
                        "bisection cap reached on [{lo:.6e}, {hi:.6e}], residual {fx:.3e}"
                    )));
                }
                x = 0.5 * (lo + hi);
            }
        }
    }
}
