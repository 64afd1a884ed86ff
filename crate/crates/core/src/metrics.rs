//! Communication and radar figures of merit.
//!
//! The communication metrics take the *effective* beamformer
//! `B_k = F_RF F_k` (`M_t x U`, column `u` is `b_{k,u}`), so they apply
//! equally to a hybrid beamformer and to the consensus copy `Y_k` the solver
//! iterates on.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{HbfError, Result};
use crate::model::Geometry;
use crate::{CMat, CVec};

/// Shared analog beamformer plus one digital beamformer per subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridBeamformer {
    /// `M_t x N_t`, unit-modulus entries.
    pub f_rf: CMat,
    /// `K` matrices of size `N_t x U`.
    pub f_bb: Vec<CMat>,
}

impl HybridBeamformer {
    /// `F_RF F_k`.
    pub fn effective(&self, k: usize) -> CMat {
        &self.f_rf * &self.f_bb[k]
    }

    pub fn effective_all(&self) -> Vec<CMat> {
        (0..self.f_bb.len()).map(|k| self.effective(k)).collect()
    }

    /// Largest deviation of `|F_RF(i,j)|` from one.
    pub fn modulus_error(&self) -> f64 {
        self.f_rf.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Rescales each `F_k` so that `||F_RF F_k||_F^2 = P_k`.
    pub fn normalize_power(&mut self, power: &[f64]) {
        for (k, p) in power.iter().enumerate() {
            let current = self.effective(k).norm_squared();
            if current > 0.0 {
                self.f_bb[k] *= Complex64::from((p / current).sqrt());
            }
        }
    }
}

/// Receive combiners `w_{k,u}` and WMMSE weights `omega_{k,u}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinerSet {
    /// `w[k][u]`, length `M_r`.
    pub w: Vec<Vec<CVec>>,
    /// `omega[k][u] > 0`.
    pub omega: Vec<Vec<f64>>,
}

fn check_dims(h: &CMat, b_eff: &CMat, w: Option<&CVec>, u: usize) -> Result<()> {
    if h.ncols() != b_eff.nrows() {
        return Err(HbfError::Dimension(format!(
            "channel has {} columns, beamformer {} rows",
            h.ncols(),
            b_eff.nrows()
        )));
    }
    if u >= b_eff.ncols() {
        return Err(HbfError::Dimension(format!("user {u} out of range for {} streams", b_eff.ncols())));
    }
    if let Some(w) = w {
        if w.len() != h.nrows() {
            return Err(HbfError::Dimension(format!("combiner length {} vs {} receive antennas", w.len(), h.nrows())));
        }
    }
    Ok(())
}

/// `w^H H b_i` for every stream `i`.
fn received_gains(h: &CMat, b_eff: &CMat, w: &CVec) -> Vec<Complex64> {
    (w.adjoint() * h * b_eff).iter().copied().collect()
}

/// Signal-to-interference-plus-noise ratio of user `u`.
pub fn sinr(h: &CMat, b_eff: &CMat, w: &CVec, sigma_n2: f64, u: usize) -> Result<f64> {
    check_dims(h, b_eff, Some(w), u)?;
    let gains = received_gains(h, b_eff, w);
    let signal = gains[u].norm_sqr();
    if signal == 0.0 {
        return Ok(0.0);
    }
    let interference: f64 = gains.iter().enumerate().filter(|(i, _)| *i != u).map(|(_, g)| g.norm_sqr()).sum();
    Ok(signal / (interference + sigma_n2 * w.norm_squared()))
}

/// Achievable rate `log2(1 + SINR)` in bits/s/Hz.
pub fn rate(h: &CMat, b_eff: &CMat, w: &CVec, sigma_n2: f64, u: usize) -> Result<f64> {
    Ok((1.0 + sinr(h, b_eff, w, sigma_n2, u)?).log2())
}

/// Symbol mean-square error `|w^H H b_u - 1|^2 + sum_{i != u} |w^H H b_i|^2 + sigma^2 w^H w`.
pub fn mse(h: &CMat, b_eff: &CMat, w: &CVec, sigma_n2: f64, u: usize) -> Result<f64> {
    check_dims(h, b_eff, Some(w), u)?;
    let gains = received_gains(h, b_eff, w);
    let own = (gains[u] - Complex64::new(1.0, 0.0)).norm_sqr();
    let interference: f64 = gains.iter().enumerate().filter(|(i, _)| *i != u).map(|(_, g)| g.norm_sqr()).sum();
    Ok(own + interference + sigma_n2 * w.norm_squared())
}

/// MMSE combiner `(H B B^H H^H + sigma^2 I)^{-1} H b_u`.
pub fn mmse_combiner(h: &CMat, b_eff: &CMat, sigma_n2: f64, u: usize) -> Result<CVec> {
    check_dims(h, b_eff, None, u)?;
    let hb = h * b_eff;
    let gram = &hb * hb.adjoint() + DMatrix::<Complex64>::identity(h.nrows(), h.nrows()) * Complex64::from(sigma_n2);
    let rhs = hb.column(u).into_owned();
    if let Some(chol) = gram.clone().cholesky() {
        return Ok(chol.solve(&rhs));
    }
    gram.lu().solve(&rhs).ok_or(HbfError::Singular("MMSE combiner"))
}

/// Rate expressed through the WMMSE weight: `log2(omega) - omega e + 1`.
pub fn rate_wmmse(omega: f64, e: f64) -> f64 {
    omega.log2() - omega * e + 1.0
}

/// Radius `xi` of the QoS ball `|G_uu - 1|^2 + sum_{i != u} |G_ui|^2 <= xi`:
/// `(log2(omega) - omega sigma^2 w^H w + 1 - chi) / omega`. A negative value
/// means the ball is empty for the current weights.
pub fn qos_bound_xi(omega: f64, w: &CVec, sigma_n2: f64, chi: f64) -> f64 {
    (omega.log2() - omega * sigma_n2 * w.norm_squared() + 1.0 - chi) / omega
}

/// MMSE combiners and weights `omega = 1/e` for every `(k, u)`.
pub fn refresh_combiners(channels: &[Vec<CMat>], effective: &[CMat], sigma_n2: f64) -> Result<CombinerSet> {
    let mut w = Vec::with_capacity(effective.len());
    let mut omega = Vec::with_capacity(effective.len());
    for (hk, bk) in channels.iter().zip(effective) {
        let mut wk = Vec::with_capacity(hk.len());
        let mut ok = Vec::with_capacity(hk.len());
        for (u, h) in hk.iter().enumerate() {
            let wu = mmse_combiner(h, bk, sigma_n2, u)?;
            let e = mse(h, bk, &wu, sigma_n2, u)?;
            ok.push(1.0 / e.max(f64::MIN_POSITIVE));
            wk.push(wu);
        }
        w.push(wk);
        omega.push(ok);
    }
    Ok(CombinerSet { w, omega })
}

/// Rate of every `(k, u)` under MMSE combining.
pub fn mmse_rates(channels: &[Vec<CMat>], effective: &[CMat], sigma_n2: f64) -> Result<Vec<Vec<f64>>> {
    channels
        .iter()
        .zip(effective)
        .map(|(hk, bk)| {
            hk.iter()
                .enumerate()
                .map(|(u, h)| {
                    let w = mmse_combiner(h, bk, sigma_n2, u)?;
                    rate(h, bk, &w, sigma_n2, u)
                })
                .collect()
        })
        .collect()
}

/// Transmit spectrum `(dt)^2 ||B^H a||^2` toward steering vector `a`.
pub fn transmit_spectrum(b_eff: &CMat, a: &CVec, symbol_duration: f64) -> f64 {
    symbol_duration * symbol_duration * (b_eff.adjoint() * a).norm_squared()
}

/// `||B^H a_p||^2` for every column `a_p` of `steering`.
pub fn pattern_powers(b_eff: &CMat, steering: &CMat) -> Vec<f64> {
    let proj = b_eff.adjoint() * steering;
    proj.column_iter().map(|c| c.norm_squared()).collect()
}

/// Sampled space-frequency spectrum, `values[k][p]` in linear power units.
#[derive(Debug, Clone, PartialEq)]
pub struct BeampatternGrid {
    pub values: Vec<Vec<f64>>,
    pub angles: Vec<f64>,
    pub frequencies: Vec<f64>,
}

impl BeampatternGrid {
    pub fn evaluate(effective: &[CMat], geometry: &Geometry, symbol_duration: f64) -> Self {
        let scale = symbol_duration * symbol_duration;
        let values = effective
            .iter()
            .zip(&geometry.full)
            .map(|(b, a)| pattern_powers(b, a).into_iter().map(|p| p * scale).collect())
            .collect();
        Self { values, angles: geometry.grids.full_grid.clone(), frequencies: geometry.frequencies.clone() }
    }

    /// Values in dB relative to each subcarrier's peak.
    pub fn normalized_db(&self) -> Vec<Vec<f64>> {
        self.values
            .iter()
            .map(|row| {
                let peak = row.iter().copied().fold(0.0, f64::max);
                row.iter().map(|v| if peak > 0.0 { 10.0 * (v / peak).log10() } else { f64::NEG_INFINITY }).collect()
            })
            .collect()
    }
}

/// Integrated sidelobe over minimum mainlobe for one subcarrier.
pub fn ismmr_from_powers(side: &[f64], main: &[f64], subcarrier: usize) -> Result<f64> {
    let (point, min_main) =
        main.iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, v)| if v < best.1 { (i, v) } else { best });
    if !(min_main > 0.0) {
        return Err(HbfError::DegenerateBeampattern { subcarrier, point });
    }
    Ok(side.iter().sum::<f64>() / min_main)
}

/// Peak sidelobe over integrated mainlobe for one subcarrier.
pub fn psimr_from_powers(side: &[f64], main: &[f64], subcarrier: usize) -> Result<f64> {
    let total: f64 = main.iter().sum();
    if !(total > 0.0) {
        return Err(HbfError::DegenerateBeampattern { subcarrier, point: 0 });
    }
    Ok(side.iter().copied().fold(0.0, f64::max) / total)
}

/// Average integrated sidelobe to minimum mainlobe ratio (scan/detect task).
pub fn aismmr(effective: &[CMat], geometry: &Geometry) -> Result<f64> {
    average_ratio(effective, geometry, ismmr_from_powers)
}

/// Average peak sidelobe to integrated mainlobe ratio (tracking task).
pub fn apsimr(effective: &[CMat], geometry: &Geometry) -> Result<f64> {
    average_ratio(effective, geometry, psimr_from_powers)
}

fn average_ratio(
    effective: &[CMat],
    geometry: &Geometry,
    ratio: fn(&[f64], &[f64], usize) -> Result<f64>,
) -> Result<f64> {
    if effective.len() != geometry.subcarriers() {
        return Err(HbfError::Dimension(format!(
            "{} beamformers for {} subcarriers",
            effective.len(),
            geometry.subcarriers()
        )));
    }
    let mut acc = 0.0;
    for (k, b) in effective.iter().enumerate() {
        let side = pattern_powers(b, &geometry.side[k]);
        let main = pattern_powers(b, &geometry.main[k]);
        acc += ratio(&side, &main, k)?;
    }
    Ok(acc / effective.len() as f64)
}
