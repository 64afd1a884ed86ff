//! Array geometry and the clustered wideband mmWave channel.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::{AngleGrids, ScenarioConfig, SPEED_OF_LIGHT};
use crate::error::{HbfError, Result};
use crate::{CMat, CVec};

/// Space-frequency steering vector of a ULA: entry `m` is
/// `exp(j 2 pi f (m-1) d sin(theta) / c)`. `theta_deg` is in degrees.
pub fn steering_vector(freq: f64, theta_deg: f64, m_t: usize, spacing: f64) -> CVec {
    steering_from_sin(freq, theta_deg.to_radians().sin(), m_t, spacing)
}

fn steering_from_sin(freq: f64, sin_theta: f64, m_t: usize, spacing: f64) -> CVec {
    let step = 2.0 * PI * freq * spacing * sin_theta / SPEED_OF_LIGHT;
    DVector::from_fn(m_t, |m, _| Complex64::from_polar(1.0, step * m as f64))
}

/// Stacks steering vectors for `angles` as the columns of an `m_t x n` matrix.
pub fn steering_matrix(freq: f64, angles_deg: &[f64], m_t: usize, spacing: f64) -> CMat {
    let sines: Vec<f64> = angles_deg.iter().map(|t| t.to_radians().sin()).collect();
    let mut a = DMatrix::zeros(m_t, sines.len());
    for (col, &s) in sines.iter().enumerate() {
        a.set_column(col, &steering_from_sin(freq, s, m_t, spacing));
    }
    a
}

/// Steering matrices of every subcarrier over the three angle sets.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub grids: AngleGrids,
    pub frequencies: Vec<f64>,
    pub spacing: f64,
    /// `M_t x M` per subcarrier.
    pub main: Vec<CMat>,
    /// `M_t x S` per subcarrier.
    pub side: Vec<CMat>,
    /// `M_t x P` per subcarrier.
    pub full: Vec<CMat>,
}

impl Geometry {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        let grids = AngleGrids::from_spec(&cfg.grid)?;
        let frequencies = cfg.frequencies();
        let spacing = cfg.spacing();
        let per_k = |angles: &[f64]| -> Vec<CMat> {
            frequencies.iter().map(|&f| steering_matrix(f, angles, cfg.M_t, spacing)).collect()
        };
        Ok(Self {
            main: per_k(&grids.theta_main),
            side: per_k(&grids.theta_side),
            full: per_k(&grids.full_grid),
            grids,
            frequencies,
            spacing,
        })
    }

    pub fn subcarriers(&self) -> usize {
        self.frequencies.len()
    }
}

/// One propagation path: complex gain plus departure/arrival angles (degrees).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub gain: Complex64,
    pub aod_deg: f64,
    pub aoa_deg: f64,
}

/// Per-subcarrier, per-user channel matrices.
#[derive(Debug, Clone)]
pub struct ChannelSet {
    /// `h[k][u]` is the `M_r x M_t` channel of user `u` on subcarrier `k`.
    pub h: Vec<Vec<CMat>>,
    pub clusters: usize,
    pub rays_per_cluster: usize,
    /// `rays[u][i][j]`: ray `j` of cluster `i` for user `u`.
    pub rays: Vec<Vec<Vec<Ray>>>,
}

impl ChannelSet {
    pub fn subcarriers(&self) -> usize {
        self.h.len()
    }

    pub fn users(&self) -> usize {
        self.h.first().map_or(0, Vec::len)
    }

    pub fn get(&self, k: usize, u: usize) -> &CMat {
        &self.h[k][u]
    }
}

/// Draws a channel realization. Path gains are standard circular complex
/// Gaussian; AoD and AoA are uniform over [-90, 90] degrees. Geometry is
/// shared by all subcarriers; the subcarrier enters through the
/// space-frequency steering vectors and the cluster delay phase.
pub fn generate_channel(cfg: &ScenarioConfig, seed: u64) -> Result<ChannelSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rays = (0..cfg.U)
        .map(|_| {
            (0..cfg.L)
                .map(|_| {
                    (0..cfg.N_ray)
                        .map(|_| {
                            let re: f64 = StandardNormal.sample(&mut rng);
                            let im: f64 = StandardNormal.sample(&mut rng);
                            Ray {
                                gain: Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2,
                                aod_deg: rng.random_range(-90.0..=90.0),
                                aoa_deg: rng.random_range(-90.0..=90.0),
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    channel_from_rays(cfg, rays)
}

/// Builds `H_{k,u} = nu sum_i sum_j alpha_ij a_r(phi) a_t(theta)^H exp(-j 2 pi i f_k / K)`
/// from explicit rays. Array responses inside the channel are normalized to
/// unit norm, so with unit-variance gains `E ||H||_F^2 = M_t M_r`.
pub fn channel_from_rays(cfg: &ScenarioConfig, rays: Vec<Vec<Vec<Ray>>>) -> Result<ChannelSet> {
    if cfg.L == 0 || cfg.N_ray == 0 {
        return Err(HbfError::InvalidConfig("L and N_ray must be at least 1".into()));
    }
    if rays.len() != cfg.U || rays.iter().any(|c| c.len() != cfg.L || c.iter().any(|r| r.len() != cfg.N_ray)) {
        return Err(HbfError::Dimension(format!("expected {} x {} x {} rays", cfg.U, cfg.L, cfg.N_ray)));
    }
    let spacing = cfg.spacing();
    let nu = ((cfg.M_t * cfg.M_r) as f64 / (cfg.L * cfg.N_ray) as f64).sqrt();
    let norm = 1.0 / ((cfg.M_t * cfg.M_r) as f64).sqrt();
    let k_total = cfg.K as f64;

    let h = cfg
        .frequencies()
        .iter()
        .map(|&f| {
            rays.iter()
                .map(|clusters| {
                    let mut h = DMatrix::<Complex64>::zeros(cfg.M_r, cfg.M_t);
                    for (i, cluster) in clusters.iter().enumerate() {
                        let delay = Complex64::from_polar(1.0, -2.0 * PI * i as f64 * f / k_total);
                        for ray in cluster {
                            let a_r = steering_vector(f, ray.aoa_deg, cfg.M_r, spacing);
                            let a_t = steering_vector(f, ray.aod_deg, cfg.M_t, spacing);
                            h += (a_r * a_t.adjoint()) * (ray.gain * delay * (nu * norm));
                        }
                    }
                    h
                })
                .collect()
        })
        .collect();
    Ok(ChannelSet { h, clusters: cfg.L, rays_per_cluster: cfg.N_ray, rays })
}
