//! Reference designs the solver is compared against.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cadmm::{objective, run_with, RunOptions, RunOutput};
use crate::config::ScenarioConfig;
use crate::error::{HbfError, Result};
use crate::metrics::{mmse_rates, HybridBeamformer};
use crate::model::{ChannelSet, Geometry};
use crate::subsolvers::solve_fk;
use crate::{CMat, CVec};

/// Same algorithm with the rate constraints removed, run for the full
/// iteration budget. Without the rate blocks the residuals vanish long before
/// the radar objective settles, so the residual stopping test is switched off.
pub fn radar_only(cfg: &ScenarioConfig, channels: &ChannelSet) -> Result<RunOutput> {
    let mut cfg = cfg.clone().with_chi(0.0);
    cfg.tolerances.res = 0.0;
    run_with(&cfg, channels, RunOptions { radar_only: true, ..Default::default() })
}

#[derive(Debug, Clone)]
pub struct RandomBaseline {
    pub hbf: HybridBeamformer,
    pub objective: f64,
    pub rates: Vec<Vec<f64>>,
}

/// Principal right singular vector of `h`, i.e. the eigenbeam of `H^H H`.
fn eigenbeam(h: &CMat) -> Result<CVec> {
    let svd = h.clone().svd(false, true);
    let v_t = svd.v_t.ok_or(HbfError::Singular("channel SVD"))?;
    let best = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, &s)| if s > b.1 { (i, s) } else { b })
        .0;
    Ok(v_t.row(best).adjoint())
}

/// Random-phase analog beamformer with least-squares digital beamformers
/// fitted to each user's channel eigenbeam, scaled to the power budget.
pub fn random_phase(cfg: &ScenarioConfig, channels: &ChannelSet) -> Result<RandomBaseline> {
    let geometry = Geometry::new(cfg)?;
    let power = cfg.power()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(2);
    let f_rf = DMatrix::from_fn(cfg.M_t, cfg.N_t, |_, _| {
        Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
    });
    let f_bb = channels
        .h
        .iter()
        .map(|hk| {
            let cols = hk.iter().map(eigenbeam).collect::<Result<Vec<_>>>()?;
            solve_fk(&f_rf, &CMat::from_columns(&cols))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut hbf = HybridBeamformer { f_rf, f_bb };
    hbf.normalize_power(&power);
    let effective = hbf.effective_all();
    Ok(RandomBaseline {
        objective: objective(&effective, &geometry, cfg.task)?,
        rates: mmse_rates(&channels.h, &effective, cfg.sigma_n2)?,
        hbf,
    })
}
