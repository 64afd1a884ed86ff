//! Consensus-ADMM orchestration.
//!
//! Each outer iteration refreshes the MMSE combiners and WMMSE weights,
//! then runs the block updates in order: consensus copy `Y_k`, QoS gain
//! copies, the task-specific radar copies, digital beamformers, the shared
//! analog beamformer, and finally the scaled duals.

use std::time::Instant;

use log::{debug, info};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Penalties, ScenarioConfig, Task};
use crate::error::{HbfError, Result};
use crate::metrics::{aismmr, apsimr, mmse_rates, qos_bound_xi, refresh_combiners, CombinerSet, HybridBeamformer};
use crate::model::{ChannelSet, Geometry};
use crate::subsolvers::{
    constraint_gaps, solve_fk, solve_frf_ccd, solve_g_eps_sd, solve_g_tt, solve_gains, solve_h_eta_tt, solve_h_sd,
    solve_y, update_duals, SubcarrierState, YProblem,
};
use crate::CMat;

/// Why the iteration loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// All four averaged residual norms fell below the tolerance.
    Converged,
    MaxIter,
}

/// Snapshot taken after every iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Task metric of the consensus copies `Y_k`.
    pub objective: f64,
    pub residuals: [f64; 4],
    pub min_rate: f64,
    pub mean_rate: f64,
    #[serde(skip)]
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
    /// Task metric of the returned hybrid beamformer.
    pub final_objective: f64,
    /// Per-iteration analog-update objective histories (instrumented runs only).
    pub ccd_histories: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub hbf: HybridBeamformer,
    pub combiners: CombinerSet,
    pub trace: RunTrace,
    /// Achieved MMSE rate of every `(k, u)` on the returned beamformer.
    pub rates: Vec<Vec<f64>>,
}

/// Knobs that alter the algorithm without being scenario parameters.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Drop the rate constraints entirely (gain copies, their duals and penalty).
    pub radar_only: bool,
    /// Keep the per-element objective history of every analog update.
    pub record_ccd: bool,
}

/// Task metric of effective beamformers.
pub fn objective(effective: &[CMat], geometry: &Geometry, task: Task) -> Result<f64> {
    match task {
        Task::SD => aismmr(effective, geometry),
        Task::TT => apsimr(effective, geometry),
    }
}

/// Frobenius norms of the four consensus gaps, averaged over subcarriers.
pub fn residuals(
    states: &[SubcarrierState],
    hbf: &HybridBeamformer,
    combined: &[CMat],
    geometry: &Geometry,
) -> [f64; 4] {
    let mut acc = [0.0; 4];
    for (k, st) in states.iter().enumerate() {
        let gaps = constraint_gaps(st, &hbf.effective(k), &combined[k], &geometry.side[k], &geometry.main[k]);
        for (a, n) in acc.iter_mut().zip(gaps.norms()) {
            *a += n;
        }
    }
    acc.map(|a| a / states.len().max(1) as f64)
}

/// `C_k = [H_{k,u}^H w_{k,u}]_u`.
pub fn combined_channels(channels: &ChannelSet, combiners: &CombinerSet) -> Vec<CMat> {
    channels
        .h
        .iter()
        .zip(&combiners.w)
        .map(|(hk, wk)| {
            let cols: Vec<_> = hk.iter().zip(wk).map(|(h, w)| h.adjoint() * w).collect();
            CMat::from_columns(&cols)
        })
        .collect()
}

/// Random-phase analog beamformer and Gaussian digital beamformers scaled to
/// the power budget.
pub fn initial_beamformer(cfg: &ScenarioConfig, power: &[f64]) -> HybridBeamformer {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let f_rf = DMatrix::from_fn(cfg.M_t, cfg.N_t, |_, _| {
        Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
    });
    let f_bb = (0..cfg.K)
        .map(|_| {
            DMatrix::from_fn(cfg.N_t, cfg.U, |_, _| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
        })
        .collect();
    let mut hbf = HybridBeamformer { f_rf, f_bb };
    hbf.normalize_power(power);
    hbf
}

pub fn run(cfg: &ScenarioConfig, channels: &ChannelSet) -> Result<RunOutput> {
    run_with(cfg, channels, RunOptions::default())
}

struct Context<'a> {
    cfg: &'a ScenarioConfig,
    geometry: &'a Geometry,
    power: &'a [f64],
    penalties: &'a [Penalties],
    options: RunOptions,
}

impl Context<'_> {
    /// Steps (I)-(IV) for one subcarrier: returns the new `F_k`.
    fn subcarrier_step(
        &self,
        k: usize,
        st: &mut SubcarrierState,
        f_rf: &CMat,
        f_k: &CMat,
        combined: &CMat,
        xi: &[f64],
    ) -> Result<CMat> {
        let tol = &self.cfg.tolerances;
        let mut rho = self.penalties[k];
        if self.options.radar_only {
            rho[1] = 0.0;
        }
        let (side_steer, main_steer) = (&self.geometry.side[k], &self.geometry.main[k]);

        let problem = YProblem {
            target: f_rf * f_k - &st.dual_y,
            combined: combined.clone(),
            gains_target: &st.gains + &st.dual_gains,
            side_steer,
            side_target: &st.side + &st.dual_side,
            main_steer,
            main_target: &st.main + &st.dual_main,
            rho,
            power: self.power[k],
        };
        st.y = solve_y(&problem, tol.root)?.y;

        if !self.options.radar_only {
            let projected = combined.adjoint() * &st.y;
            st.gains = solve_gains(k, &projected, &st.dual_gains, xi, tol.root)?.gains;
        }

        let y_h = st.y.adjoint();
        let r_hat = &y_h * side_steer - &st.dual_side;
        let t_hat = &y_h * main_steer - &st.dual_main;
        match self.cfg.task {
            Task::SD => {
                let (g, eps, _) = solve_g_eps_sd(k, &t_hat, rho[3], tol.zero)?;
                st.main = g;
                st.eps = eps;
                let anchor = reseed(st.side_anchor.take(), &r_hat, tol.zero);
                st.side = solve_h_sd(k, &r_hat, &anchor, rho[2], tol.zero)?;
                st.side_anchor = Some(st.side.clone());
            }
            Task::TT => {
                let (h, eta, _) = solve_h_eta_tt(&r_hat, rho[2], tol.zero);
                st.side = h;
                st.eta = eta;
                let anchor = reseed(st.main_anchor.take(), &t_hat, tol.zero);
                st.main = solve_g_tt(k, &t_hat, &anchor, rho[3], tol.zero)?;
                st.main_anchor = Some(st.main.clone());
            }
        }

        solve_fk(f_rf, &(&st.y + &st.dual_y))
    }
}

fn reseed(anchor: Option<CMat>, current: &CMat, tol_zero: f64) -> CMat {
    match anchor {
        Some(a) if a.norm() >= tol_zero => a,
        _ => current.clone(),
    }
}

fn finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Runs the consensus ADMM on one channel realization.
pub fn run_with(cfg: &ScenarioConfig, channels: &ChannelSet, options: RunOptions) -> Result<RunOutput> {
    cfg.validate()?;
    if channels.subcarriers() != cfg.K || channels.users() != cfg.U {
        return Err(HbfError::Dimension(format!(
            "channel set is {} x {}, scenario needs {} x {}",
            channels.subcarriers(),
            channels.users(),
            cfg.K,
            cfg.U
        )));
    }
    let geometry = Geometry::new(cfg)?;
    let power = cfg.power()?;
    let penalties = cfg.penalties()?;
    let chi = cfg.rate_thresholds()?;
    let tol = cfg.tolerances.clone();
    let ctx = Context { cfg, geometry: &geometry, power: &power, penalties: &penalties, options };

    let mut hbf = initial_beamformer(cfg, &power);
    let mut combiners = refresh_combiners(&channels.h, &hbf.effective_all(), cfg.sigma_n2)?;
    let mut combined = combined_channels(channels, &combiners);
    let mut states: Vec<SubcarrierState> = (0..cfg.K)
        .map(|k| SubcarrierState::consistent(hbf.effective(k), &combined[k], &geometry.side[k], &geometry.main[k]))
        .collect();

    let started = Instant::now();
    let mut records = Vec::new();
    let mut ccd_histories = Vec::new();
    let mut termination = Termination::MaxIter;
    let mut infeasible_streak = vec![vec![0usize; cfg.U]; cfg.K];

    for iteration in 1..=cfg.max_iter {
        // (0) combiners and weights from the consensus copies
        let ys: Vec<CMat> = states.iter().map(|s| s.y.clone()).collect();
        combiners = refresh_combiners(&channels.h, &ys, cfg.sigma_n2)?;
        combined = combined_channels(channels, &combiners);
        let mut xi = vec![vec![0.0; cfg.U]; cfg.K];
        if !options.radar_only {
            for k in 0..cfg.K {
                for u in 0..cfg.U {
                    let x = qos_bound_xi(combiners.omega[k][u], &combiners.w[k][u], cfg.sigma_n2, chi[k][u]);
                    if x.is_nan() {
                        return Err(HbfError::Numerical { iteration, stage: "qos radius" });
                    }
                    if x < 0.0 {
                        infeasible_streak[k][u] += 1;
                        if infeasible_streak[k][u] > tol.qos_grace {
                            return Err(HbfError::InfeasibleQos { subcarrier: k, user: u, xi: x });
                        }
                    } else {
                        infeasible_streak[k][u] = 0;
                    }
                    xi[k][u] = x.max(0.0);
                }
            }
        }

        // (I)-(IV) per subcarrier
        let f_rf = hbf.f_rf.clone();
        let new_fk: Vec<CMat> = states
            .par_iter_mut()
            .enumerate()
            .map(|(k, st)| ctx.subcarrier_step(k, st, &f_rf, &hbf.f_bb[k], &combined[k], &xi[k]))
            .collect::<Result<_>>()?;
        if new_fk.iter().any(|f| !finite(f)) || states.iter().any(|s| !finite(&s.y)) {
            return Err(HbfError::Numerical { iteration, stage: "digital update" });
        }
        hbf.f_bb = new_fk;

        // (V) shared analog beamformer
        let targets: Vec<CMat> = states.iter().map(|s| &s.y + &s.dual_y).collect();
        let (f_rf, report) = solve_frf_ccd(&hbf.f_rf, &hbf.f_bb, &targets, cfg.ccd_max, tol.ccd, options.record_ccd);
        if !finite(&f_rf) {
            return Err(HbfError::Numerical { iteration, stage: "analog update" });
        }
        hbf.f_rf = f_rf;
        if options.record_ccd {
            ccd_histories.push(report.history);
        }

        // (VI) duals
        let mut res = [0.0; 4];
        for (k, st) in states.iter_mut().enumerate() {
            let gaps = constraint_gaps(st, &hbf.effective(k), &combined[k], &geometry.side[k], &geometry.main[k]);
            for (r, n) in res.iter_mut().zip(gaps.norms()) {
                *r += n / cfg.K as f64;
            }
            update_duals(st, &gaps);
        }
        if options.radar_only {
            res[1] = 0.0;
        }

        let ys: Vec<CMat> = states.iter().map(|s| s.y.clone()).collect();
        let obj = objective(&ys, &geometry, cfg.task)?;
        if !obj.is_finite() || res.iter().any(|r| !r.is_finite()) {
            return Err(HbfError::Numerical { iteration, stage: "objective" });
        }
        let rates = mmse_rates(&channels.h, &ys, cfg.sigma_n2)?;
        let (min_rate, mean_rate) = rate_summary(&rates);
        debug!("iter {iteration}: obj {obj:.5e} res {res:?} min rate {min_rate:.4}");
        records.push(IterationRecord {
            iteration,
            objective: obj,
            residuals: res,
            min_rate,
            mean_rate,
            elapsed_s: started.elapsed().as_secs_f64(),
        });
        if res.iter().all(|&r| r < tol.res) {
            termination = Termination::Converged;
            break;
        }
    }

    hbf.normalize_power(&power);
    let effective = hbf.effective_all();
    let final_objective = objective(&effective, &geometry, cfg.task)?;
    let rates = mmse_rates(&channels.h, &effective, cfg.sigma_n2)?;
    if records.is_empty() {
        combiners = refresh_combiners(&channels.h, &effective, cfg.sigma_n2)?;
    }
    info!(
        "{:?} after {} iterations: {} = {final_objective:.5e}, min rate {:.4}",
        termination,
        records.len(),
        cfg.task.metric_name(),
        rate_summary(&rates).0
    );
    Ok(RunOutput { hbf, combiners, trace: RunTrace { records, termination, final_objective, ccd_histories }, rates })
}

/// `(min, mean)` over all `(k, u)`.
pub fn rate_summary(rates: &[Vec<f64>]) -> (f64, f64) {
    let all: Vec<f64> = rates.iter().flatten().copied().collect();
    let min = all.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = all.iter().sum::<f64>() / all.len().max(1) as f64;
    (min, mean)
}
