use std::ffi::{CStr, CString};
use std::ptr;

use dfrc_hbf_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> Option<String> {
    let p = dfrc_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

fn preset(name: &str) -> *mut DfrcConfig {
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { dfrc_config_from_preset(c(name).as_ptr(), &mut cfg) }, DfrcStatus::Ok);
    assert!(!cfg.is_null());
    cfg
}

fn solve(cfg: *const DfrcConfig) -> *mut DfrcResult {
    let mut res = ptr::null_mut();
    let status = unsafe { dfrc_solve(cfg, &mut res) };
    assert_eq!(status, DfrcStatus::Ok, "{:?}", last_error());
    res
}

#[test]
fn solve_and_export() {
    let cfg = preset("desk");
    unsafe {
        assert_eq!(dfrc_config_set(cfg, c("max_iter=15").as_ptr()), DfrcStatus::Ok);
        assert_eq!(dfrc_config_set_chi(cfg, 1.5), DfrcStatus::Ok);
    }
    let res = solve(cfg);
    assert!(last_error().is_none());

    let (mut m_t, mut n_t, mut users, mut k) = (0, 0, 0, 0);
    unsafe {
        assert_eq!(dfrc_result_dims(res, &mut m_t, &mut n_t, &mut users, &mut k), DfrcStatus::Ok);
    }
    assert_eq!((m_t, n_t, users, k), (16, 4, 2, 4));

    let (mut iterations, mut converged, mut objective, mut min_rate) = (0, -1, 0.0, 0.0);
    unsafe {
        assert_eq!(
            dfrc_result_summary(res, &mut iterations, &mut converged, &mut objective, &mut min_rate),
            DfrcStatus::Ok
        );
    }
    assert_eq!(iterations, 15);
    assert_eq!(converged, 0);
    assert!(objective.is_finite() && objective > 0.0);

    let mut analog = vec![0.0; 2 * m_t * n_t];
    let mut digital = vec![vec![0.0; 2 * n_t * users]; k];
    unsafe {
        assert_eq!(dfrc_result_analog(res, analog.as_mut_ptr(), analog.len()), DfrcStatus::Ok);
        for (i, d) in digital.iter_mut().enumerate() {
            assert_eq!(dfrc_result_digital(res, i, d.as_mut_ptr(), d.len()), DfrcStatus::Ok);
        }
    }
    for z in analog.chunks(2) {
        assert!((z[0].hypot(z[1]) - 1.0).abs() <= 1e-12);
    }
    // ||F_RF F_k||_F^2 rebuilt from the exported buffers
    let at = |buf: &[f64], cols: usize, i: usize, j: usize| (buf[2 * (i * cols + j)], buf[2 * (i * cols + j) + 1]);
    for d in &digital {
        let mut energy = 0.0;
        for i in 0..m_t {
            for u in 0..users {
                let (mut re, mut im) = (0.0, 0.0);
                for n in 0..n_t {
                    let (ar, ai) = at(&analog, n_t, i, n);
                    let (br, bi) = at(d, users, n, u);
                    re += ar * br - ai * bi;
                    im += ar * bi + ai * br;
                }
                energy += re * re + im * im;
            }
        }
        assert!((energy - 1.0).abs() <= 1e-9);
    }

    let mut rates = vec![0.0; k * users];
    let mut trace = vec![f64::NAN; 40];
    unsafe {
        assert_eq!(dfrc_result_rates(res, rates.as_mut_ptr(), rates.len()), DfrcStatus::Ok);
        assert_eq!(dfrc_result_objective_trace(res, trace.as_mut_ptr(), trace.len()), DfrcStatus::Ok);
    }
    assert!((rates.iter().copied().fold(f64::INFINITY, f64::min) - min_rate).abs() <= 1e-15);
    assert!(trace[..15].iter().all(|v| v.is_finite()));
    assert!(trace[15..].iter().all(|v| v.is_nan()));

    unsafe {
        dfrc_result_free(res);
        dfrc_config_free(cfg);
    }
}

#[test]
fn matches_rust_api() {
    let cfg = preset("desk");
    unsafe {
        assert_eq!(dfrc_config_set_task(cfg, DfrcTask::TargetTracking), DfrcStatus::Ok);
        assert_eq!(dfrc_config_set(cfg, c("max_iter=10").as_ptr()), DfrcStatus::Ok);
    }
    let res = solve(cfg);
    let (mut it, mut conv, mut obj, mut rate) = (0, 0, 0.0, 0.0);
    unsafe { dfrc_result_summary(res, &mut it, &mut conv, &mut obj, &mut rate) };

    let mut rust_cfg = dfrc_hbf::ScenarioConfig::preset("desk").unwrap();
    rust_cfg.task = dfrc_hbf::Task::TT;
    rust_cfg.max_iter = 10;
    let ch = dfrc_hbf::generate_channel(&rust_cfg, rust_cfg.seed).unwrap();
    let expect = dfrc_hbf::run(&rust_cfg, &ch).unwrap();
    assert_eq!(obj.to_bits(), expect.trace.final_objective.to_bits());
    unsafe {
        dfrc_result_free(res);
        dfrc_config_free(cfg);
    }
}

#[test]
fn toml_text_round_trip() {
    let text = c(&dfrc_hbf::ScenarioConfig::preset("single_carrier_B").unwrap().to_toml_string());
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { dfrc_config_from_toml(text.as_ptr(), &mut cfg) }, DfrcStatus::Ok);
    unsafe { dfrc_config_free(cfg) };

    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { dfrc_config_from_toml(c("M_t = [").as_ptr(), &mut cfg) }, DfrcStatus::InvalidConfig);
    assert!(cfg.is_null());
    assert!(last_error().is_some());
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut cfg = ptr::null_mut();
    unsafe {
        assert_eq!(dfrc_config_from_preset(c("nope").as_ptr(), &mut cfg), DfrcStatus::InvalidConfig);
        assert!(last_error().unwrap().contains("nope"));
        assert_eq!(dfrc_config_from_preset(ptr::null(), &mut cfg), DfrcStatus::NullArgument);
        assert_eq!(dfrc_config_from_preset(c("desk").as_ptr(), ptr::null_mut()), DfrcStatus::NullArgument);
        let bad = [0xffu8, 0xfe, 0];
        assert_eq!(dfrc_config_from_preset(bad.as_ptr().cast(), &mut cfg), DfrcStatus::InvalidUtf8);
    }

    let cfg = preset("desk");
    unsafe {
        assert_eq!(dfrc_config_set(cfg, c("K=0").as_ptr()), DfrcStatus::InvalidConfig);
        assert_eq!(dfrc_config_set(cfg, c("no equals sign").as_ptr()), DfrcStatus::InvalidConfig);
        assert_eq!(dfrc_config_set_chi(cfg, -1.0), DfrcStatus::InvalidConfig);
        // failed overrides leave the handle unchanged
        let mut res = ptr::null_mut();
        assert_eq!(dfrc_config_set(cfg, c("max_iter=1").as_ptr()), DfrcStatus::Ok);
        assert_eq!(dfrc_solve(cfg, &mut res), DfrcStatus::Ok);
        let (mut k, mut a, mut b, mut d) = (0, 0, 0, 0);
        dfrc_result_dims(res, &mut a, &mut b, &mut d, &mut k);
        assert_eq!(k, 4);

        let mut small = [0.0; 3];
        assert_eq!(dfrc_result_analog(res, small.as_mut_ptr(), small.len()), DfrcStatus::OutOfRange);
        assert!(last_error().unwrap().contains("needed"));
        assert_eq!(dfrc_result_digital(res, 99, small.as_mut_ptr(), small.len()), DfrcStatus::OutOfRange);
        assert_eq!(dfrc_result_rates(res, ptr::null_mut(), 8), DfrcStatus::NullArgument);
        dfrc_result_free(res);

        assert_eq!(dfrc_config_set_chi(cfg, 12.0), DfrcStatus::Ok);
        assert_eq!(dfrc_config_set(cfg, c("max_iter=100").as_ptr()), DfrcStatus::Ok);
        let mut res = ptr::null_mut();
        assert_eq!(dfrc_solve(cfg, &mut res), DfrcStatus::InfeasibleQos);
        assert!(res.is_null());
        assert!(last_error().unwrap().contains("QoS"));
        dfrc_config_free(cfg);

        assert_eq!(dfrc_solve(ptr::null(), &mut res), DfrcStatus::NullArgument);
        dfrc_config_free(ptr::null_mut());
        dfrc_result_free(ptr::null_mut());
    }
}

#[test]
fn version_is_static_text() {
    let v = unsafe { CStr::from_ptr(dfrc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
