//! Scenario configuration: array sizes, OFDM numerology, angle grids,
//! penalties and tolerances.
//!
//! Configs are TOML documents whose keys mirror the symbols used throughout
//! the crate (`M_t`, `N_t`, `P_k`, ...). Unknown keys are rejected. See
//! `presets/*.toml` for complete, commented examples.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{HbfError, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Radar task the beampattern is optimized for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Task {
    /// Scanning and detection: minimize AISMMR.
    SD,
    /// Target tracking: minimize APSIMR.
    TT,
}

impl Task {
    pub fn metric_name(self) -> &'static str {
        match self {
            Task::SD => "AISMMR",
            Task::TT => "APSIMR",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Task::SD => f.write_str("SD"),
            Task::TT => f.write_str("TT"),
        }
    }
}

impl FromStr for Task {
    type Err = HbfError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sd" | "1" => Ok(Task::SD),
            "tt" | "2" => Ok(Task::TT),
            other => Err(HbfError::InvalidConfig(format!("unknown task `{other}` (expected sd or tt)"))),
        }
    }
}

/// A value given either once for every entry or explicitly per entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerSubcarrier<T> {
    Uniform(T),
    Each(Vec<T>),
}

impl<T: Clone> PerSubcarrier<T> {
    fn expand(&self, k: usize, what: &str) -> Result<Vec<T>> {
        match self {
            PerSubcarrier::Uniform(v) => Ok(vec![v.clone(); k]),
            PerSubcarrier::Each(v) if v.len() == k => Ok(v.clone()),
            PerSubcarrier::Each(v) => {
                Err(HbfError::InvalidConfig(format!("{what}: expected {k} per-subcarrier entries, got {}", v.len())))
            }
        }
    }
}

/// Rate thresholds: one scalar, one row of `U` values shared by all
/// subcarriers, or a full `K x U` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RateThresholds {
    Uniform(f64),
    PerUser(Vec<f64>),
    Table(Vec<Vec<f64>>),
}

/// Angle-region description of a desired beampattern, in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Number of uniformly spaced evaluation angles over [-90, 90].
    #[serde(rename = "P", default = "default_grid_points")]
    pub points: usize,
    /// Closed mainlobe intervals.
    pub mainlobe: Vec<[f64; 2]>,
    /// Closed sidelobe intervals.
    pub sidelobe: Vec<[f64; 2]>,
}

fn default_grid_points() -> usize {
    361
}

impl GridSpec {
    /// Mainlobe [-5, 5], sidelobe outside +-8 degrees.
    pub fn beampattern_a() -> Self {
        Self { points: 361, mainlobe: vec![[-5.0, 5.0]], sidelobe: vec![[-90.0, -8.0], [8.0, 90.0]] }
    }

    /// Mainlobe [-10, 10], sidelobe outside +-13 degrees.
    pub fn beampattern_b() -> Self {
        Self { points: 361, mainlobe: vec![[-10.0, 10.0]], sidelobe: vec![[-90.0, -13.0], [13.0, 90.0]] }
    }
}

/// Penalty parameters `(rho1, rho2, rho3, rho4)` of the augmented Lagrangian.
pub type Penalties = [f64; 4];

/// Numerical tolerances and caps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Stop once all four averaged consensus residuals fall below this.
    pub res: f64,
    /// Relative accuracy of the per-subcarrier power equality.
    pub power: f64,
    /// Scalar residual tolerance for secular-equation root finding.
    pub root: f64,
    /// Norms below this are treated as zero.
    pub zero: f64,
    /// Feasibility slack on the QoS ball.
    pub kkt: f64,
    /// Relative objective decrease below which CCD sweeps stop early.
    pub ccd: f64,
    /// Consecutive iterations a QoS set may stay empty before the run is
    /// declared infeasible.
    pub qos_grace: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { res: 1e-3, power: 1e-8, root: 1e-10, zero: 1e-12, kkt: 1e-9, ccd: 1e-10, qos_grace: 10 }
    }
}

/// Complete description of one beamforming scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct ScenarioConfig {
    /// Transmit antennas.
    pub M_t: usize,
    /// RF chains.
    pub N_t: usize,
    /// Receive antennas per user.
    pub M_r: usize,
    /// Users (one stream each).
    pub U: usize,
    /// Subcarriers.
    pub K: usize,
    /// Center frequency (Hz).
    pub f_c: f64,
    /// Bandwidth (Hz).
    pub B: f64,
    /// Element spacing (m). Defaults to half a wavelength at the highest
    /// subcarrier frequency (`f_c + B/2`) when `K > 1`, at `f_c` otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    /// Per-subcarrier power budget (linear).
    pub P_k: PerSubcarrier<f64>,
    /// Noise variance (linear).
    pub sigma_n2: f64,
    /// Rate thresholds (bits/s/Hz).
    pub chi: RateThresholds,
    pub grid: GridSpec,
    /// Penalties `[rho1, rho2, rho3, rho4]`, shared or per subcarrier.
    #[serde(default = "default_rho")]
    pub rho: PerSubcarrier<Penalties>,
    pub task: Task,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_ccd_max")]
    pub ccd_max: usize,
    #[serde(default)]
    pub seed: u64,
    /// Channel clusters.
    #[serde(default = "default_clusters")]
    pub L: usize,
    /// Rays per cluster.
    #[serde(default = "default_rays")]
    pub N_ray: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_rho() -> PerSubcarrier<Penalties> {
    PerSubcarrier::Uniform([1.0; 4])
}
fn default_max_iter() -> usize {
    1000
}
fn default_ccd_max() -> usize {
    10
}
fn default_clusters() -> usize {
    4
}
fn default_rays() -> usize {
    3
}

/// Bundled scenario presets.
pub const PRESETS: &[(&str, &str)] = &[
    ("single_carrier_A", include_str!("../presets/single_carrier_A.toml")),
    ("single_carrier_B", include_str!("../presets/single_carrier_B.toml")),
    ("ofdm_A", include_str!("../presets/ofdm_A.toml")),
    ("ofdm_B", include_str!("../presets/ofdm_B.toml")),
    ("desk", include_str!("../presets/desk.toml")),
];

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse()?;
        Self::from_table(table)
    }

    pub fn from_table(table: toml::Table) -> Result<Self> {
        let cfg: ScenarioConfig = table.try_into()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Raw TOML table of a bundled preset.
    pub fn preset_table(name: &str) -> Result<toml::Table> {
        let (_, text) = PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| HbfError::InvalidConfig(format!("unknown preset `{name}`")))?;
        Ok(text.parse()?)
    }

    pub fn preset(name: &str) -> Result<Self> {
        Self::from_table(Self::preset_table(name)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HbfError::InvalidConfig(msg));
        if self.U == 0 || self.K == 0 || self.M_r == 0 {
            return bad("U, K and M_r must be positive".into());
        }
        if self.N_t < self.U {
            return bad(format!("N_t = {} must be at least U = {}", self.N_t, self.U));
        }
        if self.M_t < self.N_t {
            return bad(format!("M_t = {} must be at least N_t = {}", self.M_t, self.N_t));
        }
        if !(self.f_c > 0.0) || !(self.B > 0.0) {
            return bad("f_c and B must be positive".into());
        }
        if let Some(d) = self.d {
            if !(d > 0.0) {
                return bad("element spacing d must be positive".into());
            }
        }
        if !(self.sigma_n2 >= 0.0) {
            return bad("sigma_n2 must be nonnegative".into());
        }
        if self.L == 0 || self.N_ray == 0 {
            return bad("L and N_ray must be at least 1".into());
        }
        for p in self.power()? {
            if !(p > 0.0) {
                return bad("every P_k must be positive".into());
            }
        }
        for row in self.rate_thresholds()? {
            if row.iter().any(|c| !(*c >= 0.0)) {
                return bad("every chi must be nonnegative".into());
            }
        }
        for r in self.penalties()? {
            if r.iter().any(|v| !(*v > 0.0)) {
                return bad("every rho must be positive".into());
            }
        }
        AngleGrids::from_spec(&self.grid)?;
        Ok(())
    }

    pub fn subcarrier_spacing(&self) -> f64 {
        self.B / self.K as f64
    }

    pub fn symbol_duration(&self) -> f64 {
        1.0 / self.subcarrier_spacing()
    }

    /// Subcarrier frequencies `f_k = f_c + (k - K/2) df`, `k = 1..K`.
    pub fn frequencies(&self) -> Vec<f64> {
        let df = self.subcarrier_spacing();
        let half = self.K as f64 / 2.0;
        (1..=self.K).map(|k| self.f_c + (k as f64 - half) * df).collect()
    }

    pub fn spacing(&self) -> f64 {
        self.d.unwrap_or_else(|| {
            let f = if self.K > 1 { self.f_c + self.B / 2.0 } else { self.f_c };
            SPEED_OF_LIGHT / (2.0 * f)
        })
    }

    pub fn power(&self) -> Result<Vec<f64>> {
        self.P_k.expand(self.K, "P_k")
    }

    pub fn penalties(&self) -> Result<Vec<Penalties>> {
        self.rho.expand(self.K, "rho")
    }

    /// Thresholds as a `K x U` table.
    pub fn rate_thresholds(&self) -> Result<Vec<Vec<f64>>> {
        match &self.chi {
            RateThresholds::Uniform(c) => Ok(vec![vec![*c; self.U]; self.K]),
            RateThresholds::PerUser(row) if row.len() == self.U => Ok(vec![row.clone(); self.K]),
            RateThresholds::Table(t) if t.len() == self.K && t.iter().all(|r| r.len() == self.U) => Ok(t.clone()),
            _ => Err(HbfError::InvalidConfig(format!(
                "chi must be a scalar, a list of U = {} values or a K x U table",
                self.U
            ))),
        }
    }

    /// Sets every rate threshold to `chi`.
    pub fn with_chi(mut self, chi: f64) -> Self {
        self.chi = RateThresholds::Uniform(chi);
        self
    }

    pub fn with_task(mut self, task: Task) -> Self {
        self.task = task;
        self
    }

    /// Copy with one `key=value` override applied and revalidated.
    pub fn with_override(&self, assignment: &str) -> Result<Self> {
        let mut table: toml::Table = self.to_toml_string().parse()?;
        apply_override(&mut table, assignment)?;
        Self::from_table(table)
    }
}

/// Applies a `key=value` override to a raw config table. Dotted keys
/// address nested tables (`tolerances.res=1e-4`); the value is parsed as a
/// TOML value and falls back to a plain string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| HbfError::InvalidConfig(format!("override `{assignment}` is not key=value")))?;
    let value = parse_toml_value(raw.trim());
    let mut path: Vec<&str> = key.trim().split('.').collect();
    let last =
        path.pop().filter(|s| !s.is_empty()).ok_or_else(|| HbfError::InvalidConfig("empty override key".into()))?;
    let mut cursor = table;
    for part in path {
        cursor = cursor
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| HbfError::InvalidConfig(format!("`{part}` is not a table")))?;
    }
    cursor.insert(last.to_string(), value);
    Ok(())
}

fn parse_toml_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Discretized angle regions. Every full-grid angle lands in exactly one of
/// mainlobe, sidelobe or transition band.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrids {
    pub full_grid: Vec<f64>,
    pub theta_main: Vec<f64>,
    pub theta_side: Vec<f64>,
    pub theta_trans: Vec<f64>,
}

impl AngleGrids {
    pub fn from_spec(spec: &GridSpec) -> Result<Self> {
        if spec.points < 2 {
            return Err(HbfError::InvalidConfig("grid needs at least 2 points".into()));
        }
        let step = 180.0 / (spec.points - 1) as f64;
        let full_grid: Vec<f64> = (0..spec.points).map(|p| -90.0 + p as f64 * step).collect();
        let within = |ranges: &[[f64; 2]], t: f64| ranges.iter().any(|[lo, hi]| t >= lo - 1e-9 && t <= hi + 1e-9);

        let (mut theta_main, mut theta_side, mut theta_trans) = (Vec::new(), Vec::new(), Vec::new());
        for &t in &full_grid {
            match (within(&spec.mainlobe, t), within(&spec.sidelobe, t)) {
                (true, true) => {
                    return Err(HbfError::InvalidConfig(format!("angle {t} deg is in both mainlobe and sidelobe")));
                }
                (true, false) => theta_main.push(t),
                (false, true) => theta_side.push(t),
                (false, false) => theta_trans.push(t),
            }
        }
        if theta_main.is_empty() || theta_side.is_empty() {
            return Err(HbfError::InvalidConfig("mainlobe and sidelobe must each contain a grid point".into()));
        }
        Ok(Self { full_grid, theta_main, theta_side, theta_trans })
    }
}
