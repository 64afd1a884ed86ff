use thiserror::Error;

/// Every failure the solver stack can report.
#[derive(Debug, Error)]
pub enum HbfError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular system in {0}")]
    Singular(&'static str),

    #[error("degenerate subproblem: {0}")]
    Degenerate(String),

    #[error("root finding did not converge: {0}")]
    Convergence(String),

    #[error("degenerate beampattern: zero mainlobe power at subcarrier {subcarrier}, mainlobe point {point}")]
    DegenerateBeampattern { subcarrier: usize, point: usize },

    #[error("linearization point vanished for subcarrier {0}")]
    LinearizationPoint(usize),

    #[error("QoS constraint infeasible at subcarrier {subcarrier}, user {user} (xi = {xi:.3e})")]
    InfeasibleQos { subcarrier: usize, user: usize, xi: f64 },

    #[error("numerical failure (NaN/inf) at iteration {iteration} in {stage}")]
    Numerical { iteration: usize, stage: &'static str },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = HbfError> = std::result::Result<T, E>;
