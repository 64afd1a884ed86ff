use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use dfrc_hbf::baseline::{radar_only, random_phase};
use dfrc_hbf::cadmm::{rate_summary, run};
use dfrc_hbf::config::{apply_override, ScenarioConfig, Task, PRESETS};
use dfrc_hbf::metrics::BeampatternGrid;
use dfrc_hbf::model::{generate_channel, Geometry};
use dfrc_hbf::report::{write_baseline, write_run, write_sweep, BaselineRow, SweepRow};
use dfrc_hbf::{HbfError, Termination};

/// Task-oriented hybrid beamforming for wideband OFDM DFRC transmitters.
#[derive(Parser)]
#[command(name = "dfrc-hbf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and write trace, summary, beampattern and rates.
    Run(Common),
    /// Solve the scenario for every rate threshold in --chi.
    Sweep(Common),
    /// Compare the solver with the radar-only and random-phase designs.
    Baseline(Common),
    /// List bundled presets.
    Presets,
}

#[derive(Args)]
struct Common {
    /// Scenario TOML file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Bundled scenario name (see `presets`).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    task: Option<Task>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Rate threshold(s), comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    chi: Vec<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Config override `key=value`; dotted keys reach nested tables.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

enum Failure {
    Usage(String),
    Solver(HbfError),
}

impl From<HbfError> for Failure {
    fn from(e: HbfError) -> Self {
        Failure::Solver(e)
    }
}

fn load(args: &Common) -> Result<ScenarioConfig, Failure> {
    let mut table = match (&args.config, &args.preset) {
        (Some(path), _) => std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?
            .parse::<toml::Table>()
            .map_err(|e| Failure::Usage(format!("cannot parse config {}: {e}", path.display())))?,
        (None, Some(name)) => ScenarioConfig::preset_table(name).map_err(|e| Failure::Usage(e.to_string()))?,
        (None, None) => return Err(Failure::Usage("one of --config or --preset is required".into())),
    };
    let mut sets = args.overrides.clone();
    if let Some(t) = args.task {
        sets.push(format!("task=\"{t}\""));
    }
    if let Some(s) = args.seed {
        sets.push(format!("seed={s}"));
    }
    if let Some(m) = args.max_iter {
        sets.push(format!("max_iter={m}"));
    }
    for s in &sets {
        apply_override(&mut table, s).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    ScenarioConfig::from_table(table).map_err(|e| Failure::Usage(e.to_string()))
}

fn cmd_run(args: &Common) -> Result<(), Failure> {
    let mut cfg = load(args)?;
    match args.chi.as_slice() {
        [] => {}
        [chi] => cfg = cfg.with_chi(*chi),
        _ => return Err(Failure::Usage("run takes a single --chi value; use sweep for a list".into())),
    }
    let channels = generate_channel(&cfg, cfg.seed)?;
    let out = run(&cfg, &channels)?;
    let geometry = Geometry::new(&cfg)?;
    let grid = BeampatternGrid::evaluate(&out.hbf.effective_all(), &geometry, cfg.symbol_duration());
    write_run(&args.out, &cfg, &out, &grid)?;
    let (min_rate, _) = rate_summary(&out.rates);
    println!(
        "{:?} after {} iterations: {} = {:.6e}, min rate {:.4} bits/s/Hz -> {}",
        out.trace.termination,
        out.trace.records.len(),
        cfg.task.metric_name(),
        out.trace.final_objective,
        min_rate,
        args.out.display()
    );
    Ok(())
}

fn termination_label(t: Termination) -> String {
    match t {
        Termination::Converged => "converged".into(),
        Termination::MaxIter => "max_iter".into(),
    }
}

fn cmd_sweep(args: &Common) -> Result<(), Failure> {
    if args.chi.is_empty() {
        return Err(Failure::Usage("sweep needs a non-empty --chi list".into()));
    }
    let cfg = load(args)?;
    let channels = generate_channel(&cfg, cfg.seed)?;
    let rows: Vec<SweepRow> = args
        .chi
        .par_iter()
        .map(|&chi| match run(&cfg.clone().with_chi(chi), &channels) {
            Ok(out) => SweepRow {
                chi,
                final_objective: out.trace.final_objective,
                min_rate: rate_summary(&out.rates).0,
                termination: termination_label(out.trace.termination),
            },
            Err(e) => SweepRow { chi, final_objective: f64::NAN, min_rate: f64::NAN, termination: e.to_string() },
        })
        .collect();
    std::fs::create_dir_all(&args.out).map_err(HbfError::from)?;
    write_sweep(&args.out.join("sweep.csv"), &rows)?;
    for r in &rows {
        println!(
            "chi {:<6} {} = {:.6e}  min rate {:.4}  ({})",
            r.chi,
            cfg.task.metric_name(),
            r.final_objective,
            r.min_rate,
            r.termination
        );
    }
    Ok(())
}

fn cmd_baseline(args: &Common) -> Result<(), Failure> {
    let mut cfg = load(args)?;
    if let [chi] = args.chi.as_slice() {
        cfg = cfg.with_chi(*chi);
    }
    let channels = generate_channel(&cfg, cfg.seed)?;
    let (solver, (radar, random)) = rayon::join(
        || run(&cfg, &channels),
        || rayon::join(|| radar_only(&cfg, &channels), || random_phase(&cfg, &channels)),
    );
    let (radar, random) = (radar?, random?);
    let solver = solver?;
    let row = |method, objective, rates: &[Vec<f64>]| {
        let (min_rate, mean_rate) = rate_summary(rates);
        BaselineRow { method, objective, min_rate, mean_rate }
    };
    let rows = [
        row("solver", solver.trace.final_objective, &solver.rates),
        row("radar_only", radar.trace.final_objective, &radar.rates),
        row("random_phase", random.objective, &random.rates),
    ];
    std::fs::create_dir_all(&args.out).map_err(HbfError::from)?;
    write_baseline(&args.out.join("baseline.csv"), &rows)?;
    for r in &rows {
        println!("{:<13} {} = {:.6e}  min rate {:.4}", r.method, cfg.task.metric_name(), r.objective, r.min_rate);
    }
    Ok(())
}

fn exit_code(e: &HbfError) -> u8 {
    match e {
        HbfError::InfeasibleQos { .. } => 3,
        HbfError::Numerical { .. } => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Baseline(a) => cmd_baseline(a),
        Command::Presets => {
            for (name, _) in PRESETS {
                println!("{name}");
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
