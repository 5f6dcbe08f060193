//! `nftrack` command-line front end: scenario files, experiment commands
//! and CSV result tables.

pub mod error;
pub mod output;
pub mod scenario_file;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use nftrack_core::scenario::{self, draw_awareness, MapRegion};
use nftrack_core::tracker::build_grid;
use nftrack_core::{AwarenessSet, ChannelModel, Point, Scenario};

pub use error::CliError;
pub use scenario_file::ScenarioFile;

#[derive(Debug, Parser)]
#[command(name = "nftrack", version, about = "Environment-aware near-field UE tracking experiments")]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true, env = "NF_TRACKER_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Track the scenario trajectory and write one CSV row per step.
    Track {
        #[command(flatten)]
        common: Common,
        /// Fraction of surfaces known to the tracker.
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, value_enum, default_value_t = Model::Nf)]
        model: Model,
        /// Record per-step wall time in `elapsed_s` (breaks byte-identical output).
        #[arg(long)]
        timing: bool,
    },
    /// Single-step RMSE over the scenario map lattice.
    RmseMap {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, value_enum, default_value_t = Model::Nf)]
        model: Model,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Override the map lattice spacing (m).
        #[arg(long)]
        map_spacing: Option<f64>,
    },
    /// Mean RMSE for every awareness level and model.
    SweepEta {
        #[command(flatten)]
        common: Common,
        /// Awareness draws per level.
        #[arg(long, default_value_t = 50)]
        draws: usize,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Model::Nf, Model::Ff])]
        models: Vec<Model>,
        #[arg(long)]
        map_spacing: Option<f64>,
    },
    /// Per-step timing over the trajectory with full awareness.
    Bench {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = Model::Nf)]
        model: Model,
        /// Only time the first N steps.
        #[arg(long)]
        steps: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario JSON file.
    pub scenario: PathBuf,
    /// Override the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Drop thermal noise and phase errors.
    #[arg(long)]
    pub noiseless: bool,
    /// Output CSV path; standard output when omitted or `-`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Nf,
    Ff,
}

impl From<Model> for ChannelModel {
    fn from(m: Model) -> Self {
        match m {
            Model::Nf => ChannelModel::NearField,
            Model::Ff => ChannelModel::FarField,
        }
    }
}

fn load(common: &Common) -> Result<Scenario, CliError> {
    let mut sc = ScenarioFile::load(&common.scenario)?.to_scenario()?;
    if let Some(seed) = common.seed {
        sc.seed = seed;
    }
    if common.noiseless {
        sc = sc.noiseless();
    }
    Ok(sc)
}

fn check_eta(eta: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(CliError::Config(format!("--eta must lie in [0, 1], got {eta}")))
    }
}

fn map_positions(sc: &Scenario, spacing: Option<f64>) -> Result<Vec<Point>, CliError> {
    let mut map: MapRegion =
        sc.map.ok_or_else(|| CliError::Config("scenario has no `map` section".into()))?;
    if let Some(s) = spacing {
        map.spacing = s;
    }
    map.validate()?;
    Ok(map.positions())
}

fn write_output(
    out: Option<&Path>,
    write: impl FnOnce(&mut dyn Write) -> csv::Result<()>,
) -> Result<(), CliError> {
    match out {
        Some(path) if path != Path::new("-") => {
            let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            let mut w = BufWriter::new(file);
            write(&mut w).with_context(|| format!("writing {}", path.display()))?;
            w.flush().with_context(|| format!("writing {}", path.display()))?;
        }
        _ => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock).context("writing standard output")?;
        }
    }
    Ok(())
}

/// Timing summary printed by `bench`.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub steps: usize,
    pub elements: usize,
    pub surfaces: usize,
    pub grid_points: usize,
    pub mean_step_s: f64,
    pub max_step_s: f64,
}

impl std::fmt::Display for BenchReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "steps          {}", self.steps)?;
        writeln!(f, "elements       {}", self.elements)?;
        writeln!(f, "surfaces       {}", self.surfaces)?;
        writeln!(f, "grid points    {}", self.grid_points)?;
        writeln!(f, "mean step      {:.6} s", self.mean_step_s)?;
        write!(f, "max step       {:.6} s", self.max_step_s)
    }
}

pub fn bench(sc: &Scenario, model: ChannelModel, steps: Option<usize>) -> Result<BenchReport, CliError> {
    let mut sc = sc.clone();
    if let Some(n) = steps {
        if n == 0 {
            return Err(CliError::Config("--steps must be at least 1".into()));
        }
        sc.trajectory.truncate(n + 1);
    }
    let full = AwarenessSet::full(sc.environment.len());
    let records = scenario::run_tracking(&sc, &full, model)?;
    if records.is_empty() {
        return Err(CliError::Config("trajectory has a single point; nothing to time".into()));
    }
    let times: Vec<f64> = records.iter().map(|r| r.elapsed).collect();
    Ok(BenchReport {
        steps: records.len(),
        elements: sc.array.len(),
        surfaces: sc.environment.len(),
        grid_points: build_grid(sc.trajectory[0], &sc.tracker).len(),
        mean_step_s: times.iter().sum::<f64>() / times.len() as f64,
        max_step_s: times.iter().copied().fold(0.0, f64::max),
    })
}

fn install_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    install_threads(cli.threads)?;
    match cli.command {
        Command::Track { common, eta, model, timing } => {
            check_eta(eta)?;
            let sc = load(&common)?;
            let awareness = draw_awareness(&sc, eta, 0);
            let records = scenario::run_tracking(&sc, &awareness, model.into())?;
            write_output(common.out.as_deref(), |w| output::write_track(w, &records, timing))
        }
        Command::RmseMap { common, eta, model, trials, map_spacing } => {
            check_eta(eta)?;
            let sc = load(&common)?;
            let positions = map_positions(&sc, map_spacing)?;
            let awareness = draw_awareness(&sc, eta, 0);
            let cells = scenario::rmse_map(&sc, &positions, trials, model.into(), &awareness)?;
            write_output(common.out.as_deref(), |w| output::write_map(w, &cells))
        }
        Command::SweepEta { common, draws, models, map_spacing } => {
            let sc = load(&common)?;
            let positions = map_positions(&sc, map_spacing)?;
            let models: Vec<ChannelModel> = models.into_iter().map(Into::into).collect();
            let rows = scenario::sweep_eta(&sc, &positions, draws, &models)?;
            write_output(common.out.as_deref(), |w| output::write_sweep(w, &rows))
        }
        Command::Bench { scenario, model, steps } => {
            let sc = ScenarioFile::load(&scenario)?.to_scenario()?;
            let report = bench(&sc, model.into(), steps)?;
            println!("{report}");
            Ok(())
        }
    }
}
