//! Command-line runner for synthetic likelihood experiments.

mod config;
mod dispatch;
mod io;
mod run;
mod study;
mod tv;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{LoadedConfig, ModelId};

/// Errors mapped to exit codes: configuration 2, failed chain start 3, other 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Init(String),
    #[error("{0:#}")]
    Other(#[from] anyhow::Error),
}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Init(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "semibsl", version, about = "Bayesian synthetic likelihood experiments")]
struct Cli {
    /// Worker threads for simulation (0 uses every core). Results do not
    /// depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configuration seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configuration output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one MCMC chain.
    Run(ConfigArgs),
    /// Run a chain and also write a tuned proposal covariance.
    Pilot(ConfigArgs),
    /// Total variation between a chain and a reference posterior.
    Tv(TvCli),
    /// Estimator and sampler studies.
    Study(StudyCli),
    /// Simulate an observed dataset.
    Observe(ObserveCli),
}

#[derive(Args)]
struct TvCli {
    #[arg(long)]
    chain: PathBuf,
    /// Reference chain CSV.
    #[arg(long, conflicts_with_all = ["exact_ma2", "grid"])]
    reference: Option<PathBuf>,
    /// Observed MA(2) series; the reference is its exact posterior.
    #[arg(long, conflicts_with = "grid")]
    exact_ma2: Option<PathBuf>,
    /// Reference grid CSV.
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Zero-based parameter indices, one (marginal) or two (joint).
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    components: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    burnin: usize,
    /// Grid axis as lo:hi:cells, one per component.
    #[arg(long = "axis", value_parser = parse_axis)]
    axes: Vec<(f64, f64, usize)>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_axis(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, cells] = parts.as_slice() else { return Err(format!("'{s}' is not lo:hi:cells")) };
    Ok((
        lo.parse().map_err(|_| format!("bad lower bound in '{s}'"))?,
        hi.parse().map_err(|_| format!("bad upper bound in '{s}'"))?,
        cells.parse().map_err(|_| format!("bad cell count in '{s}'"))?,
    ))
}

#[derive(Clone, Copy, ValueEnum)]
enum StudyId {
    #[value(name = "appendixA")]
    AppendixA,
    #[value(name = "sensitivity_n")]
    SensitivityN,
    #[value(name = "shrinkage_tune")]
    ShrinkageTune,
}

#[derive(Args)]
struct StudyCli {
    study: StudyId,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Experiment configuration (sensitivity_n, shrinkage_tune).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
    /// appendixA: statistic dimension.
    #[arg(long, default_value_t = 20)]
    d: usize,
    #[arg(long, default_value_t = 100)]
    replicates: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    epsilon: f64,
    #[arg(long, value_delimiter = ',', default_value = "1,2,0.5")]
    deltas: Vec<f64>,
    /// shrinkage_tune: target log-likelihood standard deviation.
    #[arg(long)]
    target: Option<f64>,
    /// shrinkage_tune: parameter value to tune at (defaults to theta0).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Option<Vec<f64>>,
}

#[derive(Args)]
struct ObserveCli {
    #[arg(long, value_enum)]
    model: ModelId,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Vec<f64>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn load(args: &ConfigArgs) -> Result<(LoadedConfig, u64, PathBuf), CliError> {
    let cfg = LoadedConfig::load(&args.config)?;
    let seed = args.seed.unwrap_or(cfg.config.seed);
    let out = run::output_dir(&cfg, args.out.clone())?;
    Ok((cfg, seed, out))
}

fn create_dir(dir: &PathBuf) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Other(anyhow::anyhow!("cannot create {}: {e}", dir.display())))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let workers = cli.workers;
    match cli.command {
        Command::Run(args) => {
            let (cfg, seed, out) = load(&args)?;
            run::cmd_run(&cfg, seed, out, false, workers)
        }
        Command::Pilot(args) => {
            let (cfg, seed, out) = load(&args)?;
            run::cmd_run(&cfg, seed, out, true, workers)
        }
        Command::Tv(a) => {
            let reference = match (a.reference, a.exact_ma2, a.grid) {
                (Some(p), _, _) => tv::Reference::Chain(p),
                (_, Some(p), _) => tv::Reference::ExactMa2(p),
                (_, _, Some(p)) => tv::Reference::Grid(p),
                _ => return Err(CliError::Config("give one of --reference, --exact-ma2, --grid".into())),
            };
            let value = tv::cmd_tv(tv::TvArgs {
                chain: a.chain,
                reference,
                components: a.components,
                burnin: a.burnin,
                axes: a.axes,
                out: a.out,
            })?;
            println!("{value}");
            Ok(())
        }
        Command::Study(s) => {
            let start = Instant::now();
            create_dir(&s.out)?;
            let config = || -> Result<LoadedConfig, CliError> {
                let path = s.config.as_ref().ok_or_else(|| CliError::Config("this study needs --config".into()))?;
                Ok(LoadedConfig::load(path)?)
            };
            match s.study {
                StudyId::AppendixA => {
                    let args = study::AppendixArgs {
                        d: s.d,
                        epsilon: s.epsilon,
                        deltas: s.deltas.clone(),
                        n_grid: s.n_grid.clone().unwrap_or_else(|| vec![75, 150, 300]),
                        replicates: s.replicates,
                        seed: s.seed.unwrap_or(1),
                    };
                    study::appendix_a(&args, &s.out)?;
                    println!("appendixA tables in {}", s.out.display());
                }
                StudyId::SensitivityN => {
                    let cfg = config()?;
                    let seed = s.seed.unwrap_or(cfg.config.seed);
                    let grid = s.n_grid.clone().unwrap_or_else(|| vec![300, 500, 1000]);
                    let worst = study::sensitivity_n(&cfg, seed, &grid, &s.out)?;
                    println!("largest pairwise marginal TV {worst:.4}");
                }
                StudyId::ShrinkageTune => {
                    let cfg = config()?;
                    let seed = s.seed.unwrap_or(cfg.config.seed);
                    let lambda = study::shrinkage_tune(&cfg, seed, s.target, s.theta.clone(), &s.out)?;
                    println!("lambda = {lambda}");
                }
            }
            run::write_timing(&s.out, start, workers)?;
            study::finish(&s.out)
        }
        Command::Observe(o) => {
            if let Some(dir) = o.out.parent().filter(|d| !d.as_os_str().is_empty()) {
                create_dir(&dir.to_path_buf())?;
            }
            let count = dispatch::observe(o.model, &o.theta, o.seed, &o.out).map_err(|e| CliError::Config(format!("{e:#}")))?;
            println!("wrote {count} values to {}", o.out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli.workers;
    match semibsl::par::with_workers(workers, || execute(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
