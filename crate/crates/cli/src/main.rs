//! `sim`: run, sweep and plot aerial-corridor handover campaigns.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use corridor_core::city::Environment;
use corridor_core::engine::{self, SweepAxes};
use corridor_core::plot::{self, PlotKind};
use corridor_core::{report, RunConfig, SimError, StrategyKind};

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "sim", version, about = "UAV aerial-corridor handover simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo campaign and write trials.csv and summary.json.
    Run(RunArgs),
    /// Evaluate a parameter grid and write sweep.csv.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Axis as name=v1,v2,... with name one of environment, density, delta, strategy.
        #[arg(long = "axis", value_name = "NAME=VALUES")]
        axes: Vec<String>,
    },
    /// Render SVG charts from trials.csv or sweep.csv.
    Plot {
        #[arg(long)]
        input: PathBuf,
        /// env-bars, density-lines, tradeoff or hsm.
        #[arg(long)]
        kind: String,
        /// Output directory; defaults to the input's directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration file; all keys are optional.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory, overriding `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of seeds, overriding `n_trials`.
    #[arg(long)]
    trials: Option<usize>,
    /// Base seed, overriding `base_seed` and SIM_SEED.
    #[arg(long)]
    seed: Option<u64>,
    /// Override any config key, e.g. --set gbs_density=4.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn config_error(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(SimError::Config(msg.into()))
}

fn split_pair(raw: &str) -> anyhow::Result<(String, String)> {
    raw.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| config_error(format!("expected KEY=VALUE, got `{raw}`")))
}

impl RunArgs {
    fn load(&self) -> anyhow::Result<RunConfig> {
        let text = match &self.config {
            Some(path) => std::fs::read_to_string(path).map_err(|source| SimError::Io {
                path: path.clone(),
                source,
            })?,
            None => String::new(),
        };
        let mut overrides = Vec::new();
        if let Ok(seed) = std::env::var("SIM_SEED") {
            let seed: u64 = seed
                .trim()
                .parse()
                .map_err(|_| config_error(format!("SIM_SEED `{seed}` is not an unsigned integer")))?;
            overrides.push(("base_seed".to_string(), seed.to_string()));
        }
        for raw in &self.overrides {
            overrides.push(split_pair(raw)?);
        }
        if let Some(seed) = self.seed {
            overrides.push(("base_seed".into(), seed.to_string()));
        }
        if let Some(n) = self.trials {
            overrides.push(("n_trials".into(), n.to_string()));
        }
        let mut cfg = RunConfig::from_json_with_overrides(&text, &overrides)?;
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        Ok(cfg)
    }

    fn jobs(&self) -> usize {
        self.jobs
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

fn parse_list<T>(values: &str, parse: impl Fn(&str) -> anyhow::Result<T>) -> anyhow::Result<Vec<T>> {
    values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(parse)
        .collect()
}

fn parse_number(field: &str) -> impl Fn(&str) -> anyhow::Result<f64> + '_ {
    move |v| {
        v.parse::<f64>()
            .map_err(|_| config_error(format!("axis `{field}`: `{v}` is not a number")))
    }
}

fn parse_axes(raw: &[String]) -> anyhow::Result<SweepAxes> {
    let mut axes = SweepAxes::default();
    for item in raw {
        let (name, values) = split_pair(item)?;
        match name.as_str() {
            "environment" | "env" => {
                axes.environments = parse_list(&values, |v| {
                    Environment::from_label(v).ok_or_else(|| config_error(format!("unknown environment `{v}`")))
                })?
            }
            "density" | "gbs_density" => axes.densities = parse_list(&values, parse_number("density"))?,
            "delta" | "delta_hsm" | "safety_margin_db" => axes.deltas = parse_list(&values, parse_number("delta"))?,
            "strategy" => axes.strategies = parse_list(&values, |v| Ok(v.parse::<StrategyKind>()?))?,
            other => return Err(config_error(format!("unknown sweep axis `{other}`"))),
        }
    }
    Ok(axes)
}

fn cmd_run(args: &RunArgs) -> anyhow::Result<()> {
    let cfg = args.load()?;
    let campaign = engine::run_campaign(&cfg, cfg.n_trials, args.jobs())?;
    let trials_path = cfg.out_dir.join("trials.csv");
    let summary_path = cfg.out_dir.join("summary.json");
    report::write_file(&trials_path, &report::trials_csv(&campaign.trials))?;
    report::write_file(
        &summary_path,
        report::summary_json(&cfg, cfg.n_trials, &campaign.stats).as_bytes(),
    )?;
    print_stats(&campaign.stats);
    if cfg.uses_custom_sampling() {
        eprintln!("note: sampling_ms differs from ttt_ms; results use a finer waypoint grid");
    }
    println!("wrote {} and {}", trials_path.display(), summary_path.display());
    Ok(())
}

fn cmd_sweep(args: &RunArgs, raw_axes: &[String]) -> anyhow::Result<()> {
    let cfg = args.load()?;
    let axes = parse_axes(raw_axes)?;
    let rows = engine::sweep(&cfg, &axes, cfg.n_trials, args.jobs())?;
    let path = cfg.out_dir.join("sweep.csv");
    report::write_file(&path, &report::sweep_csv(&rows))?;
    print_stats(&rows);
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_plot(input: &Path, kind: &str, out: Option<&Path>) -> anyhow::Result<()> {
    let kind: PlotKind = kind.parse()?;
    let out_dir = out
        .map(Path::to_path_buf)
        .or_else(|| input.parent().map(Path::to_path_buf))
        .unwrap_or_default();
    let written = plot::plot_file(input, kind, &out_dir)?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn print_stats(rows: &[engine::CampaignStats]) {
    println!(
        "{:<12} {:>7} {:>6} {:<6} {:>8} {:>10} {:>10}",
        "environment", "density", "delta", "strat", "trials", "HO/s", "OP"
    );
    for r in rows {
        println!(
            "{:<12} {:>7} {:>6} {:<6} {:>8} {:>10.4} {:>10.4}",
            r.environment,
            r.gbs_density,
            r.delta_hsm,
            r.strategy.name(),
            r.n_trials,
            r.handover_frequency.mean,
            r.outage_probability.mean
        );
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<SimError>() {
        Some(e) if e.is_config_error() => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep { run, axes } => cmd_sweep(run, axes),
        Command::Plot { input, kind, out } => cmd_plot(input, kind, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = exit_code(&err);
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}
