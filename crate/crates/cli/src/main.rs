//! `mgflex` command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 solver failure.

mod config;
mod output;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mgflex::dispatch::{self, SystemState};
use mgflex::flexband::{self, DataPackage};
use mgflex::milp::MilpOptions;
use mgflex::model::AlphaParams;

use config::{Overrides, Scenario};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Solver(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Solver(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Solver(m) => m,
        }
    }

    fn at_interval(self, k: usize, when: Option<chrono::NaiveDateTime>) -> Self {
        let prefix = match when {
            Some(t) => format!("interval {k} ({t})"),
            None => format!("interval {k}"),
        };
        match self {
            CliError::Config(m) => CliError::Config(format!("{prefix}: {m}")),
            CliError::Solver(m) => CliError::Solver(format!("{prefix}: {m}")),
        }
    }
}

impl From<mgflex::Error> for CliError {
    fn from(e: mgflex::Error) -> Self {
        use mgflex::Error as E;
        match e {
            E::Config(_) | E::InvalidInput(_) | E::Dimension(_) | E::Ingest(_) => CliError::Config(e.to_string()),
            E::Infeasible(_) | E::Unbounded(_) | E::SolverLimit(_) | E::Internal(_) => CliError::Solver(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "mgflex", version, about = "Microgrid dispatch and tie-line trading-power ranges")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rolling-horizon simulation emitting one data package per interval and release setting.
    Run(ScenarioArgs),
    /// Data package for a single interval, printed as JSON.
    Flexband(FlexbandArgs),
    /// Range-efficiency table from a packages.jsonl file.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Look-ahead intervals per dispatch solve.
    #[arg(long)]
    horizon: Option<usize>,
    /// Interval length in hours.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "alpha-g")]
    alpha_g: Option<f64>,
    #[arg(long = "alpha-s")]
    alpha_s: Option<f64>,
    #[arg(long = "alpha-wt")]
    alpha_wt: Option<f64>,
    #[arg(long)]
    quiet: bool,
}

impl ScenarioArgs {
    fn overrides(&self) -> Overrides {
        let any = self.alpha_g.is_some() || self.alpha_s.is_some() || self.alpha_wt.is_some();
        Overrides {
            horizon: self.horizon,
            dt_hours: self.dt,
            alpha: any.then(|| {
                AlphaParams::uniform(
                    self.alpha_g.unwrap_or(0.0),
                    self.alpha_s.unwrap_or(0.0),
                    self.alpha_wt.unwrap_or(0.0),
                )
            }),
        }
    }
}

#[derive(Debug, Args)]
struct FlexbandArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// JSON SystemState at the start of the interval; defaults to the config's initial state.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Interval index counted from the scenario start.
    #[arg(long, default_value_t = 0)]
    interval: usize,
}

#[derive(Debug, Args)]
struct ReportArgs {
    packages: PathBuf,
    /// Write report.csv here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    quiet: bool,
}

fn cmd_run(args: &ScenarioArgs) -> Result<(), CliError> {
    let sc = Scenario::load(&args.config, &args.overrides())?;
    let n = sc.run_length()?;
    let forecast = sc.forecast(n)?;
    let cfg = sc.microgrid();
    let options = MilpOptions::default();
    let alphas = &sc.config.alphas;

    let out_dir = sc.output_dir(args.out.as_deref());
    std::fs::create_dir_all(&out_dir).map_err(|e| io_err(&out_dir, e))?;
    let jsonl_path = out_dir.join("packages.jsonl");
    let mut jsonl = BufWriter::new(File::create(&jsonl_path).map_err(|e| io_err(&jsonl_path, e))?);
    let csv_path = out_dir.join("dispatch.csv");
    let mut wide = output::WideCsv::create(&csv_path, cfg, alphas.len())?;

    let mut state = sc.config.initial_state.clone();
    let mut total_cost = 0.0;
    for k in 0..n {
        let interval = &forecast.intervals[k];
        let window = forecast.window(k, sc.horizon());
        let step = dispatch::mpc_step(cfg, &state, &window, &options)
            .map_err(|e| CliError::from(e).at_interval(k, interval.start))?;
        let targets = step.solution.targets();
        let packages = flexband::sweep(cfg, &state, k, interval, &targets, alphas, &options)
            .map_err(|e| CliError::from(e).at_interval(k, interval.start))?;
        for p in &packages {
            serde_json::to_writer(&mut jsonl, p).map_err(|e| io_err(&jsonl_path, e))?;
            jsonl.write_all(b"\n").map_err(|e| io_err(&jsonl_path, e))?;
        }
        let cost = step.solution.costs[0].total();
        wide.row(k, interval, &step.committed, cost, &packages)?;
        total_cost += cost;
        state = step.next_state;
    }
    jsonl.flush().map_err(|e| io_err(&jsonl_path, e))?;
    wide.finish()?;

    if !args.quiet {
        println!("intervals:     {n}");
        println!("horizon:       {}", sc.horizon());
        println!("release sets:  {}", alphas.len());
        println!("total cost:    {total_cost:.4}");
        println!("infeasible:    0");
        println!("packages:      {}", jsonl_path.display());
        println!("dispatch:      {}", csv_path.display());
    }
    Ok(())
}

fn cmd_flexband(args: &FlexbandArgs) -> Result<(), CliError> {
    let sc = Scenario::load(&args.scenario.config, &args.scenario.overrides())?;
    let k = args.interval;
    if k >= sc.available {
        return Err(CliError::Config(format!(
            "interval {k} is outside the {} intervals covered by the series",
            sc.available
        )));
    }
    let cfg = sc.microgrid();
    let state: SystemState = match &args.state {
        Some(p) => config::read_json(p)?,
        None => sc.config.initial_state.clone(),
    };
    state.validate(cfg)?;
    let forecast = sc.forecast(k + 1)?;
    let interval = &forecast.intervals[k];
    let options = MilpOptions::default();
    let targets = match &sc.config.targets {
        Some(t) => t.clone(),
        None => dispatch::solve_ed(cfg, &state, &forecast.window(k, sc.horizon()), &options)
            .map_err(|e| CliError::from(e).at_interval(k, interval.start))?
            .targets(),
    };
    let package = flexband::package_for_targets(cfg, &state, k, interval, &targets, &sc.config.alphas[0], &options)
        .map_err(|e| CliError::from(e).at_interval(k, interval.start))?;
    let json = serde_json::to_string_pretty(&package).expect("packages serialize");
    println!("{json}");
    if let Some(dir) = &args.scenario.out {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let path = dir.join("package.json");
        std::fs::write(&path, json + "\n").map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}

fn read_packages(path: &Path) -> Result<Vec<DataPackage>, CliError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut packages = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let p = serde_json::from_str(&line)
            .map_err(|e| CliError::Config(format!("{} line {}: {e}", path.display(), i + 1)))?;
        packages.push(p);
    }
    Ok(packages)
}

fn cmd_report(args: &ReportArgs) -> Result<(), CliError> {
    let packages = read_packages(&args.packages)?;
    let rows = output::report_rows(&packages);
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
            let path = dir.join("report.csv");
            let f = File::create(&path).map_err(|e| io_err(&path, e))?;
            output::write_report(f, &rows).map_err(|e| io_err(&path, e))?;
            if !args.quiet {
                println!("{} rows written to {}", rows.len(), path.display());
            }
        }
        None => output::write_report(std::io::stdout().lock(), &rows)
            .map_err(|e| CliError::Config(format!("stdout: {e}")))?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Flexband(a) => cmd_flexband(a),
        Command::Report(a) => cmd_report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
