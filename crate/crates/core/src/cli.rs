//! `relaysec simulate | bounds | sweep`.
//!
//! Configuration comes from an optional flat `key=value` file; flags
//! override file values. Exit codes: 0 success, 2 configuration error,
//! 3 I/O error.

use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::bounds::feasibility;
use crate::config::{parse_config_text, ConfigError, ConfigPairs, RunConfig};
use crate::error::ParamError;
use crate::montecarlo::{derive_seed, run_simulation, SimConfig};
use crate::report::{csv_record, exceedance_flags, fmt_sig, summary, HEADER};
use crate::svg::{line_chart, Series};

#[derive(Debug, Parser)]
#[command(
    name = "relaysec",
    version,
    about = "Two-hop relay secrecy simulator and bound calculator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo estimate plus closed-form bounds at one parameter point.
    Simulate(RunArgs),
    /// Closed-form bounds only.
    Bounds(RunArgs),
    /// Simulate and bound every point of one or more parameter sweeps.
    Sweep(RunArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Flat key=value configuration file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// CSV destination (simulate/bounds append, sweep overwrites). Default: stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<String>,
    /// Write an SVG chart of the sweep.
    #[arg(long, value_name = "PATH")]
    pub svg: Option<String>,
    #[arg(long, value_name = "U64")]
    pub seed: Option<String>,
    #[arg(long, value_name = "N")]
    pub trials: Option<String>,
    #[arg(long = "block-length", value_name = "N")]
    pub block_length: Option<String>,
    #[arg(long, value_name = "N")]
    pub workers: Option<String>,
    /// PARAM:START:STOP:STEP or PARAM:V1,V2,... with PARAM in {k, tau, n, m}.
    /// Repeat for a cartesian grid.
    #[arg(long, value_name = "SPEC")]
    pub sweep: Vec<String>,
    /// Print the resolved configuration and exit.
    #[arg(long = "print-config")]
    pub print_config: bool,
    #[arg(long = "n")]
    pub n: Option<String>,
    #[arg(long = "m")]
    pub m: Option<String>,
    #[arg(long = "k")]
    pub k: Option<String>,
    #[arg(long)]
    pub tau: Option<String>,
    #[arg(long = "gamma-r")]
    pub gamma_r: Option<String>,
    #[arg(long = "gamma-e")]
    pub gamma_e: Option<String>,
    #[arg(long)]
    pub es: Option<String>,
    #[arg(long)]
    pub n0: Option<String>,
    #[arg(long = "epsilon-t")]
    pub epsilon_t: Option<String>,
    #[arg(long = "epsilon-s")]
    pub epsilon_s: Option<String>,
}

impl RunArgs {
    fn overrides(&self) -> ConfigPairs {
        let mut pairs = ConfigPairs::new();
        let fields = [
            ("n", &self.n),
            ("m", &self.m),
            ("k", &self.k),
            ("tau", &self.tau),
            ("gamma_r", &self.gamma_r),
            ("gamma_e", &self.gamma_e),
            ("es", &self.es),
            ("n0", &self.n0),
            ("epsilon_t", &self.epsilon_t),
            ("epsilon_s", &self.epsilon_s),
            ("trials", &self.trials),
            ("block_length", &self.block_length),
            ("seed", &self.seed),
            ("workers", &self.workers),
            ("out", &self.out),
            ("svg", &self.svg),
        ];
        for (key, value) in fields {
            if let Some(v) = value {
                pairs.insert(key.to_string(), v.trim().to_string());
            }
        }
        if !self.sweep.is_empty() {
            pairs.insert("sweep".into(), self.sweep.join(";"));
        }
        pairs
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("configuration error: {0}")]
    Param(#[from] ParamError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Param(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Loads the config file (if any) and applies flag overrides.
pub fn resolve(args: &RunArgs) -> Result<RunConfig, CliError> {
    let file = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            parse_config_text(&text)?
        }
        None => ConfigPairs::new(),
    };
    Ok(RunConfig::resolve(&file, &args.overrides())?)
}

fn encode_csv(rows: &[Vec<String>], header: bool) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    // Writing into a Vec cannot fail.
    if header {
        w.write_record(HEADER).expect("in-memory csv");
    }
    for row in rows {
        w.write_record(row).expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

fn append_rows(path: &Path, rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(io_err(path))?;
    let empty = file.metadata().map_err(io_err(path))?.len() == 0;
    file.write_all(&encode_csv(rows, empty))
        .map_err(io_err(path))
}

fn stdout_err(source: io::Error) -> CliError {
    CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

/// Runs one parsed command, writing CSV/summary text to the given streams.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let (args, mode) = match &cli.command {
        Command::Simulate(a) => (a, Mode::Simulate),
        Command::Bounds(a) => (a, Mode::Bounds),
        Command::Sweep(a) => (a, Mode::Sweep),
    };
    let cfg = resolve(args)?;
    if args.print_config {
        return stdout
            .write_all(cfg.to_config_text().as_bytes())
            .map_err(stdout_err);
    }
    match mode {
        Mode::Simulate | Mode::Bounds => single_point(&cfg, mode == Mode::Simulate, stdout, stderr),
        Mode::Sweep => sweep(&cfg, stdout, stderr),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Simulate,
    Bounds,
    Sweep,
}

fn single_point(
    cfg: &RunConfig,
    simulate: bool,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let bounds = feasibility(&cfg.params)?;
    let sim = if simulate {
        Some(run_simulation(&cfg.params, &cfg.sim)?)
    } else {
        None
    };
    let row = csv_record(&cfg.params, sim.as_ref().map(|r| (&cfg.sim, r)), &bounds);
    let text = summary(&cfg.params, sim.as_ref(), &bounds);
    match &cfg.out {
        Some(path) => {
            append_rows(path, &[row])?;
            stdout.write_all(text.as_bytes()).map_err(stdout_err)
        }
        None => {
            stdout
                .write_all(&encode_csv(&[row], true))
                .map_err(stdout_err)?;
            stderr.write_all(text.as_bytes()).map_err(stdout_err)
        }
    }
}

struct SweepPoint {
    x: f64,
    group: String,
    p_out_t_hat: f64,
    p_out_t_bound: f64,
    p_out_s_hat: f64,
    p_out_s_bound: Option<f64>,
    jain_index: f64,
}

fn sweep(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    if cfg.sweeps.is_empty() {
        return Err(ConfigError::Invalid {
            field: "sweep".into(),
            reason: "the sweep command needs at least one sweep descriptor".into(),
        }
        .into());
    }
    let points = cfg.sweep_points()?;
    let x_param = cfg.sweeps.last().expect("non-empty").param;
    let mut rows = Vec::with_capacity(points.len());
    let mut plotted = Vec::with_capacity(points.len());
    for (i, params) in points.iter().enumerate() {
        let sim_cfg = SimConfig {
            seed: derive_seed(cfg.sim.seed, i as u64),
            ..cfg.sim
        };
        let bounds = feasibility(params)?;
        let sim = run_simulation(params, &sim_cfg)?;
        for flag in exceedance_flags(&sim, &bounds) {
            let _ = writeln!(
                stderr,
                "point {i} (n={} m={} k={} tau={}): {flag}",
                params.n, params.m, params.k, params.tau
            );
        }
        rows.push(csv_record(params, Some((&sim_cfg, &sim)), &bounds));
        let group: Vec<String> = cfg.sweeps[..cfg.sweeps.len() - 1]
            .iter()
            .map(|s| format!("{}={}", s.param.name(), fmt_sig(s.param.value_of(params))))
            .collect();
        plotted.push(SweepPoint {
            x: x_param.value_of(params),
            group: group.join(" "),
            p_out_t_hat: sim.p_out_t_hat,
            p_out_t_bound: bounds.p_out_t_bound,
            p_out_s_hat: sim.p_out_s_hat,
            p_out_s_bound: (!bounds.p_out_s_bound.vacuous).then_some(bounds.p_out_s_bound.value),
            jain_index: sim.jain_index,
        });
    }

    let csv = encode_csv(&rows, true);
    match &cfg.out {
        Some(path) => fs::write(path, &csv).map_err(io_err(path))?,
        None => stdout.write_all(&csv).map_err(stdout_err)?,
    }
    if let Some(path) = &cfg.svg {
        let svg = line_chart(
            "Outage and load balance",
            x_param.name(),
            &chart_series(&plotted),
        );
        fs::write(path, svg).map_err(io_err(path))?;
    }
    let _ = writeln!(stderr, "{} sweep points", rows.len());
    Ok(())
}

fn chart_series(points: &[SweepPoint]) -> Vec<Series> {
    let mut groups: Vec<&str> = Vec::new();
    for p in points {
        if !groups.contains(&p.group.as_str()) {
            groups.push(&p.group);
        }
    }
    type Pick = fn(&SweepPoint) -> Option<f64>;
    let columns: [(&str, Pick); 5] = [
        ("p_out_t_hat", |p| Some(p.p_out_t_hat)),
        ("p_out_t_bound", |p| Some(p.p_out_t_bound)),
        ("p_out_s_hat", |p| Some(p.p_out_s_hat)),
        ("p_out_s_bound", |p| p.p_out_s_bound),
        ("jain_index", |p| Some(p.jain_index)),
    ];
    let mut out = Vec::new();
    for group in groups {
        for (name, pick) in columns {
            let name = if group.is_empty() {
                name.to_string()
            } else {
                format!("{name} {group}")
            };
            out.push(Series {
                name,
                points: points
                    .iter()
                    .filter(|p| p.group == group)
                    .map(|p| (p.x, pick(p)))
                    .collect(),
            });
        }
    }
    out
}
