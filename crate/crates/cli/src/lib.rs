//! Command-line front end: radius calculator, scenario runner, verification suites.

pub mod output;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use sepradius::channel::UncertaintyBudget;
use sepradius::geometry::{ObstacleParams, VehicleParams};
use sepradius::presets::{preset, PRESET_NAMES};
use sepradius::radius::RadiusReport;
use sepradius::sim::{run_scenario, ScenarioConfig};
use sepradius::verify;

pub const EXIT_SAFE: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "sepradius", version, about = "Communication-aware UAV safety radii: compute, simulate, verify")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the safety-radius bounds for a preset, a config file or explicit parameters.
    Radius(RadiusArgs),
    /// Run a scenario and print the verdict; with --out also write trace.csv, verdict.txt and verdict.json.
    Run(RunArgs),
    /// Run property suites (lemma1, lemma2, prop1, prop2, prop3, theorem1, channel-ks, all).
    Verify(VerifyArgs),
    /// Print a preset as a JSON scenario config.
    Export(ExportArgs),
    /// List the built-in presets.
    List,
}

#[derive(Debug, Args)]
pub struct Source {
    #[arg(long, conflicts_with = "config")]
    pub preset: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RadiusArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub r_m: Option<f64>,
    #[arg(long)]
    pub r_o: Option<f64>,
    #[arg(long)]
    pub l: Option<f64>,
    #[arg(long)]
    pub v_m: Option<f64>,
    #[arg(long)]
    pub v_o: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub b: f64,
    #[arg(long, default_value_t = 0.0)]
    pub v_b: f64,
    #[arg(long, default_value_t = 0.0)]
    pub b_o: f64,
    #[arg(long, default_value_t = 0.0)]
    pub v_bo: f64,
    #[arg(long, default_value_t = 0.0)]
    pub tau_dm: f64,
    #[arg(long, default_value_t = 0.0)]
    pub theta_m: f64,
    #[arg(long, default_value_t = 0.01)]
    pub t_s: f64,
    /// Print machine-readable JSON only.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub duration: Option<f64>,
    /// Output directory; without it only the verdict is printed.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: String,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub preset: String,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure that maps to the usage/config exit code.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

impl From<sepradius::Error> for UsageError {
    fn from(e: sepradius::Error) -> Self {
        UsageError(e.to_string())
    }
}

impl From<std::io::Error> for UsageError {
    fn from(e: std::io::Error) -> Self {
        UsageError(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for UsageError {
    fn from(e: csv::Error) -> Self {
        UsageError(format!("csv error: {e}"))
    }
}

type CliResult<T> = Result<T, UsageError>;

fn load_source(source: &Source) -> CliResult<Option<ScenarioConfig>> {
    match (&source.preset, &source.config) {
        (Some(name), _) => preset(name).map(Some).ok_or_else(|| {
            UsageError(format!("unknown preset `{name}`; known: {}", PRESET_NAMES.join(", ")))
        }),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
            Ok(Some(ScenarioConfig::from_json(&text)?))
        }
        (None, None) => Ok(None),
    }
}

fn radius(args: &RadiusArgs, out: &mut dyn Write) -> CliResult<i32> {
    let (report, stated) = match load_source(&args.source)? {
        Some(cfg) => {
            let resolved = cfg.resolve_radius()?;
            (resolved.bound, Some(resolved))
        }
        None => {
            let missing: Vec<&str> = [
                ("--r-m", args.r_m),
                ("--r-o", args.r_o),
                ("--l", args.l),
                ("--v-m", args.v_m),
                ("--v-o", args.v_o),
            ]
            .iter()
            .filter(|(_, v)| v.is_none())
            .map(|(n, _)| *n)
            .collect();
            if !missing.is_empty() {
                return Err(UsageError(format!(
                    "without --preset or --config these flags are required: {}",
                    missing.join(", ")
                )));
            }
            let vehicle = VehicleParams::new(args.r_m.unwrap(), args.l.unwrap(), args.v_m.unwrap())?;
            let obstacle = ObstacleParams::new(args.r_o.unwrap(), args.v_o.unwrap())?;
            let budget = UncertaintyBudget {
                b: args.b,
                v_b: args.v_b,
                b_o: args.b_o,
                v_bo: args.v_bo,
                tau_dm: args.tau_dm,
                theta_m: args.theta_m,
                t_s: args.t_s,
            };
            (RadiusReport::compute(&vehicle, &obstacle, &budget)?, None)
        }
    };
    if args.json {
        let doc = output::RadiusDoc {
            report: &report,
            stated: stated.as_ref(),
        };
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("report serializes"))?;
    } else {
        write!(out, "{}", output::radius_text(&report, stated.as_ref()))?;
    }
    Ok(EXIT_SAFE)
}

fn write_run_files(dir: &Path, cfg: &ScenarioConfig, trace: &[sepradius::sim::TraceRecord], verdict: &sepradius::sim::RunVerdict) -> CliResult<()> {
    fs::create_dir_all(dir)?;
    let file = fs::File::create(dir.join("trace.csv"))?;
    output::write_trace(std::io::BufWriter::new(file), trace)?;
    fs::write(dir.join("verdict.txt"), output::verdict_text(cfg, verdict))?;
    fs::write(dir.join("verdict.json"), output::verdict_json(cfg, verdict) + "\n")?;
    Ok(())
}

fn run(args: &RunArgs, out: &mut dyn Write) -> CliResult<i32> {
    let mut cfg = load_source(&args.source)?
        .ok_or_else(|| UsageError("run needs --preset or --config".into()))?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(dt) = args.dt {
        cfg.dt_s = dt;
    }
    if let Some(d) = args.duration {
        cfg.duration_s = d;
    }
    let (trace, verdict) = run_scenario(&cfg)?;
    if let Some(dir) = &args.out {
        write_run_files(dir, &cfg, &trace, &verdict)?;
    }
    write!(out, "{}", output::verdict_text(&cfg, &verdict))?;
    Ok(if verdict.violated() { EXIT_VIOLATION } else { EXIT_SAFE })
}

fn verify_cmd(args: &VerifyArgs, out: &mut dyn Write) -> CliResult<i32> {
    let names: Vec<&str> = match args.suite.as_str() {
        "all" => verify::SUITES.to_vec(),
        s if verify::SUITES.contains(&s) => vec![s],
        other => {
            return Err(UsageError(format!(
                "unknown suite `{other}`; known: {}, all",
                verify::SUITES.join(", ")
            )))
        }
    };
    let mut all_passed = true;
    for name in names {
        let report = verify::run_suite(name)?;
        writeln!(out, "{} {}", if report.passed { "PASS" } else { "FAIL" }, report.name)?;
        for line in &report.lines {
            writeln!(out, "    {line}")?;
        }
        all_passed &= report.passed;
    }
    Ok(if all_passed { EXIT_SAFE } else { EXIT_VIOLATION })
}

fn export(args: &ExportArgs, out: &mut dyn Write) -> CliResult<i32> {
    let cfg = preset(&args.preset)
        .ok_or_else(|| UsageError(format!("unknown preset `{}`", args.preset)))?;
    let json = cfg.to_json() + "\n";
    match &args.out {
        Some(path) => fs::write(path, json)?,
        None => out.write_all(json.as_bytes())?,
    }
    Ok(EXIT_SAFE)
}

/// Runs a parsed command, writing human output to `out`. Returns the process exit code.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<i32> {
    match &cli.command {
        Command::Radius(a) => radius(a, out),
        Command::Run(a) => run(a, out),
        Command::Verify(a) => verify_cmd(a, out),
        Command::Export(a) => export(a, out),
        Command::List => {
            for name in PRESET_NAMES {
                writeln!(out, "{name}")?;
            }
            Ok(EXIT_SAFE)
        }
    }
}
