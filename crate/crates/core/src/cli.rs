//! Command-line driver behind the `mrta` binary.

use clap::{Parser, Subcommand, ValueEnum};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::engine::{compute_metrics, load_scenario, run_with, EngineError, RunOptions, Trace};
use crate::render::{render_frames, RenderStyle};
use crate::tasking::{collect_travel_times, Aggregation};
use crate::world::load_map;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mrta", version, about = "Headless multi-robot task allocation simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AggArg {
    Max,
    Mean,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a scenario and write its trace.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Task stream; overrides the one named in the scenario.
        #[arg(long)]
        tasks: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        duration: Option<f64>,
        /// Record per-solve durations and wall-clock time (traces stop being byte-stable).
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        no_obstacles: bool,
    },
    /// Write SVG frames of a trace.
    Render {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Seconds between frames; every control tick when omitted.
        #[arg(long)]
        every: Option<f64>,
        #[arg(long)]
        style: Option<PathBuf>,
    },
    /// Measure the travel-time graph by driving one robot between every location pair.
    CollectTravelTimes {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, value_enum, default_value_t = AggArg::Max)]
        agg: AggArg,
    },
    /// Print run metrics of a trace.
    Report {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
}

/// A failed command: message for stderr plus exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        Self { code: e.exit_code(), message: e.to_string() }
    }
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
}

fn invalid(message: impl Into<String>) -> CliError {
    CliError { code: EXIT_INVALID, message: message.into() }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| io_error(path, e))
}

/// Parses `args` (including the program name) and runs the command, writing
/// normal output to `out`. Returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Run { scenario, tasks, out: trace_path, seed, duration, timing, no_obstacles } => {
            let mut s = load_scenario(&scenario, tasks.as_deref())?;
            if let Some(seed) = seed {
                s.config.seed = seed;
            }
            if let Some(d) = duration {
                if !(d >= 0.0 && d.is_finite()) {
                    return Err(invalid(format!("duration must be non-negative, got {d}")));
                }
                s.config.duration = d;
            }
            let opts = RunOptions { record_timing: timing, record_obstacles: !no_obstacles, ..RunOptions::default() };
            let trace = run_with(&s, opts)?;
            let mut file = fs::File::create(&trace_path).map_err(|e| io_error(&trace_path, e))?;
            trace.write_to(&mut file).map_err(|e| io_error(&trace_path, e))?;
            let report = compute_metrics(&trace);
            let _ = write!(out, "{}", report.to_text());
            Ok(())
        }
        Command::Render { trace, map, out_dir, every, style } => {
            let t = Trace::parse(&read(&trace)?)?;
            let grid = load_map(&read(&map)?).map_err(|e| invalid(format!("{}: {e}", map.display())))?;
            let style = match style {
                Some(p) => RenderStyle::parse(&read(&p)?).map_err(|e| invalid(format!("{}: {e}", p.display())))?,
                None => RenderStyle::default(),
            };
            if let Some(e) = every {
                if !(e > 0.0 && e.is_finite()) {
                    return Err(invalid(format!("--every must be positive, got {e}")));
                }
            }
            fs::create_dir_all(&out_dir).map_err(|e| io_error(&out_dir, e))?;
            let frames = render_frames(&t, &grid, every.unwrap_or(0.0), &style);
            for (k, frame) in frames.iter().enumerate() {
                write(&out_dir.join(format!("frame_{k:05}.svg")), &frame.svg)?;
            }
            let _ = writeln!(out, "wrote {} frames to {}", frames.len(), out_dir.display());
            Ok(())
        }
        Command::CollectTravelTimes { scenario, out: graph_path, reps, agg } => {
            let s = load_scenario(&scenario, None)?;
            let agg = match agg {
                AggArg::Max => Aggregation::Max,
                AggArg::Mean => Aggregation::Mean,
            };
            let g = collect_travel_times(&s, reps, agg).map_err(|e| invalid(e.to_string()))?;
            write(&graph_path, &g.to_text())?;
            let _ = write!(out, "{}", g.to_text());
            Ok(())
        }
        Command::Report { trace, format } => {
            let t = Trace::parse(&read(&trace)?)?;
            let report = compute_metrics(&t);
            let text = match format {
                ReportFormat::Text => report.to_text(),
                ReportFormat::Csv => report.to_csv(),
            };
            let _ = write!(out, "{text}");
            Ok(())
        }
    }
}
