//! Command-line front end.

use std::ffi::OsString;
use std::io::{IsTerminal, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::leadscrew::FormulaMode;

mod commands;
pub mod config;
pub mod output;

use config::{ToolConfig, Units};
use output::Emitter;

/// Exit status for usage and configuration errors.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for failures while computing.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Standard,
    PaperCompat,
    Both,
}

impl ModeArg {
    fn modes(self) -> Vec<FormulaMode> {
        match self {
            ModeArg::Standard => vec![FormulaMode::Standard],
            ModeArg::PaperCompat => vec![FormulaMode::Compat],
            ModeArg::Both => vec![FormulaMode::Standard, FormulaMode::Compat],
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tensileg",
    version,
    about = "Design analysis and simulation for tensegrity legs with antagonistic variable stiffness",
    arg_required_else_help = true
)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Directory for CSV, JSON and gnuplot outputs. Without it the primary
    /// table goes to stdout.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Length units of the config file (overrides its `units` key).
    #[arg(long, global = true, value_enum)]
    units: Option<Units>,

    /// Slider displacement in mm; repeat for several settings.
    #[arg(long = "setting", global = true, value_name = "MM")]
    settings: Vec<f64>,

    /// Torque formula convention for the lead screw.
    #[arg(long, global = true, value_enum, default_value = "both")]
    mode: ModeArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Torque and tangent stiffness curves of the spring configurations.
    Stiffness,
    /// Lead screw torques, self-locking and motor check.
    Leadscrew,
    /// Actuation torque needed to hold a payload.
    Size,
    /// Quasi-static vertical compression sweep.
    Compress,
    /// Drop test simulation.
    Drop,
    /// Unbiased quadratic fit of force-extension data.
    Fit {
        /// CSV input (overrides `fit.input`).
        input: Option<PathBuf>,
    },
    /// Smooth and differentiate a position track.
    Filter {
        /// CSV input (overrides `analysis.input`).
        input: Option<PathBuf>,
    },
    /// Reduce rig records and rank tendon variants.
    Characterize,
}

/// Runs the tool on `args` (program name first) and returns the exit status.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write, color: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
            } else {
                let _ = stdout.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let result = (|| {
        let config = match &cli.config {
            Some(p) => ToolConfig::load(p)?,
            None => ToolConfig::default(),
        };
        let ctx = commands::Context {
            config,
            units: cli.units,
            settings_mm: cli.settings.clone(),
            modes: cli.mode.modes(),
        };
        let mut out = Emitter {
            out_dir: cli.out.clone(),
            stdout: &mut *stdout,
            stderr: &mut *stderr,
            color,
        };
        match &cli.command {
            Command::Stiffness => commands::stiffness(&ctx, &mut out),
            Command::Leadscrew => commands::leadscrew(&ctx, &mut out),
            Command::Size => commands::size(&ctx, &mut out),
            Command::Compress => commands::compress(&ctx, &mut out),
            Command::Drop => commands::drop(&ctx, &mut out),
            Command::Fit { input } => commands::fit(&ctx, input.as_deref(), &mut out),
            Command::Filter { input } => commands::filter(&ctx, input.as_deref(), &mut out),
            Command::Characterize => commands::characterize(&ctx, &mut out),
        }
    })();
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "tensileg: {e}");
            match e {
                Error::Config(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            }
        }
    }
}

/// Entry point of the binary.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let color = std::io::stdout().is_terminal() && std::env::var_os("TENSILEG_NO_COLOR").is_none();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = run_with(args, &mut out, &mut err, color);
    let _ = out.flush();
    code
}
