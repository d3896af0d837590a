//! Command-line front end: configuration files, presets and the
//! `constants`, `report`, `spectra`, `sweep`, `fit` and `rtot` subcommands.

pub mod commands;
pub mod config;
pub mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{Format, Outcome};
use crate::config::{parse_config, preset_config, ConfigIssue, RunConfig};
use crate::error::{exit, CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "biphoton", version, about = "Spectral entanglement of SPDC biphotons")]
pub struct Cli {
    /// Log more (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
pub struct Source {
    /// Configuration file (TOML).
    #[arg(long, group = "source")]
    pub config: Option<PathBuf>,
    /// Shipped preset: table1, table2 or fig1.
    #[arg(long, group = "source")]
    pub preset: Option<String>,
}

#[derive(Debug, Args)]
pub struct Overrides {
    /// Pump pulse duration (FWHM), fs.
    #[arg(long)]
    pub tau_fs: Option<f64>,
    /// Pump wavelength, nm.
    #[arg(long)]
    pub lambda_nm: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Table,
    Kv,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Walk-off constant A, dispersion constant B, eta and group velocities.
    Constants {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        overrides: Overrides,
        /// Print a CSV header and row instead of a table.
        #[arg(long)]
        csv: bool,
    },
    /// Theory table: pump, coincidence and single-count widths, R and K.
    Report {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, value_enum, default_value = "table")]
        format: FormatArg,
        /// Measured coincidence spectrum (CSV) to fit.
        #[arg(long)]
        measured_coincidence: Option<PathBuf>,
        /// Measured single-count spectrum (CSV) to fit.
        #[arg(long)]
        measured_single: Option<PathBuf>,
        /// Coincidence monochromator resolution (FWHM), nm.
        #[arg(long)]
        resolution_nm: Option<f64>,
        /// Single-count monochromator resolution (FWHM), nm.
        #[arg(long)]
        single_resolution_nm: Option<f64>,
    },
    /// Write coincidence and single-count spectra (and optionally the JSA).
    Spectra {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        overrides: Overrides,
        /// Output directory (default: the configuration's `output.directory`).
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// R and K over a logarithmic range of pulse durations.
    Sweep {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        lambda_nm: Option<f64>,
        #[arg(long)]
        tau_min_fs: Option<f64>,
        #[arg(long)]
        tau_max_fs: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// CSV output file (default: standard output).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Gaussian fit of a measured spectrum.
    Fit {
        /// CSV with header `axis_nm,intensity[,sigma]` or `axis_rad_s,...`.
        input: PathBuf,
        /// Remove a Gaussian instrument response of this FWHM, nm.
        #[arg(long)]
        resolution_nm: Option<f64>,
    },
    /// Upper bound on the total number of entangled modes.
    Rtot {
        #[arg(long)]
        r_angle: f64,
        #[arg(long)]
        r_omega: f64,
    },
}

fn load(source: &Source) -> CliResult<RunConfig> {
    Ok(match (&source.config, &source.preset) {
        (Some(path), _) => parse_config(path)?,
        (None, Some(name)) => preset_config(name)?,
        (None, None) => unreachable!("clap requires a source"),
    })
}

fn positive(flag: &str, v: Option<f64>) -> CliResult<Option<f64>> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(CliError::Config(vec![ConfigIssue {
            key: format!("--{flag}"),
            line: None,
            message: format!("must be positive, got {x}"),
        }])),
        v => Ok(v),
    }
}

fn apply(mut cfg: RunConfig, o: &Overrides) -> CliResult<RunConfig> {
    if let Some(t) = positive("tau-fs", o.tau_fs)? {
        cfg.tau_fs = t;
    }
    if let Some(l) = positive("lambda-nm", o.lambda_nm)? {
        cfg.lambda_nm = l;
    }
    Ok(cfg)
}

pub fn execute(command: &Command) -> CliResult<Outcome> {
    match command {
        Command::Constants { source, overrides, csv } => commands::constants(&apply(load(source)?, overrides)?, *csv),
        Command::Report {
            source,
            overrides,
            format,
            measured_coincidence,
            measured_single,
            resolution_nm,
            single_resolution_nm,
        } => {
            let mut cfg = apply(load(source)?, overrides)?;
            let a = &mut cfg.analysis;
            if let Some(p) = measured_coincidence {
                a.measured_coincidence = Some(p.clone());
            }
            if let Some(p) = measured_single {
                a.measured_single = Some(p.clone());
            }
            if let Some(r) = positive("resolution-nm", *resolution_nm)? {
                a.resolution_nm = Some(r);
            }
            if let Some(r) = positive("single-resolution-nm", *single_resolution_nm)? {
                a.single_resolution_nm = Some(r);
            }
            let format = match format {
                FormatArg::Table => Format::Table,
                FormatArg::Kv => Format::KeyValue,
                FormatArg::Csv => Format::Csv,
            };
            commands::report(&cfg, format)
        }
        Command::Spectra { source, overrides, output_dir } => {
            let cfg = apply(load(source)?, overrides)?;
            let dir = output_dir.clone().unwrap_or_else(|| cfg.output.directory.clone());
            commands::spectra(&cfg, &dir)
        }
        Command::Sweep { source, lambda_nm, tau_min_fs, tau_max_fs, points, output } => {
            let mut cfg = apply(load(source)?, &Overrides { tau_fs: None, lambda_nm: *lambda_nm })?;
            if let Some(t) = positive("tau-min-fs", *tau_min_fs)? {
                cfg.sweep.tau_min_fs = t;
            }
            if let Some(t) = positive("tau-max-fs", *tau_max_fs)? {
                cfg.sweep.tau_max_fs = t;
            }
            if let Some(p) = points {
                cfg.sweep.points = *p;
            }
            commands::sweep(&cfg, output.as_deref())
        }
        Command::Fit { input, resolution_nm } => commands::fit(input, positive("resolution-nm", *resolution_nm)?),
        Command::Rtot { r_angle, r_omega } => commands::rtot(*r_angle, *r_omega),
    }
}

/// Parses `args` and runs the command. Usage errors come back with the
/// parser's message and exit code 2 (0 for `--help`/`--version`).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run_parsed(&cli),
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let text = e.render().to_string();
            if code == exit::OK {
                Outcome { stdout: text, code, message: None }
            } else {
                Outcome { stdout: String::new(), code, message: Some(text.trim_end().to_string()) }
            }
        }
    }
}

pub fn run_parsed(cli: &Cli) -> Outcome {
    match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => Outcome { stdout: String::new(), code: e.exit_code(), message: Some(format!("error: {e}")) },
    }
}
