//! Batch front end: config file + flags in, CSV table and SVG chart out.
//!
//! Exit codes: 0 success, 1 internal failure, 2 missing input file,
//! 3 invalid configuration, 4 output not writable, 5 malformed CSV.

pub mod config;
pub mod csv;
pub mod plot;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::channel::ChannelKind;
use crate::link::{run_sweep, LinkError, SimConfig};
use crate::modem::Modulation;

pub use config::{Overrides, Settings};
pub use csv::{Row, HEADER};
pub use plot::{render_svg, XAxis};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {msg}")]
    MissingInput { path: PathBuf, msg: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot write {path}: {msg}")]
    Unwritable { path: PathBuf, msg: String },
    #[error("malformed CSV at line {line}: {msg}")]
    MalformedCsv { line: usize, msg: String },
    #[error("simulation failed: {0}")]
    Simulation(#[from] LinkError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Simulation(_) => 1,
            CliError::MissingInput { .. } => 2,
            CliError::InvalidConfig(_) => 3,
            CliError::Unwritable { .. } => 4,
            CliError::MalformedCsv { .. } => 5,
        }
    }
}

/// One sweep to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Combination {
    pub channel: ChannelKind,
    pub modulation: Modulation,
    pub config: SimConfig,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub settings: Settings,
    pub combinations: Vec<Combination>,
    pub out: PathBuf,
    pub plot: Option<PathBuf>,
    pub x_axis: XAxis,
    pub version: String,
}

impl RunManifest {
    pub fn from_settings(settings: Settings, out: PathBuf, plot: Option<PathBuf>, x_axis: XAxis) -> Result<Self, CliError> {
        settings.validate()?;
        let mut combinations = Vec::new();
        for &channel in &settings.channels {
            for &modulation in &settings.modulations {
                combinations.push(Combination {
                    channel,
                    modulation,
                    config: settings.sim_config(channel, modulation)?,
                });
            }
        }
        Ok(Self {
            settings,
            combinations,
            out,
            plot,
            x_axis,
            version: VERSION.to_string(),
        })
    }

    pub fn master_seed(&self) -> u64 {
        self.settings.seed
    }

    /// Where the manifest echo goes: `<out>.manifest`.
    pub fn echo_path(&self) -> PathBuf {
        let mut name = self.out.clone().into_os_string();
        name.push(".manifest");
        PathBuf::from(name)
    }

    /// The echo is itself a valid config file for the same run.
    pub fn echo_text(&self) -> String {
        format!(
            "# wimax-sim {}\n# master seed {}, {} sweep(s)\n{}",
            self.version,
            self.master_seed(),
            self.combinations.len(),
            self.settings.to_config_text()
        )
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::MissingInput {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

fn create(path: &Path) -> Result<fs::File, CliError> {
    fs::File::create(path).map_err(|e| CliError::Unwritable {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

fn write_all(file: &mut fs::File, path: &Path, text: &str) -> Result<(), CliError> {
    file.write_all(text.as_bytes())
        .and_then(|_| file.flush())
        .map_err(|e| CliError::Unwritable {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })
}

/// Defaults, then the config file if given, then flag overrides.
pub fn parse_config(
    path: Option<&Path>,
    overrides: &Overrides,
    out: PathBuf,
    plot: Option<PathBuf>,
    x_axis: XAxis,
) -> Result<RunManifest, CliError> {
    let mut settings = Settings::default();
    if let Some(path) = path {
        settings.apply_text(&read_input(path)?)?;
    }
    settings.apply_overrides(overrides)?;
    RunManifest::from_settings(settings, out, plot, x_axis)
}

/// Runs every sweep, then writes the CSV, the manifest echo and, if asked,
/// the chart. Output files are opened before any simulation starts so an
/// unwritable path fails fast.
pub fn run_and_export(manifest: &RunManifest) -> Result<Vec<Row>, CliError> {
    let echo_path = manifest.echo_path();
    let mut csv_file = create(&manifest.out)?;
    let mut echo_file = create(&echo_path)?;
    let mut plot_file = match &manifest.plot {
        Some(p) => Some((create(p)?, p)),
        None => None,
    };

    let mut rows = Vec::new();
    for combo in &manifest.combinations {
        let points = run_sweep(&combo.config)?;
        eprintln!(
            "{} {} {}: {} points",
            combo.channel,
            combo.modulation,
            if combo.config.coding_enabled { "coded" } else { "uncoded" },
            points.len()
        );
        rows.extend(
            points
                .iter()
                .map(|p| Row::from_point(p, combo.channel, combo.modulation, combo.config.coding_enabled)),
        );
    }

    write_all(&mut csv_file, &manifest.out, &csv::render(&rows))?;
    write_all(&mut echo_file, &echo_path, &manifest.echo_text())?;
    if let Some((file, path)) = plot_file.as_mut() {
        write_all(file, path, &render_svg(&rows, manifest.x_axis))?;
    }
    Ok(rows)
}

/// Reads a CSV written by [`run_and_export`] and draws it.
pub fn emit_plot(csv_path: &Path, out: &Path, x_axis: XAxis) -> Result<(), CliError> {
    let rows = csv::parse(&read_input(csv_path)?)?;
    let mut file = create(out)?;
    write_all(&mut file, out, &render_svg(&rows, x_axis))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_stable() {
        let p = PathBuf::from("x");
        assert_eq!(CliError::MissingInput { path: p.clone(), msg: String::new() }.exit_code(), 2);
        assert_eq!(CliError::InvalidConfig(String::new()).exit_code(), 3);
        assert_eq!(CliError::Unwritable { path: p, msg: String::new() }.exit_code(), 4);
        assert_eq!(CliError::MalformedCsv { line: 1, msg: String::new() }.exit_code(), 5);
    }

    #[test]
    fn manifest_expands_every_pair() {
        let m = RunManifest::from_settings(Settings::default(), "a.csv".into(), None, XAxis::Snr).unwrap();
        assert_eq!(m.combinations.len(), 9);
        assert_eq!(m.echo_path(), PathBuf::from("a.csv.manifest"));
        let mut reparsed = Settings::default();
        reparsed.apply_text(&m.echo_text()).unwrap();
        assert_eq!(reparsed, m.settings);
    }
}
