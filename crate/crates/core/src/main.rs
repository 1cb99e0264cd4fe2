use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wimax_sim::cli::{emit_plot, parse_config, run_and_export, CliError, Overrides, XAxis};

/// BER sweeps for an 802.16-style OFDM link over AWGN, Rayleigh and Rician channels.
#[derive(Debug, Parser)]
#[command(name = "wimax-sim", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw an SVG chart from a CSV written by a previous run.
    Plot {
        csv: PathBuf,
        svg: PathBuf,
        /// snr or ebn0
        #[arg(long, default_value = "snr")]
        x_axis: String,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// `key = value` config file; unset keys use the built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV output; the manifest echo goes to `<out>.manifest`.
    #[arg(long, default_value = "ber.csv")]
    out: PathBuf,
    /// Also write an SVG chart here.
    #[arg(long)]
    plot: Option<PathBuf>,
    #[arg(long)]
    seed: Option<String>,
    /// awgn, rayleigh, rician or all
    #[arg(long)]
    channel: Option<String>,
    /// qpsk, 16qam, 64qam or all
    #[arg(long)]
    modulation: Option<String>,
    /// on or off
    #[arg(long)]
    coding: Option<String>,
    /// min:step:max in dB
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    /// snr or ebn0
    #[arg(long, default_value = "snr")]
    x_axis: String,
}

fn x_axis(s: &str) -> Result<XAxis, CliError> {
    s.parse().map_err(CliError::InvalidConfig)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Some(Command::Plot { csv, svg, x_axis: axis }) => emit_plot(&csv, &svg, x_axis(&axis)?),
        None => {
            let a = cli.run;
            let overrides = Overrides {
                channel: a.channel,
                modulation: a.modulation,
                coding: a.coding,
                snr: a.snr,
                seed: a.seed,
            };
            let manifest = parse_config(a.config.as_deref(), &overrides, a.out, a.plot, x_axis(&a.x_axis)?)?;
            let rows = run_and_export(&manifest)?;
            eprintln!("wrote {} rows to {}", rows.len(), manifest.out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(CliError::InvalidConfig(String::new()).exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wimax-sim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
