use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use urafocus_cli::config::{preset, ExperimentConfig};
use urafocus_cli::error::{CliError, Result};
use urafocus_cli::run::{execute, write_output};

/// Near-field beamfocusing analysis for uniform rectangular arrays.
///
/// Every subcommand takes either a JSON configuration (--config) or a
/// built-in preset (--preset fig3..fig7) and writes a CSV table with a
/// `#`-prefixed metadata header. Angles are degrees on this surface.
#[derive(Parser)]
#[command(name = "urafocus", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment configuration.
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    config: Option<PathBuf>,

    /// Built-in preset: fig3, fig4, fig5, fig6, fig7.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,

    /// Output CSV path (stdout when omitted; overrides the config's own).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Override the experiment seed (sumrate only).
    #[arg(long)]
    seed: Option<u64>,

    /// Override the trial count (sumrate only).
    #[arg(long)]
    trials: Option<u64>,

    /// Also write a gnuplot script next to the CSV.
    #[arg(long)]
    gnuplot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// 3 dB window of a focused beam over an azimuth sweep.
    Beamdepth(CommonArgs),
    /// Effective beamfocusing Rayleigh distance vs azimuth per aspect ratio.
    Ebrd(CommonArgs),
    /// Aspect-ratio sweep at fixed element count.
    EtaSweep(CommonArgs),
    /// Array gain vs range: direct summation and Fresnel closed form.
    GainProfile(CommonArgs),
    /// Multiuser downlink sum-rate Monte Carlo.
    Sumrate(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Beamdepth(_) => "beamdepth",
            Command::Ebrd(_) => "ebrd",
            Command::EtaSweep(_) => "eta-sweep",
            Command::GainProfile(_) => "gain-profile",
            Command::Sumrate(_) => "sumrate",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Beamdepth(a)
            | Command::Ebrd(a)
            | Command::EtaSweep(a)
            | Command::GainProfile(a)
            | Command::Sumrate(a) => a,
        }
    }
}

fn load_config(cmd: &Command) -> Result<ExperimentConfig> {
    let args = cmd.args();
    let mut config = match (&args.config, &args.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)?
        }
        (None, Some(name)) => preset(name)?,
        (None, None) => {
            return Err(CliError::Config(
                "either --config <path> or --preset <name> is required".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };
    if config.kind_name() != cmd.name() {
        return Err(CliError::Config(format!(
            "configuration is a `{}` experiment but the `{}` subcommand was invoked",
            config.kind_name(),
            cmd.name()
        )));
    }
    if let ExperimentConfig::Sumrate(ref mut c) = config {
        if let Some(seed) = args.seed {
            c.seed = seed;
        }
        if let Some(trials) = args.trials {
            c.trials = trials;
        }
    } else if args.seed.is_some() || args.trials.is_some() {
        return Err(CliError::Config(
            "--seed/--trials only apply to the sumrate experiment".into(),
        ));
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<()> {
    let config = load_config(&cli.command)?;
    let doc = execute(&config)?;
    let args = cli.command.args();
    let out = args
        .out
        .clone()
        .or_else(|| config.out().map(PathBuf::from));
    write_output(&doc, out.as_deref(), args.gnuplot)
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
