use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use peakcast::commands;
use peakcast::config::ExperimentConfig;
use peakcast::PipelineError;
use peakcast_core::selection::BicForm;

/// Daily-peak solar forecasting pipeline.
#[derive(Parser)]
#[command(name = "peakcast", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic observed/forecast/energy CSVs
    Synth(CommonArgs),
    /// Score every predictor subset with RMSE, adjusted R², AIC, AICc, BIC, CV
    Select(CommonArgs),
    /// Bootstrap statistics of the weather forecast error per horizon
    WeatherError(CommonArgs),
    /// Train on observed predictors and evaluate MAPE per forecast horizon
    Run(CommonArgs),
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::Synth(a) | Command::Select(a) | Command::WeatherError(a) | Command::Run(a) => a,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment configuration (JSON)
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's output_dir)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Force every seeded component (generator, bootstrap, ANN) to this seed
    #[arg(long)]
    seed: Option<u64>,
    /// BIC penalty form
    #[arg(long, value_enum)]
    bic_form: Option<BicFormArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BicFormArg {
    Printed,
    Standard,
}

impl From<BicFormArg> for BicForm {
    fn from(arg: BicFormArg) -> Self {
        match arg {
            BicFormArg::Printed => BicForm::Printed,
            BicFormArg::Standard => BicForm::Standard,
        }
    }
}

fn run(cli: &Cli) -> Result<(), PipelineError> {
    let args = cli.command.args();
    let mut config = ExperimentConfig::load(&args.config)?;
    config.apply_overrides(args.seed, args.out.clone(), args.bic_form.map(BicForm::from));
    match &cli.command {
        Command::Synth(_) => commands::cmd_synth(&config).map(drop),
        Command::Select(_) => commands::cmd_select(&config).map(drop),
        Command::WeatherError(_) => commands::cmd_weather_error(&config).map(drop),
        Command::Run(_) => commands::cmd_run(&config).map(drop),
    }
}

fn main() -> ExitCode {
    // die quietly when stdout is a closed pipe (e.g. piped into `head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
