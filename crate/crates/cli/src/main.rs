use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use meterent_cli::config::SqueezeList;
use meterent_cli::{
    cmd_fig, cmd_trajectory, cmd_verify, emit, render, Figure, Format, Overrides, RunConfig, EXIT_VERIFICATION_FAILED,
};

#[derive(Parser)]
#[command(name = "meterent", version, about = "Entanglement between a measured two-level system and its meter")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Every derived quantity per time sample and squeeze value
    Trajectory(RunArgs),
    /// Decoherence factor against time
    Fig3(RunArgs),
    /// Concurrence and entanglement of formation against time
    Fig4(RunArgs),
    /// Maximal Bell violation, with the r = 2 / r = 3.5 differences
    Fig5(RunArgs),
    /// Compare the closed form with the integrated master equation
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Number-basis cutoff; chosen from the truncation budget if omitted
        #[arg(long)]
        cutoff: Option<usize>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, allow_negative_numbers = true)]
    alpha0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Squeeze magnitude; repeat for several values
    #[arg(long = "r", allow_negative_numbers = true)]
    r: Vec<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_max: Option<f64>,
    /// Number of time samples including both ends
    #[arg(long)]
    steps: Option<usize>,
    /// Output file; standard output if omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Flat `key = value` file with the same keys as the long flags
    #[arg(long)]
    config: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(
        self,
        defaults: RunConfig,
        cutoff: Option<usize>,
        allow_cutoff: bool,
    ) -> meterent::Result<(RunConfig, Option<usize>)> {
        let file = match &self.config {
            Some(path) => Overrides::from_file(path)?,
            None => Overrides::default(),
        };
        let flags = Overrides {
            alpha0: self.alpha0,
            gamma: self.gamma,
            theta: self.theta,
            r: (!self.r.is_empty()).then_some(SqueezeList::Many(self.r)),
            t_max: self.t_max,
            steps: self.steps,
            out: self.out,
            format: self.format,
            cutoff,
        };
        let merged = flags.over(file);
        if merged.cutoff.is_some() && !allow_cutoff {
            return Err(meterent::Error::InvalidConfig("cutoff only applies to verify".into()));
        }
        let cutoff = merged.cutoff;
        let config = merged.apply(defaults);
        config.validate()?;
        Ok((config, cutoff))
    }
}

fn run(command: Command) -> meterent::Result<bool> {
    let (config, rows, passed) = match command {
        Command::Verify { run, cutoff } => {
            let (config, cutoff) = run.resolve(RunConfig::verify_defaults(), cutoff, true)?;
            let out = cmd_verify(&config, cutoff)?;
            (config, out.rows, out.passed)
        }
        Command::Trajectory(run) => {
            let (config, _) = run.resolve(RunConfig::figure_defaults(), None, false)?;
            let rows = cmd_trajectory(&config)?;
            (config, rows, true)
        }
        Command::Fig3(run) => fig(Figure::Fig3, run)?,
        Command::Fig4(run) => fig(Figure::Fig4, run)?,
        Command::Fig5(run) => fig(Figure::Fig5, run)?,
    };
    emit(&render(&rows, config.format)?, &config)?;
    Ok(passed)
}

fn fig(which: Figure, run: RunArgs) -> meterent::Result<(RunConfig, Vec<meterent_cli::Row>, bool)> {
    let (config, _) = run.resolve(RunConfig::figure_defaults(), None, false)?;
    let rows = cmd_fig(which, &config)?;
    Ok((config, rows, true))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("meterent: verification failed; see the report for the offending samples");
            ExitCode::from(EXIT_VERIFICATION_FAILED as u8)
        }
        Err(e) => {
            eprintln!("meterent: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
