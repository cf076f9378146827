use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use menuex_core::applications::ExperimentPreset;
use menuex_core::cli_io::{
    export_plotdata, parse_sample, parse_scenario, run_command, run_experiment, Command, Report, StepRule,
};
use menuex_core::{CoreError, Result};
use menuex_geometry::scalar::parse_scalar;
use menuex_geometry::Scalar;

/// Exact analysis of finite menus in linear screening problems.
#[derive(Parser)]
#[command(name = "menuex", version)]
struct Cli {
    /// Write the report to this file instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Step {
    Half,
    Max,
}

impl From<Step> for StepRule {
    fn from(s: Step) -> Self {
        match s {
            Step::Half => StepRule::Half,
            Step::Max => StepRule::Max,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Simplex,
    Cube,
    Strike2d,
}

fn scalar(text: &str) -> std::result::Result<Scalar, String> {
    parse_scalar(text).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Cmd {
    /// Extended menu, exhaustiveness, extremality with certificate, and the planar classification.
    Analyze { scenario: PathBuf },
    /// A verified decomposition, or the trivial-nullspace certificate for an extreme menu.
    Decompose {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "half")]
        step: Step,
    },
    /// Perturbs an exhaustive menu (d >= 3) into a certified extreme menu within delta.
    Perturb {
        scenario: PathBuf,
        #[arg(long, value_parser = scalar)]
        delta: Scalar,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Boundary partition and flexible-chain search for d = 2.
    Classify2d { scenario: PathBuf },
    /// Delegation on the unit simplex: dictates, grants a strike, or neither.
    Delegation { scenario: PathBuf },
    /// Marginal-price analysis of a monopoly menu; with --eps and --delta, also the nudged menu.
    Monopoly {
        scenario: PathBuf,
        #[arg(long, value_parser = scalar, requires = "delta")]
        eps: Option<Scalar>,
        #[arg(long, value_parser = scalar, requires = "eps")]
        delta: Option<Scalar>,
    },
    /// Undominatedness of a veto-bargaining menu.
    Veto { scenario: PathBuf },
    /// Expected principal utility on a type sample, optionally compared with a second menu.
    Evaluate {
        scenario: PathBuf,
        #[arg(long)]
        sample: PathBuf,
        #[arg(long)]
        compare: Option<PathBuf>,
    },
    /// Seeded random forced-exhaustive menus and the fraction that is extreme.
    Experiment {
        #[arg(long, value_enum, default_value = "simplex")]
        preset: Preset,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Only draw menus in general position.
        #[arg(long)]
        general_position: bool,
    },
    /// Decimal plot rows for d in {2, 3}.
    Plotdata {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "half")]
        step: Step,
    },
}

fn run(cmd: Cmd) -> Result<Report> {
    let with = |path: &PathBuf, c: Command| run_command(&c, &parse_scenario(path)?);
    match cmd {
        Cmd::Analyze { scenario } => with(&scenario, Command::Analyze),
        Cmd::Decompose { scenario, step } => with(&scenario, Command::Decompose { step: step.into() }),
        Cmd::Perturb { scenario, delta, seed } => with(&scenario, Command::Perturb { delta, seed }),
        Cmd::Classify2d { scenario } => with(&scenario, Command::Classify2d),
        Cmd::Delegation { scenario } => with(&scenario, Command::Delegation),
        Cmd::Monopoly { scenario, eps, delta } => with(&scenario, Command::Monopoly { nudge: eps.zip(delta) }),
        Cmd::Veto { scenario } => with(&scenario, Command::Veto),
        Cmd::Evaluate { scenario, sample, compare } => {
            let compare = compare.map(|p| parse_scenario(&p).map(Box::new)).transpose()?;
            with(&scenario, Command::Evaluate { sample: parse_sample(&sample)?, compare })
        }
        Cmd::Experiment { preset, d, k, samples, seed, general_position } => {
            let preset = match preset {
                Preset::Simplex => ExperimentPreset::Simplex,
                Preset::Cube => ExperimentPreset::Cube,
                Preset::Strike2d => ExperimentPreset::Strike2d,
            };
            run_experiment(preset, d, k, samples, seed, general_position)
        }
        Cmd::Plotdata { scenario, out, step } => export_plotdata(&parse_scenario(&scenario)?, step.into(), &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = run(cli.command).and_then(|report| {
        let text = report.to_json();
        match &cli.output {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| CoreError::Io { path: path.display().to_string(), message: e.to_string() }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
