use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use marcwt::{cmd_compare, cmd_dm, cmd_figure, cmd_gauss, CliError, Grids, Preset, ScenarioConfig, Strategy};
use marcwt_core::GaussianScenario;

#[derive(Parser)]
#[command(name = "marcwt", version, about = "Secrecy rate regions of the multiple-access relay wiretap channel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate Gaussian regions for one scenario.
    Gauss(GaussArgs),
    /// Reproduce one of the figure datasets (regions, summary and SVG).
    Figure {
        #[arg(long)]
        id: u8,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a discrete memoryless factorization from a JSON file.
    Dm {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare two region CSVs; prints a JSON report.
    Compare { a: PathBuf, b: PathBuf },
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct GaussArgs {
    #[arg(long, value_enum)]
    strategy: Strategy,
    /// Start from a figure scenario; explicit values override it.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long)]
    p1: Option<f64>,
    #[arg(long)]
    p2: Option<f64>,
    #[arg(long)]
    pr: Option<f64>,
    #[arg(long)]
    nr: Option<f64>,
    #[arg(long)]
    n1: Option<f64>,
    #[arg(long)]
    n2: Option<f64>,
    /// Compression noise variance (cf and all).
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    gamma_steps: Option<usize>,
    #[arg(long)]
    outer_steps: Option<usize>,
    #[arg(long = "rstar-steps")]
    rstar_steps: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

impl GaussArgs {
    fn config(&self) -> Result<ScenarioConfig, CliError> {
        let base = self.preset.map(|p| p.config(self.strategy));
        let field = |name: &str, v: Option<f64>, preset: Option<f64>| {
            v.or(preset)
                .ok_or_else(|| CliError::Invalid(format!("--{name} is required")))
        };
        let bs = base.map(|c| c.scenario);
        let scenario = GaussianScenario {
            p1: field("p1", self.p1, bs.map(|s| s.p1))?,
            p2: field("p2", self.p2, bs.map(|s| s.p2))?,
            pr: field("pr", self.pr, bs.map(|s| s.pr))?,
            nr: field("nr", self.nr, bs.map(|s| s.nr))?,
            n1: field("n1", self.n1, bs.map(|s| s.n1))?,
            n2: field("n2", self.n2, bs.map(|s| s.n2))?,
        };
        let defaults = Grids::default();
        Ok(ScenarioConfig {
            scenario,
            strategy: self.strategy,
            q: self.q.or(base.and_then(|c| c.q)),
            grids: Grids {
                gamma_steps: self.gamma_steps.unwrap_or(defaults.gamma_steps),
                outer_steps: self.outer_steps.unwrap_or(defaults.outer_steps),
                r_star_steps: self.rstar_steps.unwrap_or(defaults.r_star_steps),
            },
        })
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gauss(args) => {
            let outputs = cmd_gauss(&args.config()?, &args.out)?;
            for o in outputs {
                println!("{}: area {} bits^2", o.strategy.name(), o.report.area_bits2);
            }
        }
        Command::Figure { id, out } => {
            let run = cmd_figure(id, &out)?;
            println!("wrote {}", run.svg_path.display());
        }
        Command::Dm { spec, out } => {
            let report = cmd_dm(&spec, &out)?;
            print!("{}", report.to_json());
        }
        Command::Compare { a, b } => {
            print!("{}", cmd_compare(&a, &b)?.to_json());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("marcwt: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
