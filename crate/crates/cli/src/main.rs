use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qbird_cli::{CliConfig, CliResult, Overrides, SamplerKind};

#[derive(Parser)]
#[command(
    name = "qbird",
    version,
    about = "Quantum-walk Metropolis sampling for gravitational-wave injections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML config, or a manifest JSON to re-run.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides every seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Replace exact state probabilities with this many measurement shots.
    #[arg(long)]
    shots: Option<usize>,
    /// Largest simulated register size.
    #[arg(long)]
    qubit_cap: Option<usize>,
}

impl Common {
    fn load(&self) -> CliResult<CliConfig> {
        let mut cfg = CliConfig::load(&self.config)?;
        cfg.apply(Overrides {
            seed: self.seed,
            shots: self.shots,
            qubit_cap: self.qubit_cap,
        });
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write injected strain data and the true parameters.
    Inject(Common),
    /// Run a sampler on the configured data.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "qbird")]
        sampler: SamplerKind,
    },
    /// Compare two posterior sample files.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Samples under test.
        #[arg(long)]
        samples: PathBuf,
        /// Reference samples or grid posterior.
        #[arg(long)]
        reference: PathBuf,
    },
}

fn execute(cli: Cli) -> CliResult<PathBuf> {
    match cli.command {
        Command::Inject(common) => {
            let cfg = common.load()?;
            let m = qbird_cli::inject(&cfg, &common.out)?;
            Ok(m.outputs["manifest"].clone())
        }
        Command::Run { common, sampler } => {
            let cfg = common.load()?;
            let m = qbird_cli::run(&cfg, sampler, &common.out)?;
            Ok(m.outputs["manifest"].clone())
        }
        Command::Compare {
            common,
            samples,
            reference,
        } => {
            let cfg = common.load()?;
            let (report, m) = qbird_cli::compare(&cfg, &samples, &reference, &common.out)?;
            for p in &report.parameters {
                println!("{}: tv {:.4} pass {}", p.name, p.tv, p.tv_pass);
            }
            Ok(m.outputs["manifest"].clone())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(manifest) => {
            println!("{}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::FAILURE
        }
    }
}
