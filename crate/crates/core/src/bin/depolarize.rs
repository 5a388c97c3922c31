use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use depolarize::experiments::{run, CalibrationMethod, Kind, Overrides, RunConfig};

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Calibrate p_tot on a circuit and write calibration.jsonl
    Calibrate,
    /// Magnetization quench with raw, mitigated and exact columns
    Quench,
    /// Second-order Rényi entropy quench from randomized measurements
    Renyi,
    /// Meson masses from the dominant magnetization oscillation
    Masses,
    /// Mitigation-quality table for random brickwork circuits
    BrickworkBench,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Purity,
    Known,
}

#[derive(clap::Args)]
struct Flags {
    /// TOML run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Calibration route
    #[arg(long, value_enum, global = true)]
    method: Option<MethodArg>,
    /// Trotter step count
    #[arg(long, global = true)]
    nt: Option<usize>,
    /// Brickwork depth
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Parser)]
#[command(
    version,
    about = "Noisy circuit simulation and global-depolarizing error mitigation"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

fn kind(c: Command) -> Kind {
    match c {
        Command::Calibrate => Kind::Calibrate,
        Command::Quench => Kind::Quench,
        Command::Renyi => Kind::Renyi,
        Command::Masses => Kind::Masses,
        Command::BrickworkBench => Kind::BrickworkBench,
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let f = args.flags;
    let Some(path) = f.config else {
        eprintln!("error: --config <path> is required");
        return ExitCode::from(1);
    };
    let result = RunConfig::load(&path).and_then(|mut cfg| {
        let want = kind(args.command);
        if cfg.kind != want {
            return Err(depolarize::Error::InvalidArgument(format!(
                "config describes a {} run, not {}",
                cfg.kind.name(),
                want.name()
            )));
        }
        cfg.apply(&Overrides {
            seed: f.seed,
            out: f.out,
            method: f.method.map(|m| match m {
                MethodArg::Purity => CalibrationMethod::Purity,
                MethodArg::Known => CalibrationMethod::Known,
            }),
            n_t: f.nt,
            depth: f.depth,
            threads: f.threads,
        });
        run(&cfg)
    });
    match result {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            for file in &outcome.files {
                println!("wrote {}", file.display());
            }
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
