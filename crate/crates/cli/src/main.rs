use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use pde_ssc_cli::{load, run_command, Command, Source};

#[derive(Debug, Parser)]
#[command(name = "pde-ssc", version, about = "Sampled-in-space control of semilinear PDEs")]
struct Args {
    command: Command,

    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Built-in plant: paper-parabolic, paper-hyperbolic, paper-hyperbolic-literal.
    #[arg(long)]
    preset: Option<String>,

    /// Output directory (overrides output.dir).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Dotted key=value, e.g. controller.gain=500. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();

    if let Ok(v) = std::env::var("PDE_SSC_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("could not size the thread pool: {e}");
                }
            }
            _ => {
                eprintln!("error: PDE_SSC_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(2);
            }
        }
    }

    let source = Source {
        path: args.config,
        preset: args.preset,
        overrides: args.overrides,
        out_dir: args.out,
    };
    if source.path.is_none() && source.preset.is_none() {
        eprintln!("error: give --config or --preset");
        return ExitCode::from(2);
    }
    let result = load(&source)
        .map_err(Into::into)
        .and_then(|cfg| run_command(args.command, &cfg));
    match result {
        Ok(outcome) => {
            for a in &outcome.artifacts {
                println!("wrote {}", a.display());
            }
            println!("{}", outcome.message);
            ExitCode::from(outcome.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
