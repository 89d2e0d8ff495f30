use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kirchhoff_cli::{run, CliError, Mode, RunConfig};

#[derive(Parser)]
#[command(name = "kirchhoff", version, about = "Kirchhoff double phase solver batch driver")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    args: RunArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Run one mode (same as passing the flags directly).
    Run(RunArgs),
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// TOML run configuration; built-in defaults when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides the config and $KIRCHHOFF_OUT).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Concurrent sweep rows.
    #[arg(long)]
    workers: Option<usize>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long)]
    dump_config: bool,
}

fn load(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            RunConfig::from_toml(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(m) = args.mode {
        cfg.mode = m;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(o) = &args.out {
        cfg.out = Some(o.clone());
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { kirchhoff_cli::EXIT_CONFIG as u8 } else { 0 });
        }
    };
    let args = match cli.command {
        Some(Command::Run(a)) => a,
        None => cli.args,
    };
    let result = load(&args).and_then(|cfg| {
        if args.dump_config {
            print!("{}", cfg.to_toml());
            return Ok(None);
        }
        eprintln!("mode {} -> {}", cfg.mode.name(), cfg.out_dir().display());
        run(&cfg).map(Some)
    });
    match result {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(outcome)) => {
            for m in &outcome.messages {
                eprintln!("{m}");
            }
            for a in &outcome.artifacts {
                println!("{}", a.display());
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
