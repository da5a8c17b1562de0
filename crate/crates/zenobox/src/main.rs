use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zenobox::run::{resolve_out_dir, OUT_ENV};
use zenobox::{run_experiment, write_outputs, Config, Experiment};

#[derive(Parser)]
#[command(
    name = "zenobox",
    version,
    about = "Fractal quantum paths in a Zeno box"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Output directory (default: $ZENOBOX_OUT, else ./zenobox-out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the experiment catalog.
    List,
    /// Check a config file without running it.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List => {
            for e in Experiment::ALL {
                println!("{:<20} {}", e.name(), e.description());
            }
            Ok(())
        }
        Command::Validate { config } => Config::from_path(&config).map(|cfg| {
            println!("{}: ok ({})", config.display(), cfg.experiment());
        }),
        Command::Run {
            config,
            out,
            seed,
            threads,
        } => (|| {
            let mut cfg = Config::from_path(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let env = std::env::var(OUT_ENV).ok();
            let dir = resolve_out_dir(out.as_deref(), env.as_deref());
            let output = run_experiment(&cfg, threads)?;
            print!("{}", output.report);
            for path in write_outputs(&output, &dir)? {
                println!("wrote {}", path.display());
            }
            Ok(())
        })(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
