use std::path::PathBuf;
use std::process::ExitCode;

use ballistic::harness::{emit_figure_data, run, verify, ExperimentConfig, FIGURE_IDS};
use ballistic::Error;
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "ballistic", version, about = "Ballistic photonic cluster-state simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the number of trials.
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Worker threads, 0 for all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run { config: PathBuf },
    /// Build a figure CSV and SVG from a finished run.
    Figure {
        /// Run directory or its records file.
        results: PathBuf,
        #[arg(value_parser = FIGURE_IDS)]
        figure_id: String,
    },
    /// Run the numerical checks and print one line per check.
    Verify {
        /// Restrict to these check ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config } => {
            let mut cfg = match ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            if let Some(t) = cli.trials {
                cfg.trials = t;
            }
            if let Some(t) = cli.threads {
                cfg.threads = t;
            }
            if let Some(o) = cli.out {
                cfg.out = Some(o);
            }
            let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("results").join(cfg.scenario.name()));
            let result = cfg.validate().and_then(|()| run(&cfg)).and_then(|out| out.write_to(&dir));
            match result {
                Ok(files) => {
                    for f in files {
                        println!("{}", f.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Figure { results, figure_id } => match emit_figure_data(&results, &figure_id, cli.out.as_deref()) {
            Ok(files) => {
                for f in files {
                    println!("{}", f.display());
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Verify { only } => {
            if let Some(t) = cli.threads.filter(|&t| t > 0) {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            }
            let checks = verify(&only);
            let mut ok = !checks.is_empty();
            for c in &checks {
                println!("{}", c.line());
                ok &= c.passed;
            }
            let passed = checks.iter().filter(|c| c.passed).count();
            println!("{passed}/{} checks passed", checks.len());
            if ok { ExitCode::SUCCESS } else { ExitCode::from(3) }
        }
    }
}
