use std::path::PathBuf;
use std::process::ExitCode;

use belyi_cli::{parse_delta, run_pipeline, Command, PipelineConfig};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "belyi", version, about = "Genus-zero Belyi maps from permutation triples")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// Working precision in bits (solve target and recognition)
    #[arg(long, global = true, default_value_t = 256)]
    prec_bits: u32,
    /// Multistart seed
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Multistart budget
    #[arg(long, global = true, default_value_t = 4000)]
    starts: usize,
    /// LLL parameter, decimal or p/q, in (1/4, 1)
    #[arg(long, global = true, default_value = "0.99", value_parser = parse_delta)]
    delta: rug::Rational,
    /// Worker threads for the multistart search; 0 uses every core
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Output file (output directory for `roundtrip`); stdout when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Solution file used as a Newton start instead of the multistart search
    #[arg(long, global = true)]
    guess: Option<PathBuf>,
    /// Largest degree accepted by the monodromy computation
    #[arg(long, global = true, default_value_t = 64)]
    max_monodromy_degree: usize,
    /// Extra diagnostics on stderr
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Sub {
    /// Subgroup profile of a triple or passport file
    Analyze { input: PathBuf },
    /// Factor structure, unknowns and normalization
    Ansatz { input: PathBuf },
    /// Numerical solution file(s)
    Solve { input: PathBuf },
    /// Certified map from a triple and a solution file
    Recognize { input: PathBuf, solution: PathBuf },
    /// Re-check a certified map file
    Verify { map: PathBuf },
    /// Triple recovered from a certified map
    Monodromy { map: PathBuf },
    /// analyze, solve, recognize, verify, monodromy and conjugacy check
    Roundtrip { input: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, inputs) = match cli.command {
        Sub::Analyze { input } => (Command::Analyze, vec![input]),
        Sub::Ansatz { input } => (Command::Ansatz, vec![input]),
        Sub::Solve { input } => (Command::Solve, vec![input]),
        Sub::Recognize { input, solution } => (Command::Recognize, vec![input, solution]),
        Sub::Verify { map } => (Command::Verify, vec![map]),
        Sub::Monodromy { map } => (Command::Monodromy, vec![map]),
        Sub::Roundtrip { input } => (Command::Roundtrip, vec![input]),
    };
    let cfg = PipelineConfig {
        prec_bits: cli.prec_bits,
        delta: cli.delta,
        starts: cli.starts,
        seed: cli.seed,
        out: cli.out,
        threads: cli.threads,
        guess: cli.guess,
        max_monodromy_degree: cli.max_monodromy_degree,
        verbose: cli.verbose,
        ..PipelineConfig::new(command, inputs)
    };
    match run_pipeline(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code as u8)
        }
    }
}
