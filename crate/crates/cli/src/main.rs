//! `actool`: parse, normalize, scramble, search, verify, and analyze
//! balanced presentations under Andrews-Curtis moves.
//!
//! Exit codes: 0 on success, 1 on a negative mathematical outcome (search
//! exhausted or over budget, verification failure, completeness unknown),
//! 2 on usage or input errors. Everything written to stdout is
//! deterministic for fixed inputs, flags, and seed; progress and timing go
//! to stderr.

mod repl;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use ac_core::complete::{analyze, AnalyzeConfig, AnnihilatingVerdict, CompletenessVerdict};
use ac_core::moves::{apply_move, enumerate_moves};
use ac_core::presentation::Presentation;
use ac_core::search::{
    scramble, verify_certificate, BfsSearcher, Certificate, IdSearcher, SearchConfig,
    SearchOutcome, SearchStats, Strategy,
};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "actool", version, about = "Andrews-Curtis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    BreadthFirst,
    IterativeDeepening,
}

impl From<StrategyArg> for Strategy {
    fn from(value: StrategyArg) -> Strategy {
        match value {
            StrategyArg::BreadthFirst => Strategy::BreadthFirst,
            StrategyArg::IterativeDeepening => Strategy::IterativeDeepening,
        }
    }
}

#[derive(clap::Args)]
struct SearchFlags {
    /// Relator length cap; defaults to the start's longest relator + 4
    #[arg(long)]
    max_len: Option<usize>,
    /// Maximum number of elementary moves in a solution
    #[arg(long, default_value_t = 8)]
    max_depth: usize,
    /// Node expansion budget
    #[arg(long, default_value_t = 1_000_000)]
    max_nodes: u64,
    #[arg(long, value_enum, default_value_t = StrategyArg::BreadthFirst)]
    strategy: StrategyArg,
    /// Checkpoint file: resumed when it exists, autosaved while running
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Expansions between autosaves (0 = only when the budget runs out)
    #[arg(long, default_value_t = 100_000)]
    checkpoint_every: u64,
    /// Store full state keys instead of 128-bit fingerprints
    #[arg(long)]
    exact_dedup: bool,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Stream progress to stderr every N expansions (0 = silent)
    #[arg(long, default_value_t = 0)]
    progress_every: u64,
}

impl SearchFlags {
    fn to_config(&self, start: &Presentation) -> SearchConfig {
        SearchConfig {
            max_relator_len: self
                .max_len
                .unwrap_or(start.metrics().max_relator_length + 4),
            max_depth: self.max_depth,
            max_nodes: self.max_nodes,
            strategy: self.strategy.into(),
            exact_dedup: self.exact_dedup,
            threads: self.threads,
            checkpoint_path: self.checkpoint.clone(),
            checkpoint_every: if self.checkpoint.is_some() {
                self.checkpoint_every
            } else {
                0
            },
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse a presentation and print its normalized text form
    Parse {
        /// Input file, or - for stdin
        #[arg(default_value = "-")]
        input: String,
    },
    /// Print the canonical form: sorted conjugacy-class representatives
    Normalize {
        #[arg(default_value = "-")]
        input: String,
    },
    /// List every elementary move and the presentation it produces
    Neighbors {
        #[arg(default_value = "-")]
        input: String,
    },
    /// Search for a trivialization and print the certificate
    Search {
        #[arg(default_value = "-")]
        input: String,
        #[command(flatten)]
        flags: SearchFlags,
    },
    /// Replay a certificate and report the audit
    Verify {
        #[arg(default_value = "-")]
        certificate: String,
    },
    /// Scramble the trivial presentation into a solvable instance
    Scramble {
        /// Rank of the trivial presentation to scramble
        #[arg(short = 'n', long)]
        rank: u16,
        /// Number of moves to apply
        #[arg(short = 'k', long)]
        moves: usize,
        /// Relator length cap during scrambling
        #[arg(long, default_value_t = 5)]
        max_len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print only the scrambled presentation, not the certificate
        #[arg(long)]
        presentation: bool,
    },
    /// Bounded complete-set check of an n-tuple
    Complete {
        #[arg(default_value = "-")]
        input: String,
        /// Length bound for witnesses and conjugators
        #[arg(long, default_value_t = 2)]
        bound: u32,
    },
    /// Determinant gate, completeness check, then trivialization search
    Analyze {
        #[arg(default_value = "-")]
        input: String,
        /// Length bound for witnesses and conjugators
        #[arg(long, default_value_t = 2)]
        bound: u32,
        #[command(flatten)]
        flags: SearchFlags,
    },
    /// Interactive move shell reading commands from stdin
    Repl {
        /// Presentation file to start from
        input: String,
    },
}

/// Failures after successful argument parsing.
enum Failure {
    /// Bad input or I/O: exit 2 with a message.
    Input(String),
    /// Negative mathematical outcome: exit 1, output already printed.
    Negative,
}

impl From<ac_core::presentation::ParseError> for Failure {
    fn from(e: ac_core::presentation::ParseError) -> Failure {
        Failure::Input(e.to_string())
    }
}

impl From<ac_core::search::CertificateParseError> for Failure {
    fn from(e: ac_core::search::CertificateParseError) -> Failure {
        Failure::Input(e.to_string())
    }
}

impl From<ac_core::complete::CompleteError> for Failure {
    fn from(e: ac_core::complete::CompleteError) -> Failure {
        Failure::Input(e.to_string())
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::Input(format!("reading stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("reading {path}: {e}")))
    }
}

fn load_presentation(path: &str) -> Result<Presentation, Failure> {
    Ok(Presentation::parse(&read_input(path)?)?)
}

fn main() -> ExitCode {
    // Die quietly when a pipe reader goes away (e.g. `actool ... | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Parse { input } => {
            let p = load_presentation(&input)?;
            println!("{}", p.format());
            Ok(())
        }
        Command::Normalize { input } => {
            let p = load_presentation(&input)?;
            println!("{}", p.canonicalize().to_presentation().format());
            Ok(())
        }
        Command::Neighbors { input } => {
            let p = load_presentation(&input)?;
            for mv in enumerate_moves(&p) {
                let child = apply_move(&p, &mv).expect("enumerated moves are valid");
                println!("{mv}\t{}", child.format_single_line());
            }
            Ok(())
        }
        Command::Search { input, flags } => run_search(&input, &flags),
        Command::Verify { certificate } => {
            let cert = Certificate::parse(&read_input(&certificate)?)?;
            let report = verify_certificate(&cert);
            print!("{}", report.render());
            if report.pass {
                Ok(())
            } else {
                Err(Failure::Negative)
            }
        }
        Command::Scramble { rank, moves, max_len, seed, presentation } => {
            if rank == 0 {
                return Err(Failure::Input("scramble needs rank >= 1".into()));
            }
            if max_len == 0 {
                return Err(Failure::Input("scramble needs --max-len >= 1".into()));
            }
            let (state, certificate) = scramble(rank, moves, max_len, seed);
            if presentation {
                println!("{}", state.format());
            } else {
                print!("{}", certificate.format());
            }
            Ok(())
        }
        Command::Complete { input, bound } => {
            let p = load_presentation(&input)?;
            let verdict = ac_core::complete::is_complete_set(p.relators(), bound)?;
            println!("rank: {}", p.rank());
            println!("bound: {bound}");
            match verdict {
                CompletenessVerdict::CompleteWithWitness(witness) => {
                    println!("verdict: complete");
                    for (pos, (a, b)) in witness
                        .conjugated
                        .iter()
                        .zip(&witness.witnesses)
                        .enumerate()
                    {
                        println!("conjugated_{}: {}", pos + 1, a.format_for_rank(p.rank()));
                        println!("witness_{}: {}", pos + 1, b.format_for_rank(p.rank()));
                    }
                    Ok(())
                }
                CompletenessVerdict::UnknownWithinBound(b) => {
                    println!("verdict: unknown_within_bound_{b}");
                    Err(Failure::Negative)
                }
            }
        }
        Command::Analyze { input, bound, flags } => {
            let p = load_presentation(&input)?;
            let cfg = AnalyzeConfig {
                completeness_bound: bound,
                search: flags.to_config(&p),
            };
            let report = analyze(p.relators(), &cfg)?;
            print!("{}", report.render());
            let favorable = matches!(report.annihilating, AnnihilatingVerdict::Pass)
                && matches!(report.search, Some(SearchOutcome::Trivialized { .. }));
            if favorable {
                Ok(())
            } else {
                Err(Failure::Negative)
            }
        }
        Command::Repl { input } => {
            if input == "-" {
                return Err(Failure::Input(
                    "repl reads commands from stdin; the presentation must be a file".into(),
                ));
            }
            let p = load_presentation(&input)?;
            repl::run(p)
        }
    }
}

fn run_search(input: &str, flags: &SearchFlags) -> Result<(), Failure> {
    let p = load_presentation(input)?;
    let cfg = flags.to_config(&p);

    let resume = cfg
        .checkpoint_path
        .as_ref()
        .map(|path| path.exists())
        .unwrap_or(false);

    let outcome = match cfg.strategy {
        Strategy::BreadthFirst => {
            let mut searcher = if resume {
                let path = cfg.checkpoint_path.as_ref().unwrap();
                let mut s = BfsSearcher::load_checkpoint(path).map_err(|e| Failure::Input(e.to_string()))?;
                s.set_threads(cfg.threads);
                s.set_checkpoint_policy(cfg.checkpoint_path.clone(), cfg.checkpoint_every);
                s.raise_node_budget(cfg.max_nodes);
                eprintln!(
                    "resumed from checkpoint: {} nodes already expanded",
                    s.stats().nodes_expanded
                );
                s
            } else {
                BfsSearcher::new(&p, &cfg).map_err(|e| Failure::Input(e.to_string()))?
            };
            searcher
                .run_with_progress(flags.progress_every, |stats, frontier| {
                    eprintln!(
                        "progress: expanded={} deduplicated={} frontier={} elapsed={:.3}s",
                        stats.nodes_expanded,
                        stats.nodes_deduplicated,
                        frontier,
                        stats.wall_time.as_secs_f64()
                    );
                })
                .map_err(|e| Failure::Input(e.to_string()))?
        }
        Strategy::IterativeDeepening => {
            let mut searcher = if resume {
                let path = cfg.checkpoint_path.as_ref().unwrap();
                IdSearcher::load_checkpoint(path).map_err(|e| Failure::Input(e.to_string()))?
            } else {
                IdSearcher::new(&p, &cfg).map_err(|e| Failure::Input(e.to_string()))?
            };
            searcher.run().map_err(|e| Failure::Input(e.to_string()))?
        }
    };

    report_stats(outcome.stats());
    match outcome {
        SearchOutcome::Trivialized { certificate, .. } => {
            print!("{}", certificate.format());
            Ok(())
        }
        SearchOutcome::Exhausted { stats } => {
            println!("outcome: exhausted");
            print_failure_stats(&stats);
            Err(Failure::Negative)
        }
        SearchOutcome::BudgetExceeded { stats } => {
            println!("outcome: budget_exceeded");
            print_failure_stats(&stats);
            Err(Failure::Negative)
        }
    }
}

/// Timing and counters on stderr; stdout stays byte-deterministic.
fn report_stats(stats: &SearchStats) {
    eprintln!(
        "search: expanded={} deduplicated={} peak_frontier={} elapsed={:.3}s",
        stats.nodes_expanded,
        stats.nodes_deduplicated,
        stats.peak_frontier,
        stats.wall_time.as_secs_f64()
    );
}

fn print_failure_stats(stats: &SearchStats) {
    println!("nodes_expanded: {}", stats.nodes_expanded);
    println!("nodes_deduplicated: {}", stats.nodes_deduplicated);
    println!("peak_frontier: {}", stats.peak_frontier);
    if let Some(det) = &stats.det_obstruction {
        println!("det_obstruction: {det}");
    }
}
