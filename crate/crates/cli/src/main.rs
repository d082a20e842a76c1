use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use zhengine::arena::{parse_openings, play_match, random_openings, MatchSpec, Player};
use zhengine::encoding::{write_label_table, PolicyScheme};
use zhengine::evaluator::{EvaluatorKind, EvaluatorSpec};
use zhengine::pipeline::{
    ingest_files, one_cycle_schedule, schedule_text, write_samples, IngestFilter, DEFAULT_WARMUP,
};
use zhengine::rules::{GameState, STARTING_FEN};
use zhengine::search::{SearchConfig, SearchLimits};
use zhengine::uci;

#[derive(Parser)]
#[command(name = "zhengine", version, about = "Crazyhouse MCTS engine")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Speak UCI on stdin/stdout (the default).
    Uci,
    /// Count leaf nodes of the legal move tree.
    Perft {
        #[arg(long, default_value = STARTING_FEN)]
        fen: String,
        #[arg(long, default_value_t = 3)]
        depth: u32,
        /// Print the count below each root move.
        #[arg(long)]
        divide: bool,
    },
    /// Play two search settings against each other.
    Match {
        #[arg(long, default_value_t = 800)]
        a_nodes: u64,
        #[arg(long, default_value_t = 800)]
        b_nodes: u64,
        /// Use plain visit-count selection for A.
        #[arg(long)]
        a_visits_only: bool,
        #[arg(long)]
        b_visits_only: bool,
        /// Opening suite: PGN or one FEN per line.
        #[arg(long)]
        openings: Option<PathBuf>,
        /// Number of random 4-ply openings when no suite is given.
        #[arg(long, default_value_t = 10)]
        random: usize,
        #[arg(long, default_value_t = 1)]
        pairs: usize,
        #[arg(long, default_value_t = 600)]
        max_plies: usize,
        /// uniform, material or a table file.
        #[arg(long, default_value = "material")]
        evaluator: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        pgn: Option<PathBuf>,
        #[arg(long)]
        tsv: Option<PathBuf>,
    },
    /// Turn PGN games into a sample file.
    Ingest {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "uci-2272")]
        scheme: PolicyScheme,
        #[arg(long, default_value_t = 2000)]
        min_elo: u32,
    },
    /// Print a one-cycle learning-rate and momentum schedule.
    Schedule {
        #[arg(long)]
        total: usize,
        #[arg(long, default_value_t = DEFAULT_WARMUP)]
        warmup: f64,
    },
    /// Print the 2272 move labels, one per line.
    Labels,
}

fn evaluator_kind(name: &str) -> EvaluatorKind {
    match name {
        "uniform" => EvaluatorKind::Uniform,
        "material" => EvaluatorKind::Material,
        path => EvaluatorKind::Table(PathBuf::from(path)),
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command.unwrap_or(Command::Uci) {
        Command::Uci => {
            let stdin = io::stdin();
            uci::run_session(stdin.lock(), io::stdout())?;
        }
        Command::Perft { fen, depth, divide } => {
            let state = GameState::from_fen(&fen)?;
            if divide {
                let mut total = 0;
                for mv in state.legal_moves() {
                    let n = if depth == 0 {
                        1
                    } else {
                        state.play_unchecked(mv).perft(depth - 1)
                    };
                    println!("{mv}: {n}");
                    total += n;
                }
                println!("total {total}");
            } else {
                println!("{}", state.perft(depth));
            }
        }
        Command::Match {
            a_nodes,
            b_nodes,
            a_visits_only,
            b_visits_only,
            openings,
            random,
            pairs,
            max_plies,
            evaluator,
            seed,
            pgn,
            tsv,
        } => {
            let evaluator = EvaluatorSpec::new(evaluator_kind(&evaluator)).build()?;
            let openings = match openings {
                Some(path) => {
                    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    parse_openings(&text)?
                }
                None => random_openings(random, 4, seed),
            };
            if openings.is_empty() {
                bail!("no openings");
            }
            let player = |visits_only: bool, nodes: u64, tag: &str| {
                let base = if visits_only {
                    SearchConfig::visits_only()
                } else {
                    SearchConfig::default()
                };
                Player {
                    name: format!("{tag}-{}{nodes}", if visits_only { "visits-" } else { "" }),
                    config: SearchConfig { seed, ..base },
                    limits: SearchLimits::nodes(nodes),
                }
            };
            let mut spec = MatchSpec::new(
                player(a_visits_only, a_nodes, "A"),
                player(b_visits_only, b_nodes, "B"),
                Arc::clone(&evaluator),
                openings,
            );
            spec.pairs_per_opening = pairs;
            spec.max_plies = max_plies;
            spec.time_control = format!("{a_nodes}/{b_nodes} nodes");
            let result = play_match(&spec)?;
            print!("{}", result.summary());
            if let Some(path) = pgn {
                fs::write(&path, result.pgn()).with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(path) = tsv {
                fs::write(&path, result.to_tsv()).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Ingest {
            files,
            out,
            scheme,
            min_elo,
        } => {
            let filter = IngestFilter {
                min_elo,
                ..IngestFilter::default()
            };
            let paths: Vec<&std::path::Path> = files.iter().map(PathBuf::as_path).collect();
            let (samples, stats) = ingest_files(&paths, &filter, scheme)?;
            write_samples(&out, scheme, &samples).with_context(|| format!("writing {}", out.display()))?;
            print!("{}", stats.report());
        }
        Command::Schedule { total, warmup } => {
            if total == 0 || !(warmup > 0.0 && warmup < 1.0) {
                bail!("need total > 0 and 0 < warmup < 1");
            }
            print!("{}", schedule_text(&one_cycle_schedule(total, warmup)));
        }
        Command::Labels => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            write_label_table(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}
