//! Engine-vs-engine matches between two search configurations, with PGN
//! records and Elo estimates.

use std::fmt::Write as _;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::evaluator::Evaluator;
use crate::pgn::{parse_pgn, PgnRecord};
use crate::rules::{Color, GameState, GameValue, Move, Termination};
use crate::search::{Score, SearchConfig, SearchLimits, SearchResult, Searcher};

#[derive(Debug, Error)]
pub enum ArenaError {
    #[error("opening {index}: {reason}")]
    Opening { index: usize, reason: String },
    #[error("search failed in game {game}: {reason}")]
    Search { game: usize, reason: String },
    #[error("invalid match: {0}")]
    Spec(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Opening {
    pub name: String,
    /// Position the opening moves start from.
    pub root: GameState,
    pub moves: Vec<Move>,
}

impl Opening {
    pub fn start(&self) -> GameState {
        self.moves.iter().fold(self.root.clone(), |s, &m| s.play_unchecked(m))
    }
}

/// Reads an opening suite: PGN (one game per opening) when the text has
/// tags or move numbers, otherwise one FEN per non-empty line.
pub fn parse_openings(text: &str) -> Result<Vec<Opening>, ArenaError> {
    let looks_pgn = text.lines().any(|l| {
        let l = l.trim_start();
        l.starts_with('[') || l.starts_with("1.")
    });
    if looks_pgn {
        parse_pgn(text)
            .into_iter()
            .enumerate()
            .map(|(index, g)| {
                let g = g.map_err(|e| ArenaError::Opening {
                    index,
                    reason: e.to_string(),
                })?;
                let (plies, _) = g.replay().map_err(|e| ArenaError::Opening {
                    index,
                    reason: e.to_string(),
                })?;
                let root = g.start_state().map_err(|e| ArenaError::Opening {
                    index,
                    reason: e.to_string(),
                })?;
                Ok(Opening {
                    name: g.header("Event").unwrap_or("?").to_string(),
                    root,
                    moves: plies.into_iter().map(|p| p.1).collect(),
                })
            })
            .collect()
    } else {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .enumerate()
            .map(|(index, fen)| {
                let root = GameState::from_fen(fen).map_err(|e| ArenaError::Opening {
                    index,
                    reason: e.to_string(),
                })?;
                Ok(Opening {
                    name: format!("fen {}", index + 1),
                    root,
                    moves: Vec::new(),
                })
            })
            .collect()
    }
}

/// `count` distinct openings of `plies` random legal moves from the start
/// position, none of which ends the game.
pub fn random_openings(count: usize, plies: usize, seed: u64) -> Vec<Opening> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Opening> = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < count * 100 {
        attempts += 1;
        let mut state = GameState::startpos();
        let mut moves = Vec::with_capacity(plies);
        for _ in 0..plies {
            let legal = state.legal_moves();
            let Some(&mv) = legal.choose(&mut rng) else { break };
            state = state.play_unchecked(mv);
            moves.push(mv);
        }
        if moves.len() == plies && state.outcome().is_none() && out.iter().all(|o| o.moves != moves) {
            out.push(Opening {
                name: format!("random {}", out.len() + 1),
                root: GameState::startpos(),
                moves,
            });
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Player {
    pub name: String,
    pub config: SearchConfig,
    pub limits: SearchLimits,
}

#[derive(Clone)]
pub struct MatchSpec {
    pub a: Player,
    pub b: Player,
    pub evaluator: Arc<dyn Evaluator<GameState>>,
    /// Overrides `evaluator` for player B.
    pub evaluator_b: Option<Arc<dyn Evaluator<GameState>>>,
    pub openings: Vec<Opening>,
    /// Game pairs per opening; each pair swaps colours.
    pub pairs_per_opening: usize,
    /// Games still running after this many plies are scored as draws.
    pub max_plies: usize,
    pub parallel: bool,
    pub event: String,
    pub time_control: String,
}

impl MatchSpec {
    pub fn new(a: Player, b: Player, evaluator: Arc<dyn Evaluator<GameState>>, openings: Vec<Opening>) -> MatchSpec {
        MatchSpec {
            a,
            b,
            evaluator,
            evaluator_b: None,
            openings,
            pairs_per_opening: 1,
            max_plies: 600,
            parallel: true,
            event: "zhengine match".into(),
            time_control: "-".into(),
        }
    }

    pub fn total_games(&self) -> usize {
        2 * self.pairs_per_opening * self.openings.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GameEnd {
    Finished(Termination),
    /// Stopped at the ply limit and scored as a draw.
    PlyLimit,
}

#[derive(Clone, Debug)]
pub struct GameRecord {
    pub opening: usize,
    pub a_is_white: bool,
    /// Result from A's point of view.
    pub a_score: GameValue,
    pub plies: usize,
    pub end: GameEnd,
    pub pgn: PgnRecord,
}

#[derive(Clone, Debug)]
pub struct MatchResult {
    pub a_name: String,
    pub b_name: String,
    pub wins: u32,
    pub losses: u32,
    pub draws: u32,
    pub games: Vec<GameRecord>,
}

/// Elo difference for a score of `wins + draws/2` out of all games.
/// Returns ±infinity for a perfect or zero score and NaN without games.
pub fn elo_diff(wins: u32, losses: u32, draws: u32) -> f64 {
    let n = (wins + losses + draws) as f64;
    if n == 0.0 {
        return f64::NAN;
    }
    let s = (wins as f64 + draws as f64 / 2.0) / n;
    if s <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if s >= 1.0 {
        return f64::INFINITY;
    }
    -400.0 * (1.0 / s - 1.0).log10()
}

/// Half-width of a 95% interval: 1.96 · dElo/ds · SE(s), with the
/// per-game variance of the win/draw/loss outcomes. Infinite when the
/// score is 0 or 1.
pub fn elo_margin(wins: u32, losses: u32, draws: u32) -> f64 {
    let n = (wins + losses + draws) as f64;
    if n == 0.0 {
        return f64::NAN;
    }
    let (w, l, d) = (wins as f64 / n, losses as f64 / n, draws as f64 / n);
    let s = w + d / 2.0;
    if s <= 0.0 || s >= 1.0 {
        return f64::INFINITY;
    }
    let var = w * (1.0 - s).powi(2) + d * (0.5 - s).powi(2) + l * s.powi(2);
    let se = (var / n).sqrt();
    let slope = 400.0 / (std::f64::consts::LN_10 * s * (1.0 - s));
    1.96 * slope * se
}

impl MatchResult {
    pub fn total(&self) -> u32 {
        self.wins + self.losses + self.draws
    }

    /// Share of points scored by A.
    pub fn score(&self) -> f64 {
        (self.wins as f64 + self.draws as f64 / 2.0) / self.total().max(1) as f64
    }

    pub fn elo(&self) -> f64 {
        elo_diff(self.wins, self.losses, self.draws)
    }

    pub fn margin(&self) -> f64 {
        elo_margin(self.wins, self.losses, self.draws)
    }

    fn average_plies(&self, want: GameValue) -> Option<f64> {
        let plies: Vec<usize> = self
            .games
            .iter()
            .filter(|g| g.a_score == want)
            .map(|g| g.plies)
            .collect();
        (!plies.is_empty()).then(|| plies.iter().sum::<usize>() as f64 / plies.len() as f64)
    }

    /// Average game length in plies of A's wins.
    pub fn win_average_plies(&self) -> Option<f64> {
        self.average_plies(GameValue::Win)
    }

    pub fn loss_average_plies(&self) -> Option<f64> {
        self.average_plies(GameValue::Loss)
    }

    pub fn summary(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.1}"));
        let mut s = String::new();
        let _ = writeln!(s, "{} vs {}", self.a_name, self.b_name);
        let _ = writeln!(
            s,
            "games {}  +{} -{} ={}",
            self.total(),
            self.wins,
            self.losses,
            self.draws
        );
        let _ = writeln!(s, "score {:.1}%", 100.0 * self.score());
        let _ = writeln!(s, "elo {:.2} +/- {:.2}", self.elo(), self.margin());
        let _ = writeln!(
            s,
            "win avg plies {}  loss avg plies {}",
            opt(self.win_average_plies()),
            opt(self.loss_average_plies())
        );
        s
    }

    /// Tab-separated per-game table with a header row.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("game\topening\twhite\tblack\tresult\tplies\tend\n");
        for (i, g) in self.games.iter().enumerate() {
            let (white, black) = if g.a_is_white {
                (&self.a_name, &self.b_name)
            } else {
                (&self.b_name, &self.a_name)
            };
            let end = match g.end {
                GameEnd::Finished(t) => format!("{t:?}").to_lowercase(),
                GameEnd::PlyLimit => "ply-limit".into(),
            };
            let _ = writeln!(
                s,
                "{}\t{}\t{white}\t{black}\t{}\t{}\t{end}",
                i + 1,
                g.opening + 1,
                g.pgn.result,
                g.plies
            );
        }
        s
    }

    pub fn pgn(&self) -> String {
        self.games.iter().map(|g| g.pgn.to_pgn()).collect()
    }
}

/// Move annotation in the style `+1.40/45 59s` (score from the mover).
pub fn move_comment(r: &SearchResult<Move>) -> String {
    let score = match r.score {
        Score::Mate(n) if n > 0 => format!("+M{n}"),
        Score::Mate(n) => format!("-M{}", -n),
        Score::Cp(0) => "0.00".to_string(),
        Score::Cp(cp) => format!("{:+.2}", cp as f64 / 100.0),
    };
    let secs = r.elapsed.as_secs_f64();
    let time = if secs >= 10.0 {
        format!("{secs:.0}")
    } else if secs >= 1.0 {
        format!("{secs:.1}")
    } else {
        format!("{secs:.3}")
    };
    format!("{score}/{} {time}s", r.depth)
}

fn result_token(outcome: Option<(GameValue, Color)>) -> &'static str {
    match outcome {
        Some((GameValue::Win, Color::White)) | Some((GameValue::Loss, Color::Black)) => "1-0",
        Some((GameValue::Win, Color::Black)) | Some((GameValue::Loss, Color::White)) => "0-1",
        _ => "1/2-1/2",
    }
}

struct Side {
    name: String,
    searcher: Searcher<GameState>,
    limits: SearchLimits,
    config: SearchConfig,
}

fn play_game(spec: &MatchSpec, game: usize, opening: usize, a_is_white: bool) -> Result<GameRecord, ArenaError> {
    let build = |p: &Player, eval: &Arc<dyn Evaluator<GameState>>| -> Result<Side, ArenaError> {
        let mut config = p.config.clone();
        // Distinct noise streams per game keep repeated openings apart.
        config.seed = config.seed.wrapping_add(game as u64);
        Ok(Side {
            name: p.name.clone(),
            searcher: Searcher::new(config.clone(), eval.clone()).map_err(|e| ArenaError::Spec(e.to_string()))?,
            limits: p.limits.clone(),
            config,
        })
    };
    let a = build(&spec.a, &spec.evaluator)?;
    let b = build(&spec.b, spec.evaluator_b.as_ref().unwrap_or(&spec.evaluator))?;
    let (mut white, mut black) = if a_is_white { (a, b) } else { (b, a) };

    let op = &spec.openings[opening];
    let start = op.start();
    let mut state = start.clone();
    let mut moves: Vec<(Move, Option<String>)> = Vec::new();
    let stop = AtomicBool::new(false);
    let clock = Instant::now();
    let end;
    loop {
        if let Some(outcome) = state.outcome() {
            end = (GameEnd::Finished(outcome.reason), Some((outcome.value, state.turn())));
            break;
        }
        if moves.len() >= spec.max_plies {
            end = (GameEnd::PlyLimit, None);
            break;
        }
        let side = if state.turn() == Color::White {
            &mut white
        } else {
            &mut black
        };
        side.searcher
            .set_temperature(side.config.temperature_at(state.fullmove_number()));
        let r = side
            .searcher
            .search(&state, &side.limits, &stop, None)
            .map_err(|e| ArenaError::Search {
                game,
                reason: e.to_string(),
            })?;
        state = state.play_unchecked(r.best_move);
        moves.push((r.best_move, Some(move_comment(&r))));
    }
    let (end, outcome) = end;
    let result = result_token(outcome);
    if let (GameEnd::Finished(Termination::Checkmate), Some((_, loser))) = (end, outcome) {
        if let Some((_, Some(c))) = moves.last_mut() {
            let mates = if loser == Color::White {
                "Black mates"
            } else {
                "White mates"
            };
            c.push_str(&format!(", {mates}"));
        }
    }
    let a_score = match (result, a_is_white) {
        ("1-0", true) | ("0-1", false) => GameValue::Win,
        ("1-0", false) | ("0-1", true) => GameValue::Loss,
        _ => GameValue::Draw,
    };
    let headers = vec![
        ("Event".to_string(), spec.event.clone()),
        ("Site".to_string(), "local".to_string()),
        ("Date".to_string(), "????.??.??".to_string()),
        ("Round".to_string(), (game + 1).to_string()),
        ("White".to_string(), white.name.clone()),
        ("Black".to_string(), black.name.clone()),
        ("PlyCount".to_string(), moves.len().to_string()),
        ("TimeControl".to_string(), spec.time_control.clone()),
        ("Variant".to_string(), "crazyhouse".to_string()),
        ("Opening".to_string(), op.name.clone()),
        (
            "GameDuration".to_string(),
            format!("{:.1}s", clock.elapsed().as_secs_f64()),
        ),
    ];
    // Opening moves are part of the record, marked like book moves.
    let mut all_moves: Vec<(Move, Option<String>)> = op.moves.iter().map(|&m| (m, Some("book".to_string()))).collect();
    let plies = moves.len();
    all_moves.extend(moves);
    Ok(GameRecord {
        opening,
        a_is_white,
        a_score,
        plies: op.moves.len() + plies,
        end,
        pgn: PgnRecord {
            headers,
            start: op.root.clone(),
            moves: all_moves,
            result: result.to_string(),
        },
    })
}

/// Plays every opening `pairs_per_opening` times with each colour
/// assignment. Games are independent and may run in parallel.
pub fn play_match(spec: &MatchSpec) -> Result<MatchResult, ArenaError> {
    if spec.openings.is_empty() || spec.pairs_per_opening == 0 {
        return Err(ArenaError::Spec("no games to play".into()));
    }
    for (index, op) in spec.openings.iter().enumerate() {
        if op.start().outcome().is_some() {
            return Err(ArenaError::Opening {
                index,
                reason: "position is already decided".into(),
            });
        }
    }
    let jobs: Vec<(usize, usize, bool)> = (0..spec.openings.len())
        .flat_map(|o| (0..spec.pairs_per_opening).flat_map(move |_| [(o, true), (o, false)]))
        .enumerate()
        .map(|(g, (o, w))| (g, o, w))
        .collect();
    let games: Vec<GameRecord> = if spec.parallel {
        jobs.par_iter()
            .map(|&(g, o, w)| play_game(spec, g, o, w))
            .collect::<Result<_, _>>()?
    } else {
        jobs.iter()
            .map(|&(g, o, w)| play_game(spec, g, o, w))
            .collect::<Result<_, _>>()?
    };
    let count = |v: GameValue| games.iter().filter(|g| g.a_score == v).count() as u32;
    Ok(MatchResult {
        a_name: spec.a.name.clone(),
        b_name: spec.b.name.clone(),
        wins: count(GameValue::Win),
        losses: count(GameValue::Loss),
        draws: count(GameValue::Draw),
        games,
    })
}
