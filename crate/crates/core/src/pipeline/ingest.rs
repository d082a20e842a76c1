use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;

use rayon::prelude::*;

use crate::encoding::{encode_planes, policy_index, PolicyScheme};
use crate::pgn::{parse_pgn, PgnError, PgnGame};
use crate::rules::Color;

use super::samples::TrainingSample;

/// Which games become training data.
#[derive(Clone, Debug, PartialEq)]
pub struct IngestFilter {
    /// Both players need a numeric Elo tag at least this high; 0 disables
    /// the check (and accepts games without Elo tags).
    pub min_elo: u32,
    /// Accepted `Termination` tag values, compared case-insensitively.
    /// Games without the tag are accepted when they have a decisive or
    /// drawn result.
    pub allowed_terminations: Vec<String>,
    pub exclude_aborted: bool,
}

impl Default for IngestFilter {
    fn default() -> IngestFilter {
        IngestFilter {
            min_elo: 2000,
            // "Normal" covers checkmate, resignation and agreed or rule draws.
            allowed_terminations: vec!["normal".into(), "time forfeit".into()],
            exclude_aborted: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SkipReason {
    Malformed,
    NotCrazyhouse,
    LowElo,
    Aborted,
    Termination,
    NoResult,
    IllegalMove,
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SkipReason::Malformed => "malformed",
            SkipReason::NotCrazyhouse => "not-crazyhouse",
            SkipReason::LowElo => "low-elo",
            SkipReason::Aborted => "aborted",
            SkipReason::Termination => "termination",
            SkipReason::NoResult => "no-result",
            SkipReason::IllegalMove => "illegal-move",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IngestStats {
    pub games_seen: u64,
    pub games_kept: u64,
    pub skipped: BTreeMap<SkipReason, u64>,
    pub samples: u64,
    /// Player ratings of kept games in buckets of 100 (both players).
    pub elo_histogram: BTreeMap<u32, u64>,
    /// `TimeControl` tag of kept games.
    pub time_controls: BTreeMap<String, u64>,
}

impl IngestStats {
    fn merge(&mut self, other: IngestStats) {
        self.games_seen += other.games_seen;
        self.games_kept += other.games_kept;
        self.samples += other.samples;
        for (k, v) in other.skipped {
            *self.skipped.entry(k).or_default() += v;
        }
        for (k, v) in other.elo_histogram {
            *self.elo_histogram.entry(k).or_default() += v;
        }
        for (k, v) in other.time_controls {
            *self.time_controls.entry(k).or_default() += v;
        }
    }

    fn skip(reason: SkipReason) -> IngestStats {
        let mut s = IngestStats {
            games_seen: 1,
            ..IngestStats::default()
        };
        s.skipped.insert(reason, 1);
        s
    }

    pub fn report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "games seen {}", self.games_seen);
        let _ = writeln!(s, "games kept {}", self.games_kept);
        for (k, v) in &self.skipped {
            let _ = writeln!(s, "skipped {k} {v}");
        }
        let _ = writeln!(s, "samples {}", self.samples);
        for (k, v) in &self.elo_histogram {
            let _ = writeln!(s, "elo {k}-{} {v}", k + 99);
        }
        for (k, v) in &self.time_controls {
            let _ = writeln!(s, "time-control {k} {v}");
        }
        s
    }
}

/// Result from White's point of view, if the game has one.
fn white_result(result: &str) -> Option<i8> {
    match result {
        "1-0" => Some(1),
        "0-1" => Some(-1),
        "1/2-1/2" => Some(0),
        _ => None,
    }
}

fn elo(game: &PgnGame, tag: &str) -> Option<u32> {
    game.header(tag)?.trim().parse().ok()
}

/// Checks `game` against `filter`; on success returns the White result.
pub fn screen(game: &PgnGame, filter: &IngestFilter) -> Result<i8, SkipReason> {
    match game.header("Variant") {
        Some(v) if v.eq_ignore_ascii_case("crazyhouse") => {}
        _ => return Err(SkipReason::NotCrazyhouse),
    }
    let termination = game.header("Termination").map(|t| t.to_ascii_lowercase());
    if filter.exclude_aborted && termination.as_deref() == Some("abandoned") {
        return Err(SkipReason::Aborted);
    }
    let result = game
        .result
        .as_deref()
        .or(game.header("Result"))
        .and_then(white_result)
        .ok_or(SkipReason::NoResult)?;
    if let Some(t) = &termination {
        if !filter.allowed_terminations.iter().any(|a| a.eq_ignore_ascii_case(t)) {
            return Err(SkipReason::Termination);
        }
    }
    if filter.min_elo > 0 {
        match (elo(game, "WhiteElo"), elo(game, "BlackElo")) {
            (Some(w), Some(b)) if w >= filter.min_elo && b >= filter.min_elo => {}
            _ => return Err(SkipReason::LowElo),
        }
    }
    Ok(result)
}

/// Samples of one game (one per position before a move), or why it was
/// dropped.
pub fn game_samples(
    game: &PgnGame,
    filter: &IngestFilter,
    scheme: PolicyScheme,
) -> Result<Vec<TrainingSample>, SkipReason> {
    let white = screen(game, filter)?;
    let (plies, _) = game.replay().map_err(|e| match e {
        PgnError::Move { .. } => SkipReason::IllegalMove,
        _ => SkipReason::Malformed,
    })?;
    plies
        .iter()
        .map(|(state, mv)| {
            let policy = policy_index(*mv, state, scheme).map_err(|_| SkipReason::IllegalMove)?;
            let value = if state.turn() == Color::White { white } else { -white };
            Ok(TrainingSample {
                planes: encode_planes(state),
                policy: policy as u16,
                value,
            })
        })
        .collect()
}

/// Converts parsed games into samples in source order, in parallel.
pub fn ingest_games(
    games: Vec<Result<PgnGame, PgnError>>,
    filter: &IngestFilter,
    scheme: PolicyScheme,
) -> (Vec<TrainingSample>, IngestStats) {
    let per_game: Vec<(Vec<TrainingSample>, IngestStats)> = games
        .into_par_iter()
        .map(|g| {
            let g = match g {
                Ok(g) => g,
                Err(_) => return (Vec::new(), IngestStats::skip(SkipReason::Malformed)),
            };
            match game_samples(&g, filter, scheme) {
                Ok(samples) => {
                    let mut st = IngestStats {
                        games_seen: 1,
                        games_kept: 1,
                        samples: samples.len() as u64,
                        ..IngestStats::default()
                    };
                    for tag in ["WhiteElo", "BlackElo"] {
                        if let Some(e) = elo(&g, tag) {
                            *st.elo_histogram.entry(e / 100 * 100).or_default() += 1;
                        }
                    }
                    let tc = g.header("TimeControl").unwrap_or("-").to_string();
                    st.time_controls.insert(tc, 1);
                    (samples, st)
                }
                Err(reason) => (Vec::new(), IngestStats::skip(reason)),
            }
        })
        .collect();
    let mut samples = Vec::new();
    let mut stats = IngestStats::default();
    for (s, st) in per_game {
        samples.extend(s);
        stats.merge(st);
    }
    (samples, stats)
}

pub fn ingest_text(text: &str, filter: &IngestFilter, scheme: PolicyScheme) -> (Vec<TrainingSample>, IngestStats) {
    ingest_games(parse_pgn(text), filter, scheme)
}

pub fn ingest_files(
    paths: &[&Path],
    filter: &IngestFilter,
    scheme: PolicyScheme,
) -> std::io::Result<(Vec<TrainingSample>, IngestStats)> {
    let mut samples = Vec::new();
    let mut stats = IngestStats::default();
    for p in paths {
        let text = std::fs::read_to_string(p)?;
        let (s, st) = ingest_text(&text, filter, scheme);
        samples.extend(s);
        stats.merge(st);
    }
    Ok((samples, stats))
}
