//! Shared positions and game records.

use zhengine::pgn::parse_pgn;
use zhengine::rules::{GameState, Move};

pub const REFERENCE_PGN: &str = include_str!("../data/reference_games.pgn");

/// Middle-game position with a full set of pockets.
pub const DROP_FEN: &str = "3k2r1/pBpr1p1p/Pp3p1B/3p4/2PPn2B/5NPp/q4PpP/1R1QR1K1[NNbp] w - - 1 23";

/// Hand-made positions with at least one mating move.
pub const DESK_MATES: [&str; 15] = [
    "k7/8/1K6/8/8/8/8/8[Q] w - - 0 1",
    "6rk/6pp/8/8/8/8/8/6K1[N] w - - 0 1",
    "1k6/8/8/8/8/8/6PP/6RK[n] b - - 0 1",
    "4k3/8/4K3/8/8/8/8/8[R] w - - 0 1",
    "8/8/8/8/8/4k3/8/4K3[r] b - - 0 1",
    "6k1/8/6K1/8/8/8/8/Q7[] w - - 0 1",
    "r1bqkbnr/pppp1ppp/2n5/4p3/2B1P3/5Q2/PPPP1PPP/RNB1K1NR[] w KQkq - 4 4",
    "rnbqkbnr/pppp1ppp/8/4p3/6P1/5P2/PPPPP2P/RNBQKBNR[] b KQkq - 0 2",
    "k7/3P4/1K6/8/8/8/8/8[] w - - 0 1",
    "6rk/6pp/8/8/8/8/8/6K1[Np] w - - 0 1",
    "7k/8/6K1/8/8/8/8/8[Q] w - - 0 1",
    "8/8/8/8/8/6k1/8/7K[q] b - - 0 1",
    "7k/7P/6K1/8/8/8/8/8[B] w - - 0 1",
    "1r4k1/8/8/8/8/8/5PPP/6K1[] b - - 0 1",
    "6rk/6pp/7N/8/8/8/8/6K1[] w - - 0 1",
];

pub fn mating_moves(state: &GameState) -> Vec<Move> {
    state
        .legal_moves()
        .into_iter()
        .filter(|&m| state.play_unchecked(m).is_checkmate())
        .collect()
}

/// The position before each reference game's final, mating move.
pub fn reference_final_positions() -> Vec<GameState> {
    parse_pgn(REFERENCE_PGN)
        .into_iter()
        .map(|g| {
            let (plies, _) = g.unwrap().replay().unwrap();
            plies.last().unwrap().0.clone()
        })
        .collect()
}

/// Twenty mate-in-one positions: the reference-game finishes plus the desk set.
pub fn mate_in_one_suite() -> Vec<GameState> {
    let mut out = reference_final_positions();
    out.extend(DESK_MATES.iter().map(|f| GameState::from_fen(f).unwrap()));
    out
}
