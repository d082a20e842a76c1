//! Crazyhouse game mechanics: positions, legal moves including drops,
//! terminal detection, FEN and SAN.

mod attacks;
mod fen;
mod moves;
mod position;
mod san;
mod types;
mod zobrist;

pub use attacks::{
    between, bishop_attacks, king_attacks, knight_attacks, pawn_attacks, queen_attacks, rook_attacks, DIRECTIONS,
};
pub use moves::Move;
pub use position::{
    Board, CastleSide, CastlingRights, GameState, GameValue, Outcome, Pockets, Termination, STARTING_FEN,
};
pub use types::{Bitboard, Color, Piece, Role, Square};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RulesError {
    #[error("invalid FEN at `{token}`: {reason}")]
    Fen { token: String, reason: String },
    #[error("invalid UCI move `{0}`")]
    BadUci(String),
    #[error("illegal move {mv} in {fen}")]
    IllegalMove { mv: String, fen: String },
    #[error("cannot read SAN `{san}`: {reason}")]
    San { san: String, reason: String },
}
