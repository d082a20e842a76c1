use std::fmt::{Debug, Display};
use std::hash::Hash;

use crate::encoding::{policy_index_for, PolicyScheme};
use crate::rules::{GameState, Move};

/// What the tree search needs from a game. Implemented for [`GameState`];
/// tests implement it for small synthetic trees.
pub trait SearchState: Clone + Send + Sync + 'static {
    type Move: Copy + Eq + Hash + Send + Sync + Debug + Display + 'static;

    fn legal_moves(&self) -> Vec<Self::Move>;

    fn play(&self, mv: Self::Move) -> Self;

    /// Static value for the side to move if the game is over here.
    fn terminal_value(&self) -> Option<f32>;

    fn gives_check(&self, mv: Self::Move) -> bool;

    /// Total order used to break ties; lower wins.
    fn move_order(&self, mv: Self::Move) -> u32;

    /// Key under which evaluations may be shared between transpositions.
    fn transposition_key(&self) -> Option<TranspositionKey>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TranspositionKey {
    pub position: u64,
    pub fullmove: u32,
    pub halfmove: u32,
}

impl SearchState for GameState {
    type Move = Move;

    fn legal_moves(&self) -> Vec<Move> {
        GameState::legal_moves(self)
    }

    fn play(&self, mv: Move) -> GameState {
        self.play_unchecked(mv)
    }

    fn terminal_value(&self) -> Option<f32> {
        self.outcome().map(|o| o.value.score())
    }

    fn gives_check(&self, mv: Move) -> bool {
        GameState::gives_check(self, mv)
    }

    fn move_order(&self, mv: Move) -> u32 {
        policy_index_for(mv, self.turn(), PolicyScheme::Uci2272).map_or(u32::MAX, |i| i as u32)
    }

    fn transposition_key(&self) -> Option<TranspositionKey> {
        Some(TranspositionKey {
            position: self.position_key(),
            fullmove: self.fullmove_number(),
            halfmove: self.halfmove_clock(),
        })
    }
}
