use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use crate::rules::{Color, GameState, Move, Role, Square, DIRECTIONS};

pub const UCI_LABELS: usize = 2272;
pub const MAP_PLANES: usize = 81;
pub const MAP_SIZE: usize = MAP_PLANES * 64;

/// Knight steps in plane order: 2N1E, 1N2E, 1S2E, 2S1E, 2S1W, 1S2W, 1N2W, 2N1W.
const KNIGHT_STEPS: [(i8, i8); 8] = [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)];

const QUEEN_PLANES: usize = 56;
const KNIGHT_PLANE0: usize = 56;
const PROMOTION_PLANE0: usize = 64;
const DROP_PLANE0: usize = 76;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolicyScheme {
    /// Flat vector of 2272 UCI move labels.
    Uci2272,
    /// 81 planes of 8×8, indexed `plane * 64 + origin`.
    Map5184,
}

impl PolicyScheme {
    pub const fn size(self) -> usize {
        match self {
            PolicyScheme::Uci2272 => UCI_LABELS,
            PolicyScheme::Map5184 => MAP_SIZE,
        }
    }

    pub const fn code(self) -> u8 {
        match self {
            PolicyScheme::Uci2272 => 0,
            PolicyScheme::Map5184 => 1,
        }
    }

    pub const fn from_code(code: u8) -> Option<PolicyScheme> {
        match code {
            0 => Some(PolicyScheme::Uci2272),
            1 => Some(PolicyScheme::Map5184),
            _ => None,
        }
    }
}

impl fmt::Display for PolicyScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyScheme::Uci2272 => "uci-2272",
            PolicyScheme::Map5184 => "map-5184",
        })
    }
}

impl FromStr for PolicyScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<PolicyScheme, String> {
        match s {
            "uci-2272" | "uci" | "2272" => Ok(PolicyScheme::Uci2272),
            "map-5184" | "map" | "5184" => Ok(PolicyScheme::Map5184),
            _ => Err(format!("unknown policy scheme `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("move {0} has no {1} index")]
    Unrepresentable(String, PolicyScheme),
    #[error("index {0} out of range for {1}")]
    OutOfRange(usize, PolicyScheme),
    #[error("index {0} of {1} does not describe a move")]
    VoidSlot(usize, PolicyScheme),
}

struct UciTable {
    labels: Vec<Move>,
    text: Vec<String>,
    index: HashMap<Move, u16>,
}

fn build_uci_table() -> UciTable {
    let mut labels = Vec::with_capacity(UCI_LABELS);
    for from in Square::all() {
        for &(df, dr) in DIRECTIONS.iter() {
            for dist in 1..=7 {
                if let Some(to) = from.offset(df * dist, dr * dist) {
                    labels.push(Move::normal(from, to));
                }
            }
        }
        for &(df, dr) in KNIGHT_STEPS.iter() {
            if let Some(to) = from.offset(df, dr) {
                labels.push(Move::normal(from, to));
            }
        }
    }
    for (from_rank, dr) in [(6u8, 1i8), (1u8, -1i8)] {
        for file in 0..8u8 {
            let from = Square::from_coords(file, from_rank);
            for df in [-1i8, 0, 1] {
                if let Some(to) = from.offset(df, dr) {
                    for p in Role::PROMOTION {
                        labels.push(Move::Normal {
                            from,
                            to,
                            promotion: Some(p),
                        });
                    }
                }
            }
        }
    }
    for role in Role::POCKET {
        for to in Square::all() {
            if role == Role::Pawn && (to.rank() == 0 || to.rank() == 7) {
                continue;
            }
            labels.push(Move::Drop { role, to });
        }
    }
    assert_eq!(labels.len(), UCI_LABELS);
    let text = labels.iter().map(|m| m.to_uci()).collect();
    let index = labels.iter().enumerate().map(|(i, &m)| (m, i as u16)).collect();
    UciTable { labels, text, index }
}

fn uci_table() -> &'static UciTable {
    static TABLE: OnceLock<UciTable> = OnceLock::new();
    TABLE.get_or_init(build_uci_table)
}

/// The 2272 UCI labels in index order, from the mover's perspective.
pub fn uci_labels() -> &'static [String] {
    &uci_table().text
}

/// Writes the label table, one UCI string per line.
pub fn write_label_table<W: Write>(mut out: W) -> io::Result<()> {
    for label in uci_labels() {
        writeln!(out, "{label}")?;
    }
    Ok(())
}

fn to_mover_frame(mv: Move, turn: Color) -> Move {
    match turn {
        Color::White => mv,
        Color::Black => mv.flip_rank(),
    }
}

fn map_index(mv: Move) -> Option<usize> {
    match mv {
        Move::Drop { role, to } => {
            if role == Role::King {
                return None;
            }
            Some((DROP_PLANE0 + role.index()) * 64 + to.index())
        }
        Move::Normal { from, to, promotion } => {
            let df = to.file() as i8 - from.file() as i8;
            let dr = to.rank() as i8 - from.rank() as i8;
            let plane = if let Some(p) = promotion {
                if from.rank() != 6 || dr != 1 || df.abs() > 1 {
                    return None;
                }
                let piece = p.index() - Role::Knight.index();
                PROMOTION_PLANE0 + piece * 3 + (df + 1) as usize
            } else if let Some(k) = KNIGHT_STEPS.iter().position(|&s| s == (df, dr)) {
                KNIGHT_PLANE0 + k
            } else {
                let dist = df.abs().max(dr.abs());
                if dist == 0 || (df != 0 && dr != 0 && df.abs() != dr.abs()) {
                    return None;
                }
                let dir = DIRECTIONS.iter().position(|&d| d == (df.signum(), dr.signum()))?;
                dir * 7 + dist as usize - 1
            };
            Some(plane * 64 + from.index())
        }
    }
}

fn map_decode(index: usize) -> Option<Move> {
    let plane = index / 64;
    let slot = Square::new((index % 64) as u8);
    if plane < QUEEN_PLANES {
        let (df, dr) = DIRECTIONS[plane / 7];
        let dist = (plane % 7) as i8 + 1;
        slot.offset(df * dist, dr * dist).map(|to| Move::normal(slot, to))
    } else if plane < PROMOTION_PLANE0 {
        let (df, dr) = KNIGHT_STEPS[plane - KNIGHT_PLANE0];
        slot.offset(df, dr).map(|to| Move::normal(slot, to))
    } else if plane < DROP_PLANE0 {
        let k = plane - PROMOTION_PLANE0;
        let piece = Role::PROMOTION[k / 3];
        let df = (k % 3) as i8 - 1;
        if slot.rank() != 6 {
            return None;
        }
        slot.offset(df, 1).map(|to| Move::Normal {
            from: slot,
            to,
            promotion: Some(piece),
        })
    } else {
        let role = Role::POCKET[plane - DROP_PLANE0];
        if role == Role::Pawn && (slot.rank() == 0 || slot.rank() == 7) {
            return None;
        }
        Some(Move::Drop { role, to: slot })
    }
}

/// Policy index of `mv` for the side to move in `state`. Moves are mirrored
/// into the mover's frame first, so the mover always plays "up" the board.
pub fn policy_index(mv: Move, state: &GameState, scheme: PolicyScheme) -> Result<usize, EncodingError> {
    policy_index_for(mv, state.turn(), scheme)
}

/// Same as [`policy_index`] but only needs the side to move.
pub fn policy_index_for(mv: Move, turn: Color, scheme: PolicyScheme) -> Result<usize, EncodingError> {
    let m = to_mover_frame(mv, turn);
    let found = match scheme {
        PolicyScheme::Uci2272 => uci_table().index.get(&m).map(|&i| i as usize),
        PolicyScheme::Map5184 => map_index(m),
    };
    found.ok_or_else(|| EncodingError::Unrepresentable(mv.to_uci(), scheme))
}

/// Inverse of [`policy_index`]; the move is returned in the true board frame.
pub fn decode_index(index: usize, state: &GameState, scheme: PolicyScheme) -> Result<Move, EncodingError> {
    if index >= scheme.size() {
        return Err(EncodingError::OutOfRange(index, scheme));
    }
    let m = match scheme {
        PolicyScheme::Uci2272 => {
            let m = uci_table().labels[index];
            // Promotions toward the mover's own back rank never occur post-mirror.
            match m {
                Move::Normal {
                    from,
                    promotion: Some(_),
                    ..
                } if from.rank() == 1 => None,
                _ => Some(m),
            }
        }
        PolicyScheme::Map5184 => map_decode(index),
    }
    .ok_or(EncodingError::VoidSlot(index, scheme))?;
    Ok(to_mover_frame(m, state.turn()))
}

/// True exactly at the indices of the legal moves.
pub fn legal_policy_mask(state: &GameState, scheme: PolicyScheme) -> Vec<bool> {
    let mut mask = vec![false; scheme.size()];
    for mv in state.legal_moves() {
        let i = policy_index(mv, state, scheme).expect("legal moves are representable");
        mask[i] = true;
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_sizes() {
        assert_eq!(uci_labels().len(), 2272);
        let distinct: std::collections::HashSet<_> = uci_labels().iter().collect();
        assert_eq!(distinct.len(), 2272);
        assert_eq!(PolicyScheme::Map5184.size(), 5184);
    }

    #[test]
    fn queen_promotion_is_its_own_label() {
        let s = GameState::from_fen("8/4P3/8/8/8/8/8/k3K3[] w - - 0 1").unwrap();
        let q = policy_index("e7e8q".parse().unwrap(), &s, PolicyScheme::Uci2272).unwrap();
        let plain = policy_index("e7e8".parse().unwrap(), &s, PolicyScheme::Uci2272).unwrap();
        assert_ne!(q, plain);
        assert_eq!(uci_labels()[q], "e7e8q");
        assert_eq!(uci_labels()[plain], "e7e8");
    }

    #[test]
    fn black_moves_are_mirrored() {
        let s = GameState::startpos().apply_move("e2e4".parse().unwrap()).unwrap();
        let i = policy_index("e7e5".parse().unwrap(), &s, PolicyScheme::Uci2272).unwrap();
        assert_eq!(uci_labels()[i], "e2e4");
        assert_eq!(
            decode_index(i, &s, PolicyScheme::Uci2272).unwrap(),
            "e7e5".parse().unwrap()
        );
    }

    #[test]
    fn map_layout() {
        let s = GameState::startpos();
        // e2e4: north, distance 2 -> plane 1, origin e2 = 12.
        assert_eq!(
            policy_index("e2e4".parse().unwrap(), &s, PolicyScheme::Map5184).unwrap(),
            64 + 12
        );
        // g1f3: knight 2N1W -> plane 63.
        assert_eq!(
            policy_index("g1f3".parse().unwrap(), &s, PolicyScheme::Map5184).unwrap(),
            63 * 64 + 6
        );
        assert_eq!(
            policy_index("Q@d4".parse().unwrap(), &s, PolicyScheme::Map5184).unwrap(),
            80 * 64 + 27
        );
        // h1 going east runs off the board.
        assert!(matches!(
            decode_index(2 * 7 * 64 + 7, &s, PolicyScheme::Map5184),
            Err(EncodingError::VoidSlot(..))
        ));
        assert!(decode_index(5184, &s, PolicyScheme::Map5184).is_err());
    }

    #[test]
    fn castling_is_king_two_squares() {
        let s = GameState::from_fen("r3k2r/8/8/8/8/8/8/R3K2R[] w KQkq - 0 1").unwrap();
        let i = policy_index("e1g1".parse().unwrap(), &s, PolicyScheme::Uci2272).unwrap();
        assert_eq!(uci_labels()[i], "e1g1");
    }

    #[test]
    fn masks_count_legal_moves() {
        let s = GameState::startpos();
        for scheme in [PolicyScheme::Uci2272, PolicyScheme::Map5184] {
            assert_eq!(legal_policy_mask(&s, scheme).iter().filter(|&&b| b).count(), 20);
        }
    }
}
