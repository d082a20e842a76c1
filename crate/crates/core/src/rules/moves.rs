use std::fmt;
use std::str::FromStr;

use super::types::{Role, Square};
use super::RulesError;

/// A crazyhouse move. Castling is a king move by two files, en passant a
/// diagonal pawn move onto the en-passant square.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    Normal {
        from: Square,
        to: Square,
        promotion: Option<Role>,
    },
    Drop {
        role: Role,
        to: Square,
    },
}

impl Move {
    pub const fn normal(from: Square, to: Square) -> Move {
        Move::Normal {
            from,
            to,
            promotion: None,
        }
    }

    pub const fn to(self) -> Square {
        match self {
            Move::Normal { to, .. } | Move::Drop { to, .. } => to,
        }
    }

    pub const fn from(self) -> Option<Square> {
        match self {
            Move::Normal { from, .. } => Some(from),
            Move::Drop { .. } => None,
        }
    }

    pub const fn promotion(self) -> Option<Role> {
        match self {
            Move::Normal { promotion, .. } => promotion,
            Move::Drop { .. } => None,
        }
    }

    pub const fn is_drop(self) -> bool {
        matches!(self, Move::Drop { .. })
    }

    /// The same move seen from the other side of the board (ranks mirrored).
    pub fn flip_rank(self) -> Move {
        match self {
            Move::Normal { from, to, promotion } => Move::Normal {
                from: from.flip_rank(),
                to: to.flip_rank(),
                promotion,
            },
            Move::Drop { role, to } => Move::Drop {
                role,
                to: to.flip_rank(),
            },
        }
    }

    /// UCI text: `e2e4`, `e7e8q`, `N@e6`.
    pub fn to_uci(self) -> String {
        self.to_string()
    }

    pub fn from_uci(text: &str) -> Result<Move, RulesError> {
        text.parse()
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Move::Normal { from, to, promotion } => {
                write!(f, "{from}{to}")?;
                if let Some(p) = promotion {
                    write!(f, "{}", p.char())?;
                }
                Ok(())
            }
            Move::Drop { role, to } => write!(f, "{}@{}", role.upper_char(), to),
        }
    }
}

impl fmt::Debug for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Move {
    type Err = RulesError;

    fn from_str(s: &str) -> Result<Move, RulesError> {
        let bad = || RulesError::BadUci(s.to_string());
        if let Some((piece, sq)) = s.split_once('@') {
            let mut chars = piece.chars();
            let role = match (chars.next(), chars.next()) {
                (Some(c), None) => Role::from_char(c).ok_or_else(bad)?,
                // Some front-ends omit the pawn letter: `@e4`.
                (None, None) => Role::Pawn,
                _ => return Err(bad()),
            };
            if role == Role::King {
                return Err(bad());
            }
            let to: Square = sq.parse().map_err(|_| bad())?;
            return Ok(Move::Drop { role, to });
        }
        if !s.is_ascii() || !(4..=5).contains(&s.len()) {
            return Err(bad());
        }
        let from: Square = s[0..2].parse().map_err(|_| bad())?;
        let to: Square = s[2..4].parse().map_err(|_| bad())?;
        let promotion = match s[4..].chars().next() {
            None => None,
            Some(c) => match Role::from_char(c) {
                Some(r) if Role::PROMOTION.contains(&r) => Some(r),
                _ => return Err(bad()),
            },
        };
        Ok(Move::Normal { from, to, promotion })
    }
}
