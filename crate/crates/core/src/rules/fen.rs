use std::fmt::Write as _;

use super::position::{Board, CastleSide, CastlingRights, GameState, Pockets};
use super::types::{Color, Piece, Role, Square};
use super::RulesError;

fn err(token: &str, reason: impl Into<String>) -> RulesError {
    RulesError::Fen {
        token: token.to_string(),
        reason: reason.into(),
    }
}

fn parse_placement(text: &str) -> Result<Board, RulesError> {
    let ranks: Vec<&str> = text.split('/').collect();
    if ranks.len() != 8 {
        return Err(err(text, format!("expected 8 ranks, found {}", ranks.len())));
    }
    let mut board = Board::empty();
    for (i, rank_text) in ranks.iter().enumerate() {
        let rank = 7 - i as u8;
        let mut file = 0u8;
        let mut chars = rank_text.chars().peekable();
        while let Some(c) = chars.next() {
            if let Some(d) = c.to_digit(10) {
                if d == 0 || d > 8 {
                    return Err(err(rank_text, format!("bad empty-square count `{c}`")));
                }
                file += d as u8;
            } else if let Some(piece) = Piece::from_char(c) {
                if file >= 8 {
                    return Err(err(rank_text, "rank has more than 8 files"));
                }
                let promoted = chars.peek() == Some(&'~');
                if promoted {
                    chars.next();
                }
                board.set(Square::from_coords(file, rank), piece, promoted);
                file += 1;
            } else {
                return Err(err(rank_text, format!("unexpected character `{c}`")));
            }
            if file > 8 {
                return Err(err(rank_text, "rank has more than 8 files"));
            }
        }
        if file != 8 {
            return Err(err(rank_text, "rank does not cover 8 files"));
        }
    }
    Ok(board)
}

fn parse_pockets(text: &str) -> Result<Pockets, RulesError> {
    let mut pockets = Pockets::default();
    if text == "-" {
        return Ok(pockets);
    }
    for c in text.chars() {
        match Piece::from_char(c) {
            Some(p) if p.role != Role::King => pockets.add(p.color, p.role),
            _ => return Err(err(&c.to_string(), "pocket pieces must be one of pnbrqPNBRQ")),
        }
    }
    Ok(pockets)
}

/// Splits the first FEN field into placement and pocket text. Accepts
/// `placement[pocket]` and `placement/pocket`.
fn split_board_field(field: &str) -> Result<(&str, &str), RulesError> {
    if let Some(open) = field.find('[') {
        let rest = &field[open + 1..];
        let close = rest
            .find(']')
            .ok_or_else(|| err(field, "unterminated pocket bracket"))?;
        if close + 1 != rest.len() {
            return Err(err(field, "text after pocket bracket"));
        }
        return Ok((&field[..open], &rest[..close]));
    }
    match field.match_indices('/').nth(7) {
        Some((i, _)) => Ok((&field[..i], &field[i + 1..])),
        None => Ok((field, "")),
    }
}

impl GameState {
    /// Parses crazyhouse FEN in bracket (`...[Nb]`) or trailing-slash
    /// (`.../Nb`) pocket form. `~` after a piece marks it as promoted.
    /// The move counters may be omitted and default to `0 1`.
    pub fn from_fen(text: &str) -> Result<GameState, RulesError> {
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() < 4 {
            return Err(err(text, "need at least board, side, castling and en-passant fields"));
        }
        if fields.len() > 6 {
            return Err(err(fields[6], "unexpected trailing field"));
        }
        let (placement, pocket_text) = split_board_field(fields[0])?;
        let board = parse_placement(placement)?;
        let pockets = parse_pockets(pocket_text)?;

        let turn = match fields[1] {
            "w" => Color::White,
            "b" => Color::Black,
            other => return Err(err(other, "side to move must be `w` or `b`")),
        };

        let mut castling = CastlingRights::NONE;
        if fields[2] != "-" {
            for c in fields[2].chars() {
                let (color, side) = match c {
                    'K' => (Color::White, CastleSide::King),
                    'Q' => (Color::White, CastleSide::Queen),
                    'k' => (Color::Black, CastleSide::King),
                    'q' => (Color::Black, CastleSide::Queen),
                    _ => return Err(err(fields[2], format!("bad castling flag `{c}`"))),
                };
                castling.set(color, side, true);
            }
        }
        // Rights without king and rook on their home squares are meaningless.
        for color in Color::ALL {
            let rank = color.back_rank();
            let king_home = board.pieces(color, Role::King).contains(Square::from_coords(4, rank));
            for (side, file) in [(CastleSide::King, 7), (CastleSide::Queen, 0)] {
                let rook_home = board
                    .pieces(color, Role::Rook)
                    .contains(Square::from_coords(file, rank));
                if !(king_home && rook_home) {
                    castling.set(color, side, false);
                }
            }
        }

        let ep_square = match fields[3] {
            "-" => None,
            s => {
                let sq: Square = s.parse().map_err(|_| err(s, "bad en-passant square"))?;
                if sq.rank() != 2 && sq.rank() != 5 {
                    return Err(err(s, "en-passant square must be on rank 3 or 6"));
                }
                Some(sq)
            }
        };

        let halfmove = match fields.get(4) {
            Some(s) => s.parse::<u32>().map_err(|_| err(s, "bad halfmove clock"))?,
            None => 0,
        };
        let fullmove = match fields.get(5) {
            Some(s) => {
                let n = s.parse::<u32>().map_err(|_| err(s, "bad fullmove number"))?;
                if n == 0 {
                    return Err(err(s, "fullmove number starts at 1"));
                }
                n
            }
            None => 1,
        };

        GameState::from_parts(board, pockets, turn, castling, ep_square, halfmove, fullmove).map_err(|e| match e {
            RulesError::Fen { reason, .. } => err(fields[0], reason),
            other => other,
        })
    }

    /// Canonical bracket-pocket FEN. Repetition history is not represented.
    pub fn to_fen(&self) -> String {
        let mut out = String::with_capacity(96);
        for rank in (0..8u8).rev() {
            let mut empty = 0;
            for file in 0..8u8 {
                let sq = Square::from_coords(file, rank);
                match self.board.piece_at(sq) {
                    Some(p) => {
                        if empty > 0 {
                            write!(out, "{empty}").unwrap();
                            empty = 0;
                        }
                        out.push(p.char());
                        if self.board.is_promoted(sq) {
                            out.push('~');
                        }
                    }
                    None => empty += 1,
                }
            }
            if empty > 0 {
                write!(out, "{empty}").unwrap();
            }
            if rank > 0 {
                out.push('/');
            }
        }
        out.push('[');
        for color in Color::ALL {
            for role in Role::POCKET.iter().rev() {
                let piece = Piece { color, role: *role };
                for _ in 0..self.pockets.get(color, *role) {
                    out.push(piece.char());
                }
            }
        }
        out.push_str("] ");
        out.push(if self.turn == Color::White { 'w' } else { 'b' });
        out.push(' ');
        let mut any = false;
        for (color, side, c) in [
            (Color::White, CastleSide::King, 'K'),
            (Color::White, CastleSide::Queen, 'Q'),
            (Color::Black, CastleSide::King, 'k'),
            (Color::Black, CastleSide::Queen, 'q'),
        ] {
            if self.castling.has(color, side) {
                out.push(c);
                any = true;
            }
        }
        if !any {
            out.push('-');
        }
        match self.ep_square {
            Some(sq) => write!(out, " {sq}").unwrap(),
            None => out.push_str(" -"),
        }
        write!(out, " {} {}", self.halfmove_clock, self.fullmove_number).unwrap();
        out
    }
}
