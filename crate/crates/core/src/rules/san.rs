use super::moves::Move;
use super::position::GameState;
use super::types::{Role, Square};
use super::RulesError;

fn san_err(san: &str, reason: impl Into<String>) -> RulesError {
    RulesError::San {
        san: san.to_string(),
        reason: reason.into(),
    }
}

fn role_letter(c: char) -> Option<Role> {
    match c {
        'N' => Some(Role::Knight),
        'B' => Some(Role::Bishop),
        'R' => Some(Role::Rook),
        'Q' => Some(Role::Queen),
        'K' => Some(Role::King),
        'P' => Some(Role::Pawn),
        _ => None,
    }
}

impl GameState {
    /// Resolves standard algebraic notation against the legal moves,
    /// including drops (`N@e6`, `P@h6`, `@h6`) and castling (`O-O`, `0-0-0`).
    pub fn parse_san(&self, san: &str) -> Result<Move, RulesError> {
        let text = san.trim_end_matches(['+', '#', '!', '?']);
        if text.is_empty() {
            return Err(san_err(san, "empty move"));
        }
        let legal = self.legal_moves();

        if matches!(text, "O-O" | "0-0" | "O-O-O" | "0-0-0") {
            let king = self.board.king_of(self.turn).ok_or_else(|| san_err(san, "no king"))?;
            let file = if text.len() == 3 { 6 } else { 2 };
            let target = Move::normal(king, Square::from_coords(file, king.rank()));
            let is_castle = king.file() == 4 && legal.contains(&target);
            return if is_castle {
                Ok(target)
            } else {
                Err(san_err(san, "castling not legal"))
            };
        }

        if let Some((piece, sq)) = text.split_once('@') {
            let role = match piece {
                "" => Role::Pawn,
                p if p.len() == 1 => role_letter(p.chars().next().unwrap())
                    .filter(|&r| r != Role::King)
                    .ok_or_else(|| san_err(san, "bad drop piece"))?,
                _ => return Err(san_err(san, "bad drop piece")),
            };
            let to: Square = sq.parse().map_err(|_| san_err(san, "bad drop square"))?;
            let mv = Move::Drop { role, to };
            return if legal.contains(&mv) {
                Ok(mv)
            } else {
                Err(san_err(san, "drop not legal"))
            };
        }

        let mut body = text;
        let mut promotion = None;
        if let Some((head, promo)) = body.split_once('=') {
            let mut cs = promo.chars();
            promotion = match (cs.next().and_then(role_letter), cs.next()) {
                (Some(r), None) if Role::PROMOTION.contains(&r) => Some(r),
                _ => return Err(san_err(san, "bad promotion piece")),
            };
            body = head;
        } else if body.len() >= 3 {
            let last = body.chars().last().unwrap();
            let before = body.as_bytes()[body.len() - 2];
            if let Some(r) = role_letter(last) {
                if before.is_ascii_digit() && Role::PROMOTION.contains(&r) {
                    promotion = Some(r);
                    body = &body[..body.len() - 1];
                }
            }
        }
        if body.len() < 2 || !body.is_ascii() {
            return Err(san_err(san, "too short"));
        }
        let to: Square = body[body.len() - 2..]
            .parse()
            .map_err(|_| san_err(san, "bad target square"))?;
        let mut prefix = &body[..body.len() - 2];
        let mut role = Role::Pawn;
        if let Some(r) = prefix.chars().next().and_then(role_letter) {
            role = r;
            prefix = &prefix[1..];
        }
        let mut from_file = None;
        let mut from_rank = None;
        for c in prefix.chars() {
            match c {
                'a'..='h' => from_file = Some(c as u8 - b'a'),
                '1'..='8' => from_rank = Some(c as u8 - b'1'),
                'x' | ':' | '-' => {}
                _ => return Err(san_err(san, format!("unexpected `{c}`"))),
            }
        }

        let mut found = None;
        for &mv in &legal {
            let Move::Normal {
                from,
                to: t,
                promotion: p,
            } = mv
            else {
                continue;
            };
            if t != to || p != promotion {
                continue;
            }
            if self.board.role_at(from) != Some(role) {
                continue;
            }
            if from_file.is_some_and(|f| f != from.file()) || from_rank.is_some_and(|r| r != from.rank()) {
                continue;
            }
            if found.is_some() {
                return Err(san_err(san, "ambiguous"));
            }
            found = Some(mv);
        }
        found.ok_or_else(|| san_err(san, "no matching legal move"))
    }

    /// Standard algebraic notation for a legal move, with `+`/`#` suffix.
    pub fn to_san(&self, mv: Move) -> String {
        let mut out = String::new();
        match mv {
            Move::Drop { role, to } => {
                out.push(role.upper_char());
                out.push('@');
                out.push_str(&to.to_string());
            }
            Move::Normal { from, to, promotion } => {
                let role = self.board.role_at(from).unwrap_or(Role::Pawn);
                let capture = self.board.occupied().contains(to) || (role == Role::Pawn && from.file() != to.file());
                if role == Role::King && (from.file() as i8 - to.file() as i8).abs() == 2 {
                    out.push_str(if to.file() > from.file() { "O-O" } else { "O-O-O" });
                } else if role == Role::Pawn {
                    if capture {
                        out.push(from.file_char());
                        out.push('x');
                    }
                    out.push_str(&to.to_string());
                    if let Some(p) = promotion {
                        out.push('=');
                        out.push(p.upper_char());
                    }
                } else {
                    out.push(role.upper_char());
                    let rivals: Vec<Square> = self
                        .legal_moves()
                        .into_iter()
                        .filter_map(|m| match m {
                            Move::Normal { from: f, to: t, .. }
                                if t == to && f != from && self.board.role_at(f) == Some(role) =>
                            {
                                Some(f)
                            }
                            _ => None,
                        })
                        .collect();
                    if !rivals.is_empty() {
                        if rivals.iter().all(|s| s.file() != from.file()) {
                            out.push(from.file_char());
                        } else if rivals.iter().all(|s| s.rank() != from.rank()) {
                            out.push(from.rank_char());
                        } else {
                            out.push(from.file_char());
                            out.push(from.rank_char());
                        }
                    }
                    if capture {
                        out.push('x');
                    }
                    out.push_str(&to.to_string());
                }
            }
        }
        if self.gives_check(mv) {
            let next = self.play_unchecked(mv);
            out.push(if next.has_legal_move() { '+' } else { '#' });
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn san_round_trip_from_start() {
        let s = GameState::startpos();
        for mv in s.legal_moves() {
            assert_eq!(s.parse_san(&s.to_san(mv)).unwrap(), mv);
        }
    }

    #[test]
    fn drops_and_checks() {
        let s = GameState::from_fen("3k2r1/pBpr1p1p/Pp3p1B/3p4/2PPn2B/5NPp/q4PpP/1R1QR1K1[NNbp] w - - 1 23").unwrap();
        let mv = s.parse_san("N@e6+").unwrap();
        assert_eq!(mv, "N@e6".parse().unwrap());
        assert_eq!(s.to_san(mv), "N@e6+");
    }

    #[test]
    fn disambiguation() {
        let s = GameState::from_fen("4k3/8/8/8/8/8/4K3/R6R[] w - - 0 1").unwrap();
        let mv = s.parse_san("Rad1").unwrap();
        assert_eq!(mv, "a1d1".parse().unwrap());
        assert_eq!(s.to_san(mv), "Rad1");
        assert!(s.parse_san("Rd1").is_err());
    }

    #[test]
    fn promotion_forms() {
        let s = GameState::from_fen("7k/4P3/8/8/8/8/8/K7[] w - - 0 1").unwrap();
        assert_eq!(s.parse_san("e8=Q+").unwrap(), "e7e8q".parse().unwrap());
        assert_eq!(s.parse_san("e8N").unwrap(), "e7e8n".parse().unwrap());
        assert_eq!(s.to_san("e7e8q".parse().unwrap()), "e8=Q+");
    }
}
