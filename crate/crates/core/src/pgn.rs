//! PGN reading and writing for crazyhouse games.

use std::fmt::Write as _;

use thiserror::Error;

use crate::rules::{GameState, Move, RulesError, STARTING_FEN};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PgnError {
    #[error("game {game}: {reason}")]
    Syntax { game: usize, reason: String },
    #[error("game {game}: bad FEN tag: {source}")]
    Fen {
        game: usize,
        #[source]
        source: RulesError,
    },
    #[error("game {game}, ply {ply}: cannot play {san}: {source}")]
    Move {
        game: usize,
        ply: usize,
        san: String,
        #[source]
        source: RulesError,
    },
}

/// One game as written: tags, SAN tokens with their trailing comments,
/// and the result token.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PgnGame {
    /// Position of the game in its source, counting from 0.
    pub index: usize,
    pub headers: Vec<(String, String)>,
    pub moves: Vec<String>,
    pub comments: Vec<Option<String>>,
    pub result: Option<String>,
}

impl PgnGame {
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }

    pub fn start_state(&self) -> Result<GameState, PgnError> {
        match self.header("FEN") {
            Some(fen) => GameState::from_fen(fen).map_err(|source| PgnError::Fen {
                game: self.index,
                source,
            }),
            None => Ok(GameState::startpos()),
        }
    }

    /// Plays every move; returns the positions before each move (with
    /// the move played there) and the final position.
    pub fn replay(&self) -> Result<(Vec<(GameState, Move)>, GameState), PgnError> {
        let mut state = self.start_state()?;
        let mut plies = Vec::with_capacity(self.moves.len());
        for (ply, san) in self.moves.iter().enumerate() {
            let mv = state.parse_san(san).map_err(|source| PgnError::Move {
                game: self.index,
                ply,
                san: san.clone(),
                source,
            })?;
            let next = state.apply_move(mv).map_err(|source| PgnError::Move {
                game: self.index,
                ply,
                san: san.clone(),
                source,
            })?;
            plies.push((state, mv));
            state = next;
        }
        Ok((plies, state))
    }
}

fn is_result(tok: &str) -> bool {
    matches!(tok, "1-0" | "0-1" | "1/2-1/2" | "*")
}

/// Strips a leading move number (`12.`, `12...`) from a token.
fn strip_move_number(tok: &str) -> &str {
    let digits = tok.bytes().take_while(u8::is_ascii_digit).count();
    if digits > 0 && tok[digits..].starts_with('.') {
        tok[digits..].trim_start_matches('.')
    } else {
        tok
    }
}

struct Builder {
    games: Vec<Result<PgnGame, PgnError>>,
    current: PgnGame,
    broken: Option<String>,
    started: bool,
}

impl Builder {
    fn finish(&mut self) {
        if !self.started {
            return;
        }
        let index = self.games.len();
        let mut game = std::mem::take(&mut self.current);
        game.index = index;
        let entry = match self.broken.take() {
            Some(reason) => Err(PgnError::Syntax { game: index, reason }),
            None => Ok(game),
        };
        self.games.push(entry);
        self.started = false;
    }
}

/// Splits `text` into games. A game with a syntax problem yields an error
/// entry; the following games are still read.
pub fn parse_pgn(text: &str) -> Vec<Result<PgnGame, PgnError>> {
    let mut b = Builder {
        games: Vec::new(),
        current: PgnGame::default(),
        broken: None,
        started: false,
    };
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut in_movetext = false;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '[' => {
                if in_movetext {
                    b.finish();
                    in_movetext = false;
                }
                b.started = true;
                let end = tag_end(&chars, i);
                match end {
                    Some(e) if chars[e] == ']' => {
                        let inner: String = chars[i + 1..e].iter().collect();
                        match parse_tag(&inner) {
                            Some(tag) => b.current.headers.push(tag),
                            None => {
                                b.broken.get_or_insert(format!("malformed tag [{inner}]"));
                            }
                        }
                        i = e + 1;
                    }
                    _ => {
                        b.broken.get_or_insert("unterminated tag".into());
                        i = end.map_or(chars.len(), |e| e + 1);
                    }
                }
            }
            '{' => {
                b.started = true;
                in_movetext = true;
                match chars[i..].iter().position(|&ch| ch == '}') {
                    Some(p) => {
                        let text: String = chars[i + 1..i + p].iter().collect();
                        let text = text.split_whitespace().collect::<Vec<_>>().join(" ");
                        if let Some(last) = b.current.comments.last_mut() {
                            *last = Some(match last.take() {
                                Some(prev) => format!("{prev} {text}"),
                                None => text,
                            });
                        }
                        i += p + 1;
                    }
                    None => {
                        b.broken.get_or_insert("unterminated comment".into());
                        i = chars.len();
                    }
                }
            }
            ';' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => {
                in_movetext = true;
                let mut depth = 0;
                while i < chars.len() {
                    match chars[i] {
                        '(' => depth += 1,
                        ')' => depth -= 1,
                        '{' => {
                            while i < chars.len() && chars[i] != '}' {
                                i += 1;
                            }
                        }
                        _ => {}
                    }
                    i += 1;
                    if depth == 0 {
                        break;
                    }
                }
                if depth != 0 {
                    b.broken.get_or_insert("unterminated variation".into());
                }
            }
            _ => {
                let start = i;
                while i < chars.len() && !chars[i].is_whitespace() && !matches!(chars[i], '{' | '(' | ';' | '[') {
                    i += 1;
                }
                let tok: String = chars[start..i].iter().collect();
                b.started = true;
                in_movetext = true;
                if is_result(&tok) {
                    b.current.result = Some(tok);
                    b.finish();
                    in_movetext = false;
                    continue;
                }
                let san = strip_move_number(&tok);
                if san.is_empty() || san.starts_with('$') {
                    continue;
                }
                b.current.moves.push(san.to_string());
                b.current.comments.push(None);
            }
        }
    }
    b.finish();
    b.games
}

/// Index of the `]` closing the tag opened at `open`, skipping quoted
/// text (FEN values contain brackets). Stops at a line break.
fn tag_end(chars: &[char], open: usize) -> Option<usize> {
    let mut quoted = false;
    let mut i = open + 1;
    while i < chars.len() {
        match chars[i] {
            '\\' if quoted => i += 1,
            '"' => quoted = !quoted,
            ']' if !quoted => return Some(i),
            '\n' => return Some(i),
            _ => {}
        }
        i += 1;
    }
    None
}

fn parse_tag(inner: &str) -> Option<(String, String)> {
    let inner = inner.trim();
    let space = inner.find(char::is_whitespace)?;
    let name = inner[..space].to_string();
    let rest = inner[space..].trim();
    let value = rest.strip_prefix('"')?.strip_suffix('"')?;
    Some((name, value.replace("\\\"", "\"").replace("\\\\", "\\")))
}

/// A game to be written: tags in order, the start position and each move
/// with an optional comment.
#[derive(Clone, Debug, PartialEq)]
pub struct PgnRecord {
    pub headers: Vec<(String, String)>,
    pub start: GameState,
    pub moves: Vec<(Move, Option<String>)>,
    pub result: String,
}

const ROSTER: [&str; 7] = ["Event", "Site", "Date", "Round", "White", "Black", "Result"];

impl PgnRecord {
    /// PGN text with the seven roster tags first, then the rest in the
    /// given order. Adds FEN/SetUp tags for a non-standard start.
    pub fn to_pgn(&self) -> String {
        let mut headers: Vec<(String, String)> = Vec::new();
        for tag in ROSTER {
            let value = if tag == "Result" {
                self.result.clone()
            } else {
                self.headers
                    .iter()
                    .find(|(k, _)| k == tag)
                    .map_or_else(|| "?".to_string(), |(_, v)| v.clone())
            };
            headers.push((tag.to_string(), value));
        }
        for (k, v) in &self.headers {
            if !ROSTER.contains(&k.as_str()) && k != "FEN" && k != "SetUp" {
                headers.push((k.clone(), v.clone()));
            }
        }
        let fen = self.start.to_fen();
        if fen != STARTING_FEN {
            headers.push(("SetUp".into(), "1".into()));
            headers.push(("FEN".into(), fen));
        }

        let mut out = String::new();
        for (k, v) in &headers {
            let v = v.replace('\\', "\\\\").replace('"', "\\\"");
            let _ = writeln!(out, "[{k} \"{v}\"]");
        }
        out.push('\n');

        let mut tokens = Vec::new();
        let mut state = self.start.clone();
        for (i, (mv, comment)) in self.moves.iter().enumerate() {
            let white = state.turn() == crate::rules::Color::White;
            if white {
                tokens.push(format!("{}.", state.fullmove_number()));
            } else if i == 0 {
                tokens.push(format!("{}...", state.fullmove_number()));
            }
            tokens.push(state.to_san(*mv));
            if let Some(c) = comment {
                tokens.push(format!("{{{c}}}"));
            }
            state = state.play_unchecked(*mv);
        }
        tokens.push(self.result.clone());

        let mut line = String::new();
        for tok in tokens {
            if !line.is_empty() && line.len() + 1 + tok.len() > 79 {
                out.push_str(&line);
                out.push('\n');
                line.clear();
            }
            if !line.is_empty() {
                line.push(' ');
            }
            line.push_str(&tok);
        }
        out.push_str(&line);
        out.push_str("\n\n");
        out
    }
}
