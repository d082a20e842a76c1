use super::attacks::{
    between, bishop_attacks, king_attacks, knight_attacks, pawn_attacks, queen_attacks, rook_attacks,
};
use super::moves::Move;
use super::types::{Bitboard, Color, Piece, Role, Square};
use super::zobrist::{KEYS, POCKET_SLOTS};
use super::RulesError;

/// Piece placement plus the promoted-piece mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Board {
    roles: [Bitboard; 6],
    colors: [Bitboard; 2],
    promoted: Bitboard,
}

impl Board {
    pub fn empty() -> Board {
        Board::default()
    }

    #[inline]
    pub fn occupied(&self) -> Bitboard {
        self.colors[0] | self.colors[1]
    }

    #[inline]
    pub fn by_color(&self, color: Color) -> Bitboard {
        self.colors[color.index()]
    }

    #[inline]
    pub fn by_role(&self, role: Role) -> Bitboard {
        self.roles[role.index()]
    }

    #[inline]
    pub fn pieces(&self, color: Color, role: Role) -> Bitboard {
        self.colors[color.index()] & self.roles[role.index()]
    }

    /// Squares holding promoted pieces (of either color).
    #[inline]
    pub fn promoted(&self) -> Bitboard {
        self.promoted
    }

    #[inline]
    pub fn is_promoted(&self, sq: Square) -> bool {
        self.promoted.contains(sq)
    }

    pub fn color_at(&self, sq: Square) -> Option<Color> {
        if self.colors[0].contains(sq) {
            Some(Color::White)
        } else if self.colors[1].contains(sq) {
            Some(Color::Black)
        } else {
            None
        }
    }

    pub fn role_at(&self, sq: Square) -> Option<Role> {
        if !self.occupied().contains(sq) {
            return None;
        }
        Role::ALL.into_iter().find(|r| self.roles[r.index()].contains(sq))
    }

    pub fn piece_at(&self, sq: Square) -> Option<Piece> {
        let color = self.color_at(sq)?;
        let role = self.role_at(sq)?;
        Some(Piece { color, role })
    }

    pub fn set(&mut self, sq: Square, piece: Piece, promoted: bool) {
        self.discard(sq);
        let bb = sq.bb();
        self.roles[piece.role.index()] |= bb;
        self.colors[piece.color.index()] |= bb;
        if promoted {
            self.promoted |= bb;
        }
    }

    /// Removes and returns the piece on `sq` with its promoted flag.
    pub fn remove(&mut self, sq: Square) -> Option<(Piece, bool)> {
        let piece = self.piece_at(sq)?;
        let promoted = self.promoted.contains(sq);
        self.discard(sq);
        Some((piece, promoted))
    }

    fn discard(&mut self, sq: Square) {
        let mask = !sq.bb();
        for r in &mut self.roles {
            *r &= mask;
        }
        for c in &mut self.colors {
            *c &= mask;
        }
        self.promoted &= mask;
    }

    pub fn king_of(&self, color: Color) -> Option<Square> {
        self.pieces(color, Role::King).first()
    }

    /// Pieces of `by` attacking `sq`, given occupancy `occupied`.
    pub fn attackers_to(&self, sq: Square, by: Color, occupied: Bitboard) -> Bitboard {
        let them = self.by_color(by);
        let rooks = self.roles[Role::Rook.index()] | self.roles[Role::Queen.index()];
        let bishops = self.roles[Role::Bishop.index()] | self.roles[Role::Queen.index()];
        ((knight_attacks(sq) & self.roles[Role::Knight.index()])
            | (king_attacks(sq) & self.roles[Role::King.index()])
            | (pawn_attacks(by.other(), sq) & self.roles[Role::Pawn.index()])
            | (rook_attacks(sq, occupied) & rooks)
            | (bishop_attacks(sq, occupied) & bishops))
            & them
            & occupied
    }

    pub fn is_attacked(&self, sq: Square, by: Color) -> bool {
        self.attackers_to(sq, by, self.occupied()).any()
    }

    /// Color-swapped, rank-mirrored copy.
    pub fn mirrored(&self) -> Board {
        let mut out = Board::empty();
        for r in 0..6 {
            out.roles[r] = self.roles[r].flip_vertical();
        }
        out.colors[0] = self.colors[1].flip_vertical();
        out.colors[1] = self.colors[0].flip_vertical();
        out.promoted = self.promoted.flip_vertical();
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Pockets {
    counts: [[u8; 5]; 2],
}

impl Pockets {
    #[inline]
    pub fn get(&self, color: Color, role: Role) -> u8 {
        debug_assert!(role != Role::King);
        self.counts[color.index()][role.index()]
    }

    pub fn set(&mut self, color: Color, role: Role, n: u8) {
        self.counts[color.index()][role.index()] = n;
    }

    pub fn add(&mut self, color: Color, role: Role) {
        self.counts[color.index()][role.index()] += 1;
    }

    pub fn take(&mut self, color: Color, role: Role) {
        let c = &mut self.counts[color.index()][role.index()];
        debug_assert!(*c > 0);
        *c -= 1;
    }

    pub fn total(&self, color: Color) -> u32 {
        self.counts[color.index()].iter().map(|&n| n as u32).sum()
    }

    pub fn swapped(&self) -> Pockets {
        Pockets {
            counts: [self.counts[1], self.counts[0]],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CastleSide {
    King,
    Queen,
}

/// Castling rights as a 4-bit set: white king/queen side, black king/queen side.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct CastlingRights(u8);

impl CastlingRights {
    pub const NONE: CastlingRights = CastlingRights(0);
    pub const ALL: CastlingRights = CastlingRights(15);

    const fn bit(color: Color, side: CastleSide) -> u8 {
        let base = match color {
            Color::White => 0,
            Color::Black => 2,
        };
        match side {
            CastleSide::King => 1 << base,
            CastleSide::Queen => 1 << (base + 1),
        }
    }

    pub fn has(self, color: Color, side: CastleSide) -> bool {
        self.0 & Self::bit(color, side) != 0
    }

    pub fn set(&mut self, color: Color, side: CastleSide, on: bool) {
        if on {
            self.0 |= Self::bit(color, side);
        } else {
            self.0 &= !Self::bit(color, side);
        }
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    fn clear_color(&mut self, color: Color) {
        self.set(color, CastleSide::King, false);
        self.set(color, CastleSide::Queen, false);
    }

    /// Drops the right tied to a rook corner when that square is touched.
    fn clear_square(&mut self, sq: Square) {
        match sq.index() {
            0 => self.set(Color::White, CastleSide::Queen, false),
            7 => self.set(Color::White, CastleSide::King, false),
            56 => self.set(Color::Black, CastleSide::Queen, false),
            63 => self.set(Color::Black, CastleSide::King, false),
            _ => {}
        }
    }

    fn swapped(self) -> CastlingRights {
        CastlingRights((self.0 >> 2) | ((self.0 & 3) << 2))
    }
}

/// Result of a finished game, relative to the side to move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GameValue {
    Loss,
    Draw,
    Win,
}

impl GameValue {
    pub fn score(self) -> f32 {
        match self {
            GameValue::Loss => -1.0,
            GameValue::Draw => 0.0,
            GameValue::Win => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Termination {
    Checkmate,
    Stalemate,
    ThreefoldRepetition,
    FiftyMoves,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Outcome {
    /// From the perspective of the side to move in the terminal position.
    pub value: GameValue,
    pub reason: Termination,
}

impl Outcome {
    /// Winning color, given the side to move of the terminal position.
    pub fn winner(&self, side_to_move: Color) -> Option<Color> {
        match self.value {
            GameValue::Loss => Some(side_to_move.other()),
            GameValue::Win => Some(side_to_move),
            GameValue::Draw => None,
        }
    }
}

/// A full crazyhouse position. Immutable in practice: moves produce new values.
#[derive(Clone, Debug)]
pub struct GameState {
    pub(crate) board: Board,
    pub(crate) pockets: Pockets,
    pub(crate) turn: Color,
    pub(crate) castling: CastlingRights,
    pub(crate) ep_square: Option<Square>,
    pub(crate) halfmove_clock: u32,
    pub(crate) fullmove_number: u32,
    pub(crate) key: u64,
    /// Keys of earlier positions since the last irreversible move.
    pub(crate) history: Vec<u64>,
}

impl PartialEq for GameState {
    fn eq(&self, other: &GameState) -> bool {
        self.board == other.board
            && self.pockets == other.pockets
            && self.turn == other.turn
            && self.castling == other.castling
            && self.ep_square == other.ep_square
            && self.halfmove_clock == other.halfmove_clock
            && self.fullmove_number == other.fullmove_number
    }
}

impl Eq for GameState {}

impl Default for GameState {
    fn default() -> GameState {
        GameState::startpos()
    }
}

pub const STARTING_FEN: &str = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR[] w KQkq - 0 1";

impl GameState {
    pub fn startpos() -> GameState {
        GameState::from_fen(STARTING_FEN).expect("starting FEN is valid")
    }

    /// Assembles a position from parts, checking the structural invariants.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        board: Board,
        pockets: Pockets,
        turn: Color,
        castling: CastlingRights,
        ep_square: Option<Square>,
        halfmove_clock: u32,
        fullmove_number: u32,
    ) -> Result<GameState, RulesError> {
        let invalid = |reason: &str| RulesError::Fen {
            token: String::new(),
            reason: reason.to_string(),
        };
        for color in Color::ALL {
            if board.pieces(color, Role::King).count() != 1 {
                return Err(invalid("each side needs exactly one king"));
            }
        }
        if (board.by_role(Role::Pawn) & Bitboard::BACK_RANKS).any() {
            return Err(invalid("pawn on first or eighth rank"));
        }
        let promotable = board.occupied() & !board.by_role(Role::Pawn) & !board.by_role(Role::King);
        if (board.promoted() & !promotable).any() {
            return Err(invalid("promoted mark on a square without a promotable piece"));
        }
        let mut state = GameState {
            board,
            pockets,
            turn,
            castling,
            ep_square,
            halfmove_clock,
            fullmove_number: fullmove_number.max(1),
            key: 0,
            history: Vec::new(),
        };
        state.key = state.compute_key();
        Ok(state)
    }

    #[inline]
    pub fn board(&self) -> &Board {
        &self.board
    }

    #[inline]
    pub fn pockets(&self) -> &Pockets {
        &self.pockets
    }

    #[inline]
    pub fn turn(&self) -> Color {
        self.turn
    }

    #[inline]
    pub fn castling(&self) -> CastlingRights {
        self.castling
    }

    #[inline]
    pub fn ep_square(&self) -> Option<Square> {
        self.ep_square
    }

    #[inline]
    pub fn halfmove_clock(&self) -> u32 {
        self.halfmove_clock
    }

    #[inline]
    pub fn fullmove_number(&self) -> u32 {
        self.fullmove_number
    }

    /// Zobrist key over board, pockets, promoted mask, castling rights,
    /// side to move and (capturable) en-passant file.
    #[inline]
    pub fn position_key(&self) -> u64 {
        self.key
    }

    pub fn history(&self) -> &[u64] {
        &self.history
    }

    /// How often the current position has occurred since the last irreversible move.
    pub fn repetition_count(&self) -> usize {
        1 + self.history.iter().filter(|&&k| k == self.key).count()
    }

    pub fn compute_key(&self) -> u64 {
        let mut key = 0u64;
        for color in Color::ALL {
            for role in Role::ALL {
                for sq in self.board.pieces(color, role) {
                    key ^= KEYS.pieces[color.index()][role.index()][sq.index()];
                }
            }
            for role in Role::POCKET {
                let n = (self.pockets.get(color, role) as usize).min(POCKET_SLOTS - 1);
                key ^= KEYS.pockets[color.index()][role.index()][n];
            }
        }
        for sq in self.board.promoted() {
            key ^= KEYS.promoted[sq.index()];
        }
        key ^= KEYS.castling[self.castling.bits() as usize];
        if let Some(ep) = self.ep_square {
            let capturers = pawn_attacks(self.turn.other(), ep) & self.board.pieces(self.turn, Role::Pawn);
            if capturers.any() {
                key ^= KEYS.ep_file[ep.file() as usize];
            }
        }
        if self.turn == Color::Black {
            key ^= KEYS.black_to_move;
        }
        key
    }

    #[inline]
    fn our_king(&self) -> Square {
        self.board.king_of(self.turn).expect("king present")
    }

    pub fn checkers(&self) -> Bitboard {
        self.board
            .attackers_to(self.our_king(), self.turn.other(), self.board.occupied())
    }

    pub fn is_check(&self) -> bool {
        self.checkers().any()
    }

    /// Our pieces pinned against our king.
    fn pinned(&self) -> Bitboard {
        let king = self.our_king();
        let them = self.turn.other();
        let occ = self.board.occupied();
        let rq = self.board.pieces(them, Role::Rook) | self.board.pieces(them, Role::Queen);
        let bq = self.board.pieces(them, Role::Bishop) | self.board.pieces(them, Role::Queen);
        let snipers = (rook_attacks(king, Bitboard::EMPTY) & rq) | (bishop_attacks(king, Bitboard::EMPTY) & bq);
        let mut pinned = Bitboard::EMPTY;
        for s in snipers {
            let blockers = between(king, s) & occ;
            if blockers.count() == 1 && (blockers & self.board.by_color(self.turn)).any() {
                pinned |= blockers;
            }
        }
        pinned
    }

    /// Placement after `mv`, without touching pockets or counters.
    pub(crate) fn board_after(&self, mv: Move) -> Board {
        let mut board = self.board;
        let us = self.turn;
        match mv {
            Move::Drop { role, to } => board.set(to, Piece { color: us, role }, false),
            Move::Normal { from, to, promotion } => {
                let (piece, was_promoted) = board.remove(from).expect("piece on from-square");
                if piece.role == Role::Pawn
                    && Some(to) == self.ep_square
                    && from.file() != to.file()
                    && !self.board.occupied().contains(to)
                {
                    board.remove(Square::from_coords(to.file(), from.rank()));
                }
                if piece.role == Role::King && (to.file() as i8 - from.file() as i8).abs() == 2 {
                    let rank = from.rank();
                    let (rf, rt) = if to.file() > from.file() { (7, 5) } else { (0, 3) };
                    if let Some((rook, rp)) = board.remove(Square::from_coords(rf, rank)) {
                        board.set(Square::from_coords(rt, rank), rook, rp);
                    }
                }
                match promotion {
                    Some(p) => board.set(to, Piece { color: us, role: p }, true),
                    None => board.set(to, piece, was_promoted),
                }
            }
        }
        board
    }

    fn king_safe_after(&self, mv: Move) -> bool {
        let board = self.board_after(mv);
        let king = board.king_of(self.turn).expect("king present");
        !board.attackers_to(king, self.turn.other(), board.occupied()).any()
    }

    /// All legal moves. Empty iff the side to move is checkmated or stalemated.
    pub fn legal_moves(&self) -> Vec<Move> {
        let mut moves = Vec::with_capacity(96);
        self.generate(&mut moves, false);
        moves
    }

    /// Cheaper than `!legal_moves().is_empty()`: stops at the first legal move.
    pub fn has_legal_move(&self) -> bool {
        let mut moves = Vec::new();
        self.generate(&mut moves, true)
    }

    /// Generates legal moves into `out`. With `stop_early`, returns as soon
    /// as one legal move is found. Returns whether any move was produced.
    fn generate(&self, out: &mut Vec<Move>, stop_early: bool) -> bool {
        let us = self.turn;
        let them = us.other();
        let board = &self.board;
        let occ = board.occupied();
        let ours = board.by_color(us);
        let king = self.our_king();
        let checkers = board.attackers_to(king, them, occ);

        macro_rules! emit {
            ($m:expr) => {{
                out.push($m);
                if stop_early {
                    return true;
                }
            }};
        }

        let occ_without_king = occ ^ king.bb();
        for to in king_attacks(king) & !ours {
            if !board.attackers_to(to, them, occ_without_king).any() {
                emit!(Move::normal(king, to));
            }
        }
        if checkers.more_than_one() {
            return !out.is_empty();
        }

        // Drops come before the slower board-move loop so that `stop_early`
        // resolves quickly in the common case.
        if self.pockets.total(us) > 0 {
            let targets = match checkers.first() {
                None => !occ,
                Some(c) => between(king, c),
            };
            if targets.any() {
                for role in Role::POCKET {
                    if self.pockets.get(us, role) == 0 {
                        continue;
                    }
                    let t = if role == Role::Pawn {
                        targets & !Bitboard::BACK_RANKS
                    } else {
                        targets
                    };
                    for to in t {
                        emit!(Move::Drop { role, to });
                    }
                }
            }
        }

        let in_check = checkers.any();
        let pinned = self.pinned();
        let evasion_targets = match checkers.first() {
            None => Bitboard::ALL,
            Some(c) => between(king, c) | c.bb(),
        };

        let needs_test = |from: Square| in_check || pinned.contains(from);

        for role in [Role::Knight, Role::Bishop, Role::Rook, Role::Queen] {
            for from in board.pieces(us, role) {
                let attacks = match role {
                    Role::Knight => knight_attacks(from),
                    Role::Bishop => bishop_attacks(from, occ),
                    Role::Rook => rook_attacks(from, occ),
                    _ => queen_attacks(from, occ),
                };
                for to in attacks & !ours & evasion_targets {
                    let m = Move::normal(from, to);
                    if !needs_test(from) || self.king_safe_after(m) {
                        emit!(m);
                    }
                }
            }
        }

        let forward: i8 = if us == Color::White { 1 } else { -1 };
        let start_rank = if us == Color::White { 1 } else { 6 };
        let last_rank = if us == Color::White { 7 } else { 0 };
        for from in board.pieces(us, Role::Pawn) {
            let mut targets: [Option<Square>; 4] = [None; 4];
            if let Some(one) = from.offset(0, forward) {
                if !occ.contains(one) {
                    targets[0] = Some(one);
                    if from.rank() == start_rank {
                        if let Some(two) = from.offset(0, 2 * forward) {
                            if !occ.contains(two) {
                                targets[1] = Some(two);
                            }
                        }
                    }
                }
            }
            let caps = pawn_attacks(us, from) & board.by_color(them);
            for (slot, to) in targets[2..].iter_mut().zip(caps) {
                *slot = Some(to);
            }
            for to in targets.into_iter().flatten() {
                if !evasion_targets.contains(to) {
                    continue;
                }
                let base = Move::normal(from, to);
                if needs_test(from) && !self.king_safe_after(base) {
                    continue;
                }
                if to.rank() == last_rank {
                    for p in Role::PROMOTION {
                        emit!(Move::Normal {
                            from,
                            to,
                            promotion: Some(p)
                        });
                    }
                } else {
                    emit!(base);
                }
            }
        }

        if let Some(ep) = self.ep_square {
            if !occ.contains(ep) {
                for from in pawn_attacks(them, ep) & board.pieces(us, Role::Pawn) {
                    let m = Move::normal(from, ep);
                    // The captured pawn must actually be there.
                    let victim = Square::from_coords(ep.file(), from.rank());
                    if board.pieces(them, Role::Pawn).contains(victim) && self.king_safe_after(m) {
                        emit!(m);
                    }
                }
            }
        }

        if !in_check {
            let rank = us.back_rank();
            if king == Square::from_coords(4, rank) {
                for side in [CastleSide::King, CastleSide::Queen] {
                    if !self.castling.has(us, side) {
                        continue;
                    }
                    let (rook_file, pass, empty_files): (u8, [u8; 2], &[u8]) = match side {
                        CastleSide::King => (7, [5, 6], &[5, 6]),
                        CastleSide::Queen => (0, [3, 2], &[1, 2, 3]),
                    };
                    if !board
                        .pieces(us, Role::Rook)
                        .contains(Square::from_coords(rook_file, rank))
                    {
                        continue;
                    }
                    if empty_files.iter().any(|&f| occ.contains(Square::from_coords(f, rank))) {
                        continue;
                    }
                    if pass
                        .iter()
                        .any(|&f| board.attackers_to(Square::from_coords(f, rank), them, occ).any())
                    {
                        continue;
                    }
                    emit!(Move::normal(king, Square::from_coords(pass[1], rank)));
                }
            }
        }

        !out.is_empty()
    }

    pub fn is_legal(&self, mv: Move) -> bool {
        self.legal_moves().contains(&mv)
    }

    /// Plays a legal move.
    pub fn apply_move(&self, mv: Move) -> Result<GameState, RulesError> {
        if !self.is_legal(mv) {
            return Err(RulesError::IllegalMove {
                mv: mv.to_uci(),
                fen: self.to_fen(),
            });
        }
        Ok(self.play_unchecked(mv))
    }

    /// Plays `mv` without validating it. The caller guarantees legality.
    pub fn play_unchecked(&self, mv: Move) -> GameState {
        let us = self.turn;
        let mut next = GameState {
            board: self.board,
            pockets: self.pockets,
            turn: us.other(),
            castling: self.castling,
            ep_square: None,
            halfmove_clock: self.halfmove_clock + 1,
            fullmove_number: self.fullmove_number + u32::from(us == Color::Black),
            key: 0,
            history: Vec::new(),
        };
        let irreversible = match mv {
            Move::Drop { role, to } => {
                next.board.set(to, Piece { color: us, role }, false);
                next.pockets.take(us, role);
                true
            }
            Move::Normal { from, to, promotion } => {
                let (piece, was_promoted) = next.board.remove(from).expect("piece on from-square");
                let capture_sq = if self.board.occupied().contains(to) {
                    Some(to)
                } else if piece.role == Role::Pawn && Some(to) == self.ep_square && from.file() != to.file() {
                    Some(Square::from_coords(to.file(), from.rank()))
                } else {
                    None
                };
                if let Some(cs) = capture_sq {
                    let (victim, victim_promoted) = next.board.remove(cs).expect("captured piece");
                    let role = if victim_promoted { Role::Pawn } else { victim.role };
                    next.pockets.add(us, role);
                }
                if piece.role == Role::King {
                    next.castling.clear_color(us);
                    if (to.file() as i8 - from.file() as i8).abs() == 2 {
                        let rank = from.rank();
                        let (rf, rt) = if to.file() > from.file() { (7, 5) } else { (0, 3) };
                        if let Some((rook, rp)) = next.board.remove(Square::from_coords(rf, rank)) {
                            next.board.set(Square::from_coords(rt, rank), rook, rp);
                        }
                    }
                }
                next.castling.clear_square(from);
                next.castling.clear_square(to);
                match promotion {
                    Some(p) => next.board.set(to, Piece { color: us, role: p }, true),
                    None => next.board.set(to, piece, was_promoted),
                }
                if piece.role == Role::Pawn && (to.rank() as i8 - from.rank() as i8).abs() == 2 {
                    next.ep_square = Some(Square::from_coords(from.file(), (from.rank() + to.rank()) / 2));
                }
                piece.role == Role::Pawn || capture_sq.is_some()
            }
        };
        if irreversible {
            next.halfmove_clock = 0;
        } else {
            next.history.reserve(self.history.len() + 1);
            next.history.extend_from_slice(&self.history);
            next.history.push(self.key);
        }
        next.key = next.compute_key();
        next
    }

    /// True iff the opponent's king is attacked after `mv`.
    pub fn gives_check(&self, mv: Move) -> bool {
        let board = self.board_after(mv);
        let them = self.turn.other();
        match board.king_of(them) {
            Some(k) => board.attackers_to(k, self.turn, board.occupied()).any(),
            None => false,
        }
    }

    /// Terminal status: checkmate, stalemate, threefold repetition or the
    /// 100-ply no-progress rule.
    pub fn outcome(&self) -> Option<Outcome> {
        if !self.has_legal_move() {
            let outcome = if self.is_check() {
                Outcome {
                    value: GameValue::Loss,
                    reason: Termination::Checkmate,
                }
            } else {
                Outcome {
                    value: GameValue::Draw,
                    reason: Termination::Stalemate,
                }
            };
            return Some(outcome);
        }
        if self.repetition_count() >= 3 {
            return Some(Outcome {
                value: GameValue::Draw,
                reason: Termination::ThreefoldRepetition,
            });
        }
        if self.halfmove_clock >= 100 {
            return Some(Outcome {
                value: GameValue::Draw,
                reason: Termination::FiftyMoves,
            });
        }
        None
    }

    pub fn is_checkmate(&self) -> bool {
        self.is_check() && !self.has_legal_move()
    }

    /// Number of legal move sequences of exactly `depth` plies.
    pub fn perft(&self, depth: u32) -> u64 {
        match depth {
            0 => 1,
            1 => self.legal_moves().len() as u64,
            _ => self
                .legal_moves()
                .into_iter()
                .map(|m| self.play_unchecked(m).perft(depth - 1))
                .sum(),
        }
    }

    /// Colors swapped and ranks mirrored; the side to move flips with them.
    /// Repetition history is not carried over.
    pub fn mirrored(&self) -> GameState {
        let mut out = GameState {
            board: self.board.mirrored(),
            pockets: self.pockets.swapped(),
            turn: self.turn.other(),
            castling: self.castling.swapped(),
            ep_square: self.ep_square.map(Square::flip_rank),
            halfmove_clock: self.halfmove_clock,
            fullmove_number: self.fullmove_number,
            key: 0,
            history: Vec::new(),
        };
        out.key = out.compute_key();
        out
    }

    /// Material on board and in pockets per kind, promoted pieces counted as pawns.
    pub fn material_census(&self) -> [u32; 5] {
        let mut census = [0u32; 5];
        for role in Role::POCKET {
            let on_board = self.board.by_role(role) & !self.board.promoted();
            census[role.index()] += on_board.count();
            for color in Color::ALL {
                census[role.index()] += self.pockets.get(color, role) as u32;
            }
        }
        census[Role::Pawn.index()] += self.board.promoted().count();
        census
    }
}
