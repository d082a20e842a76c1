//! Deliberately naive crazyhouse move generator: 64-square array, pseudo
//! moves filtered by playing them and looking for an attacked king. Shares
//! no code with the engine, so it can serve as a perft oracle.

const PAWN: u8 = 0;
const KNIGHT: u8 = 1;
const BISHOP: u8 = 2;
const ROOK: u8 = 3;
const QUEEN: u8 = 4;
const KING: u8 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pc {
    pub white: bool,
    pub kind: u8,
    pub promoted: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mv {
    pub from: Option<usize>,
    pub to: usize,
    pub promo: Option<u8>,
    pub drop: Option<u8>,
}

impl Mv {
    pub fn uci(&self) -> String {
        let name = |s: usize| format!("{}{}", (b'a' + (s % 8) as u8) as char, s / 8 + 1);
        match (self.from, self.drop) {
            (None, Some(k)) => format!("{}@{}", b"PNBRQK"[k as usize] as char, name(self.to)),
            (Some(f), _) => {
                let mut s = format!("{}{}", name(f), name(self.to));
                if let Some(p) = self.promo {
                    s.push(b"pnbrqk"[p as usize] as char);
                }
                s
            }
            _ => unreachable!(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Mb {
    sq: [Option<Pc>; 64],
    /// [white, black] × [P, N, B, R, Q]
    pocket: [[u8; 5]; 2],
    white: bool,
    /// K, Q, k, q
    castle: [bool; 4],
    ep: Option<usize>,
}

fn on_board(f: i32, r: i32) -> bool {
    (0..8).contains(&f) && (0..8).contains(&r)
}

impl Mb {
    pub fn from_fen(fen: &str) -> Mb {
        let mut fields = fen.split_whitespace();
        let placement = fields.next().unwrap();
        let (board, pockets) = match placement.find('[') {
            Some(i) => (&placement[..i], placement[i + 1..placement.len() - 1].to_string()),
            None => (placement, String::new()),
        };
        let mut sq = [None; 64];
        for (row, rank_text) in board.split('/').enumerate() {
            let rank = 7 - row;
            let mut file = 0;
            for c in rank_text.chars() {
                if let Some(d) = c.to_digit(10) {
                    file += d as usize;
                } else if c == '~' {
                    let s: &mut Option<Pc> = &mut sq[rank * 8 + file - 1];
                    s.as_mut().unwrap().promoted = true;
                } else {
                    let kind = "pnbrqk".find(c.to_ascii_lowercase()).unwrap() as u8;
                    sq[rank * 8 + file] = Some(Pc {
                        white: c.is_ascii_uppercase(),
                        kind,
                        promoted: false,
                    });
                    file += 1;
                }
            }
        }
        let mut pocket = [[0u8; 5]; 2];
        for c in pockets.chars() {
            let kind = "pnbrq".find(c.to_ascii_lowercase()).unwrap();
            pocket[if c.is_ascii_uppercase() { 0 } else { 1 }][kind] += 1;
        }
        let white = fields.next().unwrap() == "w";
        let c = fields.next().unwrap();
        let castle = [c.contains('K'), c.contains('Q'), c.contains('k'), c.contains('q')];
        let ep = fields.next().and_then(|e| {
            let b = e.as_bytes();
            (e != "-").then(|| (b[0] - b'a') as usize + 8 * (b[1] - b'1') as usize)
        });
        Mb {
            sq,
            pocket,
            white,
            castle,
            ep,
        }
    }

    fn attacked(&self, target: usize, by_white: bool) -> bool {
        let (tf, tr) = ((target % 8) as i32, (target / 8) as i32);
        let is = |f: i32, r: i32, kinds: &[u8]| -> bool {
            on_board(f, r)
                && matches!(self.sq[(r * 8 + f) as usize], Some(p) if p.white == by_white && kinds.contains(&p.kind))
        };
        let pawn_rank = if by_white { tr - 1 } else { tr + 1 };
        if is(tf - 1, pawn_rank, &[PAWN]) || is(tf + 1, pawn_rank, &[PAWN]) {
            return true;
        }
        for (df, dr) in [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)] {
            if is(tf + df, tr + dr, &[KNIGHT]) {
                return true;
            }
        }
        for df in -1..=1 {
            for dr in -1..=1 {
                if (df, dr) != (0, 0) && is(tf + df, tr + dr, &[KING]) {
                    return true;
                }
            }
        }
        for (df, dr, kinds) in [
            (1, 0, [ROOK, QUEEN]),
            (-1, 0, [ROOK, QUEEN]),
            (0, 1, [ROOK, QUEEN]),
            (0, -1, [ROOK, QUEEN]),
            (1, 1, [BISHOP, QUEEN]),
            (1, -1, [BISHOP, QUEEN]),
            (-1, 1, [BISHOP, QUEEN]),
            (-1, -1, [BISHOP, QUEEN]),
        ] {
            let (mut f, mut r) = (tf + df, tr + dr);
            while on_board(f, r) {
                if let Some(p) = self.sq[(r * 8 + f) as usize] {
                    if p.white == by_white && kinds.contains(&p.kind) {
                        return true;
                    }
                    break;
                }
                f += df;
                r += dr;
            }
        }
        false
    }

    fn king(&self, white: bool) -> usize {
        (0..64)
            .find(|&s| matches!(self.sq[s], Some(p) if p.white == white && p.kind == KING))
            .unwrap()
    }

    fn pseudo(&self) -> Vec<Mv> {
        let mut out = Vec::new();
        let us = self.white;
        let normal = |from: usize, to: usize| Mv {
            from: Some(from),
            to,
            promo: None,
            drop: None,
        };
        for from in 0..64 {
            let Some(p) = self.sq[from] else { continue };
            if p.white != us {
                continue;
            }
            let (f, r) = ((from % 8) as i32, (from / 8) as i32);
            let free_or_enemy = |s: usize| self.sq[s].is_none_or(|q| q.white != us);
            match p.kind {
                PAWN => {
                    let dir = if us { 1 } else { -1 };
                    let last = if us { 7 } else { 0 };
                    let start = if us { 1 } else { 6 };
                    let push = |to: usize, out: &mut Vec<Mv>| {
                        if (to / 8) as i32 == last {
                            for promo in [KNIGHT, BISHOP, ROOK, QUEEN] {
                                out.push(Mv {
                                    promo: Some(promo),
                                    ..normal(from, to)
                                });
                            }
                        } else {
                            out.push(normal(from, to));
                        }
                    };
                    let one = ((r + dir) * 8 + f) as usize;
                    if self.sq[one].is_none() {
                        push(one, &mut out);
                        let two = ((r + 2 * dir) * 8 + f) as usize;
                        if r == start && self.sq[two].is_none() {
                            out.push(normal(from, two));
                        }
                    }
                    for df in [-1, 1] {
                        if !on_board(f + df, r + dir) {
                            continue;
                        }
                        let to = ((r + dir) * 8 + f + df) as usize;
                        if matches!(self.sq[to], Some(q) if q.white != us) || self.ep == Some(to) {
                            push(to, &mut out);
                        }
                    }
                }
                KNIGHT | KING => {
                    let steps: &[(i32, i32)] = if p.kind == KNIGHT {
                        &[(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)]
                    } else {
                        &[(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]
                    };
                    for &(df, dr) in steps {
                        if on_board(f + df, r + dr) {
                            let to = ((r + dr) * 8 + f + df) as usize;
                            if free_or_enemy(to) {
                                out.push(normal(from, to));
                            }
                        }
                    }
                }
                _ => {
                    let dirs: &[(i32, i32)] = match p.kind {
                        BISHOP => &[(1, 1), (1, -1), (-1, 1), (-1, -1)],
                        ROOK => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
                        _ => &[(1, 1), (1, -1), (-1, 1), (-1, -1), (1, 0), (-1, 0), (0, 1), (0, -1)],
                    };
                    for &(df, dr) in dirs {
                        let (mut tf, mut tr) = (f + df, r + dr);
                        while on_board(tf, tr) {
                            let to = (tr * 8 + tf) as usize;
                            match self.sq[to] {
                                None => out.push(normal(from, to)),
                                Some(q) => {
                                    if q.white != us {
                                        out.push(normal(from, to));
                                    }
                                    break;
                                }
                            }
                            tf += df;
                            tr += dr;
                        }
                    }
                }
            }
        }
        // Castling: rights, empty path, and no attacked square on the
        // king's way (including its start).
        let (rank, ks, qs) = if us { (0, 0, 1) } else { (56, 2, 3) };
        let them = !us;
        let king_home = matches!(self.sq[rank + 4], Some(p) if p.white == us && p.kind == KING);
        let rook_on = |s: usize| matches!(self.sq[s], Some(p) if p.white == us && p.kind == ROOK);
        if king_home && self.castle[ks] && rook_on(rank + 7) {
            let empty = [rank + 5, rank + 6].iter().all(|&s| self.sq[s].is_none());
            let safe = [rank + 4, rank + 5, rank + 6].iter().all(|&s| !self.attacked(s, them));
            if empty && safe {
                out.push(normal(rank + 4, rank + 6));
            }
        }
        if king_home && self.castle[qs] && rook_on(rank) {
            let empty = [rank + 1, rank + 2, rank + 3].iter().all(|&s| self.sq[s].is_none());
            let safe = [rank + 4, rank + 3, rank + 2].iter().all(|&s| !self.attacked(s, them));
            if empty && safe {
                out.push(normal(rank + 4, rank + 2));
            }
        }
        let side = if us { 0 } else { 1 };
        for kind in 0..5u8 {
            if self.pocket[side][kind as usize] == 0 {
                continue;
            }
            for to in 0..64 {
                if self.sq[to].is_some() || (kind == PAWN && !(8..56).contains(&to)) {
                    continue;
                }
                out.push(Mv {
                    from: None,
                    to,
                    promo: None,
                    drop: Some(kind),
                });
            }
        }
        out
    }

    fn make(&self, mv: Mv) -> Mb {
        let mut n = self.clone();
        let us = self.white;
        let side = if us { 0 } else { 1 };
        n.ep = None;
        match mv.from {
            None => {
                let kind = mv.drop.unwrap();
                n.pocket[side][kind as usize] -= 1;
                n.sq[mv.to] = Some(Pc {
                    white: us,
                    kind,
                    promoted: false,
                });
            }
            Some(from) => {
                let p = n.sq[from].take().unwrap();
                let mut captured = n.sq[mv.to];
                if p.kind == PAWN && self.ep == Some(mv.to) && captured.is_none() {
                    let victim = if us { mv.to - 8 } else { mv.to + 8 };
                    captured = n.sq[victim].take();
                }
                if let Some(c) = captured {
                    let kind = if c.promoted { PAWN } else { c.kind };
                    n.pocket[side][kind as usize] += 1;
                }
                let placed = match mv.promo {
                    Some(k) => Pc {
                        white: us,
                        kind: k,
                        promoted: true,
                    },
                    None => p,
                };
                n.sq[mv.to] = Some(placed);
                if p.kind == KING && from.abs_diff(mv.to) == 2 {
                    let (rf, rt) = if mv.to > from {
                        (from + 3, from + 1)
                    } else {
                        (from - 4, from - 1)
                    };
                    n.sq[rt] = n.sq[rf].take();
                }
                if p.kind == PAWN && from.abs_diff(mv.to) == 16 {
                    n.ep = Some((from + mv.to) / 2);
                }
                if p.kind == KING {
                    if us {
                        n.castle[0] = false;
                        n.castle[1] = false;
                    } else {
                        n.castle[2] = false;
                        n.castle[3] = false;
                    }
                }
                for (s, right) in [(7, 0), (0, 1), (63, 2), (56, 3)] {
                    if from == s || mv.to == s {
                        n.castle[right] = false;
                    }
                }
            }
        }
        n.white = !us;
        n
    }

    pub fn legal(&self) -> Vec<Mv> {
        self.pseudo()
            .into_iter()
            .filter(|&m| {
                let n = self.make(m);
                !n.attacked(n.king(self.white), !self.white)
            })
            .collect()
    }

    pub fn perft(&self, depth: u32) -> u64 {
        match depth {
            0 => 1,
            1 => self.legal().len() as u64,
            _ => self.legal().into_iter().map(|m| self.make(m).perft(depth - 1)).sum(),
        }
    }
}
