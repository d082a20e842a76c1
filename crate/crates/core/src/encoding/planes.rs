use crate::rules::{CastleSide, Color, GameState, Role};

pub const NUM_PLANES: usize = 34;
pub const PLANE_SIZE: usize = 64;

pub const POCKET_MAX: f32 = 32.0;
pub const MOVE_COUNT_MAX: f32 = 500.0;
pub const NO_PROGRESS_MAX: f32 = 40.0;

/// First plane index of each feature group.
pub mod plane {
    pub const P1_PIECES: usize = 0;
    pub const P2_PIECES: usize = 6;
    pub const REPETITIONS: usize = 12;
    pub const P1_POCKET: usize = 14;
    pub const P2_POCKET: usize = 19;
    pub const P1_PROMOTED: usize = 24;
    pub const P2_PROMOTED: usize = 25;
    pub const EN_PASSANT: usize = 26;
    pub const COLOUR: usize = 27;
    pub const MOVE_COUNT: usize = 28;
    pub const P1_CASTLING: usize = 29;
    pub const P2_CASTLING: usize = 31;
    pub const NO_PROGRESS: usize = 33;
}

/// Planes that only ever hold 0 or 1.
pub fn is_binary_plane(p: usize) -> bool {
    !matches!(p, plane::P1_POCKET..=23 | plane::MOVE_COUNT | plane::NO_PROGRESS)
}

/// 34×8×8 network input, stored plane-major with squares in the mover's
/// frame (a1 = 0). Black positions are rank-mirrored with colors swapped.
#[derive(Clone, Debug, PartialEq)]
pub struct InputPlanes {
    values: Vec<f32>,
    perspective: Color,
}

impl InputPlanes {
    pub fn from_raw(values: Vec<f32>, perspective: Color) -> Option<InputPlanes> {
        (values.len() == NUM_PLANES * PLANE_SIZE).then_some(InputPlanes { values, perspective })
    }

    pub fn perspective(&self) -> Color {
        self.perspective
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f32> {
        self.values
    }

    pub fn plane(&self, p: usize) -> &[f32] {
        &self.values[p * PLANE_SIZE..(p + 1) * PLANE_SIZE]
    }

    pub fn get(&self, p: usize, square: usize) -> f32 {
        self.values[p * PLANE_SIZE + square]
    }

    fn fill(&mut self, p: usize, v: f32) {
        self.plane_mut(p).fill(v);
    }

    fn plane_mut(&mut self, p: usize) -> &mut [f32] {
        &mut self.values[p * PLANE_SIZE..(p + 1) * PLANE_SIZE]
    }
}

pub fn encode_planes(state: &GameState) -> InputPlanes {
    let mover = state.turn();
    let mirrored;
    let view = if mover == Color::White {
        state
    } else {
        mirrored = state.mirrored();
        &mirrored
    };
    let mut out = InputPlanes {
        values: vec![0.0; NUM_PLANES * PLANE_SIZE],
        perspective: mover,
    };
    let board = view.board();
    let sides = [Color::White, Color::Black];

    for (side, color) in sides.into_iter().enumerate() {
        let base = if side == 0 { plane::P1_PIECES } else { plane::P2_PIECES };
        for role in Role::ALL {
            let p = base + role.index();
            for sq in board.pieces(color, role) {
                out.plane_mut(p)[sq.index()] = 1.0;
            }
        }
    }

    let reps = state.repetition_count();
    if reps >= 2 {
        out.fill(plane::REPETITIONS, 1.0);
    }
    if reps >= 3 {
        out.fill(plane::REPETITIONS + 1, 1.0);
    }

    for (side, color) in sides.into_iter().enumerate() {
        let base = if side == 0 { plane::P1_POCKET } else { plane::P2_POCKET };
        for role in Role::POCKET {
            let n = view.pockets().get(color, role) as f32;
            if n > 0.0 {
                out.fill(base + role.index(), n / POCKET_MAX);
            }
        }
        let promo_plane = if side == 0 {
            plane::P1_PROMOTED
        } else {
            plane::P2_PROMOTED
        };
        for sq in board.promoted() & board.by_color(color) {
            out.plane_mut(promo_plane)[sq.index()] = 1.0;
        }
        let castle_base = if side == 0 {
            plane::P1_CASTLING
        } else {
            plane::P2_CASTLING
        };
        for (i, cs) in [CastleSide::King, CastleSide::Queen].into_iter().enumerate() {
            if view.castling().has(color, cs) {
                out.fill(castle_base + i, 1.0);
            }
        }
    }

    if let Some(ep) = view.ep_square() {
        out.plane_mut(plane::EN_PASSANT)[ep.index()] = 1.0;
    }
    if mover == Color::White {
        out.fill(plane::COLOUR, 1.0);
    }
    out.fill(plane::MOVE_COUNT, state.fullmove_number() as f32 / MOVE_COUNT_MAX);
    out.fill(plane::NO_PROGRESS, state.halfmove_clock() as f32 / NO_PROGRESS_MAX);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const DROP_FEN: &str = "r2q3k/ppp2p1p/2n1pN2/3pP3/3P4/4BB2/PPP2PPP/R2Q1RK1[Rbbnnp] w - - 4 22";

    fn uniform(planes: &InputPlanes, p: usize) -> Option<f32> {
        let v = planes.plane(p)[0];
        planes.plane(p).iter().all(|&x| x == v).then_some(v)
    }

    #[test]
    fn pocket_position_scalars() {
        let planes = encode_planes(&GameState::from_fen(DROP_FEN).unwrap());
        assert_eq!(
            uniform(&planes, plane::P1_POCKET + Role::Rook.index()),
            Some(1.0 / 32.0)
        );
        assert_eq!(
            uniform(&planes, plane::P2_POCKET + Role::Bishop.index()),
            Some(2.0 / 32.0)
        );
        assert_eq!(uniform(&planes, plane::P2_POCKET + Role::Queen.index()), Some(0.0));
        assert_eq!(uniform(&planes, plane::MOVE_COUNT), Some(22.0 / 500.0));
        assert_eq!(uniform(&planes, plane::NO_PROGRESS), Some(4.0 / 40.0));
        assert_eq!(uniform(&planes, plane::COLOUR), Some(1.0));
    }

    #[test]
    fn colour_plane_follows_mover() {
        let s = GameState::startpos();
        assert_eq!(uniform(&encode_planes(&s), plane::COLOUR), Some(1.0));
        let s = s.apply_move("e2e4".parse().unwrap()).unwrap();
        let planes = encode_planes(&s);
        assert_eq!(uniform(&planes, plane::COLOUR), Some(0.0));
        // Black's pawns now occupy the mover's second rank.
        let p1_pawns = planes.plane(plane::P1_PIECES);
        assert!((8..16).all(|i| p1_pawns[i] == 1.0));
        // The mover's queen stays left of the king.
        assert_eq!(planes.get(plane::P1_PIECES + Role::Queen.index(), 3), 1.0);
        assert_eq!(planes.get(plane::P1_PIECES + Role::King.index(), 4), 1.0);
        // White's e-pawn on e4 appears on e5 from black's side.
        assert_eq!(planes.get(plane::P2_PIECES, 36), 1.0);
        assert_eq!(planes.get(plane::EN_PASSANT, 44), 1.0);
    }

    #[test]
    fn soft_bound_passes_through() {
        let s = GameState::from_fen("4k3/8/8/8/8/8/8/4K3[] w - - 60 700").unwrap();
        let planes = encode_planes(&s);
        assert_eq!(uniform(&planes, plane::MOVE_COUNT), Some(1.4));
        assert_eq!(uniform(&planes, plane::NO_PROGRESS), Some(1.5));
    }
}
