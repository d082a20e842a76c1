use crate::rules::{Color, GameState, Move, Role};

use super::{Evaluation, Evaluator};

/// Value 0 and equal priors for every legal move.
#[derive(Clone, Copy, Debug, Default)]
pub struct UniformEvaluator;

impl Evaluator<GameState> for UniformEvaluator {
    fn evaluate_batch(&self, states: &[GameState]) -> Vec<Evaluation<Move>> {
        states.iter().map(|s| Evaluation::uniform(&s.legal_moves())).collect()
    }
}

pub const MATERIAL_K: f32 = 0.1;

const PIECE_VALUES: [f32; 6] = [1.0, 3.0, 3.0, 5.0, 9.0, 0.0];

/// Board material minus the opponent's, pocket pieces at half weight,
/// from the side to move.
pub fn material_balance(state: &GameState) -> f32 {
    let us = state.turn();
    let mut diff = 0.0;
    for color in Color::ALL {
        let sign = if color == us { 1.0 } else { -1.0 };
        for role in Role::ALL {
            let v = PIECE_VALUES[role.index()];
            diff += sign * v * state.board().pieces(color, role).count() as f32;
            if role != Role::King {
                diff += sign * 0.5 * v * state.pockets().get(color, role) as f32;
            }
        }
    }
    diff
}

/// `tanh(k * material)` as value. Priors are a softmax over cheap move
/// features (captures, promotions, checks) so the search spends its
/// visits on forcing moves first. The weights are arbitrary.
#[derive(Clone, Copy, Debug)]
pub struct MaterialEvaluator {
    pub k: f32,
    pub shaped_priors: bool,
}

impl Default for MaterialEvaluator {
    fn default() -> MaterialEvaluator {
        MaterialEvaluator {
            k: MATERIAL_K,
            shaped_priors: true,
        }
    }
}

impl MaterialEvaluator {
    fn move_logit(state: &GameState, mv: Move) -> f32 {
        let mut logit = 0.0;
        if let Move::Normal { from, to, promotion } = mv {
            let board = state.board();
            if let Some(victim) = board.role_at(to) {
                let v = if board.is_promoted(to) {
                    1.0
                } else {
                    PIECE_VALUES[victim.index()]
                };
                let attacker = board.role_at(from).map_or(0.0, |r| PIECE_VALUES[r.index()]);
                logit += 0.4 * v + if v >= attacker { 0.5 } else { 0.0 };
            }
            if promotion == Some(Role::Queen) {
                logit += 2.0;
            }
        }
        if state.gives_check(mv) {
            logit += 1.0;
        }
        logit
    }

    fn evaluate(&self, state: &GameState) -> Evaluation<Move> {
        let moves = state.legal_moves();
        let value = (self.k * material_balance(state)).tanh();
        if !self.shaped_priors {
            return Evaluation {
                value,
                ..Evaluation::uniform(&moves)
            };
        }
        let logits: Vec<f32> = moves.iter().map(|&m| Self::move_logit(state, m)).collect();
        let max = logits.iter().copied().fold(f32::NEG_INFINITY, f32::max);
        let exp: Vec<f32> = logits.iter().map(|l| (l - max).exp()).collect();
        let sum: f32 = exp.iter().sum();
        Evaluation {
            value,
            priors: moves.into_iter().zip(exp).map(|(m, e)| (m, e / sum)).collect(),
        }
    }
}

impl Evaluator<GameState> for MaterialEvaluator {
    fn evaluate_batch(&self, states: &[GameState]) -> Vec<Evaluation<Move>> {
        states.iter().map(|s| self.evaluate(s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_priors() {
        let s = GameState::from_fen("3k2r1/pBpr1p1p/Pp3p1B/3p4/2PPn2B/5NPp/q4PpP/1R1QR1K1[NNbp] w - - 1 23").unwrap();
        let e = &UniformEvaluator.evaluate_batch(std::slice::from_ref(&s))[0];
        assert_eq!(e.priors.len(), 73);
        assert!(e.priors.iter().all(|&(_, p)| (p - 1.0 / 73.0).abs() < 1e-7));
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn material_signs() {
        let m = MaterialEvaluator::default();
        let start = m.evaluate(&GameState::startpos());
        assert_eq!(start.value, 0.0);
        let sum: f32 = start.priors.iter().map(|p| p.1).sum();
        assert!((sum - 1.0).abs() < 1e-6);
        let up = GameState::from_fen("4k3/8/8/8/8/8/8/4K3[Q] w - - 0 1").unwrap();
        assert!(m.evaluate(&up).value > 0.0);
        let swapped = GameState::from_fen("4k3/8/8/8/8/8/8/4K3[q] w - - 0 1").unwrap();
        assert_eq!(m.evaluate(&swapped).value, -m.evaluate(&up).value);
    }
}
