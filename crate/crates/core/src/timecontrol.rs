//! Per-move time allocation with early stopping and one-time extension.

use rand::Rng;

pub const SAFETY_MARGIN_MS: u64 = 50;
pub const HARD_CAP_FACTOR: f64 = 3.0;
pub const INCREMENT_SHARE: f64 = 0.7;
pub const EXPECTED_GAME_LENGTH: u32 = 50;
pub const PROPORTIONAL_FROM_MOVE: u32 = 40;
pub const PROPORTIONAL_SHARE: f64 = 0.05;
pub const VARIETY: f64 = 0.1;
pub const EARLY_STOP_PRIOR: f32 = 0.9;
pub const EXTENSION_DROP: f32 = 0.1;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClockState {
    pub remaining_ms: u64,
    pub increment_ms: u64,
    pub moves_to_go: Option<u32>,
    /// Full-move number of the move about to be played.
    pub move_number: u32,
    pub fixed_move_time_ms: Option<u64>,
    pub human_variety: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TimeBudget {
    pub target_ms: u64,
    pub hard_cap_ms: u64,
}

impl TimeBudget {
    /// Target after the one-time extension for a critical position.
    pub fn extended_target(&self) -> u64 {
        (self.target_ms + self.target_ms / 2)
            .min(self.hard_cap_ms)
            .max(self.target_ms)
    }
}

/// Deterministic unless `human_variety` is set, in which case the target
/// is scaled by a factor drawn from `rng`.
pub fn allocate_with<R: Rng + ?Sized>(clock: &ClockState, rng: &mut R) -> TimeBudget {
    if let Some(t) = clock.fixed_move_time_ms {
        // Leave room for reporting and thread hand-off, but never drop to 0.
        let t = t.saturating_sub(SAFETY_MARGIN_MS).max(t.min(1));
        return TimeBudget {
            target_ms: t,
            hard_cap_ms: t,
        };
    }
    let remaining = clock.remaining_ms as f64;
    let inc = INCREMENT_SHARE * clock.increment_ms as f64;
    let mut target = match clock.moves_to_go {
        Some(mtg) if mtg > 0 => remaining / mtg as f64 + inc,
        _ if clock.move_number < PROPORTIONAL_FROM_MOVE => {
            remaining / (EXPECTED_GAME_LENGTH - clock.move_number.min(EXPECTED_GAME_LENGTH - 1)) as f64 + inc
        }
        _ => PROPORTIONAL_SHARE * remaining + inc,
    };
    if clock.human_variety {
        target *= 1.0 + rng.random_range(-VARIETY..=VARIETY);
    }
    let usable = clock.remaining_ms.saturating_sub(SAFETY_MARGIN_MS);
    let target_ms = (target.round() as u64).min(usable);
    let hard_cap_ms = ((HARD_CAP_FACTOR * target_ms as f64) as u64).min(usable);
    TimeBudget { target_ms, hard_cap_ms }
}

pub fn allocate(clock: &ClockState) -> TimeBudget {
    allocate_with(clock, &mut rand::rng())
}

/// What the running search reports to the stop rule.
#[derive(Clone, Copy, Debug)]
pub struct SearchSnapshot {
    pub legal_moves: usize,
    pub elapsed_ms: u64,
    pub target_ms: u64,
    pub top_prior: f32,
    /// Whether the move with the top prior also has the highest Q right now.
    pub top_prior_has_max_q: bool,
}

pub fn early_stop(s: &SearchSnapshot) -> bool {
    s.legal_moves == 1 || (s.elapsed_ms * 2 >= s.target_ms && s.top_prior > EARLY_STOP_PRIOR && s.top_prior_has_max_q)
}

/// True when the best Q dropped by at least 0.1 since the previous move.
pub fn extend(previous_q: Option<f32>, current_q: f32) -> bool {
    match previous_q {
        Some(prev) => current_q <= prev - EXTENSION_DROP + 1e-6,
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sudden(remaining_ms: u64, increment_ms: u64, move_number: u32) -> ClockState {
        ClockState {
            remaining_ms,
            increment_ms,
            move_number,
            ..ClockState::default()
        }
    }

    #[test]
    fn sudden_death_targets() {
        assert_eq!(allocate(&sudden(300_000, 15_000, 10)).target_ms, 18_000);
        assert_eq!(allocate(&sudden(100_000, 0, 45)).target_ms, 5_000);
    }

    #[test]
    fn moves_to_go_and_fixed() {
        let c = ClockState {
            moves_to_go: Some(20),
            ..sudden(60_000, 1_000, 5)
        };
        assert_eq!(allocate(&c).target_ms, 3_700);
        let c = ClockState {
            fixed_move_time_ms: Some(1234),
            ..sudden(60_000, 0, 5)
        };
        assert_eq!(allocate(&c).target_ms, 1184);
    }

    #[test]
    fn caps_respect_margin() {
        for rem in [10, 60, 500, 2_000, 100_000] {
            for mv in [1, 30, 39, 40, 80] {
                let b = allocate(&sudden(rem, 5_000, mv));
                let usable = rem.saturating_sub(SAFETY_MARGIN_MS);
                assert!(b.extended_target() <= usable && b.hard_cap_ms <= usable);
                assert!(b.hard_cap_ms <= 3 * b.target_ms);
            }
        }
    }

    #[test]
    fn variety_within_ten_percent() {
        let c = ClockState {
            human_variety: true,
            ..sudden(300_000, 0, 10)
        };
        for _ in 0..100 {
            let t = allocate(&c).target_ms as f64;
            assert!((6_750.0..=8_250.0).contains(&t));
        }
    }

    #[test]
    fn stop_and_extend_rules() {
        let snap = SearchSnapshot {
            legal_moves: 30,
            elapsed_ms: 600,
            target_ms: 1000,
            top_prior: 0.95,
            top_prior_has_max_q: true,
        };
        assert!(early_stop(&snap));
        assert!(!early_stop(&SearchSnapshot {
            top_prior_has_max_q: false,
            ..snap
        }));
        assert!(!early_stop(&SearchSnapshot {
            elapsed_ms: 400,
            ..snap
        }));
        assert!(early_stop(&SearchSnapshot {
            legal_moves: 1,
            elapsed_ms: 0,
            top_prior: 0.1,
            ..snap
        }));
        assert!(extend(Some(0.30), 0.15));
        assert!(!extend(Some(0.30), 0.25));
        assert!(!extend(None, -0.9));
    }
}
