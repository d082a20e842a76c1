use std::fmt::Write as _;

pub const LR_MAX: f64 = 0.35;
pub const LR_MIN: f64 = 1e-5;
pub const MOMENTUM_MAX: f64 = 0.95;
pub const MOMENTUM_MIN: f64 = 0.85;
pub const DEFAULT_WARMUP: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchedulePoint {
    pub iteration: usize,
    pub lr: f64,
    pub momentum: f64,
}

/// Index of the learning-rate peak.
pub fn peak_iteration(total: usize, warmup_fraction: f64) -> usize {
    if total == 0 {
        return 0;
    }
    ((total - 1) as f64 * warmup_fraction.clamp(0.0, 1.0)).round() as usize
}

/// Linear rise from `LR_MIN` to `LR_MAX` over the warm-up, then a linear
/// fall back to `LR_MIN` at the last iteration. Momentum runs the same
/// shape upside down between `MOMENTUM_MAX` and `MOMENTUM_MIN`.
pub fn one_cycle_schedule(total: usize, warmup_fraction: f64) -> Vec<SchedulePoint> {
    let peak = peak_iteration(total, warmup_fraction);
    (0..total)
        .map(|i| {
            let t = if i <= peak {
                if peak == 0 {
                    1.0
                } else {
                    i as f64 / peak as f64
                }
            } else {
                1.0 - (i - peak) as f64 / (total - 1 - peak) as f64
            };
            SchedulePoint {
                iteration: i,
                lr: LR_MIN + (LR_MAX - LR_MIN) * t,
                momentum: MOMENTUM_MAX - (MOMENTUM_MAX - MOMENTUM_MIN) * t,
            }
        })
        .collect()
}

/// One `lr momentum` pair per line, in iteration order.
pub fn schedule_text(points: &[SchedulePoint]) -> String {
    let mut s = String::new();
    for p in points {
        let _ = writeln!(s, "{} {}", p.lr, p.momentum);
    }
    s
}
