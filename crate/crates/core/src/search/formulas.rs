//! Closed-form pieces of the search: exploration constants, thresholds,
//! prior shaping, move selection from root statistics and score conversion.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::config::{NoiseMode, SearchConfig};

pub fn cpuct_for(total_visits: f64, config: &SearchConfig) -> f64 {
    let base = config.c_puct_base as f64;
    ((total_visits + base + 1.0) / base).ln() + config.c_puct_init as f64
}

pub fn u_divisor_for(total_visits: f64, config: &SearchConfig) -> f64 {
    let (min, init) = (config.u_min as f64, config.u_init as f64);
    min - (-total_visits / config.u_base as f64).exp() * (min - init)
}

pub fn q_thresh_for(total_visits: f64, config: &SearchConfig) -> f64 {
    let (max, init) = (config.q_thresh_max as f64, config.q_thresh_init as f64);
    max - (-total_visits / config.q_thresh_base as f64).exp() * (max - init)
}

/// Pawn units for a value in (-1, 1).
pub fn value_to_cp(v: f32, config: &SearchConfig) -> f32 {
    if v == 0.0 {
        return 0.0;
    }
    let a = v.abs().min(1.0 - 1e-7) as f64;
    let cp = -(1.0 - a).ln() / (config.centipawn_lambda as f64).ln();
    (v.signum() as f64 * cp) as f32
}

/// Mixes exploration noise into root priors. A single move is left alone.
pub fn apply_root_noise<R: Rng + ?Sized>(priors: &mut [f32], config: &SearchConfig, rng: &mut R) {
    let n = priors.len();
    let mix = config.dirichlet_mix;
    if n < 2 || mix == 0.0 {
        return;
    }
    let noise: Vec<f64> = match config.noise {
        NoiseMode::Off => return,
        NoiseMode::Constant => vec![1.0 / n as f64; n],
        NoiseMode::Dirichlet => {
            let gamma = Gamma::new(config.dirichlet_alpha as f64, 1.0).expect("alpha is positive");
            let draws: Vec<f64> = (0..n).map(|_| gamma.sample(rng)).collect();
            let sum: f64 = draws.iter().sum();
            if sum > 0.0 {
                draws.iter().map(|d| d / sum).collect()
            } else {
                vec![1.0 / n as f64; n]
            }
        }
    };
    for (p, e) in priors.iter_mut().zip(noise) {
        *p = ((1.0 - mix) as f64 * *p as f64 + mix as f64 * e) as f32;
    }
}

/// Raises checking moves with a small prior by `check_factor * max prior`,
/// then renormalizes.
pub fn enhance_checks(priors: &mut [f32], is_check: &[bool], config: &SearchConfig) {
    let max = priors.iter().copied().fold(0.0f32, f32::max);
    let mut changed = false;
    for (p, &check) in priors.iter_mut().zip(is_check) {
        if check && *p < config.check_thresh {
            *p += config.check_factor * max;
            changed = true;
        }
    }
    if changed {
        normalize(priors);
    }
}

pub fn normalize(v: &mut [f32]) {
    let sum: f64 = v.iter().map(|&x| x as f64).sum();
    if sum > 0.0 {
        for x in v.iter_mut() {
            *x = (*x as f64 / sum) as f32;
        }
    } else if !v.is_empty() {
        let u = 1.0 / v.len() as f32;
        v.fill(u);
    }
}

/// Root move scores from visit counts and Q-values. Children below
/// `q_thresh * max visits` get no Q credit. The visit component is raised
/// to `1/temperature` when the temperature is positive. Returns a
/// distribution over the children.
pub fn blend_policy(visits: &[u32], q: &[f32], q_thresh: f64, temperature: f32, config: &SearchConfig) -> Vec<f32> {
    let n = visits.len();
    if n == 0 {
        return Vec::new();
    }
    let visit_part: Vec<f64> = if temperature > 0.0 {
        let max = visits.iter().copied().max().unwrap_or(0).max(1) as f64;
        // Scale by the max first so large exponents stay finite.
        let powered: Vec<f64> = visits
            .iter()
            .map(|&v| (v as f64 / max).powf(1.0 / temperature as f64))
            .collect();
        let sum: f64 = powered.iter().sum();
        powered.iter().map(|p| if sum > 0.0 { p / sum } else { 0.0 }).collect()
    } else {
        let sum: f64 = visits.iter().map(|&v| v as f64).sum();
        visits
            .iter()
            .map(|&v| if sum > 0.0 { v as f64 / sum } else { 0.0 })
            .collect()
    };
    if !config.q_selection || config.q_factor == 0.0 {
        return visit_part.iter().map(|&x| x as f32).collect();
    }
    let max_visits = visits.iter().copied().max().unwrap_or(0) as f64;
    let gate = q_thresh * max_visits;
    let qf = config.q_factor as f64;
    let mut scores: Vec<f64> = (0..n)
        .map(|i| {
            let q_scaled = if (visits[i] as f64) < gate || visits[i] == 0 {
                0.0
            } else {
                (q[i] as f64 + 1.0) / 2.0
            };
            (1.0 - qf) * visit_part[i] + qf * q_scaled
        })
        .collect();
    let sum: f64 = scores.iter().sum();
    if sum > 0.0 {
        for s in scores.iter_mut() {
            *s /= sum;
        }
    }
    scores.iter().map(|&x| x as f32).collect()
}

/// Index of the largest score; the earliest index wins ties.
pub fn argmax(scores: &[f32]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        if best.is_none_or(|b| s > scores[b]) {
            best = Some(i);
        }
    }
    best
}
