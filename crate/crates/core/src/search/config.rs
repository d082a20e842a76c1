#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseMode {
    Off,
    Dirichlet,
    /// Uniform mixing instead of a Dirichlet draw, for reproducible runs.
    Constant,
}

/// Search constants and feature switches. Defaults follow the reference
/// engine settings.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub c_puct_init: f32,
    pub c_puct_base: f32,
    pub dirichlet_alpha: f32,
    pub dirichlet_mix: f32,
    pub virtual_loss: u32,
    pub q_init: f32,
    pub q_factor: f32,
    pub q_thresh_init: f32,
    pub q_thresh_max: f32,
    pub q_thresh_base: f32,
    pub u_min: f32,
    pub u_init: f32,
    pub u_base: f32,
    pub check_thresh: f32,
    pub check_factor: f32,
    pub temperature: f32,
    /// Full moves during which `temperature` applies; 0 means always.
    pub temperature_moves: u32,
    pub centipawn_lambda: f32,
    pub pv_depth: usize,
    pub workers: usize,
    pub batch_size: usize,
    pub enhance_checks: bool,
    pub fix_checkmates: bool,
    pub u_scaling: bool,
    pub q_selection: bool,
    pub q_pv: bool,
    pub transpositions: bool,
    pub reuse_tree: bool,
    pub noise: NoiseMode,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            c_puct_init: 2.5,
            c_puct_base: 19652.0,
            dirichlet_alpha: 0.2,
            dirichlet_mix: 0.25,
            virtual_loss: 3,
            q_init: -1.0,
            q_factor: 0.7,
            q_thresh_init: 0.5,
            q_thresh_max: 0.9,
            q_thresh_base: 1965.0,
            u_min: 0.25,
            u_init: 1.0,
            u_base: 1965.0,
            check_thresh: 0.1,
            check_factor: 0.5,
            temperature: 0.0,
            temperature_moves: 0,
            centipawn_lambda: 1.2,
            pv_depth: 5,
            workers: 1,
            batch_size: 8,
            enhance_checks: true,
            fix_checkmates: true,
            u_scaling: true,
            q_selection: true,
            q_pv: true,
            transpositions: true,
            reuse_tree: true,
            noise: NoiseMode::Dirichlet,
            seed: 0,
        }
    }
}

impl SearchConfig {
    /// Single worker, fixed batch, constant noise: bit-identical reruns.
    pub fn deterministic() -> SearchConfig {
        SearchConfig {
            noise: NoiseMode::Constant,
            workers: 1,
            batch_size: 8,
            ..SearchConfig::default()
        }
    }

    /// Plain visit-count selection with none of the refinements.
    pub fn visits_only() -> SearchConfig {
        SearchConfig {
            q_selection: false,
            q_pv: false,
            enhance_checks: false,
            u_scaling: false,
            ..SearchConfig::default()
        }
    }

    /// Temperature in effect at `fullmove`.
    pub fn temperature_at(&self, fullmove: u32) -> f32 {
        if self.temperature_moves == 0 || fullmove <= self.temperature_moves {
            self.temperature
        } else {
            0.0
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("c_puct_init", self.c_puct_init),
            ("c_puct_base", self.c_puct_base),
            ("dirichlet_alpha", self.dirichlet_alpha),
            ("q_thresh_base", self.q_thresh_base),
            ("u_min", self.u_min),
            ("u_init", self.u_init),
            ("u_base", self.u_base),
            ("centipawn_lambda", self.centipawn_lambda),
        ];
        for (name, v) in positive {
            if v.is_nan() || v <= 0.0 {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        if !(0.0..=1.0).contains(&self.dirichlet_mix) {
            return Err(format!("dirichlet_mix must lie in [0, 1], got {}", self.dirichlet_mix));
        }
        if !(0.0..=1.0).contains(&self.q_factor) {
            return Err(format!("q_factor must lie in [0, 1], got {}", self.q_factor));
        }
        if self.temperature < 0.0 {
            return Err("temperature must be non-negative".into());
        }
        if self.centipawn_lambda <= 1.0 {
            return Err("centipawn_lambda must exceed 1".into());
        }
        if self.workers == 0 || self.batch_size == 0 {
            return Err("workers and batch_size must be at least 1".into());
        }
        Ok(())
    }
}
