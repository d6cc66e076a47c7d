//! Seeded synthetic pass events.
//!
//! Both teams line up in three rows (4-3-3 outfield shape) around a random
//! block depth, with positional jitter. The defensive goalkeeper sits on its
//! goal line. A configurable share of defenders steps up to mark an
//! attacker. The ground truth is either the model's own best receiver
//! (`planted_best`) or a softmax draw over the combined feasibility.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use super::IoError;
use crate::feasibility::{evaluate_scenario, ModelParams, Mode, PlayerState, Role, Scenario};
use crate::geometry::{angle_of, normalize_degrees, FieldSpec, Point2};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_events: usize,
    /// Probability in `[0, 1]` that a defender marks an attacker closely.
    pub pressure: f64,
    /// Standard deviation of orientation noise, degrees.
    pub orientation_noise: f64,
    /// Ground truth is the argmax of `F` under default parameters.
    pub planted_best: bool,
    /// Softmax temperature over `F` when not planted.
    pub temperature: f64,
    pub field: FieldSpec,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_events: 100,
            pressure: 0.3,
            orientation_noise: 15.0,
            planted_best: true,
            temperature: 0.05,
            field: FieldSpec::default(),
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), IoError> {
        let bad = |m: &str| Err(IoError::Config(m.into()));
        if self.n_events == 0 {
            return bad("n_events must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.pressure) {
            return bad("pressure must lie in [0, 1]");
        }
        if !(self.orientation_noise.is_finite() && self.orientation_noise >= 0.0) {
            return bad("orientation noise must be non-negative");
        }
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return bad("temperature must be positive");
        }
        self.field.validate().map_err(|e| IoError::Config(e.to_string()))
    }
}

const ROWS: [(usize, Role); 3] = [(4, Role::Defender), (3, Role::Midfielder), (3, Role::Forward)];

fn round_to(v: f64, step: f64) -> f64 {
    (v / step).round() * step
}

fn orientation(deg: f64) -> f64 {
    // rounding can land on 360
    normalize_degrees(round_to(normalize_degrees(deg), 0.01))
}

struct Generator<'a> {
    cfg: &'a SynthConfig,
    rng: ChaCha8Rng,
    params: ModelParams,
}

impl Generator<'_> {
    fn jitter(&mut self, sd: f64) -> f64 {
        Normal::new(0.0, sd).expect("finite sd").sample(&mut self.rng)
    }

    fn place(&mut self, depth: f64, lane: f64) -> Point2 {
        let f = &self.cfg.field;
        let x = (depth + self.jitter(2.5)).clamp(1.0, f.length - 1.0);
        let y = (lane + self.jitter(2.5)).clamp(1.0, f.width - 1.0);
        let x = if f.attack_direction.sign() > 0.0 { x } else { f.length - x };
        Point2::new(round_to(x, 0.01), round_to(y, 0.01))
    }

    fn rows(&mut self, depths: [f64; 3]) -> Vec<(Point2, Role)> {
        let width = self.cfg.field.width;
        let mut out = Vec::new();
        for ((count, role), depth) in ROWS.iter().zip(depths) {
            for k in 0..*count {
                let lane = width * (k as f64 + 1.0) / (*count as f64 + 1.0);
                out.push((self.place(depth, lane), *role));
            }
        }
        out
    }

    fn event(&mut self) -> Scenario {
        let f = self.cfg.field;
        let block = self.rng.random_range(0.25..0.7) * f.length;
        let attack = self.rows([block - 22.0, block, block + 16.0]);
        let line = (block + self.rng.random_range(14.0..30.0)).min(f.length - 4.0);
        let mut defense = self.rows([line, line - 14.0, line - 28.0]);
        for (pos, _) in defense.iter_mut() {
            if self.rng.random_bool(self.cfg.pressure) {
                let target = attack[self.rng.random_range(0..attack.len())].0;
                let angle = self.rng.random_range(0.0..360.0);
                let dist = self.rng.random_range(1.5..5.0);
                let p = target.offset(angle, dist);
                *pos = Point2::new(round_to(p.x, 0.01), round_to(p.y, 0.01));
            }
        }
        let passer_idx = self.rng.random_range(0..attack.len());
        let passer_pos = attack[passer_idx].0;
        let mut receivers = Vec::with_capacity(attack.len() - 1);
        for (i, (pos, role)) in attack.iter().enumerate() {
            if i == passer_idx {
                continue;
            }
            let mut pos = *pos;
            if pos == passer_pos {
                pos.x += 0.5;
            }
            let facing = angle_of(pos, passer_pos).unwrap_or(0.0);
            let o = facing + self.rng.random_range(-100.0..100.0) + self.jitter_or_zero();
            receivers.push(PlayerState {
                id: format!("A{}", i + 1),
                position: pos,
                orientation: Some(orientation(o)),
                role: Some(*role),
            });
        }
        let target = receivers[self.rng.random_range(0..receivers.len())].position;
        let aim = angle_of(passer_pos, target).unwrap_or(0.0) + self.jitter_or_zero();
        let passer = PlayerState {
            id: format!("A{}", passer_idx + 1),
            position: passer_pos,
            orientation: Some(orientation(aim)),
            role: Some(attack[passer_idx].1),
        };
        let mut defenders: Vec<PlayerState> = defense
            .iter()
            .enumerate()
            .map(|(i, (pos, role))| PlayerState {
                id: format!("D{}", i + 1),
                position: *pos,
                orientation: None,
                role: Some(*role),
            })
            .collect();
        let goal_x = if f.attack_direction.sign() > 0.0 { f.length - 0.5 } else { 0.5 };
        defenders.push(PlayerState {
            id: "GK".into(),
            position: Point2::new(goal_x, round_to(f.width / 2.0 + self.jitter(1.0), 0.01)),
            orientation: None,
            role: Some(Role::Goalkeeper),
        });

        let mut scenario = Scenario {
            field: f,
            passer,
            receivers,
            defenders,
            ground_truth_receiver: None,
            success: None,
        };
        let eval = evaluate_scenario(&scenario, &self.params, Mode::F).expect("generated scenario is valid");
        if self.cfg.planted_best {
            scenario.ground_truth_receiver = Some(eval.best().to_string());
            scenario.success = Some(true);
        } else {
            let scores: Vec<f64> = eval.breakdowns().map(|b| b.f.unwrap_or(0.0)).collect();
            let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let weights: Vec<f64> = scores.iter().map(|s| ((s - top) / self.cfg.temperature).exp()).collect();
            let total: f64 = weights.iter().sum();
            let mut u = self.rng.random_range(0.0..total);
            let mut pick = weights.len() - 1;
            for (i, w) in weights.iter().enumerate() {
                if u < *w {
                    pick = i;
                    break;
                }
                u -= w;
            }
            let ratio = if top > 0.0 { scores[pick] / top } else { 0.0 };
            scenario.ground_truth_receiver = Some(scenario.receivers[pick].id.clone());
            scenario.success = Some(self.rng.random_bool((0.25 + 0.7 * ratio).clamp(0.0, 1.0)));
        }
        scenario
    }

    fn jitter_or_zero(&mut self) -> f64 {
        if self.cfg.orientation_noise > 0.0 {
            self.jitter(self.cfg.orientation_noise)
        } else {
            0.0
        }
    }
}

/// Deterministic in `config.seed`.
pub fn generate_synthetic(config: &SynthConfig) -> Result<Vec<Scenario>, IoError> {
    config.validate()?;
    let mut generator = Generator {
        cfg: config,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        params: ModelParams::default(),
    };
    Ok((0..config.n_events).map(|_| generator.event()).collect())
}
