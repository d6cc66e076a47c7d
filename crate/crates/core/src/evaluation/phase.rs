use std::fmt;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::feasibility::{Role, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseLabel {
    BuildUp,
    Progression,
    Finalization,
}

impl PhaseLabel {
    pub const ALL: [PhaseLabel; 3] = [PhaseLabel::BuildUp, PhaseLabel::Progression, PhaseLabel::Finalization];

    pub fn as_str(self) -> &'static str {
        match self {
            PhaseLabel::BuildUp => "build_up",
            PhaseLabel::Progression => "progression",
            PhaseLabel::Finalization => "finalization",
        }
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Deterministic 1-D k-means with three centers seeded at the 1/6, 1/2 and
/// 5/6 quantiles. Returns the centers in ascending order.
pub(crate) fn three_row_centers(depths: &[f64]) -> [f64; 3] {
    let mut sorted = depths.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut centers = [1.0 / 6.0, 0.5, 5.0 / 6.0].map(|q| quantile(&sorted, q));
    let mut assignment = vec![usize::MAX; sorted.len()];
    for _ in 0..100 {
        let mut changed = false;
        for (a, &d) in assignment.iter_mut().zip(&sorted) {
            let best = (0..3)
                .min_by(|&i, &j| (d - centers[i]).abs().total_cmp(&(d - centers[j]).abs()))
                .expect("three centers");
            if *a != best {
                *a = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        for (k, c) in centers.iter_mut().enumerate() {
            let members: Vec<f64> = sorted
                .iter()
                .zip(&assignment)
                .filter(|(_, &a)| a == k)
                .map(|(d, _)| *d)
                .collect();
            if !members.is_empty() {
                *c = members.iter().sum::<f64>() / members.len() as f64;
            }
        }
    }
    centers.sort_by(f64::total_cmp);
    centers
}

/// Game phase from the passer's depth against the clustered defensive rows.
/// Defenders labeled goalkeeper are ignored.
pub fn classify_phase(scenario: &Scenario) -> Result<PhaseLabel, EvalError> {
    let field = &scenario.field;
    let depths: Vec<f64> = scenario
        .defenders
        .iter()
        .filter(|d| d.role != Some(Role::Goalkeeper))
        .map(|d| field.depth(d.position))
        .collect();
    if depths.len() < 3 {
        return Err(EvalError::InsufficientDefenders(depths.len()));
    }
    let [first, _, last] = three_row_centers(&depths);
    let passer = field.depth(scenario.passer.position);
    Ok(if passer < first {
        PhaseLabel::BuildUp
    } else if passer > last {
        PhaseLabel::Finalization
    } else {
        PhaseLabel::Progression
    })
}
