//! Top-X accuracy, rank histograms and split reports.

mod phase;
mod report;
mod svg;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use phase::{classify_phase, PhaseLabel};
pub use report::{split_report, Report, ReportRow, Split, SplitHistogram, CSV_HEADER};
pub use svg::render_histograms;

use crate::feasibility::{evaluate_scenario, FeasibilityError, ModelParams, Mode, Scenario};

/// Bins in a rank histogram.
pub const HISTOGRAM_BINS: usize = 9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("X must be at least 1")]
    TopXZero,
    #[error("insufficient defenders for phase clustering ({0}, need 3)")]
    InsufficientDefenders(usize),
    #[error("no events")]
    NoEvents,
    #[error("event {index}: {source}")]
    Scenario {
        index: usize,
        #[source]
        source: FeasibilityError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Successful,
    Unsuccessful,
}

impl Outcome {
    pub fn from_flag(success: bool) -> Self {
        if success {
            Outcome::Successful
        } else {
            Outcome::Unsuccessful
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankResult {
    pub scenario_index: usize,
    /// 1 = best.
    pub rank: usize,
    pub success: Option<bool>,
}

/// Rank of the ground-truth receiver in every scenario that has one.
pub fn rank_results(
    scenarios: &[Scenario],
    params: &ModelParams,
    mode: Mode,
) -> Result<Vec<RankResult>, EvalError> {
    let mut out = Vec::with_capacity(scenarios.len());
    for (index, s) in scenarios.iter().enumerate() {
        let Some(gt) = &s.ground_truth_receiver else {
            continue;
        };
        let eval = evaluate_scenario(s, params, mode).map_err(|source| EvalError::Scenario { index, source })?;
        let rank = eval.rank_of(gt).ok_or(EvalError::Scenario {
            index,
            source: FeasibilityError::UnknownReceiver(gt.clone()),
        })?;
        out.push(RankResult {
            scenario_index: index,
            rank,
            success: s.success,
        });
    }
    Ok(out)
}

/// Per-outcome Top-X fractions. A class with no events is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopX {
    pub succ: Option<f64>,
    pub nsucc: Option<f64>,
    pub all: Option<f64>,
}

fn fraction<'a>(results: impl Iterator<Item = &'a RankResult>, x: usize) -> Option<f64> {
    let (hits, n) = results.fold((0usize, 0usize), |(h, n), r| (h + usize::from(r.rank <= x), n + 1));
    (n > 0).then(|| hits as f64 / n as f64)
}

pub fn topx_accuracy(results: &[RankResult], x: usize) -> Result<TopX, EvalError> {
    if x == 0 {
        return Err(EvalError::TopXZero);
    }
    Ok(TopX {
        succ: fraction(results.iter().filter(|r| r.success == Some(true)), x),
        nsucc: fraction(results.iter().filter(|r| r.success == Some(false)), x),
        all: fraction(results.iter(), x),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankHistogram {
    pub outcome: Outcome,
    /// `bins[n - 1]` counts results with rank `n`.
    pub bins: [u64; HISTOGRAM_BINS],
    /// Results ranked below the last bin.
    pub overflow: u64,
}

impl RankHistogram {
    pub fn new(outcome: Outcome) -> Self {
        Self {
            outcome,
            bins: [0; HISTOGRAM_BINS],
            overflow: 0,
        }
    }

    pub fn total(&self) -> u64 {
        self.bins.iter().sum::<u64>() + self.overflow
    }

    fn add(&mut self, rank: usize) {
        match rank.checked_sub(1).and_then(|i| self.bins.get_mut(i)) {
            Some(b) => *b += 1,
            None => self.overflow += 1,
        }
    }
}

/// Histograms of successful and unsuccessful passes. Results without an
/// outcome flag are left out of both.
pub fn rank_histogram(results: &[RankResult]) -> (RankHistogram, RankHistogram) {
    let mut succ = RankHistogram::new(Outcome::Successful);
    let mut nsucc = RankHistogram::new(Outcome::Unsuccessful);
    for r in results {
        match r.success {
            Some(true) => succ.add(r.rank),
            Some(false) => nsucc.add(r.rank),
            None => {}
        }
    }
    (succ, nsucc)
}
