use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{classify_phase, rank_histogram, topx_accuracy, EvalError, RankHistogram, RankResult};
use crate::feasibility::{evaluate_scenario, ModelParams, Mode, Scenario};

pub const CSV_HEADER: &str = "split_class,mode,top1_succ,top1_nsucc,top3_succ,top3_nsucc,n_events";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    None,
    /// Keyed on the passer's role.
    Position,
    Phase,
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "all" => Ok(Split::None),
            "position" | "role" => Ok(Split::Position),
            "phase" => Ok(Split::Phase),
            _ => Err(format!("unknown split `{s}` (expected none, position or phase)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub split_class: String,
    pub mode: Mode,
    pub top1_succ: Option<f64>,
    pub top1_nsucc: Option<f64>,
    pub top3_succ: Option<f64>,
    pub top3_nsucc: Option<f64>,
    pub n_events: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitHistogram {
    pub split_class: String,
    pub mode: Mode,
    pub successful: RankHistogram,
    pub unsuccessful: RankHistogram,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub split: Split,
    pub rows: Vec<ReportRow>,
    pub histograms: Vec<SplitHistogram>,
    pub warnings: Vec<String>,
}

fn cell(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.6}")).unwrap_or_default()
}

impl Report {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.split_class,
                r.mode,
                cell(r.top1_succ),
                cell(r.top1_nsucc),
                cell(r.top3_succ),
                cell(r.top3_nsucc),
                r.n_events
            )
            .expect("write to string");
        }
        out
    }

    pub fn row(&self, split_class: &str, mode: Mode) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.split_class == split_class && r.mode == mode)
    }
}

fn class_of(scenario: &Scenario, split: Split) -> Result<(u8, String), String> {
    match split {
        Split::None => Ok((0, "all".into())),
        Split::Position => scenario
            .passer
            .role
            .map(|r| (r as u8, r.as_str().to_string()))
            .ok_or_else(|| format!("passer `{}` has no role", scenario.passer.id)),
        Split::Phase => classify_phase(scenario)
            .map(|p| (p as u8, p.as_str().to_string()))
            .map_err(|e| e.to_string()),
    }
}

/// Top-1/Top-3 accuracy and rank histograms per split class and mode.
/// Events without a ground truth, or without the metadata the split needs,
/// are excluded with a warning.
pub fn split_report(scenarios: &[Scenario], params: &ModelParams, modes: &[Mode], split: Split) -> Result<Report, EvalError> {
    if scenarios.is_empty() {
        return Err(EvalError::NoEvents);
    }
    let mut warnings = Vec::new();
    // (order key, class name) -> scenario indices
    let mut classes: BTreeMap<(u8, String), Vec<usize>> = BTreeMap::new();
    let mut no_truth = 0;
    for (i, s) in scenarios.iter().enumerate() {
        if s.ground_truth_receiver.is_none() {
            no_truth += 1;
            continue;
        }
        match class_of(s, split) {
            Ok(key) => classes.entry(key).or_default().push(i),
            Err(e) => warnings.push(format!("event {i} excluded from {split:?} split: {e}")),
        }
    }
    if no_truth > 0 {
        warnings.push(format!("{no_truth} events without ground truth skipped"));
    }

    let mut ranks: BTreeMap<Mode, Vec<Option<RankResult>>> = BTreeMap::new();
    for &mode in modes {
        let mut per_event = vec![None; scenarios.len()];
        for idx in classes.values().flatten() {
            let s = &scenarios[*idx];
            let gt = s.ground_truth_receiver.as_deref().expect("filtered above");
            let eval = evaluate_scenario(s, params, mode).map_err(|source| EvalError::Scenario { index: *idx, source })?;
            per_event[*idx] = eval.rank_of(gt).map(|rank| RankResult {
                scenario_index: *idx,
                rank,
                success: s.success,
            });
        }
        ranks.insert(mode, per_event);
    }

    let mut rows = Vec::new();
    let mut histograms = Vec::new();
    for ((_, name), members) in &classes {
        for &mode in modes {
            let results: Vec<RankResult> = members.iter().filter_map(|i| ranks[&mode][*i]).collect();
            let top1 = topx_accuracy(&results, 1)?;
            let top3 = topx_accuracy(&results, 3)?;
            rows.push(ReportRow {
                split_class: name.clone(),
                mode,
                top1_succ: top1.succ,
                top1_nsucc: top1.nsucc,
                top3_succ: top3.succ,
                top3_nsucc: top3.nsucc,
                n_events: results.len(),
            });
            let (successful, unsuccessful) = rank_histogram(&results);
            histograms.push(SplitHistogram {
                split_class: name.clone(),
                mode,
                successful,
                unsuccessful,
            });
        }
    }
    Ok(Report {
        split,
        rows,
        histograms,
        warnings,
    })
}
