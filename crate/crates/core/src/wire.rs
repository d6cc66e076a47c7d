//! JSON request and response bodies of the HTTP service.
//!
//! A request's `scenario` is exactly one scenario-file record, so files and
//! requests share one validation path. Geometry in responses is expressed in
//! the passer-centered frame the scores were computed in; add
//! `frame_origin` to draw it on the pitch.

use serde::{Deserialize, Serialize};

use crate::epv::{EpvEvaluation, EpvReceiver, RegionSize, ValueKind};
use crate::feasibility::{FeasibilityBreakdown, Mode, Scenario, ScenarioEvaluation};
use crate::geometry::{ConvexPolygon, FieldSpec, Point2};
use crate::io::{LoadOptions, ScenarioRecord};

fn default_mode() -> Mode {
    Mode::F
}

fn default_kind() -> ValueKind {
    ValueKind::PassProbability
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioRequest {
    pub scenario: ScenarioRecord,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    /// Name of a preloaded value map; adds `V * F_o` values to the response.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpvCombineRequest {
    pub scenario: ScenarioRecord,
    pub map: String,
    #[serde(default = "default_kind")]
    pub kind: ValueKind,
    /// Disc radius as a fraction of the field length (default `5 / W`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Tube width as a fraction of the field length (default `2 / W`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
}

impl EpvCombineRequest {
    pub fn region_size(&self, default: RegionSize) -> RegionSize {
        RegionSize {
            q: self.q.unwrap_or(default.q),
            s: self.s.unwrap_or(default.s),
        }
    }
}

/// Converts a wire record into a scenario, collecting ingestion warnings.
pub fn scenario_from_record(record: &ScenarioRecord, options: &LoadOptions) -> Result<(Scenario, Vec<String>), String> {
    let mut warnings = Vec::new();
    let (scenario, _) = record.to_scenario(&FieldSpec::default(), options, &mut warnings)?;
    Ok((scenario, warnings))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceiverView {
    #[serde(flatten)]
    pub breakdown: FeasibilityBreakdown,
    pub rank: usize,
    /// Normalized pass length.
    pub distance: f64,
    pub passer_neighbors: Vec<String>,
    pub receiver_neighbors: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projected_receiver: Option<Point2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receiver_triangle: Option<[Point2; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intersection: Option<ConvexPolygon>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationResponse {
    pub mode: Mode,
    pub ranking: Vec<String>,
    /// Passer position; geometry below is relative to it.
    pub frame_origin: Point2,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub passer_triangle: Option<[Point2; 3]>,
    pub receivers: Vec<ReceiverView>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epv: Option<EpvCombineResponse>,
    pub warnings: Vec<String>,
}

impl EvaluationResponse {
    pub fn from_evaluation(scenario: &Scenario, eval: &ScenarioEvaluation, warnings: Vec<String>) -> Self {
        let receivers = eval
            .receivers
            .iter()
            .map(|r| {
                let geom = r.orientation_geometry.as_ref();
                ReceiverView {
                    breakdown: r.breakdown.clone(),
                    rank: eval.rank_of(&r.breakdown.receiver_id).expect("ranked"),
                    distance: r.distance,
                    passer_neighbors: r.passer_neighbors.iter().map(|n| n.id.clone()).collect(),
                    receiver_neighbors: r.receiver_neighbors.iter().map(|n| n.id.clone()).collect(),
                    projected_receiver: geom.map(|g| g.projected_receiver),
                    receiver_triangle: geom.map(|g| g.receiver_triangle.vertices()),
                    intersection: geom.map(|g| g.intersection.clone()),
                }
            })
            .collect();
        let passer_triangle = eval
            .receivers
            .iter()
            .find_map(|r| r.orientation_geometry.as_ref())
            .map(|g| g.passer_triangle.vertices());
        Self {
            mode: eval.mode,
            ranking: eval.ranking.clone(),
            frame_origin: scenario.passer.position,
            passer_triangle,
            receivers,
            epv: None,
            warnings,
        }
    }

    pub fn receiver(&self, id: &str) -> Option<&ReceiverView> {
        self.receivers.iter().find(|r| r.breakdown.receiver_id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpvCombineResponse {
    pub kind: ValueKind,
    pub map: String,
    pub ranking: Vec<String>,
    pub value_ranking: Vec<String>,
    pub receivers: Vec<EpvReceiver>,
}

impl EpvCombineResponse {
    pub fn new(map: impl Into<String>, eval: EpvEvaluation) -> Self {
        Self {
            kind: eval.kind,
            map: map.into(),
            ranking: eval.ranking,
            value_ranking: eval.value_ranking,
            receivers: eval.receivers,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapsResponse {
    pub maps: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}
