//! Per-receiver pass feasibility.
//!
//! Three independent scores are computed for every candidate receiver at the
//! instant the passer kicks the ball:
//!
//! * orientation (`F_o`): weighted overlap of the passer's and the receiver's
//!   view triangles after moving every receiver onto a circle of radius `Z`
//!   around the passer,
//! * defenders (`F_d = F_dP * F_dR`): pressure from the `J` closest defenders
//!   around the passer and, disjointly, around the receiver, where closeness
//!   is a distance weighted by the angular offset from the passing line,
//! * proximity (`F_p`): exponential decay with the normalized pass length.
//!
//! Their product is the combined feasibility `F`; `F_pd = F_p * F_d` is the
//! orientation-free baseline.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    angle_of, angular_diff, build_view_triangle, integrate_pair_weights, intersect_convex,
    ConvexPolygon, FieldSpec, GeometryError, Point2, ViewTriangle,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeasibilityError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("coincident players: receiver `{0}` shares the passer position")]
    CoincidentPlayers(String),
    #[error("missing orientation for player `{0}`")]
    MissingOrientation(String),
    #[error("unknown receiver `{0}`")]
    UnknownReceiver(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid model parameter: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Defender,
    Midfielder,
    Forward,
    Goalkeeper,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Defender => "defender",
            Role::Midfielder => "midfielder",
            Role::Forward => "forward",
            Role::Goalkeeper => "goalkeeper",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerState {
    pub id: String,
    pub position: Point2,
    /// Body orientation in degrees; optional for defenders.
    pub orientation: Option<f64>,
    pub role: Option<Role>,
}

impl PlayerState {
    pub fn new(id: impl Into<String>, position: Point2) -> Self {
        Self {
            id: id.into(),
            position,
            orientation: None,
            role: None,
        }
    }

    pub fn with_orientation(mut self, degrees: f64) -> Self {
        self.orientation = Some(degrees);
        self
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = Some(role);
        self
    }

    fn require_orientation(&self) -> Result<f64, FeasibilityError> {
        self.orientation
            .ok_or_else(|| FeasibilityError::MissingOrientation(self.id.clone()))
    }
}

/// One pass event frozen at kick time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub field: FieldSpec,
    pub passer: PlayerState,
    pub receivers: Vec<PlayerState>,
    pub defenders: Vec<PlayerState>,
    pub ground_truth_receiver: Option<String>,
    pub success: Option<bool>,
}

pub const MAX_RECEIVERS: usize = 10;
pub const MAX_DEFENDERS: usize = 11;

impl Scenario {
    pub fn validate(&self) -> Result<(), FeasibilityError> {
        let invalid = |m: String| Err(FeasibilityError::InvalidScenario(m));
        self.field.validate()?;
        if self.receivers.is_empty() {
            return invalid("no receivers".into());
        }
        if self.receivers.len() > MAX_RECEIVERS {
            return invalid(format!("{} receivers (max {MAX_RECEIVERS})", self.receivers.len()));
        }
        if self.defenders.len() > MAX_DEFENDERS {
            return invalid(format!("{} defenders (max {MAX_DEFENDERS})", self.defenders.len()));
        }
        let mut ids = BTreeSet::new();
        for p in self.players() {
            if !p.position.is_finite() {
                return invalid(format!("player `{}` has a non-finite position", p.id));
            }
            if let Some(o) = p.orientation {
                if !o.is_finite() {
                    return invalid(format!("player `{}` has a non-finite orientation", p.id));
                }
            }
            if !ids.insert(p.id.as_str()) {
                return invalid(format!("duplicate player id `{}`", p.id));
            }
        }
        if let Some(gt) = &self.ground_truth_receiver {
            if self.receiver(gt).is_none() {
                return invalid(format!("ground truth `{gt}` is not among the receivers"));
            }
        }
        Ok(())
    }

    pub fn players(&self) -> impl Iterator<Item = &PlayerState> {
        std::iter::once(&self.passer)
            .chain(self.receivers.iter())
            .chain(self.defenders.iter())
    }

    pub fn receiver(&self, id: &str) -> Option<&PlayerState> {
        self.receivers.iter().find(|r| r.id == id)
    }

    /// Applies `f` to every position and `g` to every orientation.
    pub fn map_players(&self, f: impl Fn(Point2) -> Point2, g: impl Fn(f64) -> f64) -> Scenario {
        let map = |p: &PlayerState| PlayerState {
            position: f(p.position),
            orientation: p.orientation.map(&g),
            ..p.clone()
        };
        Scenario {
            field: self.field,
            passer: map(&self.passer),
            receivers: self.receivers.iter().map(map).collect(),
            defenders: self.defenders.iter().map(map).collect(),
            ground_truth_receiver: self.ground_truth_receiver.clone(),
            success: self.success,
        }
    }
}

/// Model constants. `c` is derived from the others on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    psi: f64,
    z: f64,
    j: usize,
    fo_dist_scale: f64,
    c: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::new(30.0, 1.0, 3).expect("default parameters are valid")
    }
}

impl ModelParams {
    /// View half-angle `psi` (degrees), projection radius `z` and neighbor
    /// count `j`. The integrand distance scale is `2z`.
    pub fn new(psi: f64, z: f64, j: usize) -> Result<Self, FeasibilityError> {
        Self::with_dist_scale(psi, z, j, 2.0 * z)
    }

    pub fn with_dist_scale(psi: f64, z: f64, j: usize, fo_dist_scale: f64) -> Result<Self, FeasibilityError> {
        let bad = |m: &str| Err(FeasibilityError::InvalidParams(m.into()));
        if !(psi > 0.0 && psi < 90.0) {
            return bad("psi must lie in (0, 90)");
        }
        if !(z.is_finite() && z > 0.0) {
            return bad("Z must be positive");
        }
        if j == 0 {
            return bad("J must be at least 1");
        }
        if !(fo_dist_scale.is_finite() && fo_dist_scale > 0.0) {
            return bad("distance scale must be positive");
        }
        let mut params = Self {
            psi,
            z,
            j,
            fo_dist_scale,
            c: 1.0,
        };
        params.c = params.raw_orientation_integral(0.0, Point2::new(z, 0.0), 180.0)?.integral;
        if !(params.c > 0.0) {
            return bad("normalizing constant is not positive");
        }
        Ok(params)
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }
    pub fn z(&self) -> f64 {
        self.z
    }
    pub fn j(&self) -> usize {
        self.j
    }
    pub fn fo_dist_scale(&self) -> f64 {
        self.fo_dist_scale
    }
    /// Normalizing constant: the orientation integral of the head-on
    /// configuration (receiver straight ahead on the circle, facing back).
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Unnormalized orientation integral in the passer-centered frame.
    fn raw_orientation_integral(
        &self,
        passer_orientation: f64,
        receiver: Point2,
        receiver_orientation: f64,
    ) -> Result<OrientationGeometry, FeasibilityError> {
        let passer_triangle = build_view_triangle(Point2::ORIGIN, passer_orientation, self.psi, 2.0 * self.z)?;
        let receiver_triangle = build_view_triangle(receiver, receiver_orientation, self.psi, self.z)?;
        let intersection = intersect_convex(&passer_triangle.polygon(), &receiver_triangle.polygon());
        let integral = integrate_pair_weights(&intersection, Point2::ORIGIN, receiver, self.fo_dist_scale);
        Ok(OrientationGeometry {
            projected_receiver: receiver,
            passer_triangle,
            receiver_triangle,
            intersection,
            integral,
        })
    }
}

/// Geometry behind one `F_o` value, in the passer-centered projected frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrientationGeometry {
    pub projected_receiver: Point2,
    pub passer_triangle: ViewTriangle,
    pub receiver_triangle: ViewTriangle,
    pub intersection: ConvexPolygon,
    pub integral: f64,
}

impl OrientationGeometry {
    /// Maps the projected frame back to field coordinates (translation only).
    pub fn to_field(&self, passer: Point2) -> OrientationGeometry {
        let shift = |t: &ViewTriangle| ViewTriangle {
            apex: t.apex.add(passer),
            ..*t
        };
        OrientationGeometry {
            projected_receiver: self.projected_receiver.add(passer),
            passer_triangle: shift(&self.passer_triangle),
            receiver_triangle: shift(&self.receiver_triangle),
            intersection: self.intersection.map_points(|p| p.add(passer)),
            integral: self.integral,
        }
    }
}

/// Places every receiver at distance `z` from the passer, keeping bearings.
/// Returned points are in field coordinates.
pub fn project_to_circle(
    passer: &PlayerState,
    receivers: &[PlayerState],
    z: f64,
) -> Result<Vec<Point2>, FeasibilityError> {
    receivers
        .iter()
        .map(|r| project_one(passer, r, z).map(|local| local.add(passer.position)))
        .collect()
}

/// Projected receiver relative to the passer.
fn project_one(passer: &PlayerState, receiver: &PlayerState, z: f64) -> Result<Point2, FeasibilityError> {
    let d = receiver.position.sub(passer.position);
    let len = d.x.hypot(d.y);
    if len == 0.0 {
        return Err(FeasibilityError::CoincidentPlayers(receiver.id.clone()));
    }
    Ok(d.scale(z / len))
}

/// `F_o` with the geometry used to compute it.
pub fn orientation_feasibility_detailed(
    passer: &PlayerState,
    receiver: &PlayerState,
    params: &ModelParams,
) -> Result<(f64, OrientationGeometry), FeasibilityError> {
    let phi_p = passer.require_orientation()?;
    let phi_r = receiver.require_orientation()?;
    let local = project_one(passer, receiver, params.z)?;
    let geom = params.raw_orientation_integral(phi_p, local, phi_r)?;
    let value = (geom.integral / params.c).clamp(0.0, 1.0);
    Ok((value, geom))
}

pub fn orientation_feasibility(
    passer: &PlayerState,
    receiver: &PlayerState,
    params: &ModelParams,
) -> Result<f64, FeasibilityError> {
    orientation_feasibility_detailed(passer, receiver, params).map(|(v, _)| v)
}

/// Angular pressure weight of a defender relative to the passing line.
pub fn defender_weight(beta_pd: f64, beta_pr: f64) -> f64 {
    let alpha = angular_diff(beta_pd, beta_pr);
    if alpha < 22.5 {
        0.25
    } else if alpha < 45.0 {
        0.5
    } else {
        2.0
    }
}

/// A defender considered around some anchor player.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Neighbor {
    pub id: String,
    /// Normalized distance to the anchor.
    pub distance: f64,
    pub weight: f64,
}

impl Neighbor {
    pub fn weighted_distance(&self) -> f64 {
        self.weight * self.distance
    }
}

/// Pressure score from the `J` nearest defenders (by weighted distance)
/// around `anchor`, with angles compared to the pass bearing.
fn defense_score<'a>(
    field: &FieldSpec,
    anchor: Point2,
    pass_bearing: f64,
    candidates: impl Iterator<Item = &'a PlayerState>,
    j: usize,
) -> (f64, Vec<Neighbor>) {
    let mut all: Vec<Neighbor> = candidates
        .map(|d| {
            let distance = field.normalized_distance(anchor, d.position);
            // a defender standing on the anchor counts as sitting on the passing line
            let weight = angle_of(anchor, d.position)
                .map(|b| defender_weight(b, pass_bearing))
                .unwrap_or(0.25);
            Neighbor {
                id: d.id.clone(),
                distance,
                weight,
            }
        })
        .collect();
    all.sort_by(|a, b| {
        a.weighted_distance()
            .total_cmp(&b.weighted_distance())
            .then(a.distance.total_cmp(&b.distance))
            .then_with(|| a.id.cmp(&b.id))
    });
    all.truncate(j);
    if all.is_empty() {
        return (1.0, all);
    }
    let m = all.len() as f64;
    let pressure: f64 = all.iter().map(|n| n.weight * (1.0 - n.distance).max(0.0)).sum();
    ((-pressure / m).exp(), all)
}

fn receiver_and_bearing<'a>(
    scenario: &'a Scenario,
    receiver_id: &str,
) -> Result<(&'a PlayerState, f64), FeasibilityError> {
    let receiver = scenario
        .receiver(receiver_id)
        .ok_or_else(|| FeasibilityError::UnknownReceiver(receiver_id.to_string()))?;
    let bearing = angle_of(scenario.passer.position, receiver.position)
        .map_err(|_| FeasibilityError::CoincidentPlayers(receiver.id.clone()))?;
    Ok((receiver, bearing))
}

/// `F_dP` and the defenders selected around the passer.
pub fn passer_defense_feasibility(
    scenario: &Scenario,
    receiver_id: &str,
    params: &ModelParams,
) -> Result<(f64, Vec<Neighbor>), FeasibilityError> {
    let (_, bearing) = receiver_and_bearing(scenario, receiver_id)?;
    Ok(defense_score(
        &scenario.field,
        scenario.passer.position,
        bearing,
        scenario.defenders.iter(),
        params.j,
    ))
}

/// `F_dR` over the defenders not already used around the passer.
pub fn receiver_defense_feasibility(
    scenario: &Scenario,
    receiver_id: &str,
    excluded: &BTreeSet<String>,
    params: &ModelParams,
) -> Result<(f64, Vec<Neighbor>), FeasibilityError> {
    let (receiver, bearing) = receiver_and_bearing(scenario, receiver_id)?;
    Ok(defense_score(
        &scenario.field,
        receiver.position,
        bearing,
        scenario.defenders.iter().filter(|d| !excluded.contains(&d.id)),
        params.j,
    ))
}

pub fn proximity_feasibility(passer: &PlayerState, receiver: &PlayerState, field: &FieldSpec) -> f64 {
    (-field.normalized_distance(passer.position, receiver.position)).exp()
}

/// Which score orders the receivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    F,
    #[serde(rename = "Fpd")]
    Fpd,
    #[serde(rename = "Fo")]
    Fo,
    #[serde(rename = "Fd")]
    Fd,
    #[serde(rename = "Fp")]
    Fp,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::F, Mode::Fpd, Mode::Fo, Mode::Fd, Mode::Fp];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::F => "F",
            Mode::Fpd => "Fpd",
            Mode::Fo => "Fo",
            Mode::Fd => "Fd",
            Mode::Fp => "Fp",
        }
    }

    pub fn needs_orientation(self) -> bool {
        matches!(self, Mode::F | Mode::Fo)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "").as_str() {
            "f" => Ok(Mode::F),
            "fpd" | "fdp" => Ok(Mode::Fpd),
            "fo" => Ok(Mode::Fo),
            "fd" => Ok(Mode::Fd),
            "fp" => Ok(Mode::Fp),
            _ => Err(format!("unknown mode `{s}` (expected F, Fpd, Fo, Fd or Fp)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityBreakdown {
    pub receiver_id: String,
    /// `None` when orientations are unavailable.
    pub f_o: Option<f64>,
    pub f_dp: f64,
    pub f_dr: f64,
    pub f_d: f64,
    pub f_p: f64,
    pub f: Option<f64>,
    pub f_pd: f64,
}

impl FeasibilityBreakdown {
    pub fn score(&self, mode: Mode) -> Option<f64> {
        match mode {
            Mode::F => self.f,
            Mode::Fpd => Some(self.f_pd),
            Mode::Fo => self.f_o,
            Mode::Fd => Some(self.f_d),
            Mode::Fp => Some(self.f_p),
        }
    }
}

/// Everything computed for one receiver.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReceiverEvaluation {
    pub breakdown: FeasibilityBreakdown,
    /// Normalized pass length.
    pub distance: f64,
    pub passer_neighbors: Vec<Neighbor>,
    pub receiver_neighbors: Vec<Neighbor>,
    /// Passer-centered frame; `None` without orientations.
    pub orientation_geometry: Option<OrientationGeometry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioEvaluation {
    pub mode: Mode,
    /// In receiver order of the scenario.
    pub receivers: Vec<ReceiverEvaluation>,
    /// Receiver ids, best first.
    pub ranking: Vec<String>,
}

impl ScenarioEvaluation {
    pub fn best(&self) -> &str {
        &self.ranking[0]
    }

    /// 1-based rank of `id`.
    pub fn rank_of(&self, id: &str) -> Option<usize> {
        self.ranking.iter().position(|r| r == id).map(|i| i + 1)
    }

    pub fn breakdowns(&self) -> impl Iterator<Item = &FeasibilityBreakdown> {
        self.receivers.iter().map(|r| &r.breakdown)
    }
}

pub fn evaluate_receiver(
    scenario: &Scenario,
    receiver: &PlayerState,
    params: &ModelParams,
    need_orientation: bool,
) -> Result<ReceiverEvaluation, FeasibilityError> {
    let passer = &scenario.passer;
    let has_orientation = passer.orientation.is_some() && receiver.orientation.is_some();
    let orientation = if need_orientation || has_orientation {
        Some(orientation_feasibility_detailed(passer, receiver, params)?)
    } else {
        None
    };
    let (f_dp, passer_neighbors) = passer_defense_feasibility(scenario, &receiver.id, params)?;
    let excluded: BTreeSet<String> = passer_neighbors.iter().map(|n| n.id.clone()).collect();
    let (f_dr, receiver_neighbors) = receiver_defense_feasibility(scenario, &receiver.id, &excluded, params)?;
    let f_p = proximity_feasibility(passer, receiver, &scenario.field);
    let f_d = f_dp * f_dr;
    let f_o = orientation.as_ref().map(|(v, _)| *v);
    Ok(ReceiverEvaluation {
        breakdown: FeasibilityBreakdown {
            receiver_id: receiver.id.clone(),
            f_o,
            f_dp,
            f_dr,
            f_d,
            f_p,
            f: f_o.map(|o| o * f_d * f_p),
            f_pd: f_p * f_d,
        },
        distance: scenario.field.normalized_distance(passer.position, receiver.position),
        passer_neighbors,
        receiver_neighbors,
        orientation_geometry: orientation.map(|(_, g)| g),
    })
}

/// Ordering used by every ranking: higher score first, then higher `F_o`,
/// then shorter pass, then id.
pub fn ranking_order(
    score: (f64, Option<f64>, f64, &str),
    other: (f64, Option<f64>, f64, &str),
) -> Ordering {
    let fo = |v: Option<f64>| v.unwrap_or(f64::NEG_INFINITY);
    other
        .0
        .total_cmp(&score.0)
        .then(fo(other.1).total_cmp(&fo(score.1)))
        .then(score.2.total_cmp(&other.2))
        .then_with(|| score.3.cmp(other.3))
}

/// Scores every receiver and ranks them under `mode`.
pub fn evaluate_scenario(
    scenario: &Scenario,
    params: &ModelParams,
    mode: Mode,
) -> Result<ScenarioEvaluation, FeasibilityError> {
    scenario.validate()?;
    if mode.needs_orientation() {
        scenario.passer.require_orientation()?;
        for r in &scenario.receivers {
            r.require_orientation()?;
        }
    }
    let receivers = scenario
        .receivers
        .iter()
        .map(|r| evaluate_receiver(scenario, r, params, mode.needs_orientation()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut order: Vec<&ReceiverEvaluation> = receivers.iter().collect();
    let key = |r: &ReceiverEvaluation| {
        // score() is Some for every receiver once orientations are checked above
        let s = r.breakdown.score(mode).unwrap_or(f64::NEG_INFINITY);
        (s, r.breakdown.f_o, r.distance)
    };
    order.sort_by(|a, b| {
        let (sa, oa, da) = key(a);
        let (sb, ob, db) = key(b);
        ranking_order(
            (sa, oa, da, &a.breakdown.receiver_id),
            (sb, ob, db, &b.breakdown.receiver_id),
        )
    });
    let ranking = order.iter().map(|r| r.breakdown.receiver_id.clone()).collect();
    Ok(ScenarioEvaluation {
        mode,
        receivers,
        ranking,
    })
}

/// Convenience for tests and tools that only need the breakdowns.
pub fn breakdowns(scenario: &Scenario, params: &ModelParams) -> Result<Vec<FeasibilityBreakdown>, FeasibilityError> {
    let oriented = std::iter::once(&scenario.passer)
        .chain(&scenario.receivers)
        .all(|p| p.orientation.is_some());
    let mode = if oriented {
        Mode::F
    } else {
        Mode::Fpd
    };
    Ok(evaluate_scenario(scenario, params, mode)?.breakdowns().cloned().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::AttackDirection;

    fn field() -> FieldSpec {
        FieldSpec::new(105.0, 68.0, AttackDirection::PositiveX).unwrap()
    }

    fn player(id: &str, x: f64, y: f64, o: Option<f64>) -> PlayerState {
        PlayerState {
            id: id.into(),
            position: Point2::new(x, y),
            orientation: o,
            role: None,
        }
    }

    fn scenario(receivers: Vec<PlayerState>, defenders: Vec<PlayerState>) -> Scenario {
        Scenario {
            field: field(),
            passer: player("P", 50.0, 34.0, Some(0.0)),
            receivers,
            defenders,
            ground_truth_receiver: None,
            success: None,
        }
    }

    #[test]
    fn projection_keeps_bearing() {
        let p = player("P", 0.0, 0.0, None);
        let out = project_to_circle(&p, &[player("a", 5.0, 0.0, None), player("b", 3.0, 4.0, None)], 1.0).unwrap();
        assert_eq!(out[0], Point2::new(1.0, 0.0));
        assert!((out[1].x - 0.6).abs() < 1e-15 && (out[1].y - 0.8).abs() < 1e-15);
        let err = project_to_circle(&p, &[player("c", 0.0, 0.0, None)], 1.0).unwrap_err();
        assert_eq!(err, FeasibilityError::CoincidentPlayers("c".into()));
    }

    #[test]
    fn weight_table() {
        assert_eq!(defender_weight(10.0, 0.0), 0.25);
        assert_eq!(defender_weight(30.0, 0.0), 0.5);
        assert_eq!(defender_weight(90.0, 0.0), 2.0);
        assert_eq!(defender_weight(22.5, 0.0), 0.5);
        assert_eq!(defender_weight(45.0, 0.0), 2.0);
        assert_eq!(defender_weight(350.0, 10.0), 0.25);
        assert_eq!(defender_weight(340.0, 10.0), 0.5);
    }

    #[test]
    fn head_on_is_one_and_behind_is_zero() {
        let params = ModelParams::default();
        let p = player("P", 10.0, 10.0, Some(0.0));
        let ahead = player("R", 30.0, 10.0, Some(180.0));
        assert_eq!(orientation_feasibility(&p, &ahead, &params).unwrap(), 1.0);
        let behind = player("B", -10.0, 10.0, Some(180.0));
        assert_eq!(orientation_feasibility(&p, &behind, &params).unwrap(), 0.0);
        let missing = player("M", 30.0, 10.0, None);
        assert_eq!(
            orientation_feasibility(&p, &missing, &params).unwrap_err(),
            FeasibilityError::MissingOrientation("M".into())
        );
    }

    #[test]
    fn passer_defense_cases() {
        let params = ModelParams::default();
        let sc = scenario(vec![player("R", 80.0, 34.0, Some(180.0))], vec![]);
        assert_eq!(passer_defense_feasibility(&sc, "R", &params).unwrap().0, 1.0);

        // defender on the passing line at half the field diagonal
        let diag = field().normalizer();
        let sc = scenario(
            vec![player("R", 104.0, 34.0, Some(180.0))],
            vec![player("D", 50.0 + 0.5 * diag, 34.0, None)],
        );
        let (v, n) = passer_defense_feasibility(&sc, "R", &params).unwrap();
        assert!((v - (-0.25f64 * 0.5).exp()).abs() < 1e-12, "{v}");
        assert!((v - 0.8825).abs() < 1e-4);
        assert_eq!(n.len(), 1);
    }

    #[test]
    fn coincident_defender_is_not_an_error() {
        let params = ModelParams::default();
        let sc = scenario(vec![player("R", 80.0, 34.0, Some(180.0))], vec![player("D", 50.0, 34.0, None)]);
        let (v, n) = passer_defense_feasibility(&sc, "R", &params).unwrap();
        assert_eq!(n[0].distance, 0.0);
        assert!((v - (-0.25f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn receiver_defense_uses_complement() {
        let params = ModelParams::new(30.0, 1.0, 1).unwrap();
        let sc = scenario(
            vec![player("R", 80.0, 34.0, Some(180.0))],
            vec![player("D1", 55.0, 34.0, None), player("D2", 82.0, 34.0, None)],
        );
        let (_, np) = passer_defense_feasibility(&sc, "R", &params).unwrap();
        assert_eq!(np[0].id, "D1");
        let excluded: BTreeSet<String> = np.iter().map(|n| n.id.clone()).collect();
        let (_, nr) = receiver_defense_feasibility(&sc, "R", &excluded, &params).unwrap();
        assert_eq!(nr[0].id, "D2");

        let all: BTreeSet<String> = ["D1", "D2"].iter().map(|s| s.to_string()).collect();
        assert_eq!(receiver_defense_feasibility(&sc, "R", &all, &params).unwrap().0, 1.0);
    }

    #[test]
    fn receiver_defense_at_unit_distance_is_one() {
        let params = ModelParams::default();
        let f = FieldSpec::new(3.0, 4.0, AttackDirection::PositiveX).unwrap();
        let mut sc = scenario(vec![player("R", 0.0, 0.0, Some(0.0))], vec![player("D", 3.0, 4.0, None)]);
        sc.field = f;
        sc.passer = player("P", 1.0, 0.0, Some(180.0));
        let (v, _) = receiver_defense_feasibility(&sc, "R", &BTreeSet::new(), &params).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn proximity_values() {
        let f = field();
        let p = player("P", 0.0, 0.0, None);
        assert_eq!(proximity_feasibility(&p, &player("a", 0.0, 0.0, None), &f), 1.0);
        let corner = proximity_feasibility(&p, &player("b", 105.0, 68.0, None), &f);
        assert!((corner - (-1f64).exp()).abs() < 1e-15);
        let near = proximity_feasibility(&p, &player("c", 10.0, 0.0, None), &f);
        let far = proximity_feasibility(&p, &player("d", 20.0, 0.0, None), &f);
        assert!(near > far);
    }

    #[test]
    fn singleton_and_missing_orientation() {
        let params = ModelParams::default();
        let sc = scenario(vec![player("R", 60.0, 30.0, Some(200.0))], vec![]);
        let ev = evaluate_scenario(&sc, &params, Mode::F).unwrap();
        assert_eq!(ev.ranking, vec!["R".to_string()]);
        assert_eq!(ev.rank_of("R"), Some(1));

        let sc = scenario(vec![player("R", 60.0, 30.0, None)], vec![]);
        assert_eq!(
            evaluate_scenario(&sc, &params, Mode::F).unwrap_err(),
            FeasibilityError::MissingOrientation("R".into())
        );
        let ev = evaluate_scenario(&sc, &params, Mode::Fpd).unwrap();
        assert_eq!(ev.receivers[0].breakdown.f_o, None);
    }

    #[test]
    fn proximity_order_when_other_components_tie() {
        // receivers all facing the passer on the same bearing line, no defenders
        let params = ModelParams::default();
        let recs = vec![
            player("far", 90.0, 34.0, Some(180.0)),
            player("near", 60.0, 34.0, Some(180.0)),
            player("mid", 75.0, 34.0, Some(180.0)),
        ];
        let ev = evaluate_scenario(&scenario(recs, vec![]), &params, Mode::F).unwrap();
        assert_eq!(ev.ranking, vec!["near", "mid", "far"]);
    }

    #[test]
    fn ties_break_by_distance_then_id() {
        let params = ModelParams::default();
        let recs = vec![player("b", 60.0, 34.0, None), player("a", 40.0, 34.0, None)];
        let ev = evaluate_scenario(&scenario(recs, vec![]), &params, Mode::Fd).unwrap();
        assert_eq!(ev.ranking, vec!["a", "b"]);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("fpd".parse::<Mode>().unwrap(), Mode::Fpd);
        assert_eq!("F_pd".parse::<Mode>().unwrap(), Mode::Fpd);
        assert_eq!("F".parse::<Mode>().unwrap(), Mode::F);
        assert!("G".parse::<Mode>().is_err());
    }

    #[test]
    fn validation_errors() {
        let mut sc = scenario(vec![player("R", 60.0, 30.0, Some(0.0))], vec![player("R", 1.0, 1.0, None)]);
        assert!(matches!(sc.validate(), Err(FeasibilityError::InvalidScenario(_))));
        sc.defenders.clear();
        sc.ground_truth_receiver = Some("X".into());
        assert!(sc.validate().is_err());
        sc.ground_truth_receiver = None;
        sc.receivers.clear();
        assert!(sc.validate().is_err());
    }
}
