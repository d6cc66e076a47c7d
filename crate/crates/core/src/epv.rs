//! Per-receiver values from an external pass-probability or EPV grid.
//!
//! A receiver's value is the mean of the grid over the union of a disc
//! around the receiver and a tube from the passer to the receiver. Cells
//! belong to the region when their centers do. The mean is correctly
//! rounded (exact accumulation, one final rounding), so a constant grid
//! yields exactly its constant.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evaluation::{topx_accuracy, RankResult};
use crate::feasibility::{orientation_feasibility, ranking_order, FeasibilityError, ModelParams, Scenario};
use crate::geometry::{FieldSpec, Point2};
use crate::io::ValueMap;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EpvError {
    #[error("region outside map: no cell centers near receiver `{0}`")]
    OutsideMap(String),
    #[error("passer and receiver `{0}` coincide")]
    Coincident(String),
    #[error("region resolved for a {expected_w}x{expected_h} map, got {got_w}x{got_h}")]
    DimensionMismatch {
        expected_w: usize,
        expected_h: usize,
        got_w: usize,
        got_h: usize,
    },
    #[error("invalid region size: {0}")]
    InvalidSize(String),
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
    #[error("event {index}: {source}")]
    Event {
        index: usize,
        #[source]
        source: Box<EpvError>,
    },
    #[error("no events with a ground truth")]
    NoEvents,
}

/// Which external model produced the map. Only the labels differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ValueKind {
    #[serde(rename = "V_P")]
    PassProbability,
    #[serde(rename = "V_E")]
    Epv,
}

impl ValueKind {
    pub fn label(self) -> &'static str {
        match self {
            ValueKind::PassProbability => "V_P",
            ValueKind::Epv => "V_E",
        }
    }
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ValueKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "").as_str() {
            "vp" | "p" | "pass" | "passprob" => Ok(ValueKind::PassProbability),
            "ve" | "e" | "epv" => Ok(ValueKind::Epv),
            _ => Err(format!("unknown value kind `{s}` (expected V_P or V_E)")),
        }
    }
}

/// Disc radius and tube width as fractions of the field length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSize {
    pub q: f64,
    pub s: f64,
}

impl RegionSize {
    /// `q = 5 / W`, `s = 2 / W` for a map `W` cells wide.
    pub fn for_map(map: &ValueMap) -> Self {
        let w = map.width() as f64;
        Self { q: 5.0 / w, s: 2.0 / w }
    }

    fn validate(&self) -> Result<(), EpvError> {
        if self.q.is_finite() && self.q > 0.0 && self.s.is_finite() && self.s > 0.0 {
            Ok(())
        } else {
            Err(EpvError::InvalidSize(format!("q = {}, s = {}", self.q, self.s)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReceiverRegion {
    pub center: Point2,
    /// Disc radius, meters.
    pub radius: f64,
    pub start: Point2,
    /// Tube width, meters.
    pub tube_width: f64,
    map_width: usize,
    map_height: usize,
    /// Row-major cell indices, ascending.
    pub cells: Vec<usize>,
}

impl ReceiverRegion {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Whether a point belongs to the disc or the tube.
    pub fn covers(&self, p: Point2) -> bool {
        p.distance(self.center) <= self.radius || segment_distance(p, self.start, self.center) <= 0.5 * self.tube_width
    }
}

fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.x * ab.x + ab.y * ab.y;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2).clamp(0.0, 1.0)
    };
    p.distance(a.add(ab.scale(t)))
}

/// Resolves the disc-and-tube region for a receiver against `map`.
pub fn receiver_region(
    field: &FieldSpec,
    passer: Point2,
    receiver: Point2,
    map: &ValueMap,
    size: RegionSize,
    receiver_id: &str,
) -> Result<ReceiverRegion, EpvError> {
    size.validate()?;
    if passer == receiver {
        return Err(EpvError::Coincident(receiver_id.to_string()));
    }
    let mut region = ReceiverRegion {
        center: receiver,
        radius: size.q * field.length,
        start: passer,
        tube_width: size.s * field.length,
        map_width: map.width(),
        map_height: map.height(),
        cells: Vec::new(),
    };
    let reach = region.radius.max(0.5 * region.tube_width);
    let lo = Point2::new(passer.x.min(receiver.x) - reach, passer.y.min(receiver.y) - reach);
    let hi = Point2::new(passer.x.max(receiver.x) + reach, passer.y.max(receiver.y) + reach);
    let cw = field.length / map.width() as f64;
    let ch = field.width / map.height() as f64;
    let span = |lo: f64, hi: f64, step: f64, n: usize| {
        let a = ((lo / step - 0.5).floor().max(0.0) as usize).min(n);
        let b = ((hi / step - 0.5).ceil().max(-1.0) + 1.0).clamp(0.0, n as f64) as usize;
        a..b
    };
    for row in span(lo.y, hi.y, ch, map.height()) {
        for col in span(lo.x, hi.x, cw, map.width()) {
            if region.covers(map.cell_center(field, col, row)) {
                region.cells.push(map.index(col, row));
            }
        }
    }
    if region.cells.is_empty() {
        return Err(EpvError::OutsideMap(receiver_id.to_string()));
    }
    Ok(region)
}

/// Mean of `map` over the region's cells.
pub fn map_value(region: &ReceiverRegion, map: &ValueMap) -> Result<f64, EpvError> {
    if (region.map_width, region.map_height) != (map.width(), map.height()) {
        return Err(EpvError::DimensionMismatch {
            expected_w: region.map_width,
            expected_h: region.map_height,
            got_w: map.width(),
            got_h: map.height(),
        });
    }
    if region.cells.is_empty() {
        return Err(EpvError::OutsideMap(String::new()));
    }
    let values = map.values();
    Ok(exact_mean(region.cells.iter().map(|&i| values[i])))
}

/// `(mantissa, exponent)` with `v = mantissa * 2^exponent`.
fn decompose(v: f64) -> (i64, i32) {
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    if exp == 0 {
        (sign * frac, -1074)
    } else {
        (sign * (frac | (1i64 << 52)), exp - 1075)
    }
}

/// `v * 2^e`, applied in steps so every factor is a normal number.
fn scale_pow2(mut v: f64, mut e: i64) -> f64 {
    let factor = |k: i64| f64::from_bits(((k + 1023) as u64) << 52);
    while e > 1000 {
        v *= factor(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= factor(-1000);
        e += 1000;
    }
    v * factor(e)
}

/// Correctly rounded arithmetic mean of finite values (round half to even).
pub fn exact_mean(values: impl Iterator<Item = f64>) -> f64 {
    let parts: Vec<(i64, i32)> = values.map(decompose).collect();
    let count = parts.len();
    assert!(count > 0, "mean of an empty set");
    let min_exp = parts.iter().filter(|(m, _)| *m != 0).map(|(_, e)| *e).min();
    let Some(min_exp) = min_exp else {
        return 0.0;
    };
    let sum: BigInt = parts
        .iter()
        .filter(|(m, _)| *m != 0)
        .map(|&(m, e)| BigInt::from(m) << (e - min_exp) as usize)
        .sum();
    if sum.is_zero() {
        return 0.0;
    }
    let negative = sum.is_negative();
    let num: BigUint = sum.abs().to_biguint().expect("non-negative");
    let den = BigUint::from(count);
    // scale so that the integer quotient carries 55 or 56 bits
    let shift = 55 + den.bits() as i64 - num.bits() as i64;
    let (a, b) = if shift >= 0 {
        (num << shift as usize, den)
    } else {
        (num, den << (-shift) as usize)
    };
    let q = &a / &b;
    let sticky = !(&a % &b).is_zero();
    let extra = q.bits() as i64 - 53;
    debug_assert!((1..=4).contains(&extra));
    let q = q.to_u64_digits().first().copied().unwrap_or(0);
    let mut mant = q >> extra;
    let rem = q & ((1u64 << extra) - 1);
    let half = 1u64 << (extra - 1);
    if rem > half || (rem == half && (sticky || mant & 1 == 1)) {
        mant += 1;
    }
    let exp = min_exp as i64 - shift + extra;
    let value = scale_pow2(mant as f64, exp);
    if negative {
        -value
    } else {
        value
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpvReceiver {
    pub receiver_id: String,
    pub value: f64,
    pub f_o: f64,
    pub product: f64,
    pub distance: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpvEvaluation {
    pub kind: ValueKind,
    pub receivers: Vec<EpvReceiver>,
    /// Ordered by `V * F_o`, best first.
    pub ranking: Vec<String>,
    /// Ordered by `V` alone.
    pub value_ranking: Vec<String>,
}

impl EpvEvaluation {
    pub fn rank_of(&self, id: &str) -> Option<usize> {
        self.ranking.iter().position(|r| r == id).map(|i| i + 1)
    }

    pub fn value_rank_of(&self, id: &str) -> Option<usize> {
        self.value_ranking.iter().position(|r| r == id).map(|i| i + 1)
    }
}

fn rank_by(receivers: &[EpvReceiver], key: impl Fn(&EpvReceiver) -> f64) -> Vec<String> {
    let mut order: Vec<&EpvReceiver> = receivers.iter().collect();
    order.sort_by(|a, b| {
        ranking_order(
            (key(a), Some(a.f_o), a.distance, &a.receiver_id),
            (key(b), Some(b.f_o), b.distance, &b.receiver_id),
        )
    });
    order.into_iter().map(|r| r.receiver_id.clone()).collect()
}

/// Weights each receiver's map value by its orientation feasibility.
pub fn combine_with_orientation(
    scenario: &Scenario,
    map: &ValueMap,
    params: &ModelParams,
    kind: ValueKind,
    size: RegionSize,
) -> Result<EpvEvaluation, EpvError> {
    scenario.validate()?;
    let passer = &scenario.passer;
    let receivers = scenario
        .receivers
        .iter()
        .map(|r| {
            let region = receiver_region(&scenario.field, passer.position, r.position, map, size, &r.id)?;
            let value = map_value(&region, map)?;
            let f_o = orientation_feasibility(passer, r, params)?;
            Ok(EpvReceiver {
                receiver_id: r.id.clone(),
                value,
                f_o,
                product: value * f_o,
                distance: scenario.field.normalized_distance(passer.position, r.position),
                cells: region.len(),
            })
        })
        .collect::<Result<Vec<_>, EpvError>>()?;
    Ok(EpvEvaluation {
        kind,
        ranking: rank_by(&receivers, |r| r.product),
        value_ranking: rank_by(&receivers, |r| r.value),
        receivers,
    })
}

/// Top-1/Top-3 accuracy of one ordering over a corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpvTableRow {
    /// `V_P`, `V_P+F_o`, `V_E` or `V_E+F_o`.
    pub label: String,
    pub top1_succ: Option<f64>,
    pub top1_nsucc: Option<f64>,
    pub top3_succ: Option<f64>,
    pub top3_nsucc: Option<f64>,
    pub n_events: usize,
}

pub const EPV_CSV_HEADER: &str = "score,top1_succ,top1_nsucc,top3_succ,top3_nsucc,n_events";

impl EpvTableRow {
    fn from_results(label: String, results: &[RankResult]) -> Self {
        let top1 = topx_accuracy(results, 1).expect("x > 0");
        let top3 = topx_accuracy(results, 3).expect("x > 0");
        Self {
            label,
            top1_succ: top1.succ,
            top1_nsucc: top1.nsucc,
            top3_succ: top3.succ,
            top3_nsucc: top3.nsucc,
            n_events: results.len(),
        }
    }

    pub fn to_csv_line(&self) -> String {
        let cell = |v: Option<f64>| v.map(|v| format!("{v:.6}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{}",
            self.label,
            cell(self.top1_succ),
            cell(self.top1_nsucc),
            cell(self.top3_succ),
            cell(self.top3_nsucc),
            self.n_events
        )
    }
}

/// Ranks of the ground truth under `V` alone and under `V * F_o`, for every
/// scenario that has a ground truth.
pub fn epv_rank_results(
    scenarios: &[Scenario],
    map: &ValueMap,
    params: &ModelParams,
    kind: ValueKind,
    size: RegionSize,
) -> Result<(Vec<RankResult>, Vec<RankResult>), EpvError> {
    let mut by_value = Vec::new();
    let mut combined = Vec::new();
    for (index, s) in scenarios.iter().enumerate() {
        let Some(gt) = &s.ground_truth_receiver else {
            continue;
        };
        let wrap = |source| EpvError::Event {
            index,
            source: Box::new(source),
        };
        let eval = combine_with_orientation(s, map, params, kind, size).map_err(wrap)?;
        let missing = || wrap(EpvError::Feasibility(FeasibilityError::UnknownReceiver(gt.clone())));
        let result = |rank| RankResult {
            scenario_index: index,
            rank,
            success: s.success,
        };
        by_value.push(result(eval.value_rank_of(gt).ok_or_else(missing)?));
        combined.push(result(eval.rank_of(gt).ok_or_else(missing)?));
    }
    Ok((by_value, combined))
}

/// The two table rows for one map: `V` and `V+F_o`.
pub fn epv_table(
    scenarios: &[Scenario],
    map: &ValueMap,
    params: &ModelParams,
    kind: ValueKind,
    size: RegionSize,
) -> Result<[EpvTableRow; 2], EpvError> {
    let (by_value, combined) = epv_rank_results(scenarios, map, params, kind, size)?;
    if by_value.is_empty() {
        return Err(EpvError::NoEvents);
    }
    Ok([
        EpvTableRow::from_results(kind.label().to_string(), &by_value),
        EpvTableRow::from_results(format!("{}+F_o", kind.label()), &combined),
    ])
}
