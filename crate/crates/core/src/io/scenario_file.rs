//! Line-delimited scenario files.
//!
//! The first non-comment line is a JSON header naming the format, version,
//! units and the default pitch. Every following line is one pass event:
//!
//! ```text
//! {"format":"passfeas-scenarios","version":1,"units":{"length":"m","angle":"deg"},"field":{"length_m":105.0,"width_m":68.0,"attack_direction":"+x"}}
//! {"passer":{"id":"P","x_m":40.0,"y_m":30.0,"orientation_deg":10.0,"role":"midfielder"},"receivers":[...],"defenders":[...],"ground_truth":"R3","success":true}
//! ```
//!
//! Lines starting with `#` and blank lines are ignored. Unknown keys are
//! rejected. A player may carry `orientation_track` (`[[frame, deg], ...]`)
//! instead of `orientation_deg`; the record's `pass_frame` then selects the
//! window that is reduced with the circular median.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::orientation::{OrientationSeries, DEFAULT_WINDOW};
use super::IoError;
use crate::feasibility::{PlayerState, Role, Scenario};
use crate::geometry::{AttackDirection, FieldSpec, Point2};

pub const FORMAT_NAME: &str = "passfeas-scenarios";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldRecord {
    pub length_m: f64,
    pub width_m: f64,
    #[serde(default)]
    pub attack_direction: AttackDirection,
}

impl From<FieldSpec> for FieldRecord {
    fn from(f: FieldSpec) -> Self {
        Self {
            length_m: f.length,
            width_m: f.width,
            attack_direction: f.attack_direction,
        }
    }
}

impl FieldRecord {
    pub fn to_spec(self) -> Result<FieldSpec, String> {
        FieldSpec::new(self.length_m, self.width_m, self.attack_direction).map_err(|e| e.to_string())
    }
}

impl Default for FieldRecord {
    fn default() -> Self {
        FieldSpec::default().into()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Units {
    length: String,
    angle: String,
}

impl Default for Units {
    fn default() -> Self {
        Self {
            length: "m".into(),
            angle: "deg".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format: String,
    version: u32,
    units: Units,
    field: FieldRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayerRecord {
    pub id: String,
    pub x_m: f64,
    pub y_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation_track: Option<Vec<(i64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<Role>,
}

impl From<&PlayerState> for PlayerRecord {
    fn from(p: &PlayerState) -> Self {
        Self {
            id: p.id.clone(),
            x_m: p.position.x,
            y_m: p.position.y,
            orientation_deg: p.orientation,
            orientation_track: None,
            role: p.role,
        }
    }
}

/// One pass event as stored on disk and sent over the wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pass_frame: Option<i64>,
    pub passer: PlayerRecord,
    pub receivers: Vec<PlayerRecord>,
    #[serde(default)]
    pub defenders: Vec<PlayerRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub success: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    /// Half-width of the orientation smoothing window, in frames.
    pub window: u32,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LoadedScenarios {
    pub scenarios: Vec<Scenario>,
    pub warnings: Vec<String>,
    pub dropped_goalkeepers: usize,
}

impl ScenarioRecord {
    pub fn from_scenario(s: &Scenario, default_field: Option<&FieldSpec>) -> Self {
        Self {
            field: (default_field != Some(&s.field)).then(|| s.field.into()),
            pass_frame: None,
            passer: (&s.passer).into(),
            receivers: s.receivers.iter().map(Into::into).collect(),
            defenders: s.defenders.iter().map(Into::into).collect(),
            ground_truth: s.ground_truth_receiver.clone(),
            success: s.success,
        }
    }

    /// Validates the record into a scenario. Receivers labeled goalkeeper
    /// are dropped; each drop adds a warning. The error string names the
    /// offending player and field.
    pub fn to_scenario(
        &self,
        default_field: &FieldSpec,
        options: &LoadOptions,
        warnings: &mut Vec<String>,
    ) -> Result<(Scenario, usize), String> {
        let field = match self.field {
            Some(f) => f.to_spec().map_err(|e| format!("field `field`: {e}"))?,
            None => *default_field,
        };
        let mut ids = BTreeSet::new();
        let all = std::iter::once(&self.passer)
            .chain(&self.receivers)
            .chain(&self.defenders);
        for p in all {
            if !ids.insert(p.id.as_str()) {
                return Err(format!("duplicate player id `{}`", p.id));
            }
        }
        let window = options.window;
        let passer = self.player(&self.passer, "passer", window)?;
        let mut receivers = Vec::with_capacity(self.receivers.len());
        let mut dropped = 0;
        let mut ground_truth = self.ground_truth.clone();
        for r in &self.receivers {
            if r.role == Some(Role::Goalkeeper) {
                dropped += 1;
                warnings.push(format!("goalkeeper `{}` removed from receivers", r.id));
                if ground_truth.as_deref() == Some(r.id.as_str()) {
                    warnings.push(format!("ground truth `{}` was a goalkeeper and is cleared", r.id));
                    ground_truth = None;
                }
                continue;
            }
            receivers.push(self.player(r, "receivers", window)?);
        }
        let defenders = self
            .defenders
            .iter()
            .map(|d| self.player(d, "defenders", window))
            .collect::<Result<Vec<_>, _>>()?;
        let scenario = Scenario {
            field,
            passer,
            receivers,
            defenders,
            ground_truth_receiver: ground_truth,
            success: self.success,
        };
        scenario.validate().map_err(|e| e.to_string())?;
        Ok((scenario, dropped))
    }

    fn player(&self, p: &PlayerRecord, group: &str, window: u32) -> Result<PlayerState, String> {
        let at = |field: &str| format!("{group} `{}` field `{field}`", p.id);
        if p.id.is_empty() {
            return Err(format!("{group}: empty player id"));
        }
        if !p.x_m.is_finite() {
            return Err(format!("{}: not finite", at("x_m")));
        }
        if !p.y_m.is_finite() {
            return Err(format!("{}: not finite", at("y_m")));
        }
        let mut orientation = p.orientation_deg;
        if let Some(o) = orientation {
            if !(0.0..360.0).contains(&o) {
                return Err(format!("{}: {o} is outside [0, 360)", at("orientation_deg")));
            }
        }
        if let Some(track) = &p.orientation_track {
            if orientation.is_some() {
                return Err(format!(
                    "{}: give either orientation_deg or orientation_track",
                    at("orientation_track")
                ));
            }
            let frame = self
                .pass_frame
                .ok_or_else(|| format!("{}: requires `pass_frame`", at("orientation_track")))?;
            let series = OrientationSeries::new(p.id.clone(), track.clone())
                .map_err(|e| format!("{}: {e}", at("orientation_track")))?;
            orientation = Some(
                series
                    .smooth(frame, window)
                    .map_err(|e| format!("{}: {e}", at("orientation_track")))?,
            );
        }
        Ok(PlayerState {
            id: p.id.clone(),
            position: Point2::new(p.x_m, p.y_m),
            orientation,
            role: p.role,
        })
    }
}

fn header_line(field: &FieldSpec) -> String {
    let header = Header {
        format: FORMAT_NAME.into(),
        version: FORMAT_VERSION,
        units: Units::default(),
        field: (*field).into(),
    };
    serde_json::to_string(&header).expect("header serializes")
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses a scenario file from memory.
pub fn parse_scenarios(text: &str, options: &LoadOptions) -> Result<LoadedScenarios, IoError> {
    let mut lines = content_lines(text);
    let (hline, htext) = lines.next().ok_or(IoError::Header {
        line: 1,
        message: "missing header".into(),
    })?;
    let header: Header = serde_json::from_str(htext).map_err(|e| IoError::Header {
        line: hline,
        message: e.to_string(),
    })?;
    if header.format != FORMAT_NAME {
        return Err(IoError::Header {
            line: hline,
            message: format!("format `{}` is not `{FORMAT_NAME}`", header.format),
        });
    }
    if header.version != FORMAT_VERSION {
        return Err(IoError::Header {
            line: hline,
            message: format!("unsupported version {}", header.version),
        });
    }
    if header.units != Units::default() {
        return Err(IoError::Header {
            line: hline,
            message: "units must be meters (`m`) and degrees (`deg`)".into(),
        });
    }
    let field = header.field.to_spec().map_err(|message| IoError::Header { line: hline, message })?;

    let mut out = LoadedScenarios::default();
    for (index, (line, text)) in lines.enumerate() {
        let record_err = |message: String| IoError::Record { index, line, message };
        let record: ScenarioRecord = serde_json::from_str(text).map_err(|e| record_err(e.to_string()))?;
        let (scenario, dropped) = record
            .to_scenario(&field, options, &mut out.warnings)
            .map_err(record_err)?;
        out.dropped_goalkeepers += dropped;
        out.scenarios.push(scenario);
    }
    Ok(out)
}

pub fn load_scenarios(path: impl AsRef<Path>, options: &LoadOptions) -> Result<LoadedScenarios, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| IoError::file(path, e))?;
    parse_scenarios(&text, options)
}

/// Serializes scenarios; the header carries the first scenario's pitch.
pub fn write_scenarios(scenarios: &[Scenario], mut out: impl Write) -> std::io::Result<()> {
    let field = scenarios.first().map(|s| s.field).unwrap_or_default();
    writeln!(out, "{}", header_line(&field))?;
    for s in scenarios {
        let rec = ScenarioRecord::from_scenario(s, Some(&field));
        writeln!(out, "{}", serde_json::to_string(&rec).expect("record serializes"))?;
    }
    Ok(())
}

pub fn save_scenarios(path: impl AsRef<Path>, scenarios: &[Scenario]) -> Result<(), IoError> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_scenarios(scenarios, &mut buf).map_err(|e| IoError::file(path, e))?;
    fs::write(path, buf).map_err(|e| IoError::file(path, e))
}
