//! Pass feasibility for soccer tracking snapshots.
//!
//! Given the passer, the visible teammates and the defenders at the moment
//! of a pass, every teammate is scored by orientation, defensive pressure
//! and proximity; the product ranks the candidate receivers. The crate also
//! carries the evaluation protocol (Top-X accuracy, rank histograms,
//! position and game-phase splits), the bridge to external value grids, and
//! the scenario and value-map file formats.

pub mod epv;
pub mod evaluation;
pub mod feasibility;
pub mod geometry;
pub mod io;
pub mod wire;

pub use epv::{
    combine_with_orientation, epv_table, map_value, receiver_region, EpvError, EpvTableRow, RegionSize, ValueKind,
};
pub use evaluation::{
    classify_phase, rank_histogram, rank_results, split_report, topx_accuracy, EvalError, PhaseLabel, RankResult,
    Split,
};
pub use feasibility::{
    evaluate_scenario, FeasibilityBreakdown, FeasibilityError, ModelParams, Mode, PlayerState, Role, Scenario,
};
pub use geometry::{AttackDirection, ConvexPolygon, FieldSpec, GeometryError, Point2};
pub use io::{IoError, ValueMap};
