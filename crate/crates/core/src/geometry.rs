//! Planar primitives used by the feasibility model.
//!
//! Angles are carried in degrees at every public boundary; radians only
//! appear inside the trigonometric helpers. Polygons are convex and wound
//! counter-clockwise, and anything with an area below [`AREA_EPSILON`] is
//! treated as the empty region.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Polygons with a smaller area collapse to the empty region.
pub const AREA_EPSILON: f64 = 1e-12;

/// Relative tolerance between successive refinements of the adaptive rule.
pub const QUADRATURE_TOLERANCE: f64 = 1e-4;

/// Maximum number of 4-way subdivisions applied to a single fan triangle.
pub const QUADRATURE_MAX_LEVEL: u32 = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate direction: origin and target coincide at ({x}, {y})")]
    DegenerateDirection { x: f64, y: f64 },
    #[error("half angle {0} deg is outside (0, 90)")]
    HalfAngle(f64),
    #[error("side length {0} must be positive and finite")]
    SideLength(f64),
    #[error("field dimensions must be positive, got {length} x {width}")]
    FieldDimensions { length: f64, width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn sub(self, other: Point2) -> Point2 {
        Point2::new(self.x - other.x, self.y - other.y)
    }

    pub fn add(self, other: Point2) -> Point2 {
        Point2::new(self.x + other.x, self.y + other.y)
    }

    pub fn scale(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }

    /// Point at `length` from `self` along the bearing `degrees`.
    pub fn offset(self, degrees: f64, length: f64) -> Point2 {
        let (s, c) = degrees.to_radians().sin_cos();
        Point2::new(self.x + length * c, self.y + length * s)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Which way the offensive team attacks along the x axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AttackDirection {
    #[default]
    #[serde(rename = "+x")]
    PositiveX,
    #[serde(rename = "-x")]
    NegativeX,
}

impl AttackDirection {
    pub fn sign(self) -> f64 {
        match self {
            AttackDirection::PositiveX => 1.0,
            AttackDirection::NegativeX => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            AttackDirection::PositiveX => AttackDirection::NegativeX,
            AttackDirection::NegativeX => AttackDirection::PositiveX,
        }
    }
}

/// Pitch dimensions in meters. Field coordinates place one corner at the
/// origin with `x` along the length and `y` along the width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub length: f64,
    pub width: f64,
    pub attack_direction: AttackDirection,
}

impl Default for FieldSpec {
    fn default() -> Self {
        Self {
            length: 105.0,
            width: 68.0,
            attack_direction: AttackDirection::PositiveX,
        }
    }
}

impl FieldSpec {
    pub fn new(length: f64, width: f64, attack_direction: AttackDirection) -> Result<Self, GeometryError> {
        let spec = Self {
            length,
            width,
            attack_direction,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if ok(self.length) && ok(self.width) {
            Ok(())
        } else {
            Err(GeometryError::FieldDimensions {
                length: self.length,
                width: self.width,
            })
        }
    }

    /// Field diagonal; dividing by it maps the largest in-field distance to 1.
    pub fn normalizer(&self) -> f64 {
        self.length.hypot(self.width)
    }

    pub fn normalized_distance(&self, a: Point2, b: Point2) -> f64 {
        a.distance(b) / self.normalizer()
    }

    /// Signed position along the attacking axis (larger = closer to the
    /// opponent goal).
    pub fn depth(&self, p: Point2) -> f64 {
        self.attack_direction.sign() * p.x
    }
}

/// Bearing from `origin` to `target`, counter-clockwise from +x, in `[0, 360)`.
pub fn angle_of(origin: Point2, target: Point2) -> Result<f64, GeometryError> {
    let dx = target.x - origin.x;
    let dy = target.y - origin.y;
    if dx == 0.0 && dy == 0.0 {
        return Err(GeometryError::DegenerateDirection {
            x: origin.x,
            y: origin.y,
        });
    }
    Ok(normalize_degrees(dy.atan2(dx).to_degrees()))
}

/// Wraps any finite angle into `[0, 360)`.
pub fn normalize_degrees(deg: f64) -> f64 {
    let r = deg.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// Smallest absolute difference between two bearings, in `[0, 180]`.
pub fn angular_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).abs().rem_euclid(360.0);
    d.min(360.0 - d)
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a polygon from convex vertices in either winding. Consecutive
    /// duplicates are dropped, the winding is normalized to counter-clockwise
    /// and slivers below [`AREA_EPSILON`] become empty.
    pub fn from_vertices(vertices: Vec<Point2>) -> Self {
        let mut vs = dedup_ring(vertices);
        if vs.len() < 3 {
            return Self::empty();
        }
        let signed = signed_area(&vs);
        if signed.abs() < AREA_EPSILON {
            return Self::empty();
        }
        if signed < 0.0 {
            vs.reverse();
        }
        Self { vertices: vs }
    }

    /// Axis-aligned rectangle with lower-left corner `min`.
    pub fn rectangle(min: Point2, max: Point2) -> Self {
        Self::from_vertices(vec![
            min,
            Point2::new(max.x, min.y),
            max,
            Point2::new(min.x, max.y),
        ])
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            signed_area(&self.vertices).abs()
        }
    }

    /// Area centroid; `None` for the empty polygon.
    pub fn centroid(&self) -> Option<Point2> {
        if self.is_empty() {
            return None;
        }
        let o = self.vertices[0];
        let mut acc = Point2::ORIGIN;
        let mut total = 0.0;
        for w in self.vertices[1..].windows(2) {
            let a = cross(o, w[0], w[1]);
            acc.x += a * (o.x + w[0].x + w[1].x) / 3.0;
            acc.y += a * (o.y + w[0].y + w[1].y) / 3.0;
            total += a;
        }
        Some(acc.scale(1.0 / total))
    }

    /// True when `p` lies inside or on the boundary.
    pub fn contains(&self, p: Point2) -> bool {
        if self.is_empty() {
            return false;
        }
        let n = self.vertices.len();
        (0..n).all(|i| cross(self.vertices[i], self.vertices[(i + 1) % n], p) >= 0.0)
    }

    pub fn map_points(&self, f: impl Fn(Point2) -> Point2) -> Self {
        Self::from_vertices(self.vertices.iter().copied().map(f).collect())
    }
}

fn signed_area(vs: &[Point2]) -> f64 {
    let n = vs.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = vs[i];
        let b = vs[(i + 1) % n];
        s += a.x * b.y - b.x * a.y;
    }
    0.5 * s
}

fn dedup_ring(mut vs: Vec<Point2>) -> Vec<Point2> {
    vs.dedup_by(|a, b| a.distance(*b) <= 1e-12);
    while vs.len() > 1 && vs[0].distance(vs[vs.len() - 1]) <= 1e-12 {
        vs.pop();
    }
    vs
}

/// Isosceles field-of-view triangle with its apex at a player.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewTriangle {
    pub apex: Point2,
    /// Direction of the axis of symmetry, degrees.
    pub orientation: f64,
    /// Half opening angle, degrees.
    pub half_angle: f64,
    /// Length of the two equal sides.
    pub side_length: f64,
}

impl ViewTriangle {
    pub fn vertices(&self) -> [Point2; 3] {
        [
            self.apex,
            self.apex.offset(self.orientation - self.half_angle, self.side_length),
            self.apex.offset(self.orientation + self.half_angle, self.side_length),
        ]
    }

    pub fn polygon(&self) -> ConvexPolygon {
        ConvexPolygon::from_vertices(self.vertices().to_vec())
    }

    pub fn area(&self) -> f64 {
        let h = self.half_angle.to_radians();
        self.side_length * self.side_length * h.sin() * h.cos()
    }
}

pub fn build_view_triangle(
    apex: Point2,
    orientation: f64,
    half_angle: f64,
    side_length: f64,
) -> Result<ViewTriangle, GeometryError> {
    if !(half_angle > 0.0 && half_angle < 90.0) {
        return Err(GeometryError::HalfAngle(half_angle));
    }
    if !(side_length.is_finite() && side_length > 0.0) {
        return Err(GeometryError::SideLength(side_length));
    }
    Ok(ViewTriangle {
        apex,
        orientation: normalize_degrees(orientation),
        half_angle,
        side_length,
    })
}

/// Intersection of two convex polygons by Sutherland-Hodgman clipping of
/// `a` against every edge of `b`.
pub fn intersect_convex(a: &ConvexPolygon, b: &ConvexPolygon) -> ConvexPolygon {
    if a.is_empty() || b.is_empty() {
        return ConvexPolygon::empty();
    }
    let clip = b.vertices();
    let mut out = a.vertices().to_vec();
    for i in 0..clip.len() {
        let e0 = clip[i];
        let e1 = clip[(i + 1) % clip.len()];
        out = clip_half_plane(&out, e0, e1);
        if out.len() < 3 {
            return ConvexPolygon::empty();
        }
    }
    ConvexPolygon::from_vertices(out)
}

/// Keeps the part of `poly` on the left of the directed line `e0 -> e1`.
fn clip_half_plane(poly: &[Point2], e0: Point2, e1: Point2) -> Vec<Point2> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let s = poly[i];
        let e = poly[(i + 1) % n];
        let sd = cross(e0, e1, s);
        let ed = cross(e0, e1, e);
        let s_in = sd >= 0.0;
        let e_in = ed >= 0.0;
        if s_in != e_in {
            let t = sd / (sd - ed);
            out.push(Point2::new(s.x + (e.x - s.x) * t, s.y + (e.y - s.y) * t));
        }
        if e_in {
            out.push(e);
        }
    }
    out
}

// Symmetric 7-point rule on the triangle, exact for polynomials of degree 5.
// Entries are (barycentric a, weight); each a generates the orbit
// (a, a, 1-2a).
const RULE_CENTER_WEIGHT: f64 = 0.225;

fn rule_orbits() -> [(f64, f64); 2] {
    let r15 = 15f64.sqrt();
    [
        ((6.0 - r15) / 21.0, (155.0 - r15) / 1200.0),
        ((6.0 + r15) / 21.0, (155.0 + r15) / 1200.0),
    ]
}

fn triangle_rule(t: [Point2; 3], f: &impl Fn(Point2) -> f64) -> f64 {
    let area = 0.5 * cross(t[0], t[1], t[2]).abs();
    if area == 0.0 {
        return 0.0;
    }
    let at = |l0: f64, l1: f64, l2: f64| {
        Point2::new(
            l0 * t[0].x + l1 * t[1].x + l2 * t[2].x,
            l0 * t[0].y + l1 * t[1].y + l2 * t[2].y,
        )
    };
    let third = 1.0 / 3.0;
    let mut sum = RULE_CENTER_WEIGHT * f(at(third, third, third));
    for (a, w) in rule_orbits() {
        let b = 1.0 - 2.0 * a;
        sum += w * (f(at(a, a, b)) + f(at(a, b, a)) + f(at(b, a, a)));
    }
    area * sum
}

fn split4(t: [Point2; 3]) -> [[Point2; 3]; 4] {
    let m01 = t[0].add(t[1]).scale(0.5);
    let m12 = t[1].add(t[2]).scale(0.5);
    let m20 = t[2].add(t[0]).scale(0.5);
    [
        [t[0], m01, m20],
        [m01, t[1], m12],
        [m20, m12, t[2]],
        [m01, m12, m20],
    ]
}

fn adaptive(t: [Point2; 3], coarse: f64, level: u32, f: &impl Fn(Point2) -> f64) -> f64 {
    let children = split4(t);
    let parts = children.map(|c| triangle_rule(c, f));
    let fine: f64 = parts.iter().sum();
    if level + 1 >= QUADRATURE_MAX_LEVEL || (fine - coarse).abs() <= QUADRATURE_TOLERANCE * fine.abs() {
        return fine;
    }
    children
        .iter()
        .zip(parts)
        .map(|(c, p)| adaptive(*c, p, level + 1, f))
        .sum()
}

/// Integrates `f` over a convex region: fan triangulation from the centroid,
/// then the 7-point rule with 4-way refinement per fan triangle.
pub fn integrate_convex(region: &ConvexPolygon, f: impl Fn(Point2) -> f64) -> f64 {
    let Some(center) = region.centroid() else {
        return 0.0;
    };
    let vs = region.vertices();
    let n = vs.len();
    (0..n)
        .map(|i| {
            let t = [center, vs[i], vs[(i + 1) % n]];
            adaptive(t, triangle_rule(t, &f), 0, &f)
        })
        .sum()
}

/// `∫_region (exp(-|x-p|/s) + exp(-|x-r|/s)) dx` with `s = dist_scale`.
pub fn integrate_pair_weights(region: &ConvexPolygon, p: Point2, r: Point2, dist_scale: f64) -> f64 {
    let inv = 1.0 / dist_scale;
    integrate_convex(region, |x| (-x.distance(p) * inv).exp() + (-x.distance(r) * inv).exp())
}
