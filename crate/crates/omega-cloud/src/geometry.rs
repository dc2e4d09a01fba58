//! Geometric primitives: points, circles, arcs, wedges, convex polygons, and
//! the low-level constructions built on them.
//!
//! Orientation conventions used across the crate:
//! - polygons are stored clockwise (negative shoelace sum in y-up coordinates);
//! - a wedge's left arm points along `direction + aperture/2`, the right arm
//!   along `direction - aperture/2`;
//! - arcs run clockwise from `start` to `end`, which on the supporting circle
//!   means the central angle decreases.

use crate::math::{self, normalize_angle, normalize_angle_signed, Tolerances, PI, TAU};
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub enum GeometryError {
    TooFewVertices,
    DuplicateVertices,
    NotConvex,
    DegenerateChord,
    ApexNotOnCircle,
    ArmMissesCircle,
    CoCircular,
    PointNotShared,
    DegeneratePolygon,
    InvalidAperture,
    NonFinite,
}

impl core::fmt::Display for GeometryError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let msg = match self {
            GeometryError::TooFewVertices => "need at least two vertices",
            GeometryError::DuplicateVertices => "duplicate adjacent vertices",
            GeometryError::NotConvex => "vertex list is not strictly convex",
            GeometryError::DegenerateChord => "chord endpoints coincide",
            GeometryError::ApexNotOnCircle => "wedge apex does not lie on the circle",
            GeometryError::ArmMissesCircle => "wedge arm does not meet the circle",
            GeometryError::CoCircular => "circles coincide",
            GeometryError::PointNotShared => "point does not lie on both circles",
            GeometryError::DegeneratePolygon => "operation undefined for a two-vertex polygon",
            GeometryError::InvalidAperture => "aperture must lie strictly between 0 and pi",
            GeometryError::NonFinite => "coordinates must be finite",
        };
        f.write_str(msg)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GeometryError {}

/// Angles are plain `f64` radians. Absolute directions are kept in `[0, 2pi)`
/// by the constructors that store them; turn quantities are non-negative and
/// not reduced.
pub type Angle = f64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }

    pub fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }

    pub fn scale(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product, treating both as vectors.
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        math::hypot(self.x, self.y)
    }

    pub fn dist(self, o: Point2) -> f64 {
        math::hypot(self.x - o.x, self.y - o.y)
    }

    /// Direction angle of the vector from `self` to `o`.
    pub fn dir_to(self, o: Point2) -> Angle {
        math::atan2(o.y - self.y, o.x - self.x)
    }
}

/// Unit vector for a direction angle.
pub fn unit(a: Angle) -> Point2 {
    Point2::new(math::cos(a), math::sin(a))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Point2,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point2, radius: f64) -> Self {
        Circle { center, radius }
    }

    /// Central angle of a point as seen from the center.
    pub fn angle_of(&self, p: Point2) -> Angle {
        math::atan2(p.y - self.center.y, p.x - self.center.x)
    }

    pub fn point_at(&self, a: Angle) -> Point2 {
        self.center.add(unit(a).scale(self.radius))
    }

    /// Distance from `p` to the circle (unsigned).
    pub fn boundary_dist(&self, p: Point2) -> f64 {
        math::abs(self.center.dist(p) - self.radius)
    }

    pub fn contains_on_boundary(&self, p: Point2, eps_pos: f64) -> bool {
        self.boundary_dist(p) <= eps_pos
    }

    /// Same circle within positional tolerance on center and radius.
    pub fn coincides(&self, o: &Circle, eps_pos: f64) -> bool {
        self.center.dist(o.center) <= eps_pos && math::abs(self.radius - o.radius) <= eps_pos
    }
}

/// Circular arc traversed clockwise (decreasing central angle) from `start`
/// to `end`. `measure` is the central angle in radians; `measure == 2pi`
/// denotes a full circle and then `start == end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub circle: Circle,
    pub start: Point2,
    pub end: Point2,
    pub measure: f64,
}

impl Arc {
    /// Builds an arc, validating that the endpoints lie on the circle and
    /// that the clockwise sweep from `start` to `end` matches `measure`.
    /// Endpoints are re-projected onto the circle.
    pub fn new(
        circle: Circle,
        start: Point2,
        end: Point2,
        measure: f64,
        tol: &Tolerances,
    ) -> Result<Arc, GeometryError> {
        if circle.radius <= 0.0 || !circle.center.is_finite() || !measure.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if !(measure > 0.0 && measure <= TAU + tol.eps_ang) {
            return Err(GeometryError::NonFinite);
        }
        if circle.boundary_dist(start) > tol.eps_pos || circle.boundary_dist(end) > tol.eps_pos {
            return Err(GeometryError::ApexNotOnCircle);
        }
        let a_start = circle.angle_of(start);
        let a_end = circle.angle_of(end);
        let full = measure >= TAU - tol.eps_ang;
        if full {
            if start.dist(end) > tol.eps_pos {
                return Err(GeometryError::NotConvex);
            }
        } else {
            let swept = normalize_angle(a_start - a_end);
            // Endpoint-derived sweep must agree with the declared measure.
            // Near 0/2pi the normalization wraps, so compare circularly.
            let diff = math::abs(normalize_angle_signed(swept - measure));
            let slack = tol.eps_ang + 4.0 * tol.eps_pos / circle.radius;
            if diff > slack {
                return Err(GeometryError::NotConvex);
            }
        }
        let start = circle.point_at(a_start);
        let end = if full { start } else { circle.point_at(a_end) };
        let measure = if full { TAU } else { measure };
        Ok(Arc {
            circle,
            start,
            end,
            measure,
        })
    }

    pub fn start_angle(&self) -> Angle {
        self.circle.angle_of(self.start)
    }

    pub fn end_angle(&self) -> Angle {
        self.circle.angle_of(self.end)
    }

    /// Point reached after sweeping `turn` clockwise from `start` along the arc.
    pub fn point_at_turn(&self, turn: f64) -> Point2 {
        self.circle.point_at(self.start_angle() - turn)
    }

    /// Clockwise sweep from `start` to a point assumed on the circle,
    /// in `[0, 2pi)`.
    pub fn turn_to(&self, p: Point2) -> f64 {
        normalize_angle(self.start_angle() - self.circle.angle_of(p))
    }

    /// Whether `p` lies on the arc (on the circle and within the swept range).
    pub fn contains(&self, p: Point2, tol: &Tolerances) -> bool {
        if !self.circle.contains_on_boundary(p, tol.eps_pos) {
            return false;
        }
        if self.measure >= TAU - tol.eps_ang {
            return true;
        }
        let ang_slack = tol.eps_ang + 2.0 * tol.eps_pos / self.circle.radius;
        let t = self.turn_to(p);
        t <= self.measure + ang_slack || t >= TAU - ang_slack
    }
}

/// Probing wedge: apex plus bisector direction plus aperture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wedge {
    pub apex: Point2,
    pub direction: Angle,
    pub aperture: Angle,
}

impl Wedge {
    pub fn new(apex: Point2, direction: Angle, aperture: Angle) -> Result<Wedge, GeometryError> {
        if !(aperture > 0.0 && aperture < PI) {
            return Err(GeometryError::InvalidAperture);
        }
        if !apex.is_finite() || !direction.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        Ok(Wedge {
            apex,
            direction: normalize_angle(direction),
            aperture,
        })
    }

    pub fn left_arm_dir(&self) -> Angle {
        normalize_angle(self.direction + self.aperture / 2.0)
    }

    pub fn right_arm_dir(&self) -> Angle {
        normalize_angle(self.direction - self.aperture / 2.0)
    }
}

/// Line through `point` with direction angle `direction` (oriented).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedLine {
    pub point: Point2,
    pub direction: Angle,
}

impl OrientedLine {
    pub fn new(point: Point2, direction: Angle) -> Self {
        OrientedLine {
            point,
            direction: normalize_angle(direction),
        }
    }
}

/// Which side of the directed chord u -> v a point lies on, by the sign of
/// the cross product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChordSide {
    Left,
    Right,
}

impl ChordSide {
    pub fn of(u: Point2, v: Point2, p: Point2) -> ChordSide {
        if v.sub(u).cross(p.sub(u)) >= 0.0 {
            ChordSide::Left
        } else {
            ChordSide::Right
        }
    }
}

/// Strictly convex polygon stored clockwise. Two vertices represent the
/// degenerate segment case.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> Point2 {
        self.vertices[i % self.vertices.len()]
    }

    /// Diameter of the axis-aligned bounding box.
    pub fn bbox_diameter(&self) -> f64 {
        bbox_diameter(&self.vertices)
    }
}

pub fn bbox_diameter(points: &[Point2]) -> f64 {
    let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        min.x = min.x.min(p.x);
        min.y = min.y.min(p.y);
        max.x = max.x.max(p.x);
        max.y = max.y.max(p.y);
    }
    if points.is_empty() {
        return 0.0;
    }
    math::hypot(max.x - min.x, max.y - min.y)
}

fn shoelace_sum(points: &[Point2]) -> f64 {
    let n = points.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = points[i];
        let b = points[(i + 1) % n];
        s += a.x * b.y - b.x * a.y;
    }
    s
}

/// Validates a vertex list as a strictly convex polygon, normalizing the
/// orientation to clockwise (counterclockwise input is reversed in place,
/// keeping the first vertex first). Two distinct points are accepted as the
/// degenerate segment.
pub fn validate_convex(points: &[Point2]) -> Result<ConvexPolygon, GeometryError> {
    if points.len() < 2 {
        return Err(GeometryError::TooFewVertices);
    }
    for p in points {
        if !p.is_finite() {
            return Err(GeometryError::NonFinite);
        }
    }
    let tol = Tolerances::from_scale(1e-9, bbox_diameter(points));
    let n = points.len();
    for i in 0..n {
        if points[i].dist(points[(i + 1) % n]) <= tol.eps_pos {
            return Err(GeometryError::DuplicateVertices);
        }
    }
    if n == 2 {
        return Ok(ConvexPolygon {
            vertices: points.to_vec(),
        });
    }

    let mut verts = points.to_vec();
    if shoelace_sum(&verts) > 0.0 {
        verts[1..].reverse();
    }

    // Strict convexity: every turn has the same (clockwise) sign, nothing
    // collinear, and the exterior angles sum to one full turn so that
    // multiply-wound inputs are rejected.
    let mut turn_sum = 0.0;
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        let c = verts[(i + 2) % n];
        let e1 = b.sub(a);
        let e2 = c.sub(b);
        let cross = e1.cross(e2);
        // Angular collinearity test: sin(turn) = |cross| / (|e1||e2|). A
        // positional test would reject dense polygons whose vertices sit
        // within eps_pos of their neighbors' chord even though every turn
        // is numerically well resolved.
        if math::abs(cross) <= tol.eps_ang * e1.norm() * e2.norm() {
            return Err(GeometryError::NotConvex);
        }
        if cross > 0.0 {
            return Err(GeometryError::NotConvex);
        }
        turn_sum += math::abs(normalize_angle_signed(e2.dir_to_zero() - e1.dir_to_zero()));
    }
    if math::abs(turn_sum - TAU) > 1e-6 {
        return Err(GeometryError::NotConvex);
    }
    Ok(ConvexPolygon { vertices: verts })
}

impl Point2 {
    /// Direction angle of `self` as a vector.
    fn dir_to_zero(self) -> Angle {
        math::atan2(self.y, self.x)
    }
}

/// Internal angle at vertex `i`, in `(0, pi)`.
pub fn internal_angle(p: &ConvexPolygon, i: usize) -> Result<Angle, GeometryError> {
    if p.len() < 3 {
        return Err(GeometryError::DegeneratePolygon);
    }
    let n = p.len();
    let v = p.vertex(i);
    let prev = p.vertex((i + n - 1) % n);
    let next = p.vertex((i + 1) % n);
    let a = prev.sub(v);
    let b = next.sub(v);
    Ok(math::atan2(math::abs(a.cross(b)), a.dot(b)))
}

/// Circle through `u` and `v` on which points of the arc lying on
/// `apex_side` of the directed chord u -> v see the chord under angle
/// exactly `omega`. Radius is `|uv| / (2 sin omega)`.
pub fn inscribed_circle(
    u: Point2,
    v: Point2,
    omega: Angle,
    apex_side: ChordSide,
    tol: &Tolerances,
) -> Result<Circle, GeometryError> {
    if !(omega > 0.0 && omega < PI) {
        return Err(GeometryError::InvalidAperture);
    }
    let chord = v.sub(u);
    let len = chord.norm();
    if len <= tol.eps_pos {
        return Err(GeometryError::DegenerateChord);
    }
    let radius = len / (2.0 * math::sin(omega));
    let mid = u.add(v).scale(0.5);
    // Unit normal of the chord pointing into the apex side.
    let left_normal = Point2::new(-chord.y / len, chord.x / len);
    let n_apex = match apex_side {
        ChordSide::Left => left_normal,
        ChordSide::Right => left_normal.scale(-1.0),
    };
    // The center sits toward the apex side for omega < pi/2 and away from it
    // for omega > pi/2; the signed offset R cos(omega) captures both.
    let center = mid.add(n_apex.scale(radius * math::cos(omega)));
    Ok(Circle::new(center, radius))
}

/// Second intersections of the wedge's arms with a circle through its apex:
/// `(left-arm contact, right-arm contact)`. An arm tangent to the circle
/// yields the apex itself.
pub fn wedge_circle_contacts(
    w: &Wedge,
    c: &Circle,
    tol: &Tolerances,
) -> Result<(Point2, Point2), GeometryError> {
    if !c.contains_on_boundary(w.apex, tol.eps_pos) {
        return Err(GeometryError::ApexNotOnCircle);
    }
    let second = |dir: Angle| -> Result<Point2, GeometryError> {
        let u = unit(dir);
        // Points apex + t*u on the circle solve t^2 + 2 t <u, apex-c> = 0;
        // t = 0 is the apex, the other root is below.
        let t = 2.0 * u.dot(c.center.sub(w.apex));
        if t < -tol.eps_pos {
            return Err(GeometryError::ArmMissesCircle);
        }
        if t <= tol.eps_pos {
            return Ok(w.apex);
        }
        Ok(w.apex.add(u.scale(t)))
    };
    Ok((second(w.left_arm_dir())?, second(w.right_arm_dir())?))
}

/// The intersection point of two circles other than the shared point `u`.
/// Tangent circles return `(u, true)`.
pub fn second_circle_intersection(
    c1: &Circle,
    c2: &Circle,
    u: Point2,
    tol: &Tolerances,
) -> Result<(Point2, bool), GeometryError> {
    if c1.coincides(c2, tol.eps_pos) {
        return Err(GeometryError::CoCircular);
    }
    if !c1.contains_on_boundary(u, tol.eps_pos) || !c2.contains_on_boundary(u, tol.eps_pos) {
        return Err(GeometryError::PointNotShared);
    }
    // Both intersection points are mirror images across the center line, so
    // the second one is the reflection of u.
    let axis = c2.center.sub(c1.center);
    let len = axis.norm();
    if len <= tol.eps_pos {
        // Concentric circles of different radii cannot share u; guarded above
        // by the boundary checks, but keep a defensive error.
        return Err(GeometryError::CoCircular);
    }
    let dir = axis.scale(1.0 / len);
    let rel = u.sub(c1.center);
    let along = rel.dot(dir);
    let perp = rel.sub(dir.scale(along));
    let x = c1.center.add(dir.scale(along)).sub(perp);
    if x.dist(u) <= tol.eps_pos {
        return Ok((u, true));
    }
    Ok((x, false))
}

/// Intersection of two lines given as point + direction. `None` when the
/// directions are (nearly) parallel.
pub fn line_intersection(
    p: Point2,
    p_dir: Angle,
    q: Point2,
    q_dir: Angle,
    eps: f64,
) -> Option<Point2> {
    let u = unit(p_dir);
    let v = unit(q_dir);
    let denom = u.cross(v);
    if math::abs(denom) <= eps {
        return None;
    }
    let t = q.sub(p).cross(v) / denom;
    Some(p.add(u.scale(t)))
}
