//! Independent checking tools: a direct support-function solver for minimal
//! wedges, dense apex sampling, deterministic random polygon generation, and
//! tolerant polygon/cloud comparison.
//!
//! `minimal_wedge_at_direction` deliberately shares no code with the sweep
//! construction; it recomputes everything from the support function so the
//! two routes stay independent checks of each other.

use crate::cloud::Cloud;
use crate::geometry::{
    internal_angle, unit, validate_convex, Angle, ConvexPolygon, GeometryError, Point2,
};
use crate::math::{self, PI, TAU};
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    GenerationFailed,
    Geometry(GeometryError),
}

impl From<GeometryError> for OracleError {
    fn from(e: GeometryError) -> Self {
        OracleError::Geometry(e)
    }
}

impl core::fmt::Display for OracleError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OracleError::GenerationFailed => f.write_str("random polygon generation failed"),
            OracleError::Geometry(e) => write!(f, "geometry error: {}", e),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for OracleError {}

/// Result of a tolerant comparison. `max_vertex_error` is populated by
/// polygon matching, `max_arc_error` by cloud matching.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchReport {
    pub max_vertex_error: f64,
    pub max_arc_error: f64,
    pub verdict: bool,
}

impl MatchReport {
    fn mismatch() -> MatchReport {
        MatchReport {
            max_vertex_error: f64::INFINITY,
            max_arc_error: f64::INFINITY,
            verdict: false,
        }
    }
}

/// Index of the vertex maximizing the dot product with the unit vector of
/// `normal_dir`. Exact ties resolve to the later scan index.
fn support_vertex(p: &ConvexPolygon, normal_dir: Angle) -> usize {
    let n = unit(normal_dir);
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, v) in p.vertices().iter().enumerate() {
        let val = n.dot(*v);
        if val >= best_val {
            best_val = val;
            best = i;
        }
    }
    best
}

/// The unique minimal wedge with aperture `omega` and bisector direction `d`:
/// each arm lies on the supporting line of the polygon in the arm's outward
/// normal direction, and the apex is the intersection of those two lines.
///
/// Works uniformly at every direction, including the stationary intervals of
/// sharp vertices where both supporting lines pass through the same vertex.
pub fn minimal_wedge_at_direction(
    p: &ConvexPolygon,
    d: Angle,
    omega: Angle,
) -> Result<crate::geometry::Wedge, GeometryError> {
    if !(omega > 0.0 && omega < PI) {
        return Err(GeometryError::InvalidAperture);
    }
    if p.len() < 2 {
        return Err(GeometryError::TooFewVertices);
    }
    // Outward normals of the two arms: the polygon lies on the right of the
    // left arm ray and on the left of the right arm ray.
    let n_left = d + omega / 2.0 + PI / 2.0;
    let n_right = d - omega / 2.0 - PI / 2.0;
    let a_left = p.vertex(support_vertex(p, n_left));
    let a_right = p.vertex(support_vertex(p, n_right));
    // Solve x . e(n) = h for both supporting lines.
    let el = unit(n_left);
    let er = unit(n_right);
    let hl = el.dot(a_left);
    let hr = er.dot(a_right);
    let det = el.x * er.y - el.y * er.x;
    // |det| = sin(omega) > 0 for a valid aperture.
    let apex = Point2::new((hl * er.y - hr * el.y) / det, (el.x * hr - er.x * hl) / det);
    crate::geometry::Wedge::new(apex, d, omega)
}

/// Apexes of the minimal wedges at `m` uniformly spaced directions
/// `2 pi k / m`, k = 0..m.
pub fn sampled_cloud(
    p: &ConvexPolygon,
    omega: Angle,
    m: usize,
) -> Result<Vec<Point2>, GeometryError> {
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let d = TAU * k as f64 / m as f64;
        out.push(minimal_wedge_at_direction(p, d, omega)?.apex);
    }
    Ok(out)
}

/// Deterministic random strictly convex polygon with exactly `n` vertices
/// (3 <= n <= 100_000). Vertices are placed on a randomly scaled, rotated,
/// and offset ellipse at stratified angles, which keeps neighbors distinct
/// and every internal angle strictly convex even for large `n`.
pub fn random_convex_polygon(n: usize, seed: u64) -> Result<ConvexPolygon, OracleError> {
    if !(3..=100_000).contains(&n) {
        return Err(OracleError::GenerationFailed);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 {
        let a = 0.6 + 0.8 * rng.gen::<f64>();
        let b = 0.6 + 0.8 * rng.gen::<f64>();
        let rot = TAU * rng.gen::<f64>();
        let scale = 0.5 + 1.5 * rng.gen::<f64>();
        let cx = 2.0 * rng.gen::<f64>() - 1.0;
        let cy = 2.0 * rng.gen::<f64>() - 1.0;
        let (sr, cr) = (math::sin(rot), math::cos(rot));
        let mut pts = Vec::with_capacity(n);
        for i in 0..n {
            // Stratified jitter: each vertex stays inside its own angular
            // cell, so the parameter sequence is strictly increasing.
            let u: f64 = rng.gen();
            let ang = TAU * (i as f64 + 0.05 + 0.9 * u) / n as f64;
            let (ex, ey) = (a * math::cos(ang), b * math::sin(ang));
            let x = scale * (cr * ex - sr * ey) + cx;
            let y = scale * (sr * ex + cr * ey) + cy;
            pts.push(Point2::new(x, y));
        }
        if let Ok(poly) = validate_convex(&pts) {
            let ok = (0..poly.len()).all(|i| {
                let t = internal_angle(&poly, i).unwrap();
                t > 1e-9 && t < PI - 1e-9
            });
            if ok {
                return Ok(poly);
            }
        }
    }
    Err(OracleError::GenerationFailed)
}

/// Nudges `omega` so it stays at least `margin` away from every internal
/// angle of `p` and from the circular-cloud apertures `pi (1 - 1/k)` for
/// k = 3..=64, while remaining inside `(lo, hi)`. Test suites use this to
/// steer clear of classification ties.
pub fn safe_omega(p: &ConvexPolygon, candidate: Angle, lo: Angle, hi: Angle) -> Angle {
    let margin = 1e-4;
    let mut forbidden: Vec<f64> = Vec::new();
    if p.len() >= 3 {
        for i in 0..p.len() {
            if let Ok(t) = internal_angle(p, i) {
                forbidden.push(t);
            }
        }
    }
    for k in 3..=64 {
        forbidden.push(PI * (1.0 - 1.0 / k as f64));
    }
    let mut omega = candidate.clamp(lo + margin, hi - margin);
    for _ in 0..forbidden.len() + 1 {
        let mut moved = false;
        for &f in &forbidden {
            if math::abs(omega - f) < margin {
                omega = if f + 1.2 * margin < hi {
                    f + 1.2 * margin
                } else {
                    f - 1.2 * margin
                };
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    omega.clamp(lo + margin / 2.0, hi - margin / 2.0)
}

/// Compares two convex polygons as cyclic sequences, aligning by the vertex
/// of `q` nearest to `p`'s first vertex. Both are stored clockwise, so only
/// rotations need to be tried.
pub fn match_polygons(p: &ConvexPolygon, q: &ConvexPolygon, tol: f64) -> MatchReport {
    let pv = p.vertices();
    let qv = q.vertices();
    if pv.len() != qv.len() || pv.is_empty() {
        return MatchReport::mismatch();
    }
    let n = pv.len();
    let mut offset = 0;
    let mut best = f64::INFINITY;
    for (j, v) in qv.iter().enumerate() {
        let d = pv[0].dist(*v);
        if d < best {
            best = d;
            offset = j;
        }
    }
    let mut max_err = 0.0f64;
    for i in 0..n {
        max_err = max_err.max(pv[i].dist(qv[(offset + i) % n]));
    }
    MatchReport {
        max_vertex_error: max_err,
        max_arc_error: 0.0,
        verdict: max_err <= tol,
    }
}

/// Compares two clouds arc by arc, aligning by the arc of `d` whose start
/// point is nearest to `c`'s first arc start. Positions (centers, radii,
/// endpoints) are compared against `tol_pos`, measures against `tol_ang`.
pub fn match_clouds(c: &Cloud, d: &Cloud, tol_pos: f64, tol_ang: f64) -> MatchReport {
    let ca = c.arcs();
    let da = d.arcs();
    if ca.len() != da.len() || ca.is_empty() {
        return MatchReport::mismatch();
    }
    let n = ca.len();
    let mut offset = 0;
    let mut best = f64::INFINITY;
    for (j, arc) in da.iter().enumerate() {
        let dist = ca[0].start.dist(arc.start);
        if dist < best {
            best = dist;
            offset = j;
        }
    }
    let mut max_err = 0.0f64;
    let mut ok = true;
    for i in 0..n {
        let x = &ca[i];
        let y = &da[(offset + i) % n];
        let full = x.measure >= TAU - tol_ang && y.measure >= TAU - tol_ang;
        let mut err = x.circle.center.dist(y.circle.center);
        err = err.max(math::abs(x.circle.radius - y.circle.radius));
        if !full {
            err = err.max(x.start.dist(y.start));
            err = err.max(x.end.dist(y.end));
        }
        max_err = max_err.max(err);
        if err > tol_pos || math::abs(x.measure - y.measure) > tol_ang {
            ok = false;
        }
    }
    MatchReport {
        max_vertex_error: 0.0,
        max_arc_error: max_err,
        verdict: ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn centered_square() -> ConvexPolygon {
        validate_convex(&[
            Point2::new(-0.5, -0.5),
            Point2::new(-0.5, 0.5),
            Point2::new(0.5, 0.5),
            Point2::new(0.5, -0.5),
        ])
        .unwrap()
    }

    #[test]
    fn square_wedge_apex_below_at_up_direction() {
        // Frozen value: bisector +y, aperture pi/2 on the centered unit
        // square puts the apex at (0, -1), on the circle over the bottom edge.
        let w = minimal_wedge_at_direction(&centered_square(), PI / 2.0, PI / 2.0).unwrap();
        assert_relative_eq!(w.apex.x, 0.0, epsilon = 1e-12);
        assert_relative_eq!(w.apex.y, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn square_sampled_cloud_axis_points() {
        // Frozen values: the four axis directions give the four apexes
        // (-1,0), (0,-1), (1,0), (0,1) in direction order 0, pi/2, pi, 3pi/2.
        let pts = sampled_cloud(&centered_square(), PI / 2.0, 4).unwrap();
        let expect = [
            Point2::new(-1.0, 0.0),
            Point2::new(0.0, -1.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        for (p, e) in pts.iter().zip(expect.iter()) {
            assert_relative_eq!(p.x, e.x, epsilon = 1e-12);
            assert_relative_eq!(p.y, e.y, epsilon = 1e-12);
        }
    }

    #[test]
    fn wedge_arms_touch_polygon_and_contain_it() {
        // The minimal wedge must contain every vertex and have both arm
        // lines touching the polygon (zero signed distance to some vertex).
        let p = random_convex_polygon(17, 7).unwrap();
        for k in 0..64 {
            let d = TAU * k as f64 / 64.0;
            let omega = 1.1;
            let w = minimal_wedge_at_direction(&p, d, omega).unwrap();
            let nl = unit(d + omega / 2.0 + PI / 2.0);
            let nr = unit(d - omega / 2.0 - PI / 2.0);
            let mut max_l = f64::NEG_INFINITY;
            let mut max_r = f64::NEG_INFINITY;
            for v in p.vertices() {
                max_l = max_l.max(nl.dot(v.sub(w.apex)));
                max_r = max_r.max(nr.dot(v.sub(w.apex)));
            }
            // Every vertex on the inner side of each arm line, with at least
            // one touching it.
            assert!(max_l.abs() < 1e-9, "left arm signed distance {}", max_l);
            assert!(max_r.abs() < 1e-9, "right arm signed distance {}", max_r);
        }
    }

    #[test]
    fn stationary_vertex_is_apex_for_narrow_aperture() {
        // Equilateral triangle, aperture pi/2 > pi/3: each vertex has a
        // stationary direction interval where the apex equals the vertex.
        let tri = validate_convex(&[
            Point2::new(0.0, 0.0),
            Point2::new(0.5, 3f64.sqrt() / 2.0),
            Point2::new(1.0, 0.0),
        ])
        .unwrap();
        // Stationary interval of vertex (1, 0) is [3pi/4, 11pi/12].
        let w = minimal_wedge_at_direction(&tri, 0.8 * PI + 0.02, PI / 2.0).unwrap();
        let probe = minimal_wedge_at_direction(&tri, 5.0 * PI / 6.0, PI / 2.0).unwrap();
        assert!(probe.apex.dist(Point2::new(1.0, 0.0)) < 1e-9);
        assert!(w.apex.dist(Point2::new(1.0, 0.0)) < 1e-9);
    }

    #[test]
    fn random_polygon_is_deterministic_and_valid() {
        let a = random_convex_polygon(64, 1).unwrap();
        let b = random_convex_polygon(64, 1).unwrap();
        assert_eq!(a.vertices(), b.vertices());
        assert_eq!(a.len(), 64);
        let c = random_convex_polygon(64, 2).unwrap();
        assert_ne!(a.vertices(), c.vertices());
        for n in [3usize, 4, 5, 12, 1000] {
            let p = random_convex_polygon(n, 99).unwrap();
            assert_eq!(p.len(), n);
        }
        assert!(random_convex_polygon(2, 0).is_err());
    }

    #[test]
    fn safe_omega_avoids_internal_angles() {
        let tri = validate_convex(&[
            Point2::new(0.0, 0.0),
            Point2::new(0.5, 3f64.sqrt() / 2.0),
            Point2::new(1.0, 0.0),
        ])
        .unwrap();
        let omega = safe_omega(&tri, PI / 3.0, 0.1, PI - 0.1);
        assert!((omega - PI / 3.0).abs() >= 1e-4);
        for k in 3..=64 {
            assert!((omega - PI * (1.0 - 1.0 / k as f64)).abs() >= 0.9e-4);
        }
    }

    #[test]
    fn match_polygons_alignment_and_tolerance() {
        let p = random_convex_polygon(9, 3).unwrap();
        let mut rotated = p.vertices().to_vec();
        rotated.rotate_left(4);
        let q = validate_convex(&rotated).unwrap();
        let r = match_polygons(&p, &q, 1e-12);
        assert!(r.verdict, "max error {}", r.max_vertex_error);
        // A perturbed copy fails a tight tolerance and passes a loose one.
        let mut bumped = p.vertices().to_vec();
        bumped[2] = bumped[2].add(Point2::new(1e-6, 0.0));
        let b = validate_convex(&bumped).unwrap();
        assert!(!match_polygons(&p, &b, 1e-9).verdict);
        assert!(match_polygons(&p, &b, 1e-3).verdict);
    }
}
