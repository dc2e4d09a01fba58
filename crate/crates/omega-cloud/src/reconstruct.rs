//! Inverse construction: recover the polygon from a maximal cloud, either
//! with the aperture given (two passes, constant working state besides the
//! strictly-narrow list) or with the aperture unknown (recover it from the
//! cloud's structure first, then certify).
//!
//! Turn bookkeeping: the wedge direction advances by half the traversed arc
//! measure, and the stretch following a narrow vertex spans a turn of
//! exactly `2(pi - omega)` during which that vertex is the right contact of
//! every supporting circle.

use crate::cloud::{
    maximal_cloud_with, omega_cloud_with, segment_cloud_with, Cloud, CloudError, CloudPoint,
};
use crate::geometry::{
    second_circle_intersection, unit, validate_convex, wedge_circle_contacts, Angle, ConvexPolygon,
    GeometryError, OrientedLine, Point2, Wedge,
};
use crate::math::{self, normalize_angle, normalize_angle_signed, Config, Tolerances, PI, TAU};
use crate::oracle::match_clouds;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub enum ReconstructError {
    InvalidAperture,
    InvalidCloud,
    NonClosing,
    StrictNarrowEncountered,
    ContactOffCircle,
    SingleCircleAmbiguous,
    CertificationFailed,
    NotASegment,
    AmbiguousOmega,
    Cloud(CloudError),
    Geometry(GeometryError),
}

impl From<CloudError> for ReconstructError {
    fn from(e: CloudError) -> Self {
        ReconstructError::Cloud(e)
    }
}

impl From<GeometryError> for ReconstructError {
    fn from(e: GeometryError) -> Self {
        ReconstructError::Geometry(e)
    }
}

impl core::fmt::Display for ReconstructError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ReconstructError::InvalidAperture => {
                f.write_str("aperture must lie strictly between 0 and pi")
            }
            ReconstructError::InvalidCloud => {
                f.write_str("arc structure is not a cloud for this aperture")
            }
            ReconstructError::NonClosing => f.write_str("pass failed to close around the cloud"),
            ReconstructError::StrictNarrowEncountered => {
                f.write_str("chain walk crossed a strictly narrow pivot")
            }
            ReconstructError::ContactOffCircle => {
                f.write_str("wedge contact left its supporting circle")
            }
            ReconstructError::SingleCircleAmbiguous => {
                f.write_str("a full-circle cloud admits a family of polygons")
            }
            ReconstructError::CertificationFailed => {
                f.write_str("reconstructed polygon does not reproduce the input cloud")
            }
            ReconstructError::NotASegment => {
                f.write_str("all-narrow cloud does not match a segment")
            }
            ReconstructError::AmbiguousOmega => {
                f.write_str("aperture recovery was inconsistent across probes")
            }
            ReconstructError::Cloud(e) => write!(f, "cloud error: {}", e),
            ReconstructError::Geometry(e) => write!(f, "geometry error: {}", e),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ReconstructError {}

/// A strictly narrow vertex found by the first pass, with the supporting
/// lines of its two incident polygon edges. Both lines pass through the
/// pivot location; their directions follow the polygon clockwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NarrowRecord {
    pub pivot: CloudPoint,
    pub left_line: OrientedLine,
    pub right_line: OrientedLine,
}

/// Per-call instrumentation. `pivot_visits` counts junction-processing
/// events (first-pass classifications plus chain-walk crossings);
/// `working_set_peak` is the record-list length plus constant state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionStats {
    pub pivot_visits: usize,
    pub working_set_peak: usize,
    pub narrow_count: usize,
    pub max_jump_turn_error: f64,
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub polygon: ConvexPolygon,
    pub omega: Angle,
    pub certified: bool,
    pub stats: ReconstructionStats,
}

/// Internal angle at the junction before `arcs[i]`, from the tangent-chord
/// relations of the two incident circles. Meaningful only when the junction
/// is a narrow vertex (where the arriving left arm and departing right arm
/// are tangent to the incident circles).
fn junction_angle(c: &Cloud, i: usize, omega: Angle) -> f64 {
    let m = c.len();
    let phi_prev = c.arcs()[(i + m - 1) % m].end_angle();
    let phi_next = c.arcs()[i].start_angle();
    math::abs(normalize_angle_signed(
        phi_prev - phi_next - PI - 2.0 * omega,
    ))
}

enum PivotCase {
    Plain,
    /// The stretch spans several arcs; the following arc is shorter than
    /// the stretch turn.
    NarrowStretch {
        theta: f64,
    },
    /// The following arc is a whole stretch (t = 1) or a merged run of t
    /// co-circular stretches hiding t - 1 vertices in its interior.
    NarrowExact {
        t: usize,
        theta: f64,
    },
    Invalid,
}

/// Apertures arriving through interfaces are often decimals rounded to a
/// handful of digits. Comparisons between arc measures and multiples of
/// the stretch turn `2(pi - omega)` absorb that quantization (the stretch
/// turn moves by twice the aperture error) on top of the angular
/// tolerance; certification still arbitrates the result.
const OMEGA_DECIMAL_SLACK: f64 = 5e-8;

fn classify_pivot(c: &Cloud, i: usize, omega: Angle, tol: &Tolerances) -> PivotCase {
    let m = c.len();
    let ell = 2.0 * (PI - omega);
    let ell_slack = tol.eps_ang + 2.0 * OMEGA_DECIMAL_SLACK;
    let meas = c.arcs()[i].measure;
    let t = math::round(meas / ell);
    if t >= 1.0 && math::abs(meas - t * ell) <= t * ell_slack {
        return PivotCase::NarrowExact {
            t: t as usize,
            theta: junction_angle(c, i, omega),
        };
    }
    if meas > ell + ell_slack {
        return PivotCase::Invalid;
    }
    // Narrow-vertex signature: every arc of the stretch keeps its
    // supporting circle through the vertex, and the crossed measures sum
    // to the stretch turn. Proximity at a single junction is not enough;
    // a tiny neighboring arc can put the next circle within the cushion
    // of a plain pivot, and on top of that the junctions where one edge
    // leaves the left arm and reaches the right arm are spaced exactly
    // one stretch turn apart, so the sum alone cannot discriminate
    // either.
    let u = c.pivots()[i].location;
    let cushion = 64.0 * tol.eps_pos;
    let mut acc = meas;
    let mut j = i + 1;
    let mut genuine = true;
    while acc < ell - 2.0 * tol.eps_ang {
        if c.arcs()[j % m].circle.boundary_dist(u) > cushion {
            genuine = false;
            break;
        }
        acc += c.arcs()[j % m].measure;
        j += 1;
        if j > i + m {
            genuine = false;
            break;
        }
    }
    if genuine
        && math::abs(acc - ell) <= (j - i + 2) as f64 * tol.eps_ang + 2.0 * OMEGA_DECIMAL_SLACK
    {
        return PivotCase::NarrowStretch {
            theta: junction_angle(c, i, omega),
        };
    }
    PivotCase::Plain
}

fn make_record(c: &Cloud, i: usize, omega: Angle) -> NarrowRecord {
    let m = c.len();
    let u = c.pivots()[i].location;
    let phi_prev = c.arcs()[(i + m - 1) % m].end_angle();
    let phi_next = c.arcs()[i].start_angle();
    NarrowRecord {
        pivot: CloudPoint {
            arc_index: i,
            point: u,
        },
        left_line: OrientedLine::new(u, phi_prev + PI / 2.0 - omega),
        right_line: OrientedLine::new(u, phi_next + PI / 2.0 + omega),
    }
}

struct ScanOutcome {
    records: Vec<NarrowRecord>,
    narrow_count: usize,
    visits: usize,
    max_jump_turn_error: f64,
    // Stretch turns read off the cloud pin the aperture more precisely
    // than a decimal-rounded input; kept for re-deriving it.
    refined_omega: Option<f64>,
}

/// One pass over the pivots by index. Narrow pivots skip ahead by the
/// stretch turn `2(pi - omega)`; the skipped junctions belong to the
/// stretch and are plain. The final skip may run past the wrap, where the
/// crossed pivots were already classified at the start of the pass.
fn scan_pivots(c: &Cloud, omega: Angle, tol: &Tolerances) -> Result<ScanOutcome, ReconstructError> {
    let m = c.len();
    let ell = 2.0 * (PI - omega);
    let mut out = ScanOutcome {
        records: Vec::new(),
        narrow_count: 0,
        visits: 0,
        max_jump_turn_error: 0.0,
        refined_omega: None,
    };
    let mut i = 0usize;
    while i < m {
        let next = match classify_pivot(c, i, omega, tol) {
            PivotCase::Plain => i + 1,
            PivotCase::NarrowExact { t, theta } => {
                out.narrow_count += 1;
                if theta < omega - tol.eps_ang {
                    out.records.push(make_record(c, i, omega));
                }
                if out.refined_omega.is_none() {
                    out.refined_omega = Some(PI - c.arcs()[i].measure / (2.0 * t as f64));
                }
                i + 1
            }
            PivotCase::NarrowStretch { theta } => {
                out.narrow_count += 1;
                if theta < omega - tol.eps_ang {
                    out.records.push(make_record(c, i, omega));
                }
                let mut acc = 0.0;
                let mut j = i;
                while acc < ell - 2.0 * tol.eps_ang {
                    acc += c.arcs()[j % m].measure;
                    j += 1;
                    if j > i + m {
                        return Err(ReconstructError::NonClosing);
                    }
                }
                if out.refined_omega.is_none() {
                    out.refined_omega = Some(PI - acc / 2.0);
                }
                let err = math::abs(acc - ell);
                if j <= m {
                    // A landing inside an arc means the arc structure is
                    // inconsistent with the stretch turn.
                    if err > (j - i + 2) as f64 * tol.eps_ang + 2.0 * OMEGA_DECIMAL_SLACK {
                        return Err(ReconstructError::InvalidCloud);
                    }
                    if err > out.max_jump_turn_error {
                        out.max_jump_turn_error = err;
                    }
                }
                j
            }
            PivotCase::Invalid => return Err(ReconstructError::InvalidCloud),
        };
        out.visits += next.min(m) - i;
        i = next;
    }
    Ok(out)
}

/// All strictly narrow vertices of a maximal cloud, in traversal order
/// starting from the first arc, each with its incident edge lines.
pub fn first_pass(c: &Cloud, omega: Angle) -> Result<Vec<NarrowRecord>, ReconstructError> {
    first_pass_with(c, omega, &Config::default())
}

pub fn first_pass_with(
    c: &Cloud,
    omega: Angle,
    config: &Config,
) -> Result<Vec<NarrowRecord>, ReconstructError> {
    if !(omega > 0.0 && omega < PI) {
        return Err(ReconstructError::InvalidAperture);
    }
    if !c.is_maximal() || c.len() < 2 {
        return Err(ReconstructError::InvalidCloud);
    }
    let tol = config.tolerances(c.scale());
    Ok(scan_pivots(c, omega, &tol)?.records)
}

/// Wedge-tracking walk from `u` to `v` (equal points walk the full loop).
/// Emits the first right contact, then every new left contact, stopping
/// before the left chain re-reports the starting right contact. Returns the
/// vertices and the number of junction crossings.
fn chain_walk(
    c: &Cloud,
    u: CloudPoint,
    v: CloudPoint,
    dir_r_u: Angle,
    omega: Angle,
    tol: &Tolerances,
) -> Result<(Vec<Point2>, usize), ReconstructError> {
    let m = c.len();
    let join_eps = 1e3 * tol.eps_pos;
    let full_loop = u.arc_index % m == v.arc_index % m && u.point.dist(v.point) <= join_eps;
    let mut remaining = if full_loop {
        c.total_measure()
    } else {
        c.turn(&u, &v)
    };
    let mut idx = u.arc_index % m;
    let mut d = dir_r_u + omega / 2.0;
    let mut avail = c.arcs()[idx].measure - c.offset_on(&u);
    let apex = u.point;
    if c.arcs()[idx].circle.boundary_dist(apex) > join_eps {
        return Err(ReconstructError::ContactOffCircle);
    }
    let wedge = Wedge::new(apex, d, omega).map_err(map_wedge_err)?;
    let (l0, r0) =
        wedge_circle_contacts(&wedge, &c.arcs()[idx].circle, tol).map_err(map_contact_err)?;
    // The starting right contact leads the output only when the right arm
    // is tangent there (the walk departs that vertex). From any other
    // start it lies several vertices back and the left-contact chain
    // reaches it at its proper place in the cycle.
    let tangent_start = r0.dist(apex) <= join_eps;
    let mut out: Vec<Point2> = Vec::new();
    if tangent_start {
        out.push(r0);
    }
    if !tangent_start || l0.dist(r0) > join_eps {
        out.push(l0);
    }
    let mut cur_l = l0;
    // Each starting contact already in the output gets its one wrap
    // re-visit by the left chain swallowed.
    let mut r0_skipped = !tangent_start;
    let mut l0_skipped = false;
    let mut crossings = 0usize;
    loop {
        if remaining <= avail + 2.0 * tol.eps_ang {
            break;
        }
        remaining -= avail;
        d -= avail / 2.0;
        idx = (idx + 1) % m;
        crossings += 1;
        if crossings > m + 1 {
            return Err(ReconstructError::ContactOffCircle);
        }
        // The walk must not run through a strictly narrow vertex: the
        // stationary gap there would desynchronize the direction.
        match classify_pivot(c, idx, omega, tol) {
            PivotCase::NarrowExact { t, theta } if t >= 2 || theta < omega - tol.eps_ang => {
                return Err(ReconstructError::StrictNarrowEncountered);
            }
            PivotCase::NarrowStretch { theta } if theta < omega - tol.eps_ang => {
                return Err(ReconstructError::StrictNarrowEncountered);
            }
            _ => {}
        }
        let junction = c.arcs()[idx].start;
        if c.arcs()[idx].circle.boundary_dist(junction) > join_eps {
            return Err(ReconstructError::ContactOffCircle);
        }
        let w = Wedge::new(junction, d, omega).map_err(map_wedge_err)?;
        let (nl, _nr) =
            wedge_circle_contacts(&w, &c.arcs()[idx].circle, tol).map_err(map_contact_err)?;
        if nl.dist(cur_l) > join_eps {
            if !r0_skipped && nl.dist(r0) <= join_eps {
                r0_skipped = true;
            } else if !l0_skipped && nl.dist(l0) <= join_eps {
                l0_skipped = true;
            } else {
                out.push(nl);
                if out.len() > m + 2 {
                    return Err(ReconstructError::ContactOffCircle);
                }
            }
            cur_l = nl;
        }
        avail = c.arcs()[idx].measure;
    }
    Ok((out, crossings))
}

fn map_wedge_err(e: GeometryError) -> ReconstructError {
    match e {
        GeometryError::InvalidAperture => ReconstructError::InvalidAperture,
        other => ReconstructError::Geometry(other),
    }
}

fn map_contact_err(e: GeometryError) -> ReconstructError {
    match e {
        GeometryError::ApexNotOnCircle | GeometryError::ArmMissesCircle => {
            ReconstructError::ContactOffCircle
        }
        other => ReconstructError::Geometry(other),
    }
}

/// Vertices of the polygon portion whose cloud runs from `u` to `v`
/// clockwise, given the right-arm direction of the wedge at `u`. The
/// portion must not contain a strictly narrow pivot in its interior.
pub fn chain_reconstruct(
    c: &Cloud,
    u: CloudPoint,
    v: CloudPoint,
    dir_r_u: Angle,
    omega: Angle,
) -> Result<Vec<Point2>, ReconstructError> {
    chain_reconstruct_with(c, u, v, dir_r_u, omega, &Config::default())
}

pub fn chain_reconstruct_with(
    c: &Cloud,
    u: CloudPoint,
    v: CloudPoint,
    dir_r_u: Angle,
    omega: Angle,
    config: &Config,
) -> Result<Vec<Point2>, ReconstructError> {
    if !(omega > 0.0 && omega < PI) {
        return Err(ReconstructError::InvalidAperture);
    }
    if c.is_empty() {
        return Err(ReconstructError::InvalidCloud);
    }
    let tol = config.tolerances(c.scale());
    Ok(chain_walk(c, u, v, dir_r_u, omega, &tol)?.0)
}

/// Right-arm direction of the wedge departing the pivot before `arcs[i]`:
/// tangent to that arc's circle at its start, pointing against the apex
/// motion.
fn departure_right_arm(c: &Cloud, i: usize) -> Angle {
    normalize_angle(c.arcs()[i].start_angle() + PI / 2.0)
}

fn second_pass_internal(
    c: &Cloud,
    omega: Angle,
    s: &[NarrowRecord],
    tol: &Tolerances,
) -> Result<(ConvexPolygon, usize), ReconstructError> {
    let m = c.len();
    let ell = 2.0 * (PI - omega);
    if s.is_empty() {
        // No stationary deficit: the total turn is exactly two revolutions,
        // and the wedge at the starting point is recovered from its
        // trailing point one stretch turn behind.
        let total = c.total_measure();
        if math::abs(total - 2.0 * TAU) > m as f64 * tol.eps_ang {
            return Err(ReconstructError::InvalidCloud);
        }
        let x = c.pivot_point(0);
        let xp = c
            .point_at_turn(&x, total - ell)
            .map_err(|_| ReconstructError::InvalidCloud)?;
        let dir_r = x.point.dir_to(xp.point);
        let (verts, crossings) = chain_walk(c, x, x, dir_r, omega, tol)?;
        let poly = validate_convex(&verts).map_err(|_| ReconstructError::InvalidCloud)?;
        return Ok((poly, crossings));
    }
    let k = s.len();
    let mut verts: Vec<Point2> = Vec::new();
    let mut crossings = 0usize;
    for j in 0..k {
        let i0 = s[j].pivot.arc_index;
        let i1 = s[(j + 1) % k].pivot.arc_index;
        let span = if k == 1 { m } else { (i1 + m - i0) % m };
        if span == 0 {
            return Err(ReconstructError::InvalidCloud);
        }
        if span == 1 {
            // A single maximal arc between consecutive strictly narrow
            // vertices is a run of t stretches; the t - 1 interior points
            // are the vertices hidden by the merge.
            let arc = &c.arcs()[i0];
            let t = math::round(arc.measure / ell);
            let slack = tol.eps_ang + 2.0 * OMEGA_DECIMAL_SLACK;
            if t < 1.0 || math::abs(arc.measure - t * ell) > t * slack {
                return Err(ReconstructError::InvalidCloud);
            }
            verts.push(s[j].pivot.point);
            for q in 1..t as usize {
                verts.push(arc.point_at_turn(q as f64 * ell));
            }
        } else {
            if math::round(c.arcs()[i0].measure / ell) >= 2.0 {
                return Err(ReconstructError::InvalidCloud);
            }
            let u = c.pivot_point(i0);
            let v = c.pivot_point(i1);
            let (mut chain, cr) = chain_walk(c, u, v, departure_right_arm(c, i0), omega, tol)?;
            crossings += cr;
            if k >= 2 {
                // The closing narrow vertex opens the next portion.
                chain.pop();
            }
            verts.extend_from_slice(&chain);
        }
    }
    let poly = validate_convex(&verts).map_err(|_| ReconstructError::InvalidCloud)?;
    Ok((poly, crossings))
}

/// Assembles the polygon from the strictly-narrow records: midpoint
/// subdivision on merged single-arc portions, chain walks elsewhere, the
/// anchored full loop when no record exists.
pub fn second_pass(
    c: &Cloud,
    omega: Angle,
    s: &[NarrowRecord],
) -> Result<ConvexPolygon, ReconstructError> {
    second_pass_with(c, omega, s, &Config::default())
}

pub fn second_pass_with(
    c: &Cloud,
    omega: Angle,
    s: &[NarrowRecord],
    config: &Config,
) -> Result<ConvexPolygon, ReconstructError> {
    if !(omega > 0.0 && omega < PI) {
        return Err(ReconstructError::InvalidAperture);
    }
    if !c.is_maximal() || c.len() < 2 {
        return Err(ReconstructError::InvalidCloud);
    }
    let tol = config.tolerances(c.scale());
    Ok(second_pass_internal(c, omega, s, &tol)?.0)
}

fn certify(
    polygon: &ConvexPolygon,
    omega: Angle,
    target: &Cloud,
    config: &Config,
) -> Result<(), ReconstructError> {
    let forward = if polygon.len() == 2 {
        segment_cloud_with(polygon.vertex(0), polygon.vertex(1), omega, config)
    } else {
        omega_cloud_with(polygon, omega, config)
    };
    let forward = forward.map_err(|_| ReconstructError::CertificationFailed)?;
    let rebuilt =
        maximal_cloud_with(&forward, config).map_err(|_| ReconstructError::CertificationFailed)?;
    let tol_pos = 1e-7 * target.scale();
    let report = match_clouds(&rebuilt, target, tol_pos, 1e-6);
    if !report.verdict {
        return Err(ReconstructError::CertificationFailed);
    }
    Ok(())
}

/// Recovers the polygon from a maximal cloud and a known aperture, then
/// certifies the result by rebuilding its cloud and comparing. The cloud's
/// stored aperture, if any, is ignored: the same arcs can be a valid cloud
/// for several apertures with different polygons.
pub fn reconstruct_aware(
    c: &Cloud,
    omega: Angle,
) -> Result<ReconstructionResult, ReconstructError> {
    reconstruct_aware_with(c, omega, &Config::default())
}

pub fn reconstruct_aware_with(
    c: &Cloud,
    omega: Angle,
    config: &Config,
) -> Result<ReconstructionResult, ReconstructError> {
    if !(omega > 0.0 && omega < PI) || !omega.is_finite() {
        return Err(ReconstructError::InvalidAperture);
    }
    let m = maximal_cloud_with(c, config)?;
    if m.len() < 2 {
        return Err(ReconstructError::SingleCircleAmbiguous);
    }
    let tol = config.tolerances(m.scale());
    let scan = scan_pivots(&m, omega, &tol)?;
    // A decimal-rounded aperture is replaced by the value the stretch
    // turns imply; a degenerate cloud (coinciding junction events) only
    // reproduces under the exact aperture, not a quantized one.
    let omega = match scan.refined_omega {
        Some(w) if (w - omega).abs() <= 4.0 * OMEGA_DECIMAL_SLACK && w > 0.0 && w < PI => w,
        _ => omega,
    };
    let (polygon, crossings) = second_pass_internal(&m, omega, &scan.records, &tol)?;
    certify(&polygon, omega, &m, config)?;
    Ok(ReconstructionResult {
        polygon,
        omega,
        certified: true,
        stats: ReconstructionStats {
            pivot_visits: scan.visits + crossings,
            working_set_peak: scan.records.len() + 4,
            narrow_count: scan.narrow_count,
            max_jump_turn_error: scan.max_jump_turn_error,
        },
    })
}

/// Longest run of consecutive arcs, starting at pivot `i`, whose circles
/// all pass through that pivot's location, with the summed turn.
fn narrow_run(c: &Cloud, i: usize, eps: f64) -> (usize, f64) {
    let m = c.len();
    let u = c.pivots()[i].location;
    let mut span = 0usize;
    let mut tau = 0.0;
    for j in 0..m {
        let a = &c.arcs()[(i + j) % m];
        if a.circle.boundary_dist(u) <= eps {
            span += 1;
            tau += a.measure;
        } else {
            break;
        }
    }
    (span, tau)
}

/// Recovers both the polygon and the aperture from a maximal cloud of some
/// unknown aperture below a half turn. Structure probes fix the aperture
/// (a narrow stretch's turn, the shared arc measure of an all-narrow
/// cloud, or a normal pivot's second circle intersection), and
/// certification arbitrates.
pub fn reconstruct_oblivious(c: &Cloud) -> Result<ReconstructionResult, ReconstructError> {
    reconstruct_oblivious_with(c, &Config::default())
}

pub fn reconstruct_oblivious_with(
    c: &Cloud,
    config: &Config,
) -> Result<ReconstructionResult, ReconstructError> {
    let m = maximal_cloud_with(c, config)?;
    let n = m.len();
    if n < 2 {
        return Err(ReconstructError::SingleCircleAmbiguous);
    }
    let tol = config.tolerances(m.scale());
    let run_eps = 8.0 * tol.eps_pos;

    // A run of >= 2 arcs through its opening pivot is a narrow stretch,
    // whose turn is exactly 2(pi - omega). A probe that fails to certify
    // falls through to the remaining branches.
    let mut attempts = 0usize;
    for i in 0..n {
        if attempts >= 8 {
            break;
        }
        let (span, tau) = narrow_run(&m, i, run_eps);
        if span >= 2 && span < n {
            attempts += 1;
            let omega = PI - tau / 2.0;
            if omega > 0.0 && omega < PI {
                if let Ok(mut r) = reconstruct_aware_with(&m, omega, config) {
                    r.stats.pivot_visits += n;
                    return Ok(r);
                }
            }
        }
    }

    // All arcs sharing one measure above a half turn: every pivot is a
    // narrow vertex, so the pivots are the polygon (a segment when there
    // are only two).
    let m0 = m.arcs()[0].measure;
    let all_equal = m
        .arcs()
        .iter()
        .all(|a| math::abs(a.measure - m0) <= tol.eps_ang);
    if all_equal && m0 > PI + tol.eps_ang {
        let omega = PI - m0 / 2.0;
        let pts: Vec<Point2> = m.pivots().iter().map(|p| p.location).collect();
        if n == 2 {
            let both_shared = m.arcs().iter().all(|a| {
                a.circle.boundary_dist(pts[0]) <= run_eps
                    && a.circle.boundary_dist(pts[1]) <= run_eps
            });
            if !both_shared {
                return Err(ReconstructError::NotASegment);
            }
            let polygon = validate_convex(&pts).map_err(|_| ReconstructError::NotASegment)?;
            certify(&polygon, omega, &m, config)?;
            return Ok(ReconstructionResult {
                polygon,
                omega,
                certified: true,
                stats: ReconstructionStats {
                    pivot_visits: n,
                    working_set_peak: 4,
                    narrow_count: 2,
                    max_jump_turn_error: 0.0,
                },
            });
        }
        let polygon = validate_convex(&pts).map_err(|_| ReconstructError::InvalidCloud)?;
        certify(&polygon, omega, &m, config)?;
        return Ok(ReconstructionResult {
            polygon,
            omega,
            certified: true,
            stats: ReconstructionStats {
                pivot_visits: n,
                working_set_peak: 4,
                narrow_count: n,
                max_jump_turn_error: 0.0,
            },
        });
    }

    // No narrow vertex at all: total turn is two revolutions and every
    // pivot joins two circles meeting again at a polygon vertex. The turn
    // from the pivot to where that vertex's arm ray re-crosses the cloud
    // fixes the aperture.
    let total = m.total_measure();
    if math::abs(total - 2.0 * TAU) > n as f64 * tol.eps_ang {
        return Err(ReconstructError::InvalidCloud);
    }
    let gate = 0.02;
    for probe in 0..n.min(8) {
        let u = m.pivots()[probe].location;
        let c_prev = &m.arcs()[(probe + n - 1) % n].circle;
        let c_next = &m.arcs()[probe].circle;
        let (x, tangent) = match second_circle_intersection(c_prev, c_next, u, &tol) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if tangent {
            continue;
        }
        let ray_dir = u.dir_to(x);
        let e = unit(ray_dir);
        let s_x = u.dist(x);
        let u_cp = m.pivot_point(probe);
        let mut candidates: Vec<(f64, CloudPoint)> = Vec::new();
        for (ai, arc) in m.arcs().iter().enumerate() {
            let b = e.dot(arc.circle.center.sub(u));
            let c0 = arc.circle.center.sub(u).dot(arc.circle.center.sub(u))
                - arc.circle.radius * arc.circle.radius;
            let disc = b * b - c0;
            if disc < 0.0 {
                continue;
            }
            let root = math::sqrt(disc);
            for s in [b - root, b + root] {
                if s < s_x - 1e3 * tol.eps_pos {
                    continue;
                }
                let p = u.add(e.scale(s));
                if arc.contains(p, &tol) {
                    candidates.push((
                        s,
                        CloudPoint {
                            arc_index: ai,
                            point: p,
                        },
                    ));
                }
            }
        }
        candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
        candidates.dedup_by(|a, b| a.1.point.dist(b.1.point) <= 1e3 * tol.eps_pos);
        for (_, z) in candidates {
            let tau_f = m.turn(&u_cp, &z);
            let (omega, dir_r) = if tau_f > PI + gate && tau_f < TAU - gate {
                // The ray is the left arm: the exit point sits one stretch
                // turn ahead of the pivot.
                let w = PI - tau_f / 2.0;
                (w, ray_dir - w)
            } else {
                let tau_b = total - tau_f;
                if tau_b > PI + gate && tau_b < TAU - gate {
                    // The ray is the right arm: the exit point sits one
                    // stretch turn behind the pivot.
                    (PI - tau_b / 2.0, ray_dir)
                } else {
                    continue;
                }
            };
            if !(omega > 0.0 && omega < PI) {
                continue;
            }
            let verts = match chain_walk(&m, u_cp, u_cp, dir_r, omega, &tol) {
                Ok((v, _)) => v,
                Err(_) => continue,
            };
            let polygon = match validate_convex(&verts) {
                Ok(p) => p,
                Err(_) => continue,
            };
            if certify(&polygon, omega, &m, config).is_ok() {
                return Ok(ReconstructionResult {
                    polygon,
                    omega,
                    certified: true,
                    stats: ReconstructionStats {
                        pivot_visits: 2 * n,
                        working_set_peak: 4,
                        narrow_count: 0,
                        max_jump_turn_error: 0.0,
                    },
                });
            }
        }
    }
    Err(ReconstructError::AmbiguousOmega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::{maximal_cloud, omega_cloud, segment_cloud};
    use crate::oracle::{match_polygons, random_convex_polygon, safe_omega};
    use approx::assert_relative_eq;

    fn poly(pts: &[(f64, f64)]) -> ConvexPolygon {
        let v: Vec<Point2> = pts.iter().map(|&(x, y)| Point2::new(x, y)).collect();
        validate_convex(&v).unwrap()
    }

    fn equilateral() -> ConvexPolygon {
        poly(&[(0.0, 0.0), (0.5, 3f64.sqrt() / 2.0), (1.0, 0.0)])
    }

    fn centered_square() -> ConvexPolygon {
        poly(&[(-0.5, -0.5), (-0.5, 0.5), (0.5, 0.5), (0.5, -0.5)])
    }

    /// Triangle with prescribed internal angles, inscribed in the unit
    /// circle, stored clockwise starting from the vertex with angle `a`.
    fn triangle_with_angles(a: f64, b: f64, c: f64) -> ConvexPolygon {
        assert_relative_eq!(a + b + c, PI, epsilon = 1e-12);
        let phi_a = PI / 2.0;
        let phi_b = phi_a - 2.0 * c;
        let phi_c = phi_b - 2.0 * a;
        let v: Vec<Point2> = [phi_a, phi_b, phi_c].iter().map(|&p| unit(p)).collect();
        validate_convex(&v).unwrap()
    }

    fn on_line(l: &OrientedLine, p: Point2, eps: f64) -> bool {
        let e = unit(l.direction);
        math::abs(e.cross(p.sub(l.point))) <= eps
    }

    #[test]
    fn first_pass_records_triangle_edges() {
        let p = equilateral();
        let c = maximal_cloud(&omega_cloud(&p, PI / 2.0).unwrap()).unwrap();
        let s = first_pass(&c, PI / 2.0).unwrap();
        assert_eq!(s.len(), 3);
        for rec in &s {
            let u = rec.pivot.point;
            let i = p.vertices().iter().position(|v| v.dist(u) < 1e-9).unwrap();
            let prev = p.vertex(i + 2);
            let next = p.vertex(i + 1);
            assert!(on_line(&rec.left_line, u, 1e-9));
            assert!(on_line(&rec.left_line, prev, 1e-9));
            assert!(on_line(&rec.right_line, u, 1e-9));
            assert!(on_line(&rec.right_line, next, 1e-9));
        }
    }

    #[test]
    fn first_pass_square_has_no_strict_records() {
        let c = maximal_cloud(&omega_cloud(&centered_square(), PI / 2.0).unwrap()).unwrap();
        let s = first_pass(&c, PI / 2.0).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn first_pass_rejects_non_multiple_oversize() {
        // Arcs of measure pi against a stretch turn of 0.6 pi: neither a
        // single stretch nor an integer run.
        let c = maximal_cloud(&omega_cloud(&equilateral(), PI / 2.0).unwrap()).unwrap();
        assert!(matches!(
            first_pass(&c, 0.7 * PI),
            Err(ReconstructError::InvalidCloud)
        ));
    }

    #[test]
    fn chain_full_loop_on_square() {
        let p = centered_square();
        let c = maximal_cloud(&omega_cloud(&p, PI / 2.0).unwrap()).unwrap();
        let u = c.pivot_point(0);
        let xp = c.point_at_turn(&u, c.total_measure() - PI).unwrap();
        let dir_r = u.point.dir_to(xp.point);
        let verts = chain_reconstruct(&c, u, u, dir_r, PI / 2.0).unwrap();
        assert_eq!(verts.len(), 4);
        for v in &verts {
            assert!(p.vertices().iter().any(|w| w.dist(*v) < 1e-9));
        }
    }

    #[test]
    fn aware_roundtrip_fixed_shapes() {
        for (p, omega) in [
            (equilateral(), PI / 2.0),
            (centered_square(), PI / 2.0),
            (centered_square(), PI / 4.0),
            (poly(&[(0.0, 0.0), (0.1, 1.3), (1.4, 1.5), (2.0, 0.4)]), 1.9),
        ] {
            let c = maximal_cloud(&omega_cloud(&p, omega).unwrap()).unwrap();
            let r = reconstruct_aware(&c, omega).unwrap();
            assert!(r.certified);
            let rep = match_polygons(&r.polygon, &p, 1e-9 * (1.0 + p.bbox_diameter()));
            assert!(
                rep.verdict,
                "omega {} error {}",
                omega, rep.max_vertex_error
            );
        }
    }

    #[test]
    fn aware_roundtrip_random() {
        for seed in 0..24u64 {
            let n = 3 + (seed as usize * 7) % 30;
            let p = random_convex_polygon(n, 1000 + seed).unwrap();
            let omega = safe_omega(&p, 0.3 + 0.4 * (seed as f64 / 24.0) * PI, 0.1, PI - 0.1);
            let c = maximal_cloud(&omega_cloud(&p, omega).unwrap()).unwrap();
            let r = reconstruct_aware(&c, omega)
                .unwrap_or_else(|e| panic!("seed {} n {} omega {}: {:?}", seed, n, omega, e));
            assert!(r.certified);
            let rep = match_polygons(&r.polygon, &p, 1e-6 * p.bbox_diameter());
            assert!(
                rep.verdict,
                "seed {} n {} omega {} err {}",
                seed, n, omega, rep.max_vertex_error
            );
            assert!(r.stats.pivot_visits <= 2 * c.len() + 16);
            assert!(r.stats.max_jump_turn_error <= 64.0 * 1e-9);
        }
    }

    #[test]
    fn one_cloud_serves_two_apertures() {
        let p = triangle_with_angles(PI / 3.0, 16.0 * PI / 45.0, 14.0 * PI / 45.0);
        let omega = 2.0 * PI / 3.0;
        let c = maximal_cloud(&omega_cloud(&p, omega).unwrap()).unwrap();
        assert_eq!(c.len(), 3);
        for a in c.arcs() {
            assert_relative_eq!(a.measure, 2.0 * PI / 3.0, epsilon = 1e-9);
        }
        // The generating aperture returns the triangle.
        let r1 = reconstruct_aware(&c, omega).unwrap();
        assert_eq!(r1.polygon.len(), 3);
        assert!(match_polygons(&r1.polygon, &p, 1e-9).verdict);
        // The wider aperture returns the hexagon whose even vertices are
        // the triangle's and whose odd vertices are the arc midpoints.
        let omega2 = 5.0 * PI / 6.0;
        let r2 = reconstruct_aware(&c, omega2).unwrap();
        assert_eq!(r2.polygon.len(), 6);
        for a in c.arcs() {
            let mid = a.point_at_turn(a.measure / 2.0);
            assert!(
                r2.polygon.vertices().iter().any(|v| v.dist(mid) < 1e-9),
                "missing midpoint {:?}",
                mid
            );
        }
        for v in p.vertices() {
            assert!(r2.polygon.vertices().iter().any(|w| w.dist(*v) < 1e-9));
        }
        // A third aperture fits neither structure.
        assert!(reconstruct_aware(&c, PI / 2.0).is_err());
    }

    #[test]
    fn pentagon_hidden_vertex_recovered_as_midpoint() {
        let deg = |d: f64| d * PI / 180.0;
        let angles = [90.0, -54.0, -198.0, -222.0, -246.0];
        let pts: Vec<Point2> = angles.iter().map(|&a| unit(deg(a))).collect();
        let p = validate_convex(&pts).unwrap();
        let omega = 0.6 * PI;
        let c = maximal_cloud(&omega_cloud(&p, omega).unwrap()).unwrap();
        assert_eq!(c.len(), 6);
        let r = reconstruct_aware(&c, omega).unwrap();
        assert_eq!(r.polygon.len(), 5);
        let rep = match_polygons(&r.polygon, &p, 1e-9);
        assert!(rep.verdict, "err {}", rep.max_vertex_error);
    }

    #[test]
    fn aware_handles_segment_cloud() {
        let a = Point2::new(0.2, -0.1);
        let b = Point2::new(1.3, 0.7);
        let omega = PI / 3.0;
        let c = segment_cloud(a, b, omega).unwrap();
        let r = reconstruct_aware(&c, omega).unwrap();
        assert_eq!(r.polygon.len(), 2);
        assert!(r.polygon.vertices().iter().any(|v| v.dist(a) < 1e-9));
        assert!(r.polygon.vertices().iter().any(|v| v.dist(b) < 1e-9));
    }

    #[test]
    fn aware_rejects_full_circle() {
        let k = 5;
        let pts: Vec<Point2> = (0..k)
            .map(|i| unit(PI / 2.0 - TAU * i as f64 / k as f64))
            .collect();
        let p = validate_convex(&pts).unwrap();
        let omega = PI * (1.0 - 1.0 / k as f64);
        let c = maximal_cloud(&omega_cloud(&p, omega).unwrap()).unwrap();
        assert!(matches!(
            reconstruct_aware(&c, omega),
            Err(ReconstructError::SingleCircleAmbiguous)
        ));
    }

    #[test]
    fn oblivious_recovers_tie_triangle() {
        // Every internal angle equals the aperture: all arcs share the
        // stretch measure and the pivots are the vertices.
        let p = equilateral();
        let omega = PI / 3.0;
        let c = maximal_cloud(&omega_cloud(&p, omega).unwrap()).unwrap();
        assert_relative_eq!(c.total_measure(), 2.0 * TAU, epsilon = 1e-9);
        let r = reconstruct_oblivious(&c).unwrap();
        assert_relative_eq!(r.omega, omega, epsilon = 1e-9);
        assert!(match_polygons(&r.polygon, &p, 1e-9).verdict);
    }

    #[test]
    fn oblivious_recovers_square_quarter() {
        let p = centered_square();
        let omega = PI / 4.0;
        let c = maximal_cloud(&omega_cloud(&p, omega).unwrap()).unwrap();
        let r = reconstruct_oblivious(&c).unwrap();
        assert_relative_eq!(r.omega, omega, epsilon = 1e-9);
        assert!(match_polygons(&r.polygon, &p, 1e-9).verdict);
    }

    #[test]
    fn oblivious_recovers_segment() {
        let a = Point2::new(0.0, 0.0);
        let b = Point2::new(1.0, 0.0);
        let omega = PI / 3.0;
        let c = segment_cloud(a, b, omega).unwrap();
        let r = reconstruct_oblivious(&c).unwrap();
        assert_eq!(r.polygon.len(), 2);
        assert_relative_eq!(r.omega, omega, epsilon = 1e-9);
        assert!(r.polygon.vertices().iter().any(|v| v.dist(a) < 1e-9));
        assert!(r.polygon.vertices().iter().any(|v| v.dist(b) < 1e-9));
    }

    #[test]
    fn oblivious_recovers_all_strict_triangle() {
        let p = triangle_with_angles(deg(50.0), deg(60.0), deg(70.0));
        let omega = deg(80.0);
        let c = maximal_cloud(&omega_cloud(&p, omega).unwrap()).unwrap();
        let r = reconstruct_oblivious(&c).unwrap();
        assert_relative_eq!(r.omega, omega, epsilon = 1e-9);
        assert!(match_polygons(&r.polygon, &p, 1e-9).verdict);
    }

    fn deg(d: f64) -> f64 {
        d * PI / 180.0
    }

    #[test]
    fn oblivious_random_narrow_apertures() {
        for seed in 0..12u64 {
            let n = 4 + (seed as usize) % 9;
            let p = random_convex_polygon(n, 4000 + seed).unwrap();
            let omega = safe_omega(&p, 0.3 + 0.1 * seed as f64, 0.05, PI / 2.0 - 0.05);
            let c = maximal_cloud(&omega_cloud(&p, omega).unwrap()).unwrap();
            let r = reconstruct_oblivious(&c)
                .unwrap_or_else(|e| panic!("seed {} n {} omega {}: {:?}", seed, n, omega, e));
            assert!(
                math::abs(r.omega - omega) <= 1e-9,
                "seed {} omega {} got {}",
                seed,
                omega,
                r.omega
            );
            let rep = match_polygons(&r.polygon, &p, 1e-6 * p.bbox_diameter());
            assert!(rep.verdict, "seed {} err {}", seed, rep.max_vertex_error);
        }
    }

    #[test]
    fn second_pass_requires_maximal_input() {
        let c = omega_cloud(&equilateral(), PI / 2.0).unwrap();
        // The forward cloud is not flagged maximal even when merge-free.
        assert!(matches!(
            first_pass(&c, PI / 2.0),
            Err(ReconstructError::InvalidCloud)
        ));
    }
}
