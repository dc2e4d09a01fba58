//! Forward construction: the closed chain of circular arcs traced by the
//! apex of the minimal wedge as its direction sweeps a full revolution, the
//! maximal form with co-circular neighbors merged, and turn arithmetic over
//! the chain.
//!
//! Sweep orientation: as the wedge direction decreases the apex visits the
//! polygon's vertices in storage (clockwise) order, and the central angle on
//! every supporting circle decreases at twice the rate of the direction.

use crate::geometry::{
    inscribed_circle, internal_angle, line_intersection, unit, validate_convex, Angle, Arc,
    ChordSide, ConvexPolygon, GeometryError, Point2,
};
use crate::math::{self, normalize_angle, Config, Tolerances, PI, TAU};
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub enum CloudError {
    DegeneratePolygon,
    InvalidAperture,
    EmptyCloud,
    CountMismatch,
    NonClosing,
    PivotMismatch,
    NotMaximal,
    OversizeArc,
    TurnOutOfRange,
    IdentityViolated,
    Geometry(GeometryError),
}

impl From<GeometryError> for CloudError {
    fn from(e: GeometryError) -> Self {
        CloudError::Geometry(e)
    }
}

impl core::fmt::Display for CloudError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CloudError::DegeneratePolygon => f.write_str("operation needs at least 3 vertices"),
            CloudError::InvalidAperture => {
                f.write_str("aperture must lie strictly between 0 and pi")
            }
            CloudError::EmptyCloud => f.write_str("cloud has no arcs"),
            CloudError::CountMismatch => f.write_str("arc and pivot counts disagree"),
            CloudError::NonClosing => f.write_str("arc chain does not close"),
            CloudError::PivotMismatch => f.write_str("pivot does not sit at its arc boundary"),
            CloudError::NotMaximal => {
                f.write_str("cloud flagged maximal but has co-circular neighbors")
            }
            CloudError::OversizeArc => {
                f.write_str("arc measure exceeds the per-arc bound for this aperture")
            }
            CloudError::TurnOutOfRange => f.write_str("turn outside [0, total measure]"),
            CloudError::IdentityViolated => {
                f.write_str("total measure identity violated beyond tolerance")
            }
            CloudError::Geometry(e) => write!(f, "geometry error: {}", e),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CloudError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotKind {
    Plain,
    Narrow,
    StrictlyNarrow,
    Hidden,
}

/// Junction between two consecutive arcs. `pivots[i]` joins `arcs[i-1]` and
/// `arcs[i]`, so its location is the start point of `arcs[i]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pivot {
    pub location: Point2,
    pub kind: PivotKind,
    pub index: usize,
}

/// A point on the cloud, addressed by the arc it lies on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudPoint {
    pub arc_index: usize,
    pub point: Point2,
}

/// Closed clockwise chain of circular arcs with annotated junctions. A full
/// circle is stored as a single arc of measure `2pi` with zero pivots.
#[derive(Debug, Clone, PartialEq)]
pub struct Cloud {
    arcs: Vec<Arc>,
    pivots: Vec<Pivot>,
    omega: Option<Angle>,
    maximal: bool,
    tol: Tolerances,
    scale: f64,
}

fn scale_of_arcs(arcs: &[Arc]) -> f64 {
    let mut min_x = f64::INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for a in arcs {
        min_x = min_x.min(a.circle.center.x - a.circle.radius);
        min_y = min_y.min(a.circle.center.y - a.circle.radius);
        max_x = max_x.max(a.circle.center.x + a.circle.radius);
        max_y = max_y.max(a.circle.center.y + a.circle.radius);
    }
    math::hypot(max_x - min_x, max_y - min_y)
}

impl Cloud {
    /// Assembles a cloud from raw parts, validating chain closure, pivot
    /// placement and counts, the maximal flag, and the per-arc measure bound
    /// (arcs of a non-maximal cloud with known aperture never exceed
    /// `2(pi - omega)`).
    pub fn from_parts(
        arcs: Vec<Arc>,
        pivots: Vec<Pivot>,
        omega: Option<Angle>,
        maximal: bool,
        config: &Config,
    ) -> Result<Cloud, CloudError> {
        if arcs.is_empty() {
            return Err(CloudError::EmptyCloud);
        }
        let scale = scale_of_arcs(&arcs);
        let tol = config.tolerances(scale);
        let n = arcs.len();
        if n == 1 {
            if arcs[0].measure < TAU - tol.eps_ang {
                return Err(CloudError::NonClosing);
            }
            if !pivots.is_empty() {
                return Err(CloudError::CountMismatch);
            }
        } else {
            if pivots.len() != n {
                return Err(CloudError::CountMismatch);
            }
            // Loaded endpoints were re-projected onto their circles, and
            // merged arcs accumulate a few re-projections, hence the cushion.
            let slack = 8.0 * tol.eps_pos;
            for i in 0..n {
                if arcs[i].end.dist(arcs[(i + 1) % n].start) > slack {
                    return Err(CloudError::NonClosing);
                }
                if pivots[i].index != i {
                    return Err(CloudError::PivotMismatch);
                }
                if pivots[i].location.dist(arcs[i].start) > slack {
                    return Err(CloudError::PivotMismatch);
                }
            }
        }
        if maximal {
            for i in 0..n {
                if n > 1
                    && arcs[i]
                        .circle
                        .coincides(&arcs[(i + 1) % n].circle, tol.eps_pos)
                {
                    return Err(CloudError::NotMaximal);
                }
            }
        } else if let Some(w) = omega {
            let cap = 2.0 * (PI - w) + 2.0 * tol.eps_ang;
            for a in &arcs {
                if a.measure > cap {
                    return Err(CloudError::OversizeArc);
                }
            }
        }
        Ok(Cloud {
            arcs,
            pivots,
            omega,
            maximal,
            tol,
            scale,
        })
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn pivots(&self) -> &[Pivot] {
        &self.pivots
    }

    pub fn omega(&self) -> Option<Angle> {
        self.omega
    }

    pub fn is_maximal(&self) -> bool {
        self.maximal
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Diameter of the bounding box of all supporting circles.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn total_measure(&self) -> f64 {
        self.arcs.iter().map(|a| a.measure).sum()
    }

    /// The point where `arcs[i]` starts (the location of `pivots[i]` when
    /// pivots exist).
    pub fn pivot_point(&self, i: usize) -> CloudPoint {
        let i = i % self.arcs.len();
        CloudPoint {
            arc_index: i,
            point: self.arcs[i].start,
        }
    }

    /// Clockwise offset of a cloud point within its arc, snapped into
    /// `[0, measure]`.
    pub(crate) fn offset_on(&self, s: &CloudPoint) -> f64 {
        let arc = &self.arcs[s.arc_index % self.arcs.len()];
        let slack = self.tol.eps_ang + 2.0 * self.tol.eps_pos / arc.circle.radius;
        let t = arc.turn_to(s.point);
        if t >= TAU - slack {
            0.0
        } else if t > arc.measure {
            arc.measure
        } else {
            t
        }
    }

    /// Angular measure traversed clockwise from `s` to `t`. The turn from a
    /// point to itself is 0; use `total_measure` for the full loop.
    pub fn turn(&self, s: &CloudPoint, t: &CloudPoint) -> Angle {
        let n = self.arcs.len();
        let si = s.arc_index % n;
        let ti = t.arc_index % n;
        let so = self.offset_on(s);
        let to = self.offset_on(t);
        if si == ti {
            if to >= so {
                return to - so;
            }
            return self.total_measure() - (so - to);
        }
        let mut acc = self.arcs[si].measure - so;
        let mut i = (si + 1) % n;
        while i != ti {
            acc += self.arcs[i].measure;
            i = (i + 1) % n;
        }
        acc + to
    }

    /// The point at clockwise turn `tau` from `s`. Lands exactly on a pivot
    /// (the following arc's start) when `tau` hits an arc boundary within
    /// angular tolerance.
    pub fn point_at_turn(&self, s: &CloudPoint, tau: Angle) -> Result<CloudPoint, CloudError> {
        let eps = self.tol.eps_ang;
        if !(tau >= -eps && tau <= self.total_measure() + eps) || !tau.is_finite() {
            return Err(CloudError::TurnOutOfRange);
        }
        let n = self.arcs.len();
        let mut idx = s.arc_index % n;
        let mut remaining = tau.max(0.0) + self.offset_on(s);
        for _ in 0..=n {
            let m = self.arcs[idx].measure;
            if remaining <= m - eps {
                if remaining <= eps {
                    return Ok(CloudPoint {
                        arc_index: idx,
                        point: self.arcs[idx].start,
                    });
                }
                return Ok(CloudPoint {
                    arc_index: idx,
                    point: self.arcs[idx].point_at_turn(remaining),
                });
            }
            if remaining <= m + eps {
                let nxt = (idx + 1) % n;
                return Ok(CloudPoint {
                    arc_index: nxt,
                    point: self.arcs[nxt].start,
                });
            }
            remaining -= m;
            idx = (idx + 1) % n;
        }
        Err(CloudError::TurnOutOfRange)
    }

    /// First arc containing `p`, if any.
    pub fn locate(&self, p: Point2) -> Option<CloudPoint> {
        (0..self.arcs.len())
            .find(|&i| self.arcs[i].contains(p, &self.tol))
            .map(|i| CloudPoint {
                arc_index: i,
                point: p,
            })
    }

    pub fn contains_point(&self, p: Point2) -> bool {
        self.locate(p).is_some()
    }
}

/// Index of the vertex maximizing the projection onto the unit vector of
/// `normal_dir`; ties resolve to the later scan index, which is the
/// clockwise-later vertex at an event direction.
fn support_vertex(p: &ConvexPolygon, normal_dir: Angle) -> usize {
    let e = unit(normal_dir);
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, v) in p.vertices().iter().enumerate() {
        let val = e.dot(*v);
        if val >= best_val {
            best_val = val;
            best = i;
        }
    }
    best
}

/// Apex of the wedge with bisector direction `d` whose left arm passes
/// through `vl` and right arm through `vr`.
fn apex_from_arms(vl: Point2, vr: Point2, d: Angle, omega: Angle) -> Result<Point2, CloudError> {
    line_intersection(vl, d + omega / 2.0, vr, d - omega / 2.0, 1e-300)
        .ok_or(CloudError::Geometry(GeometryError::NonFinite))
}

/// Arc traced while the wedge touches `vl` with its left arm and `vr` with
/// its right arm, between directions `d_start` (higher) and `d_end`.
fn contact_arc(
    p: &ConvexPolygon,
    l: usize,
    r: usize,
    omega: Angle,
    d_start: f64,
    start_pt: Point2,
    d_end: f64,
    end_pt: Point2,
    tol: &Tolerances,
) -> Result<Arc, CloudError> {
    let vl = p.vertex(l);
    let vr = p.vertex(r);
    let mid = apex_from_arms(vl, vr, (d_start + d_end) / 2.0, omega)?;
    let side = ChordSide::of(vr, vl, mid);
    let circle = inscribed_circle(vr, vl, omega, side, tol)?;
    Arc::new(circle, start_pt, end_pt, 2.0 * (d_start - d_end), tol).map_err(CloudError::Geometry)
}

/// Event sweep shared by the polygon and segment constructors. Handles any
/// polygon with >= 2 vertices.
fn sweep(p: &ConvexPolygon, omega: Angle, config: &Config) -> Result<Cloud, CloudError> {
    let n = p.len();
    let tol = config.tolerances(p.bbox_diameter());
    let eps_a = tol.eps_ang;
    // Apertures within a few angular epsilons of 0 or pi collapse event
    // gaps below the batching resolution; reject them up front.
    if !(omega > 16.0 * eps_a && omega < PI - 16.0 * eps_a) {
        return Err(CloudError::InvalidAperture);
    }
    let edge_dir = |i: usize| -> Angle { p.vertex(i % n).dir_to(p.vertex((i + 1) % n)) };
    let vertex_angle = |i: usize| -> Angle {
        if n == 2 {
            0.0
        } else {
            internal_angle(p, i).unwrap_or(0.0)
        }
    };
    // Event directions, as the bisector direction decreases:
    // the left contact advances past vertex l+1 when the left arm lies on
    // edge l (at direction dir(e_l) - omega/2), the right contact advances
    // past r+1 when the right arm contains edge r backward (at direction
    // dir(e_r) + pi + omega/2).
    let left_event = |l: usize| -> f64 { edge_dir(l) - omega / 2.0 };
    let right_event = |r: usize| -> f64 { edge_dir(r) + PI + omega / 2.0 };
    // Candidate representative at or below the cursor; an event exactly at
    // the cursor already happened (support ties resolve forward) and
    // re-fires one revolution later.
    let next_below = |cur: f64, raw: f64| -> f64 {
        let off = normalize_angle(cur - raw);
        if off == 0.0 {
            cur - TAU
        } else {
            cur - off
        }
    };

    let l0 = support_vertex(p, omega / 2.0 + PI / 2.0);
    let r0 = support_vertex(p, -omega / 2.0 - PI / 2.0);
    let stationary0 = l0 == r0;
    let mut l = l0;
    let mut r = r0;
    let mut d_cur = 0.0f64;
    let mut advances = 0usize;
    let two_n = 2 * n;
    let mut kinds: Vec<(Point2, PivotKind)> = Vec::with_capacity(two_n);
    let mut arcs_raw: Vec<Arc> = Vec::with_capacity(two_n);
    // (direction, point) where the arc in progress started.
    let mut arc_open: Option<(f64, Point2)> = None;
    // End of the partial arc that contains the direction-zero apex.
    let mut first_close: Option<(f64, Point2)> = None;

    while advances < two_n {
        let c1 = next_below(d_cur, left_event(l));
        let c2 = next_below(d_cur, right_event(r));
        let d_next = c1.max(c2);
        let pre_l = l;
        let pre_r = r;
        let stationary_pre = l == r;
        let mut arrival: Option<usize> = None;
        // Both families may fire in one batch (a zero-width stationary
        // interval); the right contact moves first so an arrival at the
        // left contact's vertex is seen before the wedge departs it.
        if advances < two_n && c2 >= d_next - eps_a {
            r = (r + 1) % n;
            advances += 1;
            if r == l {
                arrival = Some(l);
            }
        }
        if advances < two_n && c1 >= d_next - eps_a {
            l = (l + 1) % n;
            advances += 1;
        }
        let x = if let Some(u) = arrival {
            p.vertex(u)
        } else if stationary_pre {
            p.vertex(pre_l)
        } else {
            apex_from_arms(p.vertex(pre_l), p.vertex(pre_r), d_next, omega)?
        };
        if stationary_pre {
            // Departure from a stationary vertex: the pivot was emitted on
            // arrival; the next arc starts here.
            debug_assert!(arc_open.is_none());
        } else {
            match arc_open.take() {
                Some((d_a, pt_a)) => {
                    arcs_raw.push(contact_arc(
                        p, pre_l, pre_r, omega, d_a, pt_a, d_next, x, &tol,
                    )?);
                }
                None => first_close = Some((d_next, x)),
            }
            let kind = match arrival {
                Some(u) => {
                    if vertex_angle(u) < omega - eps_a {
                        PivotKind::StrictlyNarrow
                    } else {
                        PivotKind::Narrow
                    }
                }
                None => PivotKind::Plain,
            };
            kinds.push((x, kind));
        }
        arc_open = if l != r { Some((d_next, x)) } else { None };
        d_cur = d_next;
    }
    if l != l0 || r != r0 {
        return Err(CloudError::NonClosing);
    }

    if stationary0 {
        // The sweep began at the departure from a stationary vertex and
        // ended on the arrival back at it; the chain is already closed.
        if arc_open.is_some() || first_close.is_some() {
            return Err(CloudError::NonClosing);
        }
    } else {
        // The arc containing the direction-zero apex was traversed in two
        // partial pieces; reconstitute it as the first arc of the chain.
        let (d_end, pt_end) = first_close.ok_or(CloudError::NonClosing)?;
        let (d_a, pt_a) = arc_open.take().ok_or(CloudError::NonClosing)?;
        let first = contact_arc(p, l0, r0, omega, d_a + TAU, pt_a, d_end, pt_end, &tol)?;
        arcs_raw.insert(0, first);
    }
    // The last emitted pivot is the start of the first arc.
    kinds.rotate_right(1);

    let mut pivots: Vec<Pivot> = kinds
        .into_iter()
        .enumerate()
        .map(|(i, (location, kind))| Pivot {
            location,
            kind,
            index: i,
        })
        .collect();
    if pivots.len() != arcs_raw.len() {
        return Err(CloudError::CountMismatch);
    }
    let m = arcs_raw.len();
    for i in 0..m {
        let prev = (i + m - 1) % m;
        if arcs_raw[prev]
            .circle
            .coincides(&arcs_raw[i].circle, tol.eps_pos)
        {
            pivots[i].kind = PivotKind::Hidden;
        }
    }
    Cloud::from_parts(arcs_raw, pivots, Some(omega), false, config)
}

/// The apex locus of all minimal wedges of aperture `omega` around `p`,
/// one arc per combinatorially constant contact pair, junctions annotated.
/// The first arc is the one whose interior contains the apex for bisector
/// direction 0 (or the arc departing the stationary vertex holding that
/// apex).
pub fn omega_cloud(p: &ConvexPolygon, omega: Angle) -> Result<Cloud, CloudError> {
    omega_cloud_with(p, omega, &Config::default())
}

pub fn omega_cloud_with(
    p: &ConvexPolygon,
    omega: Angle,
    config: &Config,
) -> Result<Cloud, CloudError> {
    if p.len() < 3 {
        return Err(CloudError::DegeneratePolygon);
    }
    sweep(p, omega, config)
}

/// The cloud of the degenerate two-vertex polygon (a segment): two arcs of
/// measure `2(pi - omega)` on the two circles from which the segment
/// subtends angle `omega`, with both endpoints strictly narrow pivots.
pub fn segment_cloud(a: Point2, b: Point2, omega: Angle) -> Result<Cloud, CloudError> {
    segment_cloud_with(a, b, omega, &Config::default())
}

pub fn segment_cloud_with(
    a: Point2,
    b: Point2,
    omega: Angle,
    config: &Config,
) -> Result<Cloud, CloudError> {
    let p = validate_convex(&[a, b])?;
    sweep(&p, omega, config)
}

/// Merges every run of consecutive co-circular arcs into one arc, removing
/// the hidden pivots between them. A cloud whose arcs are all co-circular
/// becomes a single full-circle arc with zero pivots. The first output arc
/// is the merged arc containing the input's first arc.
pub fn maximal_cloud(c: &Cloud) -> Result<Cloud, CloudError> {
    maximal_cloud_with(c, &Config::default())
}

pub fn maximal_cloud_with(c: &Cloud, config: &Config) -> Result<Cloud, CloudError> {
    let tol = config.tolerances(c.scale());
    let n = c.arcs.len();
    if n <= 1 {
        let mut out = c.clone();
        out.maximal = true;
        return Ok(out);
    }
    let coincide = |i: usize, j: usize| c.arcs[i].circle.coincides(&c.arcs[j].circle, tol.eps_pos);
    if (0..n).all(|i| coincide(i, (i + 1) % n)) {
        let anchor = c.arcs[0].start;
        let arc = Arc::new(c.arcs[0].circle, anchor, anchor, TAU, &tol)?;
        return Cloud::from_parts(vec![arc], Vec::new(), c.omega, true, config);
    }
    // Merge runs starting from a junction that survives.
    let mut k = 0;
    while coincide((k + n - 1) % n, k) {
        k += 1;
    }
    let mut arcs2: Vec<Arc> = Vec::new();
    let mut pivots2: Vec<Pivot> = Vec::new();
    let mut first_group = 0usize;
    let mut i = k;
    let mut consumed = 0usize;
    while consumed < n {
        let circle = c.arcs[i].circle;
        let start = c.arcs[i].start;
        let opening = &c.pivots[i];
        let mut measure = c.arcs[i].measure;
        let mut j = i;
        if i == 0 {
            first_group = arcs2.len();
        }
        consumed += 1;
        while consumed < n && coincide(j, (j + 1) % n) {
            j = (j + 1) % n;
            measure += c.arcs[j].measure;
            if j == 0 {
                first_group = arcs2.len();
            }
            consumed += 1;
        }
        let merged = if j == i {
            c.arcs[i]
        } else {
            Arc::new(circle, start, c.arcs[j].end, measure, &tol)?
        };
        pivots2.push(Pivot {
            location: opening.location,
            kind: opening.kind,
            index: arcs2.len(),
        });
        arcs2.push(merged);
        i = (j + 1) % n;
    }
    arcs2.rotate_left(first_group);
    pivots2.rotate_left(first_group);
    for (idx, pv) in pivots2.iter_mut().enumerate() {
        pv.index = idx;
    }
    Cloud::from_parts(arcs2, pivots2, c.omega, true, config)
}

/// Per-vertex stationary deficits and the total-measure identity: the sum
/// of arc measures equals `2(2pi - sum over narrow vertices of
/// (omega - theta_v))`.
#[derive(Debug, Clone)]
pub struct TotalMeasureReport {
    pub total: f64,
    pub expected: f64,
    pub residual: f64,
    pub deficits: Vec<(usize, f64)>,
}

pub fn total_measure_check(
    c: &Cloud,
    p: &ConvexPolygon,
    omega: Angle,
) -> Result<TotalMeasureReport, CloudError> {
    let mut deficits: Vec<(usize, f64)> = Vec::new();
    if p.len() >= 3 {
        for i in 0..p.len() {
            let th = internal_angle(p, i)?;
            if th < omega {
                deficits.push((i, omega - th));
            }
        }
    } else {
        deficits.push((0, omega));
        deficits.push((1, omega));
    }
    let deficit_sum: f64 = deficits.iter().map(|d| d.1).sum();
    let total = c.total_measure();
    let expected = 2.0 * (TAU - deficit_sum);
    let residual = math::abs(total - expected);
    let report = TotalMeasureReport {
        total,
        expected,
        residual,
        deficits,
    };
    if residual > p.len() as f64 * c.tol.eps_ang {
        return Err(CloudError::IdentityViolated);
    }
    Ok(report)
}
