//! Road segmentation around a sign.
//!
//! Given the annotated marking clusters and the scanner trajectory, this
//! module picks the two solid lines that bracket the driving width, completes
//! them into full-length outline polylines, resamples the outlines into
//! cross-sections marching upstream from the sign, and finally cuts the
//! sign-surroundings band and the marking band out of a cloud with
//! rectangles swept between consecutive cross-sections.
//!
//! Conventions used throughout: +z is up, "driving direction" is trajectory
//! order, and "right" is the driver's right (the horizontal vector
//! `direction x z`).  Cross-section index 0 always sits at the sign; higher
//! indices march against driving.

use crate::geometry::grid2::Grid2;
use crate::scene::{MarkingCluster, ModelParams, PointCloud, SignInstance, Trajectory};
use crate::{Point2, Point3};

#[derive(Clone, Debug, thiserror::Error)]
pub enum SegmentationError {
    #[error("sign center coincides with its nearest trajectory point")]
    DegenerateHeading,
    #[error("solid markings do not bracket the trajectory on both sides")]
    FallbackRequired,
    #[error("consecutive cross-section samples coincide in plan view")]
    DegenerateStep,
    #[error("sight distance {sd} and sample interval {interval} must satisfy sd > interval > 0")]
    BadSampling { sd: f64, interval: f64 },
}

/// Unit vector from the panel center to its nearest trajectory point.
pub fn sign_heading(sign: &SignInstance, traj: &Trajectory) -> Result<Point3, SegmentationError> {
    let near = traj.points()[traj.nearest_point_index(sign.center)];
    let offset = near - sign.center;
    // Below a nanometer the direction is rounding noise, not a heading.
    if offset.norm() < 1e-9 {
        return Err(SegmentationError::DegenerateHeading);
    }
    offset
        .normalized()
        .ok_or(SegmentationError::DegenerateHeading)
}

/// Local driving direction at a trajectory vertex: the chord through its
/// neighbors, or the single adjacent segment at the ends.
pub(crate) fn chord_direction(traj: &Trajectory, i: usize) -> Point3 {
    let pts = traj.points();
    let lo = i.saturating_sub(1);
    let hi = (i + 1).min(pts.len() - 1);
    match (pts[hi] - pts[lo]).normalized() {
        Some(u) => u,
        // Exact U-turn through vertex i; the adjacent segment is nonzero by
        // the Trajectory invariant.
        None => (pts[i.max(1)] - pts[i.max(1) - 1])
            .normalized()
            .expect("trajectory has no repeated points"),
    }
}

/// Horizontal unit vector pointing to the driver's right of `direction`, or
/// `None` when the direction has no plan-view component.
pub(crate) fn right_vector(direction: Point3) -> Option<Point3> {
    Point3::new(direction.y, -direction.x, 0.0).normalized()
}

/// Where a point lands on the trajectory polyline.
pub(crate) struct OnTrajectory {
    /// Arc position of the foot of the projection.
    pub arc: f64,
    /// Signed plan offset, positive to the driver's right.
    pub lateral: f64,
    /// Height above the trajectory at the foot.
    pub dz: f64,
}

pub(crate) fn project_to_trajectory(traj: &Trajectory, p: Point3) -> OnTrajectory {
    let pts = traj.points();
    let arcs = traj.arc();
    let mut best = (f64::INFINITY, 0usize, 0.0f64);
    for i in 0..pts.len() - 1 {
        let d = pts[i + 1] - pts[i];
        let t = ((p - pts[i]).dot(d) / d.norm_squared()).clamp(0.0, 1.0);
        let dist2 = (p - (pts[i] + d * t)).norm_squared();
        if dist2 < best.0 {
            best = (dist2, i, t);
        }
    }
    let (_, i, t) = best;
    let d = pts[i + 1] - pts[i];
    let foot = pts[i] + d * t;
    let right = right_vector(d).unwrap_or(Point3::new(1.0, 0.0, 0.0));
    OnTrajectory {
        arc: arcs[i] + d.norm() * t,
        lateral: (p - foot).dot(right),
        dz: p.z - foot.z,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MarkingKind {
    Solid,
    Dashed,
}

#[derive(Clone, Debug)]
pub struct ClassifiedMarking {
    /// Index into the input cluster list.
    pub index: usize,
    pub kind: MarkingKind,
    /// Extent of the cluster along the trajectory, meters.
    pub length: f64,
}

/// Splits marking clusters into solid and dashed lines by their extent along
/// the driving direction; `solid_length_threshold` and longer counts as
/// solid.
pub fn classify_markings(
    clusters: &[MarkingCluster],
    traj: &Trajectory,
    params: &ModelParams,
) -> Vec<ClassifiedMarking> {
    clusters
        .iter()
        .enumerate()
        .map(|(index, cl)| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &p in &cl.cloud.points {
                let arc = project_to_trajectory(traj, p).arc;
                lo = lo.min(arc);
                hi = hi.max(arc);
            }
            let length = (hi - lo).max(0.0);
            let kind = if length >= params.solid_length_threshold {
                MarkingKind::Solid
            } else {
                MarkingKind::Dashed
            };
            ClassifiedMarking { index, kind, length }
        })
        .collect()
}

/// The two outlines bracketing the driving width, each a polyline in driving
/// order with the sign's anchor spliced in as a vertex.
#[derive(Clone, Debug)]
pub struct OutlinePair {
    pub right: Vec<Point3>,
    pub left: Vec<Point3>,
    pub right_anchor: usize,
    pub left_anchor: usize,
    /// Plan-view distance between the two anchors.
    pub driving_width: f64,
}

impl OutlinePair {
    pub fn right_anchor_point(&self) -> Point3 {
        self.right[self.right_anchor]
    }

    pub fn left_anchor_point(&self) -> Point3 {
        self.left[self.left_anchor]
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Completes a marking cluster into a polyline spanning the whole
/// trajectory: one vertex per trajectory vertex, offset by the cluster's
/// mean lateral and height offsets near that arc position, or by its global
/// median offsets where the cluster has no data (dash gaps, ends past the
/// cluster).
fn completed_outline(traj: &Trajectory, cluster: &PointCloud, window: f64) -> Vec<Point3> {
    let mut samples: Vec<(f64, f64, f64)> = cluster
        .points
        .iter()
        .map(|&p| {
            let o = project_to_trajectory(traj, p);
            (o.arc, o.lateral, o.dz)
        })
        .collect();
    samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut lats: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let mut dzs: Vec<f64> = samples.iter().map(|s| s.2).collect();
    let lat0 = median(&mut lats);
    let dz0 = median(&mut dzs);
    let arcs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    traj.points()
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let center = traj.arc()[i];
            let lo = arcs.partition_point(|&a| a < center - window * 0.5);
            let hi = arcs.partition_point(|&a| a <= center + window * 0.5);
            let (lat, dz) = if hi > lo {
                let n = (hi - lo) as f64;
                let (mut sl, mut sz) = (0.0, 0.0);
                for s in &samples[lo..hi] {
                    sl += s.1;
                    sz += s.2;
                }
                (sl / n, sz / n)
            } else {
                (lat0, dz0)
            };
            let right = right_vector(chord_direction(traj, i)).expect("road has plan extent");
            t + right * lat + Point3::new(0.0, 0.0, dz)
        })
        .collect()
}

/// Mean of the points within half a slice thickness of the plan-view line
/// through `origin` along unit direction `dir`.
fn slice_center(
    points: &[Point3],
    origin: Point3,
    dir: Point2,
    half_thickness: f64,
) -> Option<Point3> {
    let normal = dir.perp();
    let mut sum = Point3::zero();
    let mut count = 0usize;
    for &p in points {
        let offset = Point2::new(p.x - origin.x, p.y - origin.y);
        if offset.dot(normal).abs() <= half_thickness {
            sum = sum + p;
            count += 1;
        }
    }
    (count > 0).then(|| sum / count as f64)
}

/// Plan direction of the sign heading used for slicing outlines; overhead
/// signs whose heading is nearly vertical fall back to the local cross-road
/// direction.
fn plan_slice_direction(heading: Point3, traj: &Trajectory, sign: &SignInstance) -> Point2 {
    if let Some(dir) = heading.xy().normalized() {
        if heading.xy().norm() >= 1e-6 {
            return dir;
        }
    }
    let k = traj.nearest_point_index(sign.center);
    let right = right_vector(chord_direction(traj, k)).expect("road has plan extent");
    Point2::new(right.x, right.y)
}

/// Plan-view intersection of the line through `origin` along `dir` with a
/// polyline; of several crossings the one nearest `origin` wins.
fn line_polyline_intersection(origin: Point2, dir: Point2, polyline: &[Point3]) -> Option<Point3> {
    let mut best: Option<(f64, Point3)> = None;
    for w in polyline.windows(2) {
        let e = (w[1] - w[0]).xy();
        let denom = dir.cross(e);
        if denom.abs() < 1e-12 {
            continue;
        }
        let r = w[0].xy() - origin;
        let t = r.cross(e) / denom;
        let u = -dir.cross(r) / denom;
        if !(-1e-9..=1.0 + 1e-9).contains(&u) {
            continue;
        }
        let hit = w[0] + (w[1] - w[0]) * u.clamp(0.0, 1.0);
        if best.map_or(true, |(bt, _)| t.abs() < bt) {
            best = Some((t.abs(), hit));
        }
    }
    best.map(|(_, p)| p)
}

fn nearest_on_polyline(poly: &[Point3], p: Point3) -> Point3 {
    let mut best = (f64::INFINITY, poly[0]);
    for w in poly.windows(2) {
        let d = w[1] - w[0];
        let n2 = d.norm_squared();
        let t = if n2 > 0.0 {
            ((p - w[0]).dot(d) / n2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let c = w[0] + d * t;
        let dist2 = (p - c).norm_squared();
        if dist2 < best.0 {
            best = (dist2, c);
        }
    }
    best.1
}

/// Splices `anchor` into the polyline at its nearest segment and returns its
/// vertex index; a vertex already within 1e-9 is reused instead.
fn insert_anchor(polyline: &mut Vec<Point3>, anchor: Point3) -> usize {
    let mut best = (f64::INFINITY, 0usize);
    for i in 0..polyline.len() - 1 {
        let d = polyline[i + 1] - polyline[i];
        let n2 = d.norm_squared();
        let t = if n2 > 0.0 {
            ((anchor - polyline[i]).dot(d) / n2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let dist2 = (anchor - (polyline[i] + d * t)).norm_squared();
        if dist2 < best.0 {
            best = (dist2, i);
        }
    }
    let i = best.1;
    if polyline[i].distance(anchor) < 1e-9 {
        polyline[i] = anchor;
        return i;
    }
    if polyline[i + 1].distance(anchor) < 1e-9 {
        polyline[i + 1] = anchor;
        return i + 1;
    }
    polyline.insert(i + 1, anchor);
    i + 1
}

fn assemble_outline_pair(
    mut right: Vec<Point3>,
    mut left: Vec<Point3>,
    p_right: Point3,
    p_left: Point3,
) -> OutlinePair {
    let right_anchor = insert_anchor(&mut right, p_right);
    let left_anchor = insert_anchor(&mut left, p_left);
    let driving_width = p_right.xy().distance(p_left.xy());
    OutlinePair {
        right,
        left,
        right_anchor,
        left_anchor,
        driving_width,
    }
}

/// Picks the right and left road outlines from solid marking clusters.
///
/// Selection happens at the sign's cross-section: each solid cluster is
/// sliced along the sign heading and represented by its slice center (median
/// offsets stand in when the slice is empty).  The farthest candidate on the
/// driver's right becomes the right outline and the nearest on the left the
/// left outline; both are completed into full-length polylines with the
/// sign's anchor spliced in.
pub fn select_outlines(
    solids: &[&MarkingCluster],
    traj: &Trajectory,
    sign: &SignInstance,
    params: &ModelParams,
) -> Result<OutlinePair, SegmentationError> {
    let heading = sign_heading(sign, traj)?;
    let slice_dir = plan_slice_direction(heading, traj, sign);
    let k = traj.nearest_point_index(sign.center);
    let t_k = traj.points()[k];
    let right_k = right_vector(chord_direction(traj, k)).expect("road has plan extent");

    struct Candidate<'a> {
        cluster: &'a MarkingCluster,
        lateral: f64,
        slice: Option<Point3>,
    }
    let mut cands: Vec<Candidate> = Vec::with_capacity(solids.len());
    for cl in solids {
        let slice = slice_center(
            &cl.cloud.points,
            sign.center,
            slice_dir,
            params.slice_thickness * 0.5,
        );
        let lateral = match slice {
            Some(c) => (c - t_k).dot(right_k),
            None => {
                let mut lats: Vec<f64> = cl
                    .cloud
                    .points
                    .iter()
                    .map(|&p| project_to_trajectory(traj, p).lateral)
                    .collect();
                median(&mut lats)
            }
        };
        cands.push(Candidate {
            cluster: cl,
            lateral,
            slice,
        });
    }
    // Ties broken on the cluster centroid so the selection cannot depend on
    // input order.
    let key = |c: &Candidate| {
        let g = c.cluster.cloud.centroid().unwrap_or(Point3::zero());
        (c.lateral, g.x, g.y, g.z)
    };
    let pick = |want_right: bool| {
        cands
            .iter()
            .filter(|c| if want_right { c.lateral > 0.0 } else { c.lateral < 0.0 })
            .max_by(|a, b| key(a).partial_cmp(&key(b)).unwrap())
    };
    let right_c = pick(true).ok_or(SegmentationError::FallbackRequired)?;
    let left_c = pick(false).ok_or(SegmentationError::FallbackRequired)?;

    let right = completed_outline(traj, &right_c.cluster.cloud, params.sample_interval);
    let left = completed_outline(traj, &left_c.cluster.cloud, params.sample_interval);
    let origin = sign.center.xy();
    let anchor = |c: &Candidate, poly: &[Point3]| {
        c.slice
            .or_else(|| line_polyline_intersection(origin, slice_dir, poly))
            .unwrap_or_else(|| nearest_on_polyline(poly, sign.center))
    };
    let p_right = anchor(right_c, &right);
    let p_left = anchor(left_c, &left);
    Ok(assemble_outline_pair(right, left, p_right, p_left))
}

/// Outlines for roads without usable solid markings: the trajectory offset
/// half a driving width to each side and dropped to road level by the
/// scanner height.
pub fn fallback_outlines(
    traj: &Trajectory,
    sign: &SignInstance,
    device_height: f64,
    half_width: f64,
) -> Result<OutlinePair, SegmentationError> {
    let heading = sign_heading(sign, traj)?;
    let slice_dir = plan_slice_direction(heading, traj, sign);
    let offset = |side: f64| -> Vec<Point3> {
        traj.points()
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let right = right_vector(chord_direction(traj, i)).expect("road has plan extent");
                t + right * (side * half_width) + Point3::new(0.0, 0.0, -device_height)
            })
            .collect()
    };
    let right = offset(1.0);
    let left = offset(-1.0);
    let origin = sign.center.xy();
    let anchor = |poly: &[Point3]| {
        line_polyline_intersection(origin, slice_dir, poly)
            .unwrap_or_else(|| nearest_on_polyline(poly, sign.center))
    };
    let p_right = anchor(&right);
    let p_left = anchor(&left);
    Ok(assemble_outline_pair(right, left, p_right, p_left))
}

/// Cross-sections of the sight field, marching upstream from the sign.
#[derive(Clone, Debug)]
pub struct ArcSampling {
    /// Right outline samples; index 0 sits at the sign's cross-section.
    pub a: Vec<Point3>,
    /// Left outline samples, paired with `a` by index.
    pub b: Vec<Point3>,
    /// Cross-section midpoints.
    pub m: Vec<Point3>,
    /// Cumulative arc length over `m` away from the sign, meters.
    pub len: Vec<f64>,
    /// Plan-view driving width at the anchors.
    pub driving_width: f64,
    /// Set when the outlines ran out before covering the sight distance.
    pub short_field: bool,
}

fn cumulative_arc(poly: &[Point3]) -> Vec<f64> {
    let mut out = Vec::with_capacity(poly.len());
    let mut s = 0.0;
    out.push(0.0);
    for w in poly.windows(2) {
        s += w[0].distance(w[1]);
        out.push(s);
    }
    out
}

fn point_at_arc(poly: &[Point3], arcs: &[f64], target: f64) -> Point3 {
    let t = target.clamp(arcs[0], *arcs.last().unwrap());
    let i = arcs.partition_point(|&a| a < t).clamp(1, arcs.len() - 1);
    let span = arcs[i] - arcs[i - 1];
    if span <= 0.0 {
        return poly[i];
    }
    let u = ((t - arcs[i - 1]) / span).clamp(0.0, 1.0);
    poly[i - 1] + (poly[i] - poly[i - 1]) * u
}

/// Resamples the outlines into cross-sections every `interval` meters
/// upstream of the anchors, trimming the final step so the midpoint
/// polyline's length lands on the sight distance exactly.  When an outline
/// is exhausted first, the sampling stops at the available length and
/// `short_field` is set.
pub fn build_arc_sampling(
    outlines: &OutlinePair,
    sight_distance: f64,
    interval: f64,
) -> Result<ArcSampling, SegmentationError> {
    if !(sight_distance > interval && interval > 0.0) {
        return Err(SegmentationError::BadSampling {
            sd: sight_distance,
            interval,
        });
    }
    let r_arcs = cumulative_arc(&outlines.right);
    let l_arcs = cumulative_arc(&outlines.left);
    let anchor_r = r_arcs[outlines.right_anchor];
    let anchor_l = l_arcs[outlines.left_anchor];
    // How far both outlines can march before one hits its start.
    let reach = anchor_r.min(anchor_l);

    let mut a = vec![outlines.right_anchor_point()];
    let mut b = vec![outlines.left_anchor_point()];
    let mut m = vec![(a[0] + b[0]) * 0.5];
    let mut len = vec![0.0];
    let mut cum = 0.0;
    let mut short_field = false;
    let mut prev_dist = 0.0;
    loop {
        let dist = (prev_dist + interval).min(reach);
        if dist - prev_dist <= 1e-9 {
            short_field = true;
            break;
        }
        let ak = point_at_arc(&outlines.right, &r_arcs, anchor_r - dist);
        let bk = point_at_arc(&outlines.left, &l_arcs, anchor_l - dist);
        let mk = (ak + bk) * 0.5;
        let seg = mk.distance(*m.last().unwrap());
        if cum + seg >= sight_distance - 1e-12 {
            // Pull the final cross-section back along its step so the
            // midpoint arc length equals the sight distance exactly.
            let ratio = if seg > 0.0 {
                (sight_distance - cum) / seg
            } else {
                1.0
            };
            let pa = *a.last().unwrap();
            let pb = *b.last().unwrap();
            let ta = pa + (ak - pa) * ratio;
            let tb = pb + (bk - pb) * ratio;
            a.push(ta);
            b.push(tb);
            m.push((ta + tb) * 0.5);
            len.push(sight_distance);
            cum = sight_distance;
            break;
        }
        cum += seg;
        a.push(ak);
        b.push(bk);
        m.push(mk);
        len.push(cum);
        prev_dist = dist;
        if dist >= reach - 1e-9 {
            short_field = true;
            break;
        }
    }
    let _ = cum;
    Ok(ArcSampling {
        a,
        b,
        m,
        len,
        driving_width: outlines.driving_width,
        short_field,
    })
}

/// Cross-section cutting rectangles rooted at `a_k` for the driving step
/// toward `a_next`: the surroundings rectangle climbs a band to the driver's
/// right of the outline, the marking rectangle spans the driving width to
/// the left.
pub fn segmentation_rectangles(
    a_k: Point3,
    a_next: Point3,
    params: &ModelParams,
    driving_width: f64,
) -> Result<([Point3; 4], [Point3; 4]), SegmentationError> {
    let h = right_vector(a_next - a_k).ok_or(SegmentationError::DegenerateStep)?;
    let lift = |dz: f64| Point3::new(a_k.x, a_k.y, a_k.z + dz);
    let r1 = lift(params.env_band_low);
    let r2 = lift(params.env_band_high);
    let r3 = r2 + h * params.env_band_width;
    let r4 = r1 + h * params.env_band_width;
    let m1 = lift(params.marking_band_halfheight);
    let m2 = lift(-params.marking_band_halfheight);
    let w = driving_width + params.marking_band_slack;
    let m3 = m2 - h * w;
    let m4 = m1 - h * w;
    Ok(([r1, r2, r3, r4], [m1, m2, m3, m4]))
}

/// The clouds cut out by the swept rectangles.
#[derive(Clone, Debug, Default)]
pub struct SegmentedScene {
    /// Points inside the swept sign-surroundings band.
    pub environment: PointCloud,
    /// Points inside the swept marking band.
    pub marking_band: PointCloud,
}

fn gather(cloud: &PointCloud, keep: &[bool]) -> PointCloud {
    let points = cloud
        .points
        .iter()
        .zip(keep)
        .filter_map(|(p, &k)| k.then_some(*p))
        .collect();
    let intensity = cloud.intensity.as_ref().map(|ints| {
        ints.iter()
            .zip(keep)
            .filter_map(|(v, &k)| k.then_some(*v))
            .collect()
    });
    PointCloud { points, intensity }
}

/// Membership test shared by the swept cut and its brute-force oracle: is
/// `p` inside the band volume swept between cross-sections `upstream` and
/// `downstream` (driving order)?
pub(crate) fn in_swept_band(
    p: Point3,
    upstream: Point3,
    downstream: Point3,
    lateral_range: (f64, f64),
    vertical_range: (f64, f64),
) -> bool {
    let d = (downstream - upstream).xy();
    let d2 = d.norm_squared();
    if d2 <= 0.0 {
        return false;
    }
    let rel = (p - upstream).xy();
    let t = rel.dot(d) / d2;
    if !(0.0..=1.0).contains(&t) {
        return false;
    }
    let h = Point2::new(d.y, -d.x) / d2.sqrt();
    let u = rel.dot(h);
    if u < lateral_range.0 || u > lateral_range.1 {
        return false;
    }
    let dz = p.z - (upstream.z + (downstream.z - upstream.z) * t);
    dz >= vertical_range.0 && dz <= vertical_range.1
}

/// Cuts the surroundings and marking bands out of `cloud` by sweeping the
/// cross-section rectangles between consecutive samples.  Output point order
/// follows input order.
pub fn sweep_segment(
    cloud: &PointCloud,
    sampling: &ArcSampling,
    params: &ModelParams,
) -> SegmentedScene {
    let n = sampling.a.len();
    let mut in_env = vec![false; cloud.len()];
    let mut in_mark = vec![false; cloud.len()];
    if n >= 2 && !cloud.is_empty() {
        let cell = params.sample_interval.max(params.env_band_width).max(1.0);
        let grid = Grid2::build(cloud.points.iter().map(|p| p.xy()), cell);
        let w = sampling.driving_width + params.marking_band_slack;
        let env_lat = (0.0, params.env_band_width);
        let env_vert = (params.env_band_low, params.env_band_high);
        let mark_lat = (-w, 0.0);
        let mark_vert = (-params.marking_band_halfheight, params.marking_band_halfheight);
        for k in 0..n - 1 {
            // Driving direction runs from the upstream sample k+1 to k.
            let p0 = sampling.a[k + 1];
            let p1 = sampling.a[k];
            let d = (p1 - p0).xy();
            if d.norm_squared() <= 0.0 {
                continue;
            }
            let h = Point2::new(d.y, -d.x).normalized().unwrap();
            let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
            let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
            for base in [p0.xy(), p1.xy()] {
                for u in [mark_lat.0, env_lat.1] {
                    let c = base + h * u;
                    lo = Point2::new(lo.x.min(c.x), lo.y.min(c.y));
                    hi = Point2::new(hi.x.max(c.x), hi.y.max(c.y));
                }
            }
            grid.for_each_candidate_in_box(lo, hi, |idx| {
                let idx = idx as usize;
                if in_env[idx] && in_mark[idx] {
                    return;
                }
                let p = cloud.points[idx];
                if !in_env[idx] && in_swept_band(p, p0, p1, env_lat, env_vert) {
                    in_env[idx] = true;
                }
                if !in_mark[idx] && in_swept_band(p, p0, p1, mark_lat, mark_vert) {
                    in_mark[idx] = true;
                }
            });
        }
    }
    SegmentedScene {
        environment: gather(cloud, &in_env),
        marking_band: gather(cloud, &in_mark),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::SignSide;
    use rand::{Rng, SeedableRng};

    fn straight_traj(length: f64, step: f64, x: f64, z: f64) -> Trajectory {
        let n = (length / step).round() as usize;
        Trajectory::new(
            (0..=n)
                .map(|i| Point3::new(x, step * i as f64, z))
                .collect(),
        )
        .unwrap()
    }

    fn test_sign(center: Point3, traj: Option<&Trajectory>) -> SignInstance {
        let mut pts = Vec::new();
        for i in 0..=12 {
            for k in 0..=12 {
                pts.push(Point3::new(
                    center.x - 0.3 + 0.05 * i as f64,
                    center.y,
                    center.z - 0.3 + 0.05 * k as f64,
                ));
            }
        }
        SignInstance::new(
            "t",
            "square",
            PointCloud::from_points(pts),
            SignSide::Right,
            45.0,
            traj,
        )
        .unwrap()
    }

    fn line_cluster(x: f64, y0: f64, y1: f64, z: f64) -> MarkingCluster {
        let n = ((y1 - y0) / 0.25).round() as usize;
        MarkingCluster {
            cloud: PointCloud::from_points(
                (0..=n)
                    .map(|i| Point3::new(x, y0 + 0.25 * i as f64, z))
                    .collect(),
            ),
        }
    }

    #[test]
    fn heading_points_from_sign_to_road() {
        let traj = Trajectory::new(vec![Point3::zero(), Point3::new(0.0, 50.0, 0.0)]).unwrap();
        let sign = test_sign(Point3::new(10.0, 0.0, 2.0), None);
        let h = sign_heading(&sign, &traj).unwrap();
        assert!((h.x - -0.9806).abs() < 1e-3, "{h:?}");
        assert!(h.y.abs() < 1e-9);
        assert!((h.z - -0.1961).abs() < 1e-3);
    }

    #[test]
    fn heading_degenerate_when_sign_on_trajectory() {
        let traj = Trajectory::new(vec![
            Point3::new(0.0, 0.0, 2.0),
            Point3::new(0.0, 10.0, 2.0),
        ])
        .unwrap();
        let sign = test_sign(Point3::new(0.0, 10.0, 2.0), None);
        assert!(matches!(
            sign_heading(&sign, &traj),
            Err(SegmentationError::DegenerateHeading)
        ));
    }

    #[test]
    fn classify_uses_inclusive_length_threshold() {
        let traj = straight_traj(100.0, 2.0, 0.0, 2.2);
        let clusters = vec![
            line_cluster(3.7, 10.0, 55.0, 0.0),
            line_cluster(3.7, 10.0, 13.0, 0.0),
            line_cluster(-3.7, 20.0, 50.0, 0.0),
        ];
        let classes = classify_markings(&clusters, &traj, &ModelParams::default());
        assert_eq!(classes[0].kind, MarkingKind::Solid);
        assert!((classes[0].length - 45.0).abs() < 1e-9);
        assert_eq!(classes[1].kind, MarkingKind::Dashed);
        assert_eq!(classes[2].kind, MarkingKind::Solid, "30.0 m is solid");
    }

    #[test]
    fn outlines_pick_farthest_right_and_nearest_left() {
        let traj = straight_traj(100.0, 2.0, 0.0, 2.2);
        let sign = test_sign(Point3::new(6.0, 50.0, 2.0), Some(&traj));
        let clusters = vec![
            line_cluster(1.7, 0.0, 100.0, 0.0),
            line_cluster(5.2, 0.0, 100.0, 0.0),
            line_cluster(-1.8, 0.0, 100.0, 0.0),
        ];
        let solids: Vec<&MarkingCluster> = clusters.iter().collect();
        let params = ModelParams::default();
        let pair = select_outlines(&solids, &traj, &sign, &params).unwrap();
        let pr = pair.right_anchor_point();
        let pl = pair.left_anchor_point();
        assert!((pr.x - 5.2).abs() < 1e-6, "right anchor {pr:?}");
        assert!((pr.y - 50.0).abs() < 0.3);
        assert!((pl.x - -1.8).abs() < 1e-6, "left anchor {pl:?}");
        assert!((pair.driving_width - 7.0).abs() < 1e-6);
    }

    #[test]
    fn outline_selection_ignores_cluster_order() {
        let traj = straight_traj(100.0, 2.0, 0.0, 2.2);
        let sign = test_sign(Point3::new(6.0, 50.0, 2.0), Some(&traj));
        let clusters = vec![
            line_cluster(1.7, 0.0, 100.0, 0.0),
            line_cluster(5.2, 0.0, 100.0, 0.0),
            line_cluster(-1.8, 0.0, 100.0, 0.0),
        ];
        let params = ModelParams::default();
        let forward: Vec<&MarkingCluster> = clusters.iter().collect();
        let reversed: Vec<&MarkingCluster> = clusters.iter().rev().collect();
        let a = select_outlines(&forward, &traj, &sign, &params).unwrap();
        let b = select_outlines(&reversed, &traj, &sign, &params).unwrap();
        assert_eq!(a.right_anchor_point(), b.right_anchor_point());
        assert_eq!(a.left_anchor_point(), b.left_anchor_point());
        assert_eq!(a.driving_width, b.driving_width);
    }

    #[test]
    fn outlines_require_solids_on_both_sides() {
        let traj = straight_traj(100.0, 2.0, 0.0, 2.2);
        let sign = test_sign(Point3::new(6.0, 50.0, 2.0), Some(&traj));
        let clusters = vec![line_cluster(5.2, 0.0, 100.0, 0.0)];
        let solids: Vec<&MarkingCluster> = clusters.iter().collect();
        assert!(matches!(
            select_outlines(&solids, &traj, &sign, &ModelParams::default()),
            Err(SegmentationError::FallbackRequired)
        ));
    }

    #[test]
    fn fallback_outlines_offset_and_lower_the_trajectory() {
        let traj = straight_traj(100.0, 2.0, 0.0, 2.2);
        let sign = test_sign(Point3::new(4.0, 50.0, 2.0), Some(&traj));
        let pair = fallback_outlines(&traj, &sign, 2.2, 3.5).unwrap();
        let pr = pair.right_anchor_point();
        let pl = pair.left_anchor_point();
        assert!(pr.distance(Point3::new(3.5, 50.0, 0.0)) < 1e-9, "{pr:?}");
        assert!(pl.distance(Point3::new(-3.5, 50.0, 0.0)) < 1e-9, "{pl:?}");
        assert!((pair.driving_width - 7.0).abs() < 1e-9);
        for p in &pair.right {
            assert!((p.x - 3.5).abs() < 1e-9 && p.z.abs() < 1e-9);
        }
    }

    #[test]
    fn fallback_keeps_constant_offset_on_arcs() {
        // Quarter arc, radius 50, driving counterclockwise; driver's right is
        // radially outward.
        let center = Point3::new(0.0, 0.0, 2.2);
        let pts: Vec<Point3> = (0..=90)
            .map(|i| {
                let a = (i as f64 - 45.0).to_radians();
                center + Point3::new(50.0 * a.cos(), 50.0 * a.sin(), 0.0)
            })
            .collect();
        let traj = Trajectory::new(pts).unwrap();
        let sign = test_sign(Point3::new(55.0, 0.0, 2.0), Some(&traj));
        let pair = fallback_outlines(&traj, &sign, 2.2, 3.5).unwrap();
        for p in &pair.right {
            let r = (p.x * p.x + p.y * p.y).sqrt();
            assert!((r - 53.5).abs() < 1e-3, "radius {r}");
        }
        for p in &pair.left {
            let r = (p.x * p.x + p.y * p.y).sqrt();
            assert!((r - 46.5).abs() < 1e-3, "radius {r}");
        }
    }

    fn straight_pair(anchor_y: f64) -> OutlinePair {
        let traj = straight_traj(100.0, 2.0, 0.0, 2.2);
        let sign = test_sign(Point3::new(4.0, anchor_y, 2.0), Some(&traj));
        fallback_outlines(&traj, &sign, 2.2, 3.5).unwrap()
    }

    #[test]
    fn sampling_covers_sight_distance_exactly() {
        let sampling = build_arc_sampling(&straight_pair(80.0), 60.0, 2.0).unwrap();
        assert_eq!(sampling.a.len(), 31);
        assert_eq!(sampling.m.len(), 31);
        assert!(!sampling.short_field);
        assert!((sampling.len.last().unwrap() - 60.0).abs() < 1e-9);
        for k in 0..sampling.m.len() {
            let mid = (sampling.a[k] + sampling.b[k]) * 0.5;
            assert!(sampling.m[k].distance(mid) < 1e-12);
        }
    }

    #[test]
    fn sampling_trims_final_step_by_ratio() {
        let sampling = build_arc_sampling(&straight_pair(80.0), 45.0, 2.0).unwrap();
        assert_eq!(sampling.m.len(), 24);
        let n = sampling.m.len();
        let last = sampling.m[n - 1].distance(sampling.m[n - 2]);
        assert!((last - 1.0).abs() < 1e-9, "last segment {last}");
        assert!((sampling.len[n - 1] - 45.0).abs() < 1e-9);
    }

    #[test]
    fn sampling_truncates_when_outline_runs_out() {
        let sampling = build_arc_sampling(&straight_pair(30.0), 60.0, 2.0).unwrap();
        assert_eq!(sampling.m.len(), 16);
        assert!(sampling.short_field);
        assert!((sampling.len.last().unwrap() - 30.0).abs() < 1e-9);
    }

    #[test]
    fn sampling_rejects_bad_interval() {
        assert!(matches!(
            build_arc_sampling(&straight_pair(80.0), 2.0, 2.0),
            Err(SegmentationError::BadSampling { .. })
        ));
    }

    #[test]
    fn rectangles_match_band_formulas() {
        let params = ModelParams::default();
        let (env, mark) =
            segmentation_rectangles(Point3::zero(), Point3::new(0.0, 1.0, 0.0), &params, 7.4)
                .unwrap();
        assert_eq!(env[0], Point3::new(0.0, 0.0, 0.3));
        assert_eq!(env[1], Point3::new(0.0, 0.0, 3.0));
        assert_eq!(env[2], Point3::new(2.0, 0.0, 3.0));
        assert_eq!(env[3], Point3::new(2.0, 0.0, 0.3));
        assert_eq!(mark[0], Point3::new(0.0, 0.0, 1.0));
        assert_eq!(mark[1], Point3::new(0.0, 0.0, -1.0));
        assert_eq!(mark[2], Point3::new(-7.5, 0.0, -1.0));
        assert_eq!(mark[3], Point3::new(-7.5, 0.0, 1.0));
    }

    #[test]
    fn rectangles_reject_degenerate_steps() {
        let params = ModelParams::default();
        assert!(matches!(
            segmentation_rectangles(Point3::zero(), Point3::zero(), &params, 7.4),
            Err(SegmentationError::DegenerateStep)
        ));
        assert!(matches!(
            segmentation_rectangles(Point3::zero(), Point3::new(0.0, 0.0, 1.0), &params, 7.4),
            Err(SegmentationError::DegenerateStep)
        ));
    }

    #[test]
    fn sweep_band_membership_examples() {
        let params = ModelParams::default();
        let sampling = build_arc_sampling(&straight_pair(80.0), 60.0, 2.0).unwrap();
        // Right outline sits at x=3.5, z=0; the surroundings band covers
        // x in [3.5, 5.5], z in [0.3, 3.0].
        let cloud = PointCloud::from_points(vec![
            Point3::new(4.5, 40.0, 1.5),
            Point3::new(4.5, 40.0, 0.1),
            Point3::new(8.5, 40.0, 1.5),
            Point3::new(0.0, 40.0, 0.0),
        ]);
        let cut = sweep_segment(&cloud, &sampling, &params);
        assert_eq!(cut.environment.points, vec![Point3::new(4.5, 40.0, 1.5)]);
        assert_eq!(cut.marking_band.points, vec![Point3::new(0.0, 40.0, 0.0)]);
    }

    #[test]
    fn sweep_matches_brute_force() {
        let params = ModelParams::default();
        let sampling = build_arc_sampling(&straight_pair(80.0), 60.0, 2.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let points: Vec<Point3> = (0..2000)
            .map(|_| {
                Point3::new(
                    rng.gen_range(-10.0..10.0),
                    rng.gen_range(0.0..100.0),
                    rng.gen_range(-3.0..5.0),
                )
            })
            .collect();
        let cloud = PointCloud::from_points(points.clone());
        let cut = sweep_segment(&cloud, &sampling, &params);

        let w = sampling.driving_width + params.marking_band_slack;
        let mut env = Vec::new();
        let mut mark = Vec::new();
        for &p in &points {
            let mut e = false;
            let mut m = false;
            for k in 0..sampling.a.len() - 1 {
                let (p0, p1) = (sampling.a[k + 1], sampling.a[k]);
                e = e || in_swept_band(
                    p,
                    p0,
                    p1,
                    (0.0, params.env_band_width),
                    (params.env_band_low, params.env_band_high),
                );
                m = m || in_swept_band(
                    p,
                    p0,
                    p1,
                    (-w, 0.0),
                    (-params.marking_band_halfheight, params.marking_band_halfheight),
                );
            }
            if e {
                env.push(p);
            }
            if m {
                mark.push(p);
            }
        }
        assert_eq!(cut.environment.points, env);
        assert_eq!(cut.marking_band.points, mark);
    }
}
