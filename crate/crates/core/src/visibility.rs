//! Per-viewpoint visibility: the product of a geometric factor (how much
//! retinal area the panel subtends relative to its standard frontal view),
//! an occlusion factor (exponential decay in the occlusion degree), and a
//! sight-line factor (decay once the sign leaves the speed-dependent field
//! of view).
//!
//! Occlusion analysis works in a per-viewpoint frame whose +z axis runs from
//! the panel center to the eye: the panel flattens onto that frame's xOy
//! plane, candidate occluders are the environment points inside the cone
//! subtended by the flattened boundary, and their sight rays are dropped
//! onto the panel plane to form footprints.  The cone and in-front tests use
//! world-frame vectors (angles and projections are rotation invariant) so
//! only surviving points pay for the frame transform.

use std::f64::consts::FRAC_PI_2;

use crate::geometry::{
    alpha_shape_boundary, point_in_polygon, polygon_area, ray_plane_xy_intersection,
    retinal_projection, rotation_aligning,
};
use crate::scene::{boundary_retinal_area, BoundaryAreaError, ModelParams, PointCloud,
    SignInstance, SignLibraryEntry, MPH_TO_MPS};
use crate::viewpoint::LaneGrid;
use crate::{PlanarPolygon, Point2, Point3, Rotation};

#[derive(Clone, Debug, thiserror::Error)]
pub enum VisibilityError {
    #[error("viewpoint coincides with the panel center")]
    DegenerateViewpoint,
    #[error("viewpoint is within the retina distance of the panel center")]
    BehindPupil,
    #[error("panel boundary could not be extracted: {0}")]
    SignBoundary(String),
    #[error("driving direction undefined at this viewpoint")]
    DegenerateStep,
}

/// Per-viewpoint evaluation frame: the rigid transform that puts the panel
/// center at the origin and the eye on +z, plus the flattened panel
/// boundary.
pub struct ViewFrame<'a> {
    /// Eye position, world coordinates.
    pub viewpoint: Point3,
    /// Panel center, world coordinates.
    pub center: Point3,
    /// Eye-to-center distance.
    pub distance: f64,
    /// Frame-to-world rotation; its inverse carries world offsets into the
    /// frame.
    pub rotation: Rotation,
    /// Panel boundary flattened onto the frame's xOy plane.
    pub boundary: PlanarPolygon,
    /// Largest center-to-vertex distance of the boundary.
    pub d_max: f64,
    /// Half-angle of the cone subtended by the boundary at the eye.
    pub phi: f64,
    /// Retinal area of the boundary seen from the eye.
    pub a_view: f64,
    /// Candidate occluder cloud (the sign's segmented surroundings).
    pub environment: &'a PointCloud,
}

/// Projects the panel and extracts its boundary.  Views from which the panel
/// encloses no retinal area (edge-on eyes in the panel plane, panels crossing
/// the retina plane) read as `None`: the face is unreadable from there, which
/// is a zero-visibility measurement rather than a failure.
pub(crate) fn viewed_boundary(
    points: &[Point3],
    center: Point3,
    viewpoint: Point3,
    params: &ModelParams,
) -> Result<Option<(f64, crate::PlanarPolygon)>, VisibilityError> {
    use crate::geometry::AlphaShapeError;
    match boundary_retinal_area(points, center, viewpoint, params) {
        Ok(pair) => Ok(Some(pair)),
        Err(BoundaryAreaError::Projection(_)) => Ok(None),
        Err(BoundaryAreaError::Alpha(
            AlphaShapeError::Degenerate | AlphaShapeError::TooFewPoints(_),
        )) => Ok(None),
        Err(BoundaryAreaError::Alpha(e)) => Err(VisibilityError::SignBoundary(e.to_string())),
    }
}

/// Builds the evaluation frame for one eye position.  `Ok(None)` means the
/// panel presents no readable face from this viewpoint.
pub fn build_view_frame<'a>(
    sign: &SignInstance,
    environment: &'a PointCloud,
    viewpoint: Point3,
    params: &ModelParams,
) -> Result<Option<ViewFrame<'a>>, VisibilityError> {
    let axis = viewpoint - sign.center;
    let distance = axis.norm();
    if distance < 1e-9 {
        return Err(VisibilityError::DegenerateViewpoint);
    }
    if distance <= params.retina_distance {
        return Err(VisibilityError::BehindPupil);
    }
    let Some((a_view, boundary)) =
        viewed_boundary(&sign.panel.points, sign.center, viewpoint, params)?
    else {
        return Ok(None);
    };
    let rotation = rotation_aligning(Point3::new(0.0, 0.0, 1.0), axis);
    let d_max = boundary.max_vertex_distance(Point2::zero());
    Ok(Some(ViewFrame {
        viewpoint,
        center: sign.center,
        distance,
        rotation,
        boundary,
        d_max,
        phi: (d_max / distance).atan(),
        a_view,
        environment,
    }))
}

/// Geometric factor: viewed retinal area over the sign type's standard
/// frontal area.
pub fn geometric_factor(frame: &ViewFrame, entry: &SignLibraryEntry) -> (f64, f64) {
    (frame.a_view / entry.standard_area, frame.a_view)
}

/// What the cone extraction found for one viewpoint.
#[derive(Clone, Debug, Default)]
pub struct OcclusionResult {
    /// Summed retinal area of the occluded footprint clusters.
    pub area: f64,
    /// Panel-plane footprints of the occluding points, in input order.
    pub footprints: Vec<Point2>,
    /// Indices of the occluding points in the environment cloud, parallel
    /// to `footprints`.
    pub occluder_indices: Vec<usize>,
    /// Area-weighted centroid of the footprint clusters, when any cluster
    /// has positive area.
    pub centroid: Option<Point2>,
    /// The distribution term: how central the occlusion sits, 1 at the
    /// panel center, 0 at the rim (0 when nothing is occluded).
    pub distribution: f64,
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n as u32).collect())
    }

    fn find(&mut self, i: u32) -> u32 {
        let mut root = i;
        while self.0[root as usize] != root {
            root = self.0[root as usize];
        }
        let mut cur = i;
        while self.0[cur as usize] != root {
            let next = self.0[cur as usize];
            self.0[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Smaller root wins so components are index-stable.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi as usize] = lo;
        }
    }
}

/// Groups footprints into connected clusters, linking pairs closer than
/// twice the alpha radius; returns clusters keyed by first-seen footprint.
fn footprint_clusters(footprints: &[Point2], alpha: f64) -> Vec<Vec<usize>> {
    let n = footprints.len();
    let mut uf = UnionFind::new(n);
    let link = 2.0 * alpha;
    let grid = crate::geometry::grid2::Grid2::build(footprints.iter().copied(), link.max(1e-9));
    for (i, &p) in footprints.iter().enumerate() {
        grid.for_each_candidate_near(p, link, |j| {
            let j = j as usize;
            if j > i && p.distance(footprints[j]) <= link {
                uf.union(i as u32, j as u32);
            }
        });
    }
    let mut order: Vec<(u32, usize)> = Vec::new();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let root = uf.find(i as u32);
        match order.iter().find(|(r, _)| *r == root) {
            Some(&(_, slot)) => clusters[slot].push(i),
            None => {
                order.push((root, clusters.len()));
                clusters.push(vec![i]);
            }
        }
    }
    clusters
}

/// Retinal area of a panel-plane polygon seen from the frame's eye.
fn retinal_area_at(vertices: &[Point2], distance: f64, retina: f64) -> f64 {
    let relative: Vec<Point3> = vertices
        .iter()
        .map(|v| Point3::new(v.x, v.y, -distance))
        .collect();
    match retinal_projection(&relative, retina) {
        Ok(projected) => polygon_area(&projected),
        Err(_) => 0.0,
    }
}

/// Finds the environment points that occlude the panel from this frame's
/// eye and measures the retinal area their footprints cover.
///
/// A point occludes when it sits strictly between the eye and the panel
/// plane, falls inside the viewing cone, and its sight ray lands inside the
/// panel boundary.  Footprint clusters are measured separately (degenerate
/// clusters contribute no area) and summed.
pub fn extract_occlusion(frame: &ViewFrame, params: &ModelParams) -> OcclusionResult {
    let axis = (frame.viewpoint - frame.center) / frame.distance;
    let inverse = frame.rotation.inverse();
    let eye = Point3::new(0.0, 0.0, frame.distance);
    let mut footprints: Vec<Point2> = Vec::new();
    let mut occluder_indices: Vec<usize> = Vec::new();
    for (index, &q) in frame.environment.points.iter().enumerate() {
        let depth = (q - frame.center).dot(axis);
        if depth <= 0.0 || depth >= frame.distance {
            continue;
        }
        let tau = (q - frame.viewpoint).angle_to(frame.center - frame.viewpoint);
        if tau > frame.phi {
            continue;
        }
        let local = inverse.apply(q - frame.center);
        let Ok(foot) = ray_plane_xy_intersection(eye, local) else {
            continue;
        };
        if point_in_polygon(foot, frame.boundary.vertices()) {
            footprints.push(foot);
            occluder_indices.push(index);
        }
    }

    let mut area = 0.0;
    let mut weighted = Point2::zero();
    for cluster in footprint_clusters(&footprints, params.alpha_radius) {
        let pts: Vec<Point2> = cluster.iter().map(|&i| footprints[i]).collect();
        let cluster_area = match alpha_shape_boundary(&pts, params.alpha_radius) {
            Ok(poly) => retinal_area_at(poly.vertices(), frame.distance, params.retina_distance),
            Err(_) => 0.0,
        };
        if cluster_area > 0.0 {
            let mut mean = Point2::zero();
            for &p in &pts {
                mean = mean + p;
            }
            mean = mean / pts.len() as f64;
            weighted = weighted + mean * cluster_area;
            area += cluster_area;
        }
    }
    let (centroid, distribution) = if area > 0.0 && frame.d_max > 0.0 {
        let c = weighted / area;
        (Some(c), (1.0 - c.norm() / frame.d_max).clamp(0.0, 1.0))
    } else {
        (None, 0.0)
    };
    OcclusionResult {
        area,
        footprints,
        occluder_indices,
        centroid,
        distribution,
    }
}

/// Occlusion degree and the factor it decays to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OcclusionFactors {
    /// Weighted occlusion degree in [0, 1].
    pub degree: f64,
    /// `exp(-decay * degree)`, in (0, 1].
    pub factor: f64,
    /// Set when the summed footprint area exceeded the viewed area and was
    /// clamped (alpha-shape slack on dense footprints).
    pub area_clamped: bool,
}

/// Degree = area weight * ratio + distribution weight * distribution *
/// ratio, then an exponential penalty.
pub fn occlusion_factor(
    occlusion: &OcclusionResult,
    a_view: f64,
    params: &ModelParams,
) -> OcclusionFactors {
    let mut occluded = occlusion.area;
    let mut area_clamped = false;
    if occluded > a_view {
        occluded = a_view;
        area_clamped = true;
    }
    let ratio = if a_view > 0.0 { occluded / a_view } else { 0.0 };
    let degree = params.occlusion_area_weight * ratio
        + params.occlusion_distribution_weight * occlusion.distribution * ratio;
    OcclusionFactors {
        degree,
        factor: (-params.occlusion_decay * degree).exp(),
        area_clamped,
    }
}

/// Speed-dependent field of view: 85 degrees at 30 mph, shrinking one degree
/// per mph, clamped to [10, 170] degrees.  Takes meters per second, returns
/// radians.
pub fn gfov(speed: f64) -> f64 {
    let mph = speed / MPH_TO_MPS;
    (115.0 - mph).clamp(10.0, 170.0).to_radians()
}

/// Sight-line factor: full strength while the deviation stays inside half
/// the field of view, exponential decay out to a right angle, zero beyond.
pub fn sight_line_factor(deviation: f64, field_of_view: f64, decay: f64) -> f64 {
    let half = 0.5 * field_of_view;
    if deviation > FRAC_PI_2 {
        return 0.0;
    }
    if deviation < half {
        return 1.0;
    }
    (-decay * (deviation - half) / half).exp()
}

/// Angle between the driving direction at a viewpoint (toward the next
/// column; the last column reuses its predecessor's direction) and the line
/// of sight to the sign center.
pub fn sight_deviation_angle(
    grid: &LaneGrid,
    lane: usize,
    column: usize,
    sign_center: Point3,
) -> Result<f64, VisibilityError> {
    let col = &grid.viewpoints[lane];
    if col.len() < 2 {
        return Err(VisibilityError::DegenerateStep);
    }
    let step = if column + 1 < col.len() {
        col[column + 1] - col[column]
    } else {
        col[column] - col[column - 1]
    };
    let driving = step.normalized().ok_or(VisibilityError::DegenerateStep)?;
    let sight = sign_center - col[column];
    if sight.norm() < 1e-12 {
        return Err(VisibilityError::DegenerateStep);
    }
    Ok(driving.angle_to(sight))
}

/// Everything measured at one viewpoint.
#[derive(Clone, Debug)]
pub struct VisibilityRecord {
    pub lane: usize,
    pub column: usize,
    pub e_geo: f64,
    pub e_occ: f64,
    pub e_sight: f64,
    pub e_visibility: f64,
    /// Viewed retinal area of the panel.
    pub a_view: f64,
    /// Summed occluded footprint area.
    pub occluded_area: f64,
    /// Weighted occlusion degree.
    pub occlusion_degree: f64,
    /// Sight-line deviation angle, radians.
    pub sight_angle: f64,
    /// Approach arc length to the sign's cross-section.
    pub d_length: f64,
    /// Plan offset from the right outline.
    pub d_width: f64,
    /// Occluded area was clamped to the viewed area.
    pub area_clamped: bool,
}

/// Evaluates one (lane, column) viewpoint against a sign.
pub fn viewpoint_visibility(
    sign: &SignInstance,
    environment: &PointCloud,
    grid: &LaneGrid,
    lane: usize,
    column: usize,
    entry: &SignLibraryEntry,
    params: &ModelParams,
) -> Result<VisibilityRecord, VisibilityError> {
    let viewpoint = grid.viewpoints[lane][column];
    let sight_angle = sight_deviation_angle(grid, lane, column, sign.center)?;
    let e_sight = sight_line_factor(sight_angle, gfov(params.v85), params.sight_decay);
    let d_length = grid.d_length[lane][column];
    let d_width = grid.d_width[lane][column];
    let Some(frame) = build_view_frame(sign, environment, viewpoint, params)? else {
        // Edge-on view: no projected face, so nothing to occlude either.
        return Ok(VisibilityRecord {
            lane,
            column,
            e_geo: 0.0,
            e_occ: 1.0,
            e_sight,
            e_visibility: 0.0,
            a_view: 0.0,
            occluded_area: 0.0,
            occlusion_degree: 0.0,
            sight_angle,
            d_length,
            d_width,
            area_clamped: false,
        });
    };
    let (e_geo, a_view) = geometric_factor(&frame, entry);
    let occlusion = extract_occlusion(&frame, params);
    let factors = occlusion_factor(&occlusion, a_view, params);
    Ok(VisibilityRecord {
        lane,
        column,
        e_geo,
        e_occ: factors.factor,
        e_sight,
        e_visibility: e_geo * factors.factor * e_sight,
        a_view,
        occluded_area: occlusion.area.min(a_view),
        occlusion_degree: factors.degree,
        sight_angle,
        d_length,
        d_width,
        area_clamped: factors.area_clamped,
    })
}
