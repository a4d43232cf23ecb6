//! Input scene model: clouds, trajectory, signs, markings, model parameters,
//! and the sign library.
//!
//! Everything here is already annotated: which points form a sign panel,
//! which clusters are road markings, where the scanner drove.  Loading and
//! validation of files into these types lives in [`crate::io`]; this module
//! owns the invariants.

use std::collections::BTreeMap;

use crate::geometry::{
    alpha_shape_boundary, plane_fit, retinal_projection, rotation_aligning, AlphaShapeError,
};
use crate::{Point2, Point3};

/// Speed conversion: statute miles per hour to meters per second.
pub const MPH_TO_MPS: f64 = 0.44704;
/// Speed conversion: kilometers per hour to meters per second.
pub const KMH_TO_MPS: f64 = 1.0 / 3.6;

#[derive(Clone, Debug, thiserror::Error)]
pub enum SceneError {
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("trajectory needs at least 2 points, got {0}")]
    TrajectoryTooShort(usize),
    #[error("trajectory arc length must strictly increase (repeated point at index {0})")]
    TrajectoryStalls(usize),
    #[error("sign {id}: panel is not planar enough (rms {rms:.4} m, limit {limit} m)")]
    PanelNotPlanar { id: String, rms: f64, limit: f64 },
    #[error("sign {id}: panel geometry is degenerate: {source}")]
    PanelDegenerate {
        id: String,
        #[source]
        source: AlphaShapeError,
    },
    #[error("sign {id}: sight distance must be positive, got {value}")]
    BadSightDistance { id: String, value: f64 },
    #[error("sign {id}: type {sign_type:?} is not in the sign library")]
    UnknownSignType { id: String, sign_type: String },
    #[error("model parameters: {0}")]
    BadParams(String),
    #[error("panel boundary projection failed: {0}")]
    PanelProjection(String),
}

/// A 3D point cloud with optional per-point intensity.
#[derive(Clone, Debug, Default)]
pub struct PointCloud {
    pub points: Vec<Point3>,
    /// Present only when the source file carried intensities; parallel to
    /// `points` when present.
    pub intensity: Option<Vec<f64>>,
}

impl PointCloud {
    pub fn from_points(points: Vec<Point3>) -> Self {
        Self {
            points,
            intensity: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn centroid(&self) -> Option<Point3> {
        if self.points.is_empty() {
            return None;
        }
        let mut s = Point3::zero();
        for p in &self.points {
            s = s + *p;
        }
        Some(s / self.points.len() as f64)
    }
}

/// Ordered scanner path with cumulative arc lengths.
#[derive(Clone, Debug)]
pub struct Trajectory {
    points: Vec<Point3>,
    arc: Vec<f64>,
}

impl Trajectory {
    pub fn new(points: Vec<Point3>) -> Result<Self, SceneError> {
        if points.len() < 2 {
            return Err(SceneError::TrajectoryTooShort(points.len()));
        }
        let mut arc = Vec::with_capacity(points.len());
        arc.push(0.0);
        for i in 1..points.len() {
            let step = points[i].distance(points[i - 1]);
            if step <= 0.0 {
                return Err(SceneError::TrajectoryStalls(i));
            }
            arc.push(arc[i - 1] + step);
        }
        Ok(Self { points, arc })
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    /// Cumulative arc length per point, starting at zero.
    pub fn arc(&self) -> &[f64] {
        &self.arc
    }

    pub fn total_length(&self) -> f64 {
        *self.arc.last().unwrap()
    }

    /// Index of the trajectory point closest to `p` in 3D.
    pub fn nearest_point_index(&self, p: Point3) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, t) in self.points.iter().enumerate() {
            let d = t.distance(p);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }
}

/// Which side of the road the sign hangs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignSide {
    /// Mounted beyond the right road outline.
    Right,
    /// Mounted above the roadway.
    Overhead,
}

/// One annotated sign: its panel cloud plus fitted pose.
#[derive(Clone, Debug)]
pub struct SignInstance {
    pub id: String,
    pub sign_type: String,
    pub panel: PointCloud,
    pub side: SignSide,
    /// Sight field length in meters for this sign.
    pub sight_distance: f64,
    /// Plane-fit centroid of the panel.
    pub center: Point3,
    /// Unit panel normal, oriented toward the trajectory when one is given.
    pub normal: Point3,
    /// Root-mean-square plane-fit residual of the panel, meters.
    pub planarity_rms: f64,
}

/// Panels farther from their fitted plane than this RMS are rejected.
pub const PANEL_PLANARITY_LIMIT: f64 = 0.05;

impl SignInstance {
    /// Builds a sign from its annotated panel cloud, fitting center and
    /// normal and enforcing panel planarity.
    pub fn new(
        id: impl Into<String>,
        sign_type: impl Into<String>,
        panel: PointCloud,
        side: SignSide,
        sight_distance: f64,
        trajectory: Option<&Trajectory>,
    ) -> Result<Self, SceneError> {
        let id = id.into();
        if panel.is_empty() {
            return Err(SceneError::EmptyCloud);
        }
        if !(sight_distance > 0.0) {
            return Err(SceneError::BadSightDistance {
                id,
                value: sight_distance,
            });
        }
        let fit = plane_fit(&panel.points).map_err(|_| SceneError::PanelNotPlanar {
            id: id.clone(),
            rms: f64::INFINITY,
            limit: PANEL_PLANARITY_LIMIT,
        })?;
        if fit.rms >= PANEL_PLANARITY_LIMIT {
            return Err(SceneError::PanelNotPlanar {
                id,
                rms: fit.rms,
                limit: PANEL_PLANARITY_LIMIT,
            });
        }
        let mut normal = fit.normal;
        if let Some(traj) = trajectory {
            let toward = traj.points()[traj.nearest_point_index(fit.centroid)] - fit.centroid;
            if normal.dot(toward) < 0.0 {
                normal = -normal;
            }
        }
        Ok(Self {
            id,
            sign_type: sign_type.into(),
            panel,
            side,
            sight_distance,
            center: fit.centroid,
            normal,
            planarity_rms: fit.rms,
        })
    }
}

/// One annotated road-marking cluster.
#[derive(Clone, Debug)]
pub struct MarkingCluster {
    pub cloud: PointCloud,
}

/// A fully loaded scene ready for evaluation.
#[derive(Clone, Debug)]
pub struct Scene {
    pub trajectory: Trajectory,
    pub environment: PointCloud,
    pub markings: Vec<MarkingCluster>,
    pub signs: Vec<SignInstance>,
    pub params: ModelParams,
}

/// All tunable model parameters, with the defaults the model was calibrated
/// at.  Distances are meters, angles radians, speeds meters per second.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Weight of the occluded-area ratio in the occlusion degree.
    pub occlusion_area_weight: f64,
    /// Weight of the occlusion-distribution term; sums to 1 with the above.
    pub occlusion_distribution_weight: f64,
    /// Exponential decay rate applied to the occlusion degree (at least 6).
    pub occlusion_decay: f64,
    /// Exponential decay rate for sight-line deviation beyond half the field
    /// of view.
    pub sight_decay: f64,
    /// Weight of the visibility ratio in the recognizability score.
    pub visibility_weight: f64,
    /// Weight of extrinsic factors in the recognizability score; sums to 1
    /// with `visibility_weight`.
    pub other_weight: f64,
    /// Score a viewpoint must strictly exceed to count as recognizable.
    pub recognizability_threshold: f64,
    /// Extrinsic-factor score used when `other_weight` is nonzero.
    pub other_score: f64,

    /// Frontal viewing distance defining the standard retinal area.
    pub standard_distance: f64,
    /// Pinhole focal distance of the retina model.
    pub retina_distance: f64,
    /// Alpha radius for boundary extraction.
    pub alpha_radius: f64,
    /// Driver eye height above the lane surface.
    pub eye_height: f64,
    /// Standard lane width used to derive the lane count.
    pub standard_lane_width: f64,
    /// Lateral shoulder offset of an ideally placed roadside sign.
    pub shoulder_offset: f64,
    /// Panel center height of an ideally placed roadside sign.
    pub mount_height_roadside: f64,
    /// Panel center height of an ideally placed overhead sign.
    pub mount_height_overhead: f64,
    /// Downward tilt of an ideally placed panel.
    pub depression_angle: f64,
    /// Horizontal rotation of an ideally placed panel toward oncoming
    /// traffic.
    pub pass_angle: f64,

    /// 85th-percentile operating speed.
    pub v85: f64,
    /// Road design speed.
    pub design_speed: f64,
    /// Driver visual reaction time, seconds.
    pub reaction_time: f64,

    /// Longitudinal spacing of field cross-sections and viewpoints.
    pub sample_interval: f64,
    /// Thickness of the cross-road slice used to anchor road outlines.
    pub slice_thickness: f64,
    /// Minimum marking-cluster length that counts as a solid line.
    pub solid_length_threshold: f64,
    /// Vertical band over the right outline kept as sign surroundings:
    /// bottom offset.
    pub env_band_low: f64,
    /// Vertical band over the right outline kept as sign surroundings: top
    /// offset.
    pub env_band_high: f64,
    /// How far beyond the right outline the surroundings band reaches.
    pub env_band_width: f64,
    /// Half-height of the marking band around the outline level.
    pub marking_band_halfheight: f64,
    /// Extra width past the driving width when sweeping the marking band.
    pub marking_band_slack: f64,
    /// Scanner height above the road surface, used by fallback outlines.
    pub device_height: f64,
    /// Lateral outline offset from the trajectory when markings are missing.
    pub fallback_half_width: f64,
    /// Environment points closer than this to a panel point are treated as
    /// part of the panel and dropped from that sign's surroundings.
    pub panel_clearance: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            occlusion_area_weight: 0.8,
            occlusion_distribution_weight: 0.2,
            occlusion_decay: 6.0,
            sight_decay: 6.0,
            visibility_weight: 1.0,
            other_weight: 0.0,
            recognizability_threshold: 0.71,
            other_score: 0.0,
            standard_distance: 2.0,
            retina_distance: 0.017,
            alpha_radius: 0.1,
            eye_height: 1.2,
            standard_lane_width: 3.5,
            shoulder_offset: 0.5,
            mount_height_roadside: 2.0,
            mount_height_overhead: 4.75,
            depression_angle: 15.0f64.to_radians(),
            pass_angle: 22.5f64.to_radians(),
            v85: 25.0 * MPH_TO_MPS,
            design_speed: 30.0 * MPH_TO_MPS,
            reaction_time: 4.0,
            sample_interval: 2.0,
            slice_thickness: 0.5,
            solid_length_threshold: 30.0,
            env_band_low: 0.3,
            env_band_high: 3.0,
            env_band_width: 2.0,
            marking_band_halfheight: 1.0,
            marking_band_slack: 0.1,
            device_height: 2.2,
            fallback_half_width: 3.5,
            panel_clearance: 0.05,
        }
    }
}

impl ModelParams {
    /// Checks the cross-field constraints; call after any mutation.
    pub fn validate(&self) -> Result<(), SceneError> {
        let bad = |msg: String| Err(SceneError::BadParams(msg));
        let sum_occ = self.occlusion_area_weight + self.occlusion_distribution_weight;
        if (sum_occ - 1.0).abs() > 1e-9 {
            return bad(format!(
                "occlusion_area_weight + occlusion_distribution_weight must be 1, got {sum_occ}"
            ));
        }
        if self.occlusion_area_weight < 0.0 || self.occlusion_distribution_weight < 0.0 {
            return bad("occlusion weights must be nonnegative".into());
        }
        let sum_rec = self.visibility_weight + self.other_weight;
        if (sum_rec - 1.0).abs() > 1e-9 {
            return bad(format!(
                "visibility_weight + other_weight must be 1, got {sum_rec}"
            ));
        }
        if self.visibility_weight < 0.0 || self.other_weight < 0.0 {
            return bad("recognizability weights must be nonnegative".into());
        }
        if self.occlusion_decay < 6.0 {
            return bad(format!(
                "occlusion_decay must be at least 6, got {}",
                self.occlusion_decay
            ));
        }
        if !(self.sight_decay > 0.0) {
            return bad("sight_decay must be positive".into());
        }
        if !(self.recognizability_threshold > 0.0 && self.recognizability_threshold < 1.0) {
            return bad(format!(
                "recognizability_threshold must be in (0, 1), got {}",
                self.recognizability_threshold
            ));
        }
        if !(self.standard_distance > 0.0 && self.standard_distance <= 3.0) {
            return bad(format!(
                "standard_distance must be in (0, 3], got {}",
                self.standard_distance
            ));
        }
        for (name, v) in [
            ("retina_distance", self.retina_distance),
            ("alpha_radius", self.alpha_radius),
            ("eye_height", self.eye_height),
            ("standard_lane_width", self.standard_lane_width),
            ("mount_height_roadside", self.mount_height_roadside),
            ("mount_height_overhead", self.mount_height_overhead),
            ("v85", self.v85),
            ("design_speed", self.design_speed),
            ("reaction_time", self.reaction_time),
            ("sample_interval", self.sample_interval),
            ("slice_thickness", self.slice_thickness),
            ("solid_length_threshold", self.solid_length_threshold),
            ("env_band_width", self.env_band_width),
            ("marking_band_halfheight", self.marking_band_halfheight),
            ("fallback_half_width", self.fallback_half_width),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        for (name, v) in [
            ("shoulder_offset", self.shoulder_offset),
            ("env_band_low", self.env_band_low),
            ("marking_band_slack", self.marking_band_slack),
            ("device_height", self.device_height),
            ("panel_clearance", self.panel_clearance),
            ("other_score", self.other_score),
        ] {
            if v < 0.0 || !v.is_finite() {
                return bad(format!("{name} must be nonnegative and finite, got {v}"));
            }
        }
        if self.env_band_high <= self.env_band_low {
            return bad(format!(
                "env_band_high ({}) must exceed env_band_low ({})",
                self.env_band_high, self.env_band_low
            ));
        }
        Ok(())
    }
}

/// One sign type in the library: its canonical panel at standard pose
/// (centered at the origin, normal along +y) plus placement metadata.
#[derive(Clone, Debug)]
pub struct SignLibraryEntry {
    pub name: String,
    /// Canonical panel cloud at standard pose.
    pub panel: PointCloud,
    /// Retinal area of the canonical panel viewed frontally from the
    /// standard distance.
    pub standard_area: f64,
    pub mount_height_roadside: Option<f64>,
    pub mount_height_overhead: Option<f64>,
    /// `(design speed m/s, sight distance m)` rows; the row whose speed is
    /// closest to the road's design speed wins.
    pub sight_distances: Vec<(f64, f64)>,
}

impl SignLibraryEntry {
    /// Sight distance for a design speed, from the nearest table row.
    pub fn sight_distance_for(&self, design_speed: f64) -> Option<f64> {
        self.sight_distances
            .iter()
            .min_by(|a, b| {
                let da = (a.0 - design_speed).abs();
                let db = (b.0 - design_speed).abs();
                da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
            })
            .map(|&(_, sd)| sd)
    }
}

/// Sign library: canonical panels and placement metadata per sign type.
#[derive(Clone, Debug, Default)]
pub struct SignLibrary {
    entries: BTreeMap<String, SignLibraryEntry>,
}

impl SignLibrary {
    pub fn insert(&mut self, entry: SignLibraryEntry) {
        self.entries.insert(entry.name.clone(), entry);
    }

    pub fn get(&self, name: &str) -> Option<&SignLibraryEntry> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Retinal area of a panel's boundary viewed frontally (along its fitted
/// normal) from the standard distance.
///
/// This is the denominator that normalizes every projected panel area, so the
/// exact same boundary pipeline is used here as in the per-viewpoint factors:
/// plane fit, view-frame rotation, alpha-shape boundary, pinhole projection.
pub fn standard_area(panel: &PointCloud, params: &ModelParams) -> Result<f64, SceneError> {
    if panel.is_empty() {
        return Err(SceneError::EmptyCloud);
    }
    let fit = plane_fit(&panel.points).map_err(|e| SceneError::PanelProjection(e.to_string()))?;
    let viewpoint = fit.centroid + fit.normal * params.standard_distance;
    boundary_retinal_area(&panel.points, fit.centroid, viewpoint, params)
        .map(|(area, _)| area)
        .map_err(|e| match e {
            BoundaryAreaError::Alpha(source) => SceneError::PanelDegenerate {
                id: String::new(),
                source,
            },
            BoundaryAreaError::Projection(msg) => SceneError::PanelProjection(msg),
        })
}

#[derive(Debug)]
pub(crate) enum BoundaryAreaError {
    Alpha(AlphaShapeError),
    Projection(String),
}

/// Shared helper: rotate `points` into the frame whose +z axis runs from
/// `center` to `viewpoint`, flatten onto that frame's xOy plane, take the
/// alpha-shape boundary, and project it onto the retina of an eye at the
/// viewpoint looking at the panel.
///
/// Returns the retinal area together with the flattened boundary polygon
/// (panel-plane coordinates), which occlusion analysis reuses.
pub(crate) fn boundary_retinal_area(
    points: &[Point3],
    center: Point3,
    viewpoint: Point3,
    params: &ModelParams,
) -> Result<(f64, crate::PlanarPolygon), BoundaryAreaError> {
    let axis = viewpoint - center;
    let distance = axis.norm();
    let rot = rotation_aligning(Point3::new(0.0, 0.0, 1.0), axis);
    let inv = rot.inverse();
    let flat: Vec<Point2> = points
        .iter()
        .map(|p| {
            let q = inv.apply(*p - center);
            Point2::new(q.x, q.y)
        })
        .collect();
    let boundary = alpha_shape_boundary(&flat, params.alpha_radius).map_err(BoundaryAreaError::Alpha)?;
    // Boundary vertices sit on the panel plane z=0; relative to the eye at
    // (0,0,distance) they are all at depth `distance` exactly.
    let relative: Vec<Point3> = boundary
        .vertices()
        .iter()
        .map(|v| Point3::new(v.x, v.y, -distance))
        .collect();
    let projected = retinal_projection(&relative, params.retina_distance)
        .map_err(|e| BoundaryAreaError::Projection(e.to_string()))?;
    Ok((crate::geometry::polygon_area(&projected), boundary))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn panel_grid(side: f64, step: f64) -> PointCloud {
        // Canonical pose: centered at the origin, normal +y, spanning x and z.
        let h = side / 2.0;
        let n = (side / step).round() as i64;
        let mut pts = Vec::new();
        for i in 0..=n {
            for k in 0..=n {
                pts.push(Point3::new(-h + step * i as f64, 0.0, -h + step * k as f64));
            }
        }
        PointCloud::from_points(pts)
    }

    fn circle_grid(radius: f64, step: f64) -> PointCloud {
        let n = (2.0 * radius / step).round() as i64;
        let mut pts = Vec::new();
        for i in 0..=n {
            for k in 0..=n {
                let (x, z) = (-radius + step * i as f64, -radius + step * k as f64);
                if (x * x + z * z).sqrt() <= radius + 1e-12 {
                    pts.push(Point3::new(x, 0.0, z));
                }
            }
        }
        // Rim ring so the boundary runs through true circle points instead
        // of the inscribed grid frontier.
        let rim = (std::f64::consts::TAU * radius / step).ceil() as i64;
        for i in 0..rim {
            let a = std::f64::consts::TAU * i as f64 / rim as f64;
            pts.push(Point3::new(radius * a.cos(), 0.0, radius * a.sin()));
        }
        PointCloud::from_points(pts)
    }

    #[test]
    fn default_params_validate() {
        ModelParams::default().validate().unwrap();
    }

    #[test]
    fn weight_sums_are_enforced() {
        let mut p = ModelParams::default();
        p.occlusion_area_weight = 0.9;
        assert!(p.validate().is_err());
        let mut p = ModelParams::default();
        p.visibility_weight = 0.9;
        p.other_weight = 0.2;
        assert!(p.validate().is_err());
    }

    #[test]
    fn decay_and_threshold_bounds_are_enforced() {
        let mut p = ModelParams::default();
        p.occlusion_decay = 5.0;
        assert!(p.validate().is_err());
        let mut p = ModelParams::default();
        p.recognizability_threshold = 1.0;
        assert!(p.validate().is_err());
        let mut p = ModelParams::default();
        p.standard_distance = 3.5;
        assert!(p.validate().is_err());
    }

    #[test]
    fn trajectory_rejects_short_and_stalled_input() {
        assert!(matches!(
            Trajectory::new(vec![Point3::zero()]),
            Err(SceneError::TrajectoryTooShort(1))
        ));
        let stalled = vec![Point3::zero(), Point3::zero(), Point3::new(1.0, 0.0, 0.0)];
        assert!(matches!(
            Trajectory::new(stalled),
            Err(SceneError::TrajectoryStalls(1))
        ));
    }

    #[test]
    fn trajectory_arc_lengths_accumulate() {
        let t = Trajectory::new(vec![
            Point3::zero(),
            Point3::new(0.0, 3.0, 0.0),
            Point3::new(0.0, 3.0, 4.0),
        ])
        .unwrap();
        assert_eq!(t.arc(), &[0.0, 3.0, 7.0]);
        assert_eq!(t.total_length(), 7.0);
        assert_eq!(t.nearest_point_index(Point3::new(0.1, 2.9, 0.0)), 1);
    }

    #[test]
    fn sign_normal_orients_toward_trajectory() {
        let traj = Trajectory::new(vec![
            Point3::new(-3.7, 0.0, 2.2),
            Point3::new(-3.7, 50.0, 2.2),
        ])
        .unwrap();
        // Panel spans x and z at y=60; its fitted normal is +-y and must
        // resolve toward the trajectory on the negative-y side.
        let mut panel = panel_grid(0.6, 0.05);
        for p in &mut panel.points {
            *p = Point3::new(p.x + 0.5, 60.0, p.z + 2.0);
        }
        let sign = SignInstance::new("s", "square", panel, SignSide::Right, 45.0, Some(&traj))
            .unwrap();
        assert!(sign.normal.y < -0.99, "normal {:?}", sign.normal);
        assert!(sign.center.distance(Point3::new(0.5, 60.0, 2.0)) < 1e-9);
    }

    #[test]
    fn bumpy_panel_is_rejected() {
        let mut panel = panel_grid(0.6, 0.05);
        for (i, p) in panel.points.iter_mut().enumerate() {
            p.y += if i % 2 == 0 { 0.06 } else { -0.06 };
        }
        let err = SignInstance::new("s", "square", panel, SignSide::Right, 45.0, None)
            .unwrap_err();
        assert!(matches!(err, SceneError::PanelNotPlanar { .. }));
    }

    #[test]
    fn standard_area_of_square_panel() {
        // 0.6 m square from 2 m with a 17 mm retina: (0.6 * 0.017 / 2)^2.
        let params = ModelParams::default();
        let area = standard_area(&panel_grid(0.6, 0.05), &params).unwrap();
        let want = 2.601e-5;
        assert!(
            (area - want).abs() <= want * 0.02,
            "area {area:e}, want ~{want:e}"
        );
    }

    #[test]
    fn standard_area_of_circular_panel() {
        // Radius 0.3 m disk from 2 m: pi * (0.3 * 0.0085)^2 = 2.043e-5, with
        // a sampled boundary slightly inside the true circle.
        let params = ModelParams::default();
        let area = standard_area(&circle_grid(0.3, 0.02), &params).unwrap();
        let want = 2.0428e-5;
        assert!(
            (area - want).abs() <= want * 0.02,
            "area {area:e}, want ~{want:e}"
        );
    }

    #[test]
    fn standard_area_is_deterministic() {
        let params = ModelParams::default();
        let cloud = circle_grid(0.3, 0.02);
        let a = standard_area(&cloud, &params).unwrap();
        let b = standard_area(&cloud, &params).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn library_sight_distance_picks_nearest_speed() {
        let entry = SignLibraryEntry {
            name: "square".into(),
            panel: panel_grid(0.6, 0.05),
            standard_area: 2.6e-5,
            mount_height_roadside: None,
            mount_height_overhead: None,
            sight_distances: vec![(13.4112, 45.0), (26.8224, 130.0)],
        };
        assert_eq!(entry.sight_distance_for(14.0), Some(45.0));
        assert_eq!(entry.sight_distance_for(27.0), Some(130.0));
    }
}
