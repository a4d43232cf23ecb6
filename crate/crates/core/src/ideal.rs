//! Reference placement: the same sign type mounted in a standardized pose
//! beside (or above) a straight, empty road.  Each real viewpoint gets a
//! counterpart here at the same approach distance and lateral offset, and
//! the ratio of real to reference visibility is what the recognizability
//! decision thresholds.
//!
//! The reference road runs along +y with its right outline on the y axis;
//! the sign cross-section is y = 0 and traffic approaches from +y, so the
//! reference driving direction is -y.  There is no occlusion here by
//! construction, which leaves the geometric and sight-line factors.

use crate::geometry::{plane_fit, rotation_aligning};
use crate::scene::{ModelParams, PointCloud, SignLibraryEntry, SignSide};
use crate::visibility::{gfov, sight_line_factor, VisibilityError};
use crate::Point3;

#[derive(Clone, Debug, thiserror::Error)]
pub enum IdealError {
    #[error("library panel for {0:?} is degenerate: {1}")]
    DegeneratePanel(String, String),
}

/// Mounting normal of the reference sign: tilted down by the depression
/// angle and turned toward oncoming traffic by the pass angle.
pub fn ideal_normal(depression: f64, pass_angle: f64) -> Point3 {
    Point3::new(
        depression.cos() * pass_angle.sin(),
        depression.cos() * pass_angle.cos(),
        depression.sin(),
    )
}

/// The sign posed in its reference position.
#[derive(Clone, Debug)]
pub struct IdealSign {
    /// Panel center in reference coordinates.
    pub center: Point3,
    /// Panel cloud moved into the reference pose.
    pub panel: PointCloud,
}

/// Reference panel center.  Roadside signs sit one shoulder width right of
/// the outline; overhead signs keep the real sign's lateral offset into the
/// road.  Mount heights come from the library entry when it has one.
pub fn ideal_center(
    entry: &SignLibraryEntry,
    side: SignSide,
    lateral_offset: f64,
    params: &ModelParams,
) -> Point3 {
    match side {
        SignSide::Right => Point3::new(
            params.shoulder_offset,
            0.0,
            entry
                .mount_height_roadside
                .unwrap_or(params.mount_height_roadside),
        ),
        SignSide::Overhead => Point3::new(
            -lateral_offset,
            0.0,
            entry
                .mount_height_overhead
                .unwrap_or(params.mount_height_overhead),
        ),
    }
}

/// Rigidly moves the library panel into the reference pose: its fitted
/// normal is rotated onto the mounting normal and its centroid translated
/// to the reference center.
pub fn build_ideal_sign(
    entry: &SignLibraryEntry,
    side: SignSide,
    lateral_offset: f64,
    params: &ModelParams,
) -> Result<IdealSign, IdealError> {
    let fit = plane_fit(&entry.panel.points)
        .map_err(|e| IdealError::DegeneratePanel(entry.name.clone(), e.to_string()))?;
    // The fit's normal sign is arbitrary; orient it toward +y (the side
    // traffic approaches from) so the pose is deterministic.
    let mut normal = fit.normal;
    let keep = if normal.y.abs() > 1e-9 {
        normal.y > 0.0
    } else if normal.z.abs() > 1e-9 {
        normal.z > 0.0
    } else {
        normal.x > 0.0
    };
    if !keep {
        normal = -normal;
    }
    let target = ideal_normal(params.depression_angle, params.pass_angle);
    let rotation = rotation_aligning(normal, target);
    let center = ideal_center(entry, side, lateral_offset, params);
    let points = entry
        .panel
        .points
        .iter()
        .map(|&p| center + rotation.apply(p - fit.centroid))
        .collect();
    Ok(IdealSign {
        center,
        panel: PointCloud::from_points(points),
    })
}

/// The reference eye position matching a real viewpoint's approach arc
/// length and lateral offset from the right outline.
pub fn corresponding_viewpoint(d_width: f64, d_length: f64, eye_height: f64) -> Point3 {
    Point3::new(-d_width, d_length, eye_height)
}

/// Reference factors for one eye position.
#[derive(Clone, Copy, Debug)]
pub struct IdealRecord {
    pub e_geo: f64,
    pub e_sight: f64,
    /// Product of the two factors; nothing occludes the reference sign.
    pub e_visibility: f64,
    pub a_view: f64,
    /// Deviation between the -y driving direction and the line of sight.
    pub sight_angle: f64,
}

/// Evaluates the reference sign from one eye position.  The driving
/// direction is -y and the field of view is the one for the road's design
/// speed.
pub fn ideal_visibility(
    sign: &IdealSign,
    entry: &SignLibraryEntry,
    viewpoint: Point3,
    params: &ModelParams,
) -> Result<IdealRecord, VisibilityError> {
    let offset = sign.center - viewpoint;
    let distance = offset.norm();
    if distance < 1e-9 {
        return Err(VisibilityError::DegenerateViewpoint);
    }
    if distance <= params.retina_distance {
        return Err(VisibilityError::BehindPupil);
    }
    let a_view = crate::visibility::viewed_boundary(
        &sign.panel.points,
        sign.center,
        viewpoint,
        params,
    )?
    .map_or(0.0, |(area, _)| area);
    let e_geo = a_view / entry.standard_area;
    let sight_angle = Point3::new(0.0, -1.0, 0.0).angle_to(offset);
    let e_sight = sight_line_factor(sight_angle, gfov(params.design_speed), params.sight_decay);
    Ok(IdealRecord {
        e_geo,
        e_sight,
        e_visibility: e_geo * e_sight,
        a_view,
        sight_angle,
    })
}
