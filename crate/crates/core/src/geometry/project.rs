//! Ray intersection with the `z = 0` plane and pinhole retinal projection.

use super::{Point2, Point3, Real};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RayPlaneError {
    #[error("ray is parallel to the z=0 plane (|dz| below 1e-12)")]
    NoIntersection,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ProjectionError {
    #[error("point {index} sits at |z| = {depth:?}, not beyond the projection distance")]
    BehindPupil { index: usize, depth: f64 },
}

/// Intersects the line through `origin` and `through` with the `z = 0` plane.
///
/// Fails when the two points share their z coordinate to within 1e-12, i.e.
/// the line runs parallel to the plane.
pub fn ray_plane_xy_intersection<F: Real>(
    origin: Point3<F>,
    through: Point3<F>,
) -> Result<Point2<F>, RayPlaneError> {
    let dz = through.z - origin.z;
    if dz.abs() < F::of(1e-12) {
        return Err(RayPlaneError::NoIntersection);
    }
    let t = -origin.z / dz;
    let hit = origin + (through - origin) * t;
    Ok(Point2::new(hit.x, hit.y))
}

/// Pinhole projection of view-frame points onto a retina plane at focal
/// distance `retina_distance` behind the pupil at the origin.
///
/// Each point maps to `(x * f / |z|, y * f / |z|)`.  Every input must be
/// strictly deeper than the focal distance (`|z| > retina_distance`);
/// otherwise the offender's index is reported.
pub fn retinal_projection<F: Real>(
    points: &[Point3<F>],
    retina_distance: F,
) -> Result<Vec<Point2<F>>, ProjectionError> {
    let mut out = Vec::with_capacity(points.len());
    for (index, p) in points.iter().enumerate() {
        let depth = p.z.abs();
        if depth <= retina_distance {
            return Err(ProjectionError::BehindPupil {
                index,
                depth: depth.to_f64().unwrap_or(f64::NAN),
            });
        }
        let s = retina_distance / depth;
        out.push(Point2::new(p.x * s, p.y * s));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polygon_area;

    fn p3(x: f64, y: f64, z: f64) -> Point3<f64> {
        Point3::new(x, y, z)
    }

    #[test]
    fn ray_hits_plane_where_expected() {
        let hit = ray_plane_xy_intersection(p3(0.0, 0.0, 10.0), p3(0.0, 0.1, 5.0)).unwrap();
        assert!(hit.distance(Point2::new(0.0, 0.2)) < 1e-12);
    }

    #[test]
    fn ray_through_origin_direction() {
        let hit = ray_plane_xy_intersection(p3(1.0, 2.0, 4.0), p3(1.0, 2.0, 2.0)).unwrap();
        assert!(hit.distance(Point2::new(1.0, 2.0)) < 1e-12);
    }

    #[test]
    fn parallel_ray_is_rejected() {
        assert_eq!(
            ray_plane_xy_intersection(p3(0.0, 0.0, 1.0), p3(5.0, 3.0, 1.0)),
            Err(RayPlaneError::NoIntersection)
        );
    }

    #[test]
    fn square_projects_to_expected_retinal_area() {
        // 0.6 m square seen frontally from 2 m with a 17 mm retina distance:
        // each half-side maps to 0.3 * 0.017 / 2 = 0.00255.
        let f = 0.017;
        let corners = [
            p3(-0.3, -0.3, -2.0),
            p3(0.3, -0.3, -2.0),
            p3(0.3, 0.3, -2.0),
            p3(-0.3, 0.3, -2.0),
        ];
        let proj = retinal_projection(&corners, f).unwrap();
        assert!((proj[1].x - 0.00255).abs() < 1e-15);
        let area = polygon_area(&proj);
        assert!((area - 2.601e-5).abs() < 1e-12, "area {area}");
    }

    #[test]
    fn retinal_area_follows_inverse_square() {
        let f = 0.017;
        let at = |d: f64| {
            let corners = [
                p3(-0.3, -0.3, -d),
                p3(0.3, -0.3, -d),
                p3(0.3, 0.3, -d),
                p3(-0.3, 0.3, -d),
            ];
            polygon_area(&retinal_projection(&corners, f).unwrap())
        };
        let ratio = at(2.0) / at(4.0);
        assert!((ratio - 4.0).abs() < 1e-6);
    }

    #[test]
    fn points_behind_pupil_are_rejected() {
        let err = retinal_projection(&[p3(0.0, 0.0, -2.0), p3(0.1, 0.0, -0.01)], 0.017)
            .unwrap_err();
        match err {
            ProjectionError::BehindPupil { index, .. } => assert_eq!(index, 1),
        }
    }
}
