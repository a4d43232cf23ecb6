//! Scalar-generic geometric kernel.
//!
//! Everything in here is pure geometry with no knowledge of roads or signs:
//! small vector types, unit-quaternion rotations, planar polygons with
//! boundary-inclusive containment, alpha-shape outer boundaries, ray/plane
//! intersection against the `z = 0` plane, pinhole (retinal) projection, and
//! a least-squares plane fit.  All of it is generic over [`Real`] so the
//! kernel works in `f32` as well as the `f64` the pipeline uses.

mod alpha;
mod plane;
mod point;
mod polygon;
mod project;
mod rotation;

pub(crate) mod grid2;

pub use alpha::{alpha_shape_boundary, AlphaShapeError};
pub use plane::{plane_fit, PlaneFit, PlaneFitError};
pub use point::{Point2, Point3};
pub use polygon::{point_in_polygon, polygon_area, PlanarPolygon, PolygonError};
pub use project::{
    ray_plane_xy_intersection, retinal_projection, ProjectionError, RayPlaneError,
};
pub use rotation::{rotation_aligning, Rotation};

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive};

/// Scalar abstraction for the geometric kernel: an IEEE float with enough
/// trait surface to write generic numerics (`f32` and `f64` qualify).
pub trait Real: Float + FromPrimitive + Debug + Default + Send + Sync + 'static {
    /// Lossy conversion from `f64`, used for constants and tolerances.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant must convert")
    }
}

impl<T> Real for T where T: Float + FromPrimitive + Debug + Default + Send + Sync + 'static {}
