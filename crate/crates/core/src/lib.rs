//! Visibility and timely-recognizability analysis of traffic signs in
//! annotated road point clouds.
//!
//! The library answers one question per sign and lane: while approaching the
//! sign along its sight field, does a driver get enough clearly-visible road
//! ahead of the sign to read it in time?  The inputs are mobile-mapping style
//! artifacts that callers annotate up front instead of running detectors:
//!
//! * a scanner trajectory polyline,
//! * one point cloud per sign panel,
//! * the surrounding environment cloud,
//! * optional road-marking clusters.
//!
//! From those the pipeline segments the road space in front of each sign,
//! lays out per-lane viewpoints over the sign's sight field, and scores every
//! viewpoint with a visibility measure built from three factors: projected
//! panel area on a pinhole retina, occlusion of that projection by
//! environment points, and the deviation of the sight line from the driving
//! direction relative to the speed-dependent field of view.  Each actual
//! viewpoint is compared against the matching viewpoint in an ideally placed
//! reference scene; the ratio decides per-viewpoint recognizability, and the
//! longest recognizable stretch of a lane is compared with the distance the
//! driver needs at the 85th-percentile speed to judge timeliness.
//!
//! Module map:
//!
//! * [`geometry`]: scalar-generic geometric kernel (rotations, alpha-shape
//!   boundaries, polygon predicates, pinhole projection).
//! * [`scene`]: input model (clouds, trajectory, signs, markings), model
//!   parameters, and the sign library.
//! * [`segmentation`]: road outlines, arc sampling of the sight field, and
//!   the swept-band extraction of sign surroundings.
//! * [`viewpoint`]: lane grid and per-lane viewpoint generation.
//! * [`visibility`]: the per-viewpoint visibility factors.
//! * [`ideal`]: the ideally-placed reference scene and its visibility.
//! * [`recognizability`]: per-viewpoint verdicts, recognizable run lengths,
//!   and per-lane timeliness.
//! * [`io`]: manifest/cloud/report formats and parameter files.
//! * [`synthetic`]: deterministic synthetic scene generator with analytic
//!   ground truth.
//! * [`pipeline`]: the end-to-end evaluation entry point.
//!
//! The geometric kernel is generic over its scalar (any [`Real`], i.e. `f32`
//! or `f64`); the pipeline and the aliases below fix `f64`.

pub mod geometry;
pub mod ideal;
pub mod io;
pub mod pipeline;
pub mod recognizability;
pub mod scene;
pub mod segmentation;
pub mod synthetic;
pub mod viewpoint;
pub mod visibility;

pub use geometry::Real;

/// Crate-wide concrete scalar used by the pipeline.
pub type Scalar = f64;

/// 3D point/vector with `f64` components.
pub type Point3 = geometry::Point3<Scalar>;
/// 2D point/vector with `f64` components.
pub type Point2 = geometry::Point2<Scalar>;
/// Unit-quaternion rotation over `f64`.
pub type Rotation = geometry::Rotation<Scalar>;
/// Simple planar polygon over `f64`.
pub type PlanarPolygon = geometry::PlanarPolygon<Scalar>;

pub use io::report::RunReport;
pub use pipeline::{evaluate, EvaluationOptions};
pub use scene::{ModelParams, Scene, SignInstance, SignLibrary};

