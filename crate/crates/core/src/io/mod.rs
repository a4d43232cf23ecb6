//! File formats and loading: point-cloud readers, the scene manifest, the
//! sign library, parameter override files, and report rendering.
//!
//! Everything here is plumbing around the model: parse, validate, resolve
//! paths, and hand back the in-memory types the evaluation consumes.  All
//! formats are plain text and documented in docs/FORMATS.md.

pub mod cloud;
pub mod manifest;
pub mod params_file;
pub mod report;
pub mod units;

pub use cloud::{read_point_cloud, write_xyz, CloudError};
pub use manifest::{load_library, load_scene, LoadError};
pub use params_file::apply_param_overrides;
pub use report::{
    render_text, write_reports, LaneReport, ReportFlags, RunReport, SignFailure, SignReport,
    ViewpointReport,
};
pub use units::{parse_speed, UnitError};
