//! Lane decomposition and driver viewpoints.
//!
//! The driving width between the outline anchors is split into equally wide
//! lanes.  Each cross-section of the arc sampling is divided at the same
//! fractions, which pins the last dividing line onto the left outline even
//! where the measured width drifts along the road.  Viewpoints sit on lane
//! centerlines at eye height, one column per cross-section, ordered so the
//! column index increases toward the sign (the last column is abreast of
//! it).

use crate::segmentation::ArcSampling;
use crate::Point3;

#[derive(Clone, Debug, thiserror::Error)]
pub enum ViewpointError {
    #[error("cross-section {index} has coinciding outline samples")]
    DegenerateCrossSection { index: usize },
    #[error("lane inputs must be positive, got width {width} and lane {lane}")]
    BadLaneInputs { width: f64, lane: f64 },
}

/// Result of splitting a driving width into standard lanes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaneCount {
    pub lanes: usize,
    /// Actual lane width, `driving_width / lanes`.
    pub lane_width: f64,
    /// Set when the driving width was narrower than one standard lane and
    /// the count was clamped to 1.
    pub clamped: bool,
}

/// Number of lanes that fit the driving width, and their actual width.
pub fn lane_count(driving_width: f64, standard_lane: f64) -> Result<LaneCount, ViewpointError> {
    if !(driving_width > 0.0 && standard_lane > 0.0) {
        return Err(ViewpointError::BadLaneInputs {
            width: driving_width,
            lane: standard_lane,
        });
    }
    let m = (driving_width / standard_lane).floor() as usize;
    let (lanes, clamped) = if m == 0 { (1, true) } else { (m, false) };
    Ok(LaneCount {
        lanes,
        lane_width: driving_width / lanes as f64,
        clamped,
    })
}

/// Lane dividing polylines: index 0 is the right outline samples, index
/// `lanes` the left outline samples, interior lines at equal width
/// fractions of each cross-section.
pub fn dividing_lines(
    sampling: &ArcSampling,
    lanes: usize,
) -> Result<Vec<Vec<Point3>>, ViewpointError> {
    for (index, (&a, &b)) in sampling.a.iter().zip(&sampling.b).enumerate() {
        if a.distance(b) < 1e-9 {
            return Err(ViewpointError::DegenerateCrossSection { index });
        }
    }
    let lines = (0..=lanes)
        .map(|i| {
            let f = i as f64 / lanes as f64;
            sampling
                .a
                .iter()
                .zip(&sampling.b)
                .map(|(&a, &b)| a + (b - a) * f)
                .collect()
        })
        .collect();
    Ok(lines)
}

/// Driver-eye viewpoint grid over the sight field.
#[derive(Clone, Debug)]
pub struct LaneGrid {
    pub lane_count: usize,
    pub lane_width: f64,
    /// Set when the driving width was clamped to a single lane.
    pub clamped: bool,
    /// Dividing polylines, right outline first (`lane_count + 1` entries).
    pub lines: Vec<Vec<Point3>>,
    /// `viewpoints[lane][column]`; lane 0 is the rightmost lane, column
    /// index increases toward the sign.
    pub viewpoints: Vec<Vec<Point3>>,
    /// Approach arc length from each viewpoint to the sign's cross-section
    /// along its lane, `[lane][column]` (last column is 0).
    pub d_length: Vec<Vec<f64>>,
    /// Plan-view offset from each viewpoint to the right outline sample of
    /// its cross-section, `[lane][column]`.
    pub d_width: Vec<Vec<f64>>,
}

/// Builds the viewpoint grid: lane centerline points of every cross-section
/// raised by the eye height, with approach arc lengths and lateral offsets.
pub fn viewpoints(
    sampling: &ArcSampling,
    lanes: &LaneCount,
    eye_height: f64,
) -> Result<LaneGrid, ViewpointError> {
    let lines = dividing_lines(sampling, lanes.lanes)?;
    let n = sampling.a.len();
    let lift = Point3::new(0.0, 0.0, eye_height);
    let mut viewpoints = Vec::with_capacity(lanes.lanes);
    let mut d_length = Vec::with_capacity(lanes.lanes);
    let mut d_width = Vec::with_capacity(lanes.lanes);
    for i in 0..lanes.lanes {
        // Centerline in sampling order (index 0 at the sign).
        let center: Vec<Point3> = (0..n)
            .map(|k| (lines[i][k] + lines[i + 1][k]) * 0.5)
            .collect();
        let mut arc_from_sign = vec![0.0; n];
        for k in 1..n {
            arc_from_sign[k] = arc_from_sign[k - 1] + center[k].distance(center[k - 1]);
        }
        // Columns reverse the sampling order: j = n-1 is abreast of the sign.
        let column: Vec<Point3> = (0..n).map(|j| center[n - 1 - j] + lift).collect();
        let lengths: Vec<f64> = (0..n).map(|j| arc_from_sign[n - 1 - j]).collect();
        let widths: Vec<f64> = (0..n)
            .map(|j| column[j].xy().distance(sampling.a[n - 1 - j].xy()))
            .collect();
        viewpoints.push(column);
        d_length.push(lengths);
        d_width.push(widths);
    }
    Ok(LaneGrid {
        lane_count: lanes.lanes,
        lane_width: lanes.lane_width,
        clamped: lanes.clamped,
        lines,
        viewpoints,
        d_length,
        d_width,
    })
}
