//! Recognizability decisions: whether the sign reads at a viewpoint, how
//! long the continuous readable stretch of each lane is, and whether that
//! stretch leaves a driver enough distance to react in time.
//!
//! A viewpoint is recognizable when the weighted score built from the
//! real-to-reference visibility ratio strictly exceeds the threshold.  The
//! lane verdict then compares the longest run of consecutive recognizable
//! viewpoints (measured as summed arc between them, so a lone viewpoint
//! contributes nothing) against the distance covered during the driver's
//! reaction time; meeting it exactly counts as timely.

use crate::scene::ModelParams;

/// The recognizability decision at one viewpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecognizabilityRecord {
    pub lane: usize,
    pub column: usize,
    /// Real visibility over reference visibility (0 when the reference is
    /// degenerate).
    pub cognitive_ratio: f64,
    /// Weighted decision score the threshold is applied to.
    pub score: f64,
    pub recognizable: bool,
    /// The reference visibility was zero, forcing the bit off.
    pub degenerate_ideal: bool,
}

/// Scores one viewpoint.  The score mixes the visibility ratio with an
/// externally supplied term (off by default) and must strictly exceed the
/// threshold.
pub fn viewpoint_recognizability(
    lane: usize,
    column: usize,
    e_visibility: f64,
    e_ideal: f64,
    params: &ModelParams,
) -> RecognizabilityRecord {
    if e_ideal <= 0.0 {
        return RecognizabilityRecord {
            lane,
            column,
            cognitive_ratio: 0.0,
            score: 0.0,
            recognizable: false,
            degenerate_ideal: true,
        };
    }
    let ratio = e_visibility / e_ideal;
    let score = params.visibility_weight * ratio + params.other_weight * params.other_score;
    RecognizabilityRecord {
        lane,
        column,
        cognitive_ratio: ratio,
        score,
        recognizable: score > params.recognizability_threshold,
        degenerate_ideal: false,
    }
}

/// Longest continuous recognizable stretch, as summed arc length between
/// consecutive recognizable viewpoints.  `positions` holds each viewpoint's
/// approach arc, parallel to `recognizable`; a gap joins a run only when
/// both of its endpoints are recognizable.
pub fn max_continuous_length(recognizable: &[bool], positions: &[f64]) -> f64 {
    assert_eq!(
        recognizable.len(),
        positions.len(),
        "one arc position per viewpoint"
    );
    let mut best = 0.0f64;
    let mut run = 0.0f64;
    for i in 1..recognizable.len() {
        if recognizable[i - 1] && recognizable[i] {
            run += (positions[i] - positions[i - 1]).abs();
            best = best.max(run);
        } else {
            run = 0.0;
        }
    }
    best
}

/// Distance covered during the driver's reaction time: operating speed in
/// meters per second times reaction seconds.
pub fn visual_recognition_distance(speed: f64, reaction_time: f64) -> f64 {
    speed * reaction_time
}

/// A lane's verdict: the readable stretch covers the reaction distance,
/// boundary included.
pub fn timely(max_length: f64, required: f64) -> bool {
    max_length >= required
}
