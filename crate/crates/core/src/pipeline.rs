//! End-to-end evaluation: for each sign, pick the road outlines, cut the
//! roadside corridor out of the environment, build the viewpoint grid,
//! measure real and reference visibility at every viewpoint, decide
//! recognizability, and fold each lane into a timely verdict.
//!
//! Signs are evaluated independently and in parallel; one sign's failure
//! becomes a report entry instead of aborting the run.  Reports are ordered
//! by sign id and every intermediate is index-ordered, so a run is
//! deterministic regardless of thread count.

use rayon::prelude::*;

use crate::ideal::{build_ideal_sign, corresponding_viewpoint, ideal_visibility, IdealRecord};
use crate::io::report::{
    LaneReport, ReportFlags, RunReport, SignFailure, SignReport, ViewpointReport,
};
use crate::recognizability::{
    max_continuous_length, timely, viewpoint_recognizability, visual_recognition_distance,
};
use crate::scene::{MarkingCluster, Scene, SignInstance, SignLibrary};
use crate::segmentation::{
    build_arc_sampling, classify_markings, fallback_outlines, select_outlines, sign_heading,
    sweep_segment, MarkingKind, SegmentationError,
};
use crate::viewpoint::{lane_count, viewpoints};
use crate::visibility::{viewpoint_visibility, VisibilityRecord};

/// Run-wide evaluation settings.
#[derive(Clone, Copy, Debug, Default)]
pub struct EvaluationOptions {
    /// Cap on worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

/// Evaluates every sign in the scene and assembles the run report.
pub fn evaluate(scene: &Scene, library: &SignLibrary, options: &EvaluationOptions) -> RunReport {
    let run = || {
        let results: Vec<Result<SignReport, SignFailure>> = scene
            .signs
            .par_iter()
            .map(|sign| {
                evaluate_sign(scene, library, sign).map_err(|error| SignFailure {
                    id: sign.id.clone(),
                    error,
                })
            })
            .collect();
        let mut report = RunReport::default();
        for result in results {
            match result {
                Ok(sign) => report.signs.push(sign),
                Err(failure) => report.failures.push(failure),
            }
        }
        report.signs.sort_by(|a, b| a.id.cmp(&b.id));
        report.failures.sort_by(|a, b| a.id.cmp(&b.id));
        report
    };
    match options.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        None => run(),
    }
}

fn evaluate_sign(
    scene: &Scene,
    library: &SignLibrary,
    sign: &SignInstance,
) -> Result<SignReport, String> {
    let params = &scene.params;
    let entry = library
        .get(&sign.sign_type)
        .ok_or_else(|| format!("unknown sign type {:?}", sign.sign_type))?;
    let heading = sign_heading(sign, &scene.trajectory).map_err(|e| e.to_string())?;

    let classified = classify_markings(&scene.markings, &scene.trajectory, params);
    let solids: Vec<&MarkingCluster> = classified
        .iter()
        .filter(|c| c.kind == MarkingKind::Solid)
        .map(|c| &scene.markings[c.index])
        .collect();
    let (outlines, fallback_used) = match select_outlines(&solids, &scene.trajectory, sign, params)
    {
        Ok(pair) => (pair, false),
        Err(SegmentationError::FallbackRequired) => {
            let pair = fallback_outlines(
                &scene.trajectory,
                sign,
                params.device_height,
                params.fallback_half_width,
            )
            .map_err(|e| e.to_string())?;
            (pair, true)
        }
        Err(e) => return Err(e.to_string()),
    };

    let sampling = build_arc_sampling(&outlines, sign.sight_distance, params.sample_interval)
        .map_err(|e| e.to_string())?;
    let segmented = sweep_segment(&scene.environment, &sampling, params);
    let lanes =
        lane_count(sampling.driving_width, params.standard_lane_width).map_err(|e| e.to_string())?;
    let grid = viewpoints(&sampling, &lanes, params.eye_height).map_err(|e| e.to_string())?;

    // Reference placement.  Overhead signs keep their lateral offset from
    // the right outline's anchor; when the outlines came from the fallback
    // the anchor sits a shoulder width too far into the road, so it is
    // pulled toward the sign to treat the sign as ideally placed.
    let mut anchor = outlines.right_anchor_point();
    if fallback_used {
        anchor = anchor - heading * params.shoulder_offset;
    }
    let d_sign = (sign.center.xy() - anchor.xy()).norm();
    let ideal_sign =
        build_ideal_sign(entry, sign.side, d_sign, params).map_err(|e| e.to_string())?;

    let coords: Vec<(usize, usize)> = (0..grid.viewpoints.len())
        .flat_map(|lane| (0..grid.viewpoints[lane].len()).map(move |col| (lane, col)))
        .collect();
    let measured: Vec<(VisibilityRecord, IdealRecord)> = coords
        .par_iter()
        .map(|&(lane, col)| {
            let real = viewpoint_visibility(
                sign,
                &segmented.environment,
                &grid,
                lane,
                col,
                entry,
                params,
            )
            .map_err(|e| format!("lane {} column {col}: {e}", lane + 1))?;
            let reference = ideal_visibility(
                &ideal_sign,
                entry,
                corresponding_viewpoint(real.d_width, real.d_length, params.eye_height),
                params,
            )
            .map_err(|e| format!("lane {} column {col} reference: {e}", lane + 1))?;
            Ok((real, reference))
        })
        .collect::<Result<_, String>>()?;

    let vrd = visual_recognition_distance(params.v85, params.reaction_time);
    let mut lanes_report = Vec::with_capacity(grid.viewpoints.len());
    let mut cursor = 0usize;
    for lane in 0..grid.viewpoints.len() {
        let columns = grid.viewpoints[lane].len();
        let mut viewpoint_lines = Vec::with_capacity(columns);
        let mut bits = Vec::with_capacity(columns);
        let mut arcs = Vec::with_capacity(columns);
        for col in 0..columns {
            let (real, reference) = &measured[cursor];
            cursor += 1;
            let decision = viewpoint_recognizability(
                lane,
                col,
                real.e_visibility,
                reference.e_visibility,
                params,
            );
            bits.push(decision.recognizable);
            arcs.push(real.d_length);
            viewpoint_lines.push(ViewpointReport {
                arc: real.d_length,
                e_visibility: real.e_visibility,
                e_visibility_ideal: reference.e_visibility,
                cognitive_double: decision.cognitive_ratio,
                recognizable: decision.recognizable as u8,
            });
        }
        let max_len = max_continuous_length(&bits, &arcs);
        lanes_report.push(LaneReport {
            lane: lane + 1,
            viewpoints: viewpoint_lines,
            max_cognitive_distance: max_len,
            min_cognitive_distance: vrd,
            timely: timely(max_len, vrd) as u8,
        });
    }

    Ok(SignReport {
        id: sign.id.clone(),
        sign_type: sign.sign_type.clone(),
        sight_distance: sign.sight_distance,
        lanes: lanes_report,
        flags: ReportFlags {
            short_field: sampling.short_field,
            vrd_exceeds_sight_distance: vrd > sign.sight_distance,
            fallback_outlines_used: fallback_used,
        },
    })
}
