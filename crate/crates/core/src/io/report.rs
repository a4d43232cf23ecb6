//! Evaluation reports: a human-readable text rendering, a structured JSON
//! rendering with one record per sign, and an optional CSV field-grid
//! export for external plotting.
//!
//! Both renderings print floats with the shortest round-trip formatting,
//! so the text and JSON reports carry identical numeric values.  Per-sign
//! failures are part of the report rather than aborting the run.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// One viewpoint line of a lane's field.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ViewpointReport {
    /// Approach arc length to the sign's cross-section, meters.
    pub arc: f64,
    pub e_visibility: f64,
    #[serde(rename = "e_visibilityI")]
    pub e_visibility_ideal: f64,
    /// Actual over reference visibility.
    #[serde(rename = "CognitiveDouble")]
    pub cognitive_double: f64,
    /// Recognizability bit.
    pub recognizable: u8,
}

/// One lane's field and verdict.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LaneReport {
    /// 1-based lane number, counted from the right outline.
    pub lane: usize,
    pub viewpoints: Vec<ViewpointReport>,
    /// Longest continuous recognizable stretch, meters.
    #[serde(rename = "maxCognitiveDistance")]
    pub max_cognitive_distance: f64,
    /// Required reaction distance, meters.
    #[serde(rename = "minCognitiveDistance")]
    pub min_cognitive_distance: f64,
    /// 1 when the stretch covers the reaction distance.
    pub timely: u8,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct ReportFlags {
    /// The outlines ended before the sight distance was covered.
    pub short_field: bool,
    /// The reaction distance exceeds the sight distance, so no verdict can
    /// come out timely.
    pub vrd_exceeds_sight_distance: bool,
    /// No usable solid markings; outlines were offset from the trajectory.
    pub fallback_outlines_used: bool,
}

/// Everything reported for one sign.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SignReport {
    pub id: String,
    #[serde(rename = "type")]
    pub sign_type: String,
    pub sight_distance: f64,
    pub lanes: Vec<LaneReport>,
    pub flags: ReportFlags,
}

/// A sign whose evaluation failed; the rest of the run is unaffected.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SignFailure {
    pub id: String,
    pub error: String,
}

/// A whole run: reports ordered by sign id, failures listed separately.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RunReport {
    pub signs: Vec<SignReport>,
    pub failures: Vec<SignFailure>,
}

fn bit(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Renders the text report.  Floats use shortest round-trip formatting, so
/// every value equals its JSON counterpart exactly.
pub fn render_text(report: &RunReport) -> String {
    let mut out = String::new();
    for sign in &report.signs {
        out.push_str(&format!(
            "sign {} type {} sight_distance {}\n",
            sign.id, sign.sign_type, sign.sight_distance
        ));
        out.push_str(&format!(
            "flags short_field={} vrd_exceeds_sight_distance={} fallback_outlines_used={}\n",
            bit(sign.flags.short_field),
            bit(sign.flags.vrd_exceeds_sight_distance),
            bit(sign.flags.fallback_outlines_used),
        ));
        for lane in &sign.lanes {
            out.push_str(&format!("lane {}\n", lane.lane));
            out.push_str("  arc e_visibility e_visibilityI CognitiveDouble recognizable\n");
            for vp in &lane.viewpoints {
                out.push_str(&format!(
                    "  {} {} {} {} {}\n",
                    vp.arc,
                    vp.e_visibility,
                    vp.e_visibility_ideal,
                    vp.cognitive_double,
                    vp.recognizable
                ));
            }
            out.push_str(&format!(
                "  maxCognitiveDistance {}\n  minCognitiveDistance {}\n  timely {}\n",
                lane.max_cognitive_distance, lane.min_cognitive_distance, lane.timely
            ));
        }
        out.push('\n');
    }
    if !report.failures.is_empty() {
        out.push_str("failures\n");
        for failure in &report.failures {
            out.push_str(&format!("  {}: {}\n", failure.id, failure.error));
        }
    }
    out
}

/// CSV field grid for one sign: `lane,arc,e_visibility` rows.
pub fn render_field_csv(sign: &SignReport) -> String {
    let mut out = String::from("lane,arc,e_visibility\n");
    for lane in &sign.lanes {
        for vp in &lane.viewpoints {
            out.push_str(&format!("{},{},{}\n", lane.lane, vp.arc, vp.e_visibility));
        }
    }
    out
}

/// Writes report.txt and report.json into `dir` (plus field_<id>.csv per
/// sign when asked); returns the paths written.
pub fn write_reports(
    report: &RunReport,
    dir: impl AsRef<Path>,
    export_field: bool,
) -> std::io::Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let text_path = dir.join("report.txt");
    std::fs::write(&text_path, render_text(report))?;
    written.push(text_path);

    let json_path = dir.join("report.json");
    let mut json = serde_json::to_vec_pretty(report).expect("reports serialize");
    writeln!(json)?;
    std::fs::write(&json_path, json)?;
    written.push(json_path);

    if export_field {
        for sign in &report.signs {
            let path = dir.join(format!("field_{}.csv", sign.id));
            std::fs::write(&path, render_field_csv(sign))?;
            written.push(path);
        }
    }
    Ok(written)
}
