//! Deterministic synthetic-scene generator: turns a small TOML description
//! of a road, signs, and plate occluders into point-cloud files plus a
//! ready-to-load scene manifest, its own sign library, and a ground-truth
//! sidecar.
//!
//! Everything is seeded, iterated in a fixed order, and written with
//! round-trip float formatting, so the same description always produces
//! byte-identical files.  Truth probes are computed analytically from the
//! clean geometry (before noise): the occluders' footprints on the panel
//! plane are exact rectangle unions when the panel is a square facing
//! along y and the occluders are plates on constant-y planes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::geometry::{point_in_polygon, rotation_aligning};
use crate::io::cloud::write_xyz;
use crate::scene::PointCloud;
use crate::{Point2, Point3};

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Spec { path: PathBuf, message: String },
    #[error("inconsistent description: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Cloud(#[from] crate::io::cloud::CloudError),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SynthSpec {
    #[serde(default)]
    seed: u64,
    road: RoadSpec,
    #[serde(rename = "sign", default)]
    signs: Vec<SignSpec>,
    #[serde(rename = "occluder", default)]
    occluders: Vec<OccluderSpec>,
    #[serde(default)]
    noise: NoiseSpec,
    #[serde(default)]
    manifest: ManifestSpec,
    #[serde(rename = "probe", default)]
    probes: Vec<ProbeSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoadSpec {
    length: f64,
    lanes: u32,
    lane_width: f64,
    /// Plan curvature radius; omitted or 0 means straight.
    #[serde(default)]
    curvature_radius: f64,
    /// Rise per meter of arc.
    #[serde(default)]
    grade: f64,
    /// "solid-edges" paints both edge lines; "none" leaves the road bare.
    #[serde(default = "default_markings")]
    markings: String,
    #[serde(default = "default_trajectory_step")]
    trajectory_step: f64,
    #[serde(default = "default_device_height")]
    device_height: f64,
    /// Ground returns per square meter added to the environment cloud.
    #[serde(default)]
    ground_density: f64,
    #[serde(default = "default_marking_step")]
    marking_step: f64,
}

fn default_markings() -> String {
    "solid-edges".into()
}
fn default_trajectory_step() -> f64 {
    2.0
}
fn default_device_height() -> f64 {
    2.2
}
fn default_marking_step() -> f64 {
    0.1
}
fn default_panel_step() -> f64 {
    0.05
}
fn default_plate_step() -> f64 {
    0.05
}
fn default_side() -> String {
    "right".into()
}
fn default_normal() -> [f64; 3] {
    [0.0, -1.0, 0.0]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SignSpec {
    id: String,
    /// "square", "circle", or "triangle".
    shape: String,
    /// Side length or diameter, meters.
    size: f64,
    center: [f64; 3],
    #[serde(default = "default_normal")]
    normal: [f64; 3],
    #[serde(default = "default_side")]
    side: String,
    sight_distance: f64,
    #[serde(default = "default_panel_step")]
    panel_step: f64,
}

/// An axis-aligned plate: constant on `plane` = `at`, spanning `range_a`
/// and `range_b` along the two remaining axes in x, y, z order.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OccluderSpec {
    plane: String,
    at: f64,
    range_a: [f64; 2],
    range_b: [f64; 2],
    #[serde(default = "default_plate_step")]
    step: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseSpec {
    /// Gaussian position noise applied to environment and marking points.
    #[serde(default)]
    sigma: f64,
}

/// Entries copied into the emitted manifest's road and params sections.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestSpec {
    v85: Option<String>,
    design_speed: Option<String>,
    reaction_time: Option<f64>,
    standard_lane_width: Option<f64>,
    #[serde(default)]
    params: toml::Table,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProbeSpec {
    sign: String,
    viewpoint: [f64; 3],
}

fn pt(a: [f64; 3]) -> Point3 {
    Point3::new(a[0], a[1], a[2])
}

/// Road centerline at ground level, arc position `s` from the start.
struct Centerline {
    radius: f64,
    grade: f64,
}

impl Centerline {
    fn at(&self, s: f64) -> Point3 {
        if self.radius == 0.0 {
            Point3::new(0.0, s, self.grade * s)
        } else {
            let a = s / self.radius;
            Point3::new(
                -self.radius + self.radius * a.cos(),
                self.radius * a.sin(),
                self.grade * s,
            )
        }
    }

    /// Unit right-hand lateral direction in plan at arc `s`.
    fn right(&self, s: f64) -> Point3 {
        if self.radius == 0.0 {
            Point3::new(1.0, 0.0, 0.0)
        } else {
            let a = s / self.radius;
            // Plan tangent is (-sin a, cos a); right is its clockwise turn.
            Point3::new(a.cos(), a.sin(), 0.0)
        }
    }
}

/// Canonical panel cloud at the origin facing +y.
fn canonical_panel(shape: &str, size: f64, step: f64) -> Result<Vec<Point3>, SynthError> {
    if !(size > 0.0) || !(step > 0.0) || step > size {
        return Err(SynthError::Inconsistent(format!(
            "panel shape {shape:?} needs 0 < step <= size, got size {size}, step {step}"
        )));
    }
    let half = size / 2.0;
    let n = (size / step).round() as i64;
    let mut points = Vec::new();
    match shape {
        "square" => {
            for i in 0..=n {
                for k in 0..=n {
                    points.push(Point3::new(
                        -half + step * i as f64,
                        0.0,
                        -half + step * k as f64,
                    ));
                }
            }
        }
        "circle" => {
            for i in 0..=n {
                for k in 0..=n {
                    let x = -half + step * i as f64;
                    let z = -half + step * k as f64;
                    if x * x + z * z <= half * half {
                        points.push(Point3::new(x, 0.0, z));
                    }
                }
            }
            // A ring exactly on the circle so the boundary is the true rim.
            let count = (std::f64::consts::TAU * half / step).ceil() as i64;
            for j in 0..count {
                let a = std::f64::consts::TAU * j as f64 / count as f64;
                points.push(Point3::new(half * a.cos(), 0.0, half * a.sin()));
            }
        }
        "triangle" => {
            // Equilateral, apex up, side `size`.
            let r = size / 3f64.sqrt();
            let verts: Vec<Point2> = (0..3)
                .map(|j| {
                    let a = std::f64::consts::FRAC_PI_2 + std::f64::consts::TAU * j as f64 / 3.0;
                    Point2::new(r * a.cos(), r * a.sin())
                })
                .collect();
            for i in 0..=n {
                for k in 0..=n {
                    let p = Point2::new(-half + step * i as f64, -half + step * k as f64);
                    if point_in_polygon(p, &verts) {
                        points.push(Point3::new(p.x, 0.0, p.y));
                    }
                }
            }
            for j in 0..3 {
                let a = verts[j];
                let b = verts[(j + 1) % 3];
                let m = (a.distance(b) / step).ceil() as i64;
                for t in 0..m {
                    let p = a + (b - a) * (t as f64 / m as f64);
                    points.push(Point3::new(p.x, 0.0, p.y));
                }
            }
        }
        other => {
            return Err(SynthError::Inconsistent(format!(
                "unknown panel shape {other:?} (square, circle, or triangle)"
            )));
        }
    }
    Ok(points)
}

fn plate_points(occ: &OccluderSpec) -> Result<Vec<Point3>, SynthError> {
    if !(occ.step > 0.0) {
        return Err(SynthError::Inconsistent(format!(
            "occluder step must be positive, got {}",
            occ.step
        )));
    }
    let (a0, a1) = (occ.range_a[0].min(occ.range_a[1]), occ.range_a[0].max(occ.range_a[1]));
    let (b0, b1) = (occ.range_b[0].min(occ.range_b[1]), occ.range_b[0].max(occ.range_b[1]));
    let na = ((a1 - a0) / occ.step).round().max(0.0) as i64;
    let nb = ((b1 - b0) / occ.step).round().max(0.0) as i64;
    let mut points = Vec::with_capacity(((na + 1) * (nb + 1)) as usize);
    for i in 0..=na {
        for k in 0..=nb {
            let a = a0 + occ.step * i as f64;
            let b = b0 + occ.step * k as f64;
            let p = match occ.plane.as_str() {
                "x" => Point3::new(occ.at, a, b),
                "y" => Point3::new(a, occ.at, b),
                "z" => Point3::new(a, b, occ.at),
                other => {
                    return Err(SynthError::Inconsistent(format!(
                        "occluder plane must be \"x\", \"y\", or \"z\", got {other:?}"
                    )));
                }
            };
            points.push(p);
        }
    }
    Ok(points)
}

/// Standard normal via Box-Muller, driven by the seeded stream.
fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn jitter(points: &mut [Point3], sigma: f64, rng: &mut ChaCha8Rng) {
    if sigma <= 0.0 {
        return;
    }
    for p in points {
        p.x += sigma * gaussian(rng);
        p.y += sigma * gaussian(rng);
        p.z += sigma * gaussian(rng);
    }
}

/// Area of the union of axis-aligned rectangles, via x-strips.
fn rect_union_area(rects: &[(f64, f64, f64, f64)]) -> f64 {
    // (x0, x1, z0, z1), all normalized.
    let mut xs: Vec<f64> = rects.iter().flat_map(|r| [r.0, r.1]).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    let mut area = 0.0;
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        if x1 <= x0 {
            continue;
        }
        let mid = 0.5 * (x0 + x1);
        let mut spans: Vec<(f64, f64)> = rects
            .iter()
            .filter(|r| r.0 <= mid && mid < r.1)
            .map(|r| (r.2, r.3))
            .collect();
        spans.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut covered = 0.0;
        let mut reach = f64::NEG_INFINITY;
        for (z0, z1) in spans {
            let lo = z0.max(reach);
            if z1 > lo {
                covered += z1 - lo;
                reach = z1;
            }
        }
        area += covered * (x1 - x0);
    }
    area
}

/// Analytic occluded fraction of a square panel facing along y, seen from
/// `vp`, occluded by plates on constant-y planes.
fn probe_ratio(
    sign: &SignSpec,
    occluders: &[OccluderSpec],
    vp: Point3,
) -> Result<f64, SynthError> {
    if sign.shape != "square" {
        return Err(SynthError::Inconsistent(format!(
            "truth probes need a square panel, sign {:?} is {:?}",
            sign.id, sign.shape
        )));
    }
    let n = pt(sign.normal);
    if n.x.abs() > 1e-9 * n.y.abs() || n.z.abs() > 1e-9 * n.y.abs() {
        return Err(SynthError::Inconsistent(format!(
            "truth probes need the panel facing along y, sign {:?} does not",
            sign.id
        )));
    }
    let c = pt(sign.center);
    let depth = c.y - vp.y;
    if depth.abs() < 1e-9 {
        return Err(SynthError::Inconsistent(format!(
            "probe viewpoint lies in the panel plane of sign {:?}",
            sign.id
        )));
    }
    let half = sign.size / 2.0;
    let mut footprints = Vec::new();
    for occ in occluders {
        if occ.plane != "y" {
            return Err(SynthError::Inconsistent(format!(
                "truth probes need constant-y occluders, found plane {:?}",
                occ.plane
            )));
        }
        let between = (occ.at - vp.y) / depth;
        if !(between > 0.0 && between < 1.0) {
            continue; // not between the eye and the panel
        }
        let t = depth / (occ.at - vp.y);
        let map_x = |x: f64| vp.x + (x - vp.x) * t;
        let map_z = |z: f64| vp.z + (z - vp.z) * t;
        let (fx0, fx1) = (map_x(occ.range_a[0]), map_x(occ.range_a[1]));
        let (fz0, fz1) = (map_z(occ.range_b[0]), map_z(occ.range_b[1]));
        let x0 = fx0.min(fx1).max(c.x - half);
        let x1 = fx0.max(fx1).min(c.x + half);
        let z0 = fz0.min(fz1).max(c.z - half);
        let z1 = fz0.max(fz1).min(c.z + half);
        if x1 > x0 && z1 > z0 {
            footprints.push((x0, x1, z0, z1));
        }
    }
    Ok(rect_union_area(&footprints) / (sign.size * sign.size))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SynthError + '_ {
    move |source| SynthError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn quote(s: &str) -> String {
    format!("{:?}", s)
}

/// Generates the scene described by `spec_path` into `out_dir`; returns the
/// files written.  Rerunning with the same description and seed reproduces
/// every file byte for byte.
pub fn generate_synthetic_scene(
    spec_path: impl AsRef<Path>,
    out_dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>, SynthError> {
    let spec_path = spec_path.as_ref();
    let out_dir = out_dir.as_ref();
    let text = std::fs::read_to_string(spec_path).map_err(io_err(spec_path))?;
    let spec: SynthSpec = toml::from_str(&text).map_err(|e| SynthError::Spec {
        path: spec_path.to_path_buf(),
        message: e.to_string(),
    })?;

    let road = &spec.road;
    if !(road.length > 0.0) || road.lanes == 0 || !(road.lane_width > 0.0) {
        return Err(SynthError::Inconsistent(
            "road needs positive length, lane count, and lane width".into(),
        ));
    }
    if !(road.trajectory_step > 0.0) || road.trajectory_step > road.length {
        return Err(SynthError::Inconsistent(
            "trajectory step must be positive and at most the road length".into(),
        ));
    }
    if road.curvature_radius < 0.0 {
        return Err(SynthError::Inconsistent(
            "curvature radius must be nonnegative (0 = straight)".into(),
        ));
    }
    match road.markings.as_str() {
        "solid-edges" | "none" => {}
        other => {
            return Err(SynthError::Inconsistent(format!(
                "unknown marking layout {other:?} (solid-edges or none)"
            )));
        }
    }
    // One canonical panel per shape; two signs of one shape must agree on
    // size, otherwise the library entry would be ambiguous.
    let mut shapes: Vec<(&str, f64, f64)> = Vec::new();
    for sign in &spec.signs {
        match shapes.iter().find(|(name, _, _)| *name == sign.shape) {
            Some(&(_, size, _)) if (size - sign.size).abs() > 1e-12 => {
                return Err(SynthError::Inconsistent(format!(
                    "shape {:?} used with two sizes ({size} and {})",
                    sign.shape, sign.size
                )));
            }
            Some(_) => {}
            None => shapes.push((&sign.shape, sign.size, sign.panel_step)),
        }
    }

    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut written = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let center = Centerline {
        radius: road.curvature_radius,
        grade: road.grade,
    };
    let width = road.lane_width * road.lanes as f64;

    // Trajectory: the scan path above the road centerline.
    let steps = (road.length / road.trajectory_step).floor() as i64;
    let mut trajectory: Vec<Point3> = (0..=steps)
        .map(|i| center.at(road.trajectory_step * i as f64))
        .collect();
    if road.trajectory_step * steps as f64 + 1e-9 < road.length {
        trajectory.push(center.at(road.length));
    }
    for p in &mut trajectory {
        p.z += road.device_height;
    }
    let trajectory_path = out_dir.join("trajectory.xyz");
    write_xyz(&trajectory_path, &PointCloud::from_points(trajectory))?;
    written.push(trajectory_path);

    // Edge markings: solid lines at both road edges, on the ground.
    let mut marking_files = Vec::new();
    if road.markings == "solid-edges" {
        for (index, offset) in [width / 2.0, -width / 2.0].into_iter().enumerate() {
            let count = (road.length / road.marking_step).floor() as i64;
            let mut points: Vec<Point3> = (0..=count)
                .map(|i| {
                    let s = road.marking_step * i as f64;
                    center.at(s) + center.right(s) * offset
                })
                .collect();
            jitter(&mut points, spec.noise.sigma, &mut rng);
            let name = format!("marking_{index}.xyz");
            let path = out_dir.join(&name);
            write_xyz(&path, &PointCloud::from_points(points))?;
            written.push(path);
            marking_files.push(name);
        }
    }

    // Sign library: canonical panels, one file per shape.
    let library_dir = out_dir.join("library");
    std::fs::create_dir_all(&library_dir).map_err(io_err(&library_dir))?;
    let mut library_toml = String::new();
    for (shape, size, step) in &shapes {
        let points = canonical_panel(shape, *size, *step)?;
        let file = format!("{shape}.xyz");
        let path = library_dir.join(&file);
        write_xyz(&path, &PointCloud::from_points(points))?;
        written.push(path);
        let _ = writeln!(
            library_toml,
            "[[entry]]\nname = {}\npanel = {}\n",
            quote(shape),
            quote(&file)
        );
    }
    let library_index = library_dir.join("library.toml");
    std::fs::write(&library_index, library_toml).map_err(io_err(&library_index))?;
    written.push(library_index);

    // Posed sign panels.
    let mut sign_files = Vec::new();
    for sign in &spec.signs {
        let canonical = canonical_panel(&sign.shape, sign.size, sign.panel_step)?;
        let normal = pt(sign.normal).normalized().ok_or_else(|| {
            SynthError::Inconsistent(format!("sign {:?} has a zero normal", sign.id))
        })?;
        let rotation = rotation_aligning(Point3::new(0.0, 1.0, 0.0), normal);
        let c = pt(sign.center);
        let points: Vec<Point3> = canonical.iter().map(|&p| c + rotation.apply(p)).collect();
        let name = format!("sign_{}.xyz", sign.id);
        let path = out_dir.join(&name);
        write_xyz(&path, &PointCloud::from_points(points))?;
        written.push(path);
        sign_files.push(name);
    }

    // Environment: occluder plates in description order, then ground
    // returns sampled over the road surface.
    let mut environment = Vec::new();
    for occ in &spec.occluders {
        environment.extend(plate_points(occ)?);
    }
    if road.ground_density > 0.0 {
        let margin = 1.0;
        let span = width + 2.0 * margin;
        let count = (road.length * span * road.ground_density).round() as u64;
        for _ in 0..count {
            let s = rng.gen_range(0.0..road.length);
            let lateral = rng.gen_range(-span / 2.0..span / 2.0);
            environment.push(center.at(s) + center.right(s) * lateral);
        }
    }
    jitter(&mut environment, spec.noise.sigma, &mut rng);
    let environment_file = if environment.is_empty() {
        None
    } else {
        let path = out_dir.join("environment.xyz");
        write_xyz(&path, &PointCloud::from_points(environment))?;
        written.push(path);
        Some("environment.xyz")
    };

    // Scene manifest, assembled as text with quoted strings.
    let mut manifest = String::new();
    let _ = writeln!(manifest, "trajectory = \"trajectory.xyz\"");
    let env_list = environment_file
        .map(|f| format!("[{}]", quote(f)))
        .unwrap_or_else(|| "[]".into());
    let _ = writeln!(manifest, "environment = {env_list}");
    if !marking_files.is_empty() {
        let list: Vec<String> = marking_files.iter().map(|f| quote(f)).collect();
        let _ = writeln!(manifest, "markings = [{}]", list.join(", "));
    }
    let _ = writeln!(manifest, "library = \"library\"");
    let road_extra = &spec.manifest;
    if road_extra.v85.is_some()
        || road_extra.design_speed.is_some()
        || road_extra.reaction_time.is_some()
        || road_extra.standard_lane_width.is_some()
    {
        let _ = writeln!(manifest, "\n[road]");
        if let Some(v) = &road_extra.v85 {
            let _ = writeln!(manifest, "v85 = {}", quote(v));
        }
        if let Some(v) = &road_extra.design_speed {
            let _ = writeln!(manifest, "design_speed = {}", quote(v));
        }
        if let Some(t) = road_extra.reaction_time {
            let _ = writeln!(manifest, "reaction_time = {t}");
        }
        if let Some(w) = road_extra.standard_lane_width {
            let _ = writeln!(manifest, "standard_lane_width = {w}");
        }
    }
    if !road_extra.params.is_empty() {
        let _ = writeln!(manifest, "\n[params]");
        let rendered = toml::to_string(&road_extra.params).map_err(|e| SynthError::Spec {
            path: spec_path.to_path_buf(),
            message: format!("params passthrough: {e}"),
        })?;
        manifest.push_str(&rendered);
    }
    for (sign, file) in spec.signs.iter().zip(&sign_files) {
        let _ = writeln!(
            manifest,
            "\n[[sign]]\nid = {}\ntype = {}\npanel = {}\nside = {}\nsight_distance = {}",
            quote(&sign.id),
            quote(&sign.shape),
            quote(file),
            quote(&sign.side),
            sign.sight_distance
        );
    }
    let manifest_path = out_dir.join("scene.toml");
    std::fs::write(&manifest_path, manifest).map_err(io_err(&manifest_path))?;
    written.push(manifest_path);

    // Ground truth: analytic occlusion ratio per probe.
    let mut truth = String::new();
    let _ = writeln!(truth, "sigma = {}", spec.noise.sigma);
    for probe in &spec.probes {
        let sign = spec
            .signs
            .iter()
            .find(|s| s.id == probe.sign)
            .ok_or_else(|| {
                SynthError::Inconsistent(format!("probe names unknown sign {:?}", probe.sign))
            })?;
        let ratio = probe_ratio(sign, &spec.occluders, pt(probe.viewpoint))?;
        let _ = writeln!(
            truth,
            "\n[[probe]]\nsign = {}\nviewpoint = [{}, {}, {}]\nocclusion_ratio = {}",
            quote(&probe.sign),
            probe.viewpoint[0],
            probe.viewpoint[1],
            probe.viewpoint[2],
            ratio
        );
    }
    let truth_path = out_dir.join("truth.toml");
    std::fs::write(&truth_path, truth).map_err(io_err(&truth_path))?;
    written.push(truth_path);

    Ok(written)
}

/// Parsed ground-truth sidecar.
#[derive(Debug, Deserialize)]
pub struct TruthFile {
    pub sigma: f64,
    #[serde(rename = "probe", default)]
    pub probes: Vec<TruthProbe>,
}

#[derive(Debug, Deserialize)]
pub struct TruthProbe {
    pub sign: String,
    pub viewpoint: [f64; 3],
    pub occlusion_ratio: f64,
}

/// Reads a truth.toml sidecar written by the generator.
pub fn read_truth(path: impl AsRef<Path>) -> Result<TruthFile, SynthError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    toml::from_str(&text).map_err(|e| SynthError::Spec {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
