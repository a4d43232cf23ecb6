//! The scene manifest: one TOML file naming every input cloud, the road
//! parameters, model-parameter overrides, and the sign annotations.  Paths
//! are resolved relative to the manifest, so a scene directory is
//! self-contained and relocatable.
//!
//! Loading performs every validation the model relies on: clouds parse and
//! are non-empty, units resolve to SI, parameters satisfy their
//! constraints, panels are planar, sign types resolve in the library, and
//! each sign has a sight distance (explicit or from the library's
//! speed table).  Environment points within the panel clearance of a sign
//! panel are dropped so an annotated panel never occludes itself.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::geometry::grid2::Grid2;
use crate::io::cloud::{read_point_cloud, CloudError};
use crate::io::units::{parse_speed, UnitError};
use crate::scene::{
    standard_area, MarkingCluster, ModelParams, PointCloud, Scene, SceneError, SignInstance,
    SignLibrary, SignLibraryEntry, SignSide, Trajectory,
};

/// Environment variable naming the default sign-library directory.
pub const LIBRARY_ENV: &str = "SIGNSIGHT_LIBRARY";

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error(transparent)]
    Cloud(#[from] CloudError),
    #[error("{path}: {field}: {source}")]
    Unit {
        path: PathBuf,
        field: String,
        source: UnitError,
    },
    #[error("{path}: {source}")]
    Scene {
        path: PathBuf,
        source: SceneError,
    },
    #[error("sign {id:?}: unknown type {name:?} (library has {known})")]
    UnknownSignType {
        id: String,
        name: String,
        known: String,
    },
    #[error(
        "no sign library: set `library` in the manifest or the {LIBRARY_ENV} environment variable"
    )]
    NoLibrary,
    #[error("sign {id:?}: no sight_distance and type {name:?} has no speed table")]
    NoSightDistance { id: String, name: String },
    #[error("{path}: unknown parameter {key:?}")]
    UnknownParam { path: PathBuf, key: String },
    #[error("{path}: parameter {key:?}: {message}")]
    BadParam {
        path: PathBuf,
        key: String,
        message: String,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    trajectory: String,
    environment: Vec<String>,
    #[serde(default)]
    markings: Vec<String>,
    library: Option<String>,
    #[serde(default)]
    road: RoadSection,
    #[serde(default)]
    params: toml::Table,
    #[serde(rename = "sign", default)]
    signs: Vec<SignSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoadSection {
    design_speed: Option<String>,
    v85: Option<String>,
    reaction_time: Option<f64>,
    standard_lane_width: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SignSection {
    id: String,
    #[serde(rename = "type")]
    sign_type: String,
    panel: String,
    #[serde(default = "default_side")]
    side: SignSide,
    sight_distance: Option<f64>,
}

fn default_side() -> SignSide {
    SignSide::Right
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LibraryFile {
    #[serde(rename = "entry", default)]
    entries: Vec<LibraryEntrySection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LibraryEntrySection {
    name: String,
    panel: String,
    mount_height_roadside: Option<f64>,
    mount_height_overhead: Option<f64>,
    /// `[tagged speed, sight distance m]` rows.
    #[serde(default)]
    sight_distances: Vec<(String, f64)>,
}

fn read_text(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Merges a table of overriding values onto `params`.  Every key must name
/// an existing parameter; values are revalidated afterwards by the caller.
pub(crate) fn merge_params(
    params: &ModelParams,
    overrides: &toml::Table,
    path: &Path,
) -> Result<ModelParams, LoadError> {
    let mut table = toml::Table::try_from(params).expect("parameters serialize to a table");
    for (key, value) in overrides {
        if !table.contains_key(key) {
            return Err(LoadError::UnknownParam {
                path: path.to_path_buf(),
                key: key.clone(),
            });
        }
        table.insert(key.clone(), value.clone());
    }
    table
        .try_into()
        .map_err(|e: toml::de::Error| LoadError::Manifest {
            path: path.to_path_buf(),
            message: e.message().to_string(),
        })
}

/// Loads a sign library directory: its `library.toml` plus the canonical
/// panel cloud each entry names.  Standard areas are computed with the
/// scene's parameters so they always match the evaluation settings.
pub fn load_library(dir: impl AsRef<Path>, params: &ModelParams) -> Result<SignLibrary, LoadError> {
    let dir = dir.as_ref();
    let index = dir.join("library.toml");
    let text = read_text(&index)?;
    let file: LibraryFile = toml::from_str(&text).map_err(|e| LoadError::Manifest {
        path: index.clone(),
        message: e.to_string(),
    })?;
    let mut library = SignLibrary::default();
    for entry in file.entries {
        let panel_path = dir.join(&entry.panel);
        let panel = read_point_cloud(&panel_path)?;
        let area = standard_area(&panel, params).map_err(|source| LoadError::Scene {
            path: panel_path.clone(),
            source,
        })?;
        let mut sight_distances = Vec::with_capacity(entry.sight_distances.len());
        for (speed, sd) in &entry.sight_distances {
            let mps = parse_speed(speed).map_err(|source| LoadError::Unit {
                path: index.clone(),
                field: format!("entry {:?} sight_distances", entry.name),
                source,
            })?;
            sight_distances.push((mps, *sd));
        }
        library.insert(SignLibraryEntry {
            name: entry.name,
            panel,
            standard_area: area,
            mount_height_roadside: entry.mount_height_roadside,
            mount_height_overhead: entry.mount_height_overhead,
            sight_distances,
        });
    }
    Ok(library)
}

/// Drops environment points within `clearance` of any panel point, so the
/// sign's own return never counts as an occluder of itself.
fn strip_panel_points(environment: &mut PointCloud, panel: &PointCloud, clearance: f64) {
    if panel.is_empty() || environment.is_empty() {
        return;
    }
    let grid = Grid2::build(
        panel.points.iter().map(|p| p.xy()),
        clearance.max(1e-3),
    );
    let keep: Vec<bool> = environment
        .points
        .iter()
        .map(|&q| {
            let mut clear = true;
            grid.for_each_candidate_near(q.xy(), clearance, |i| {
                if clear && q.distance(panel.points[i as usize]) <= clearance {
                    clear = false;
                }
            });
            clear
        })
        .collect();
    let mut index = 0;
    environment.points.retain(|_| {
        let k = keep[index];
        index += 1;
        k
    });
    if let Some(intensity) = &mut environment.intensity {
        let mut index = 0;
        intensity.retain(|_| {
            let k = keep[index];
            index += 1;
            k
        });
    }
}

/// Loads and fully validates a scene manifest, returning the scene and the
/// sign library it references.
pub fn load_scene(manifest: impl AsRef<Path>) -> Result<(Scene, SignLibrary), LoadError> {
    let manifest_path = manifest.as_ref();
    let text = read_text(manifest_path)?;
    let file: ManifestFile = toml::from_str(&text).map_err(|e| LoadError::Manifest {
        path: manifest_path.to_path_buf(),
        message: e.to_string(),
    })?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));

    let mut params = merge_params(&ModelParams::default(), &file.params, manifest_path)?;
    let unit_field = |field: &str, source: UnitError| LoadError::Unit {
        path: manifest_path.to_path_buf(),
        field: format!("road.{field}"),
        source,
    };
    if let Some(text) = &file.road.design_speed {
        params.design_speed = parse_speed(text).map_err(|e| unit_field("design_speed", e))?;
    }
    if let Some(text) = &file.road.v85 {
        params.v85 = parse_speed(text).map_err(|e| unit_field("v85", e))?;
    }
    if let Some(t) = file.road.reaction_time {
        params.reaction_time = t;
    }
    if let Some(w) = file.road.standard_lane_width {
        params.standard_lane_width = w;
    }
    params.validate().map_err(|source| LoadError::Scene {
        path: manifest_path.to_path_buf(),
        source,
    })?;

    let library = match file.library.as_deref() {
        Some(dir) => Some(base.join(dir)),
        None => std::env::var_os(LIBRARY_ENV).map(PathBuf::from),
    };
    let library = match library {
        Some(dir) => load_library(dir, &params)?,
        None if file.signs.is_empty() => SignLibrary::default(),
        None => return Err(LoadError::NoLibrary),
    };

    let trajectory_path = base.join(&file.trajectory);
    let trajectory_cloud = read_point_cloud(&trajectory_path)?;
    let trajectory =
        Trajectory::new(trajectory_cloud.points).map_err(|source| LoadError::Scene {
            path: trajectory_path,
            source,
        })?;

    let mut environment = PointCloud::default();
    let mut all_intensity = true;
    let mut intensities = Vec::new();
    for name in &file.environment {
        let cloud = read_point_cloud(base.join(name))?;
        match &cloud.intensity {
            Some(values) if all_intensity => intensities.extend_from_slice(values),
            _ => all_intensity = false,
        }
        environment.points.extend_from_slice(&cloud.points);
    }
    if all_intensity && !intensities.is_empty() {
        environment.intensity = Some(intensities);
    }

    let mut markings = Vec::new();
    for name in &file.markings {
        markings.push(MarkingCluster {
            cloud: read_point_cloud(base.join(name))?,
        });
    }

    let mut signs = Vec::with_capacity(file.signs.len());
    for section in &file.signs {
        let entry = library.get(&section.sign_type).ok_or_else(|| {
            LoadError::UnknownSignType {
                id: section.id.clone(),
                name: section.sign_type.clone(),
                known: library.names().collect::<Vec<_>>().join(", "),
            }
        })?;
        let sight_distance = match section.sight_distance {
            Some(sd) => sd,
            None => entry.sight_distance_for(params.design_speed).ok_or_else(|| {
                LoadError::NoSightDistance {
                    id: section.id.clone(),
                    name: section.sign_type.clone(),
                }
            })?,
        };
        let panel_path = base.join(&section.panel);
        let panel = read_point_cloud(&panel_path)?;
        let sign = SignInstance::new(
            section.id.clone(),
            section.sign_type.clone(),
            panel,
            section.side,
            sight_distance,
            Some(&trajectory),
        )
        .map_err(|source| LoadError::Scene {
            path: panel_path,
            source,
        })?;
        strip_panel_points(&mut environment, &sign.panel, params.panel_clearance);
        signs.push(sign);
    }

    Ok((
        Scene {
            trajectory,
            environment,
            markings,
            signs,
            params,
        },
        library,
    ))
}
