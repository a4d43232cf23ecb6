//! Point-cloud file readers and writers.
//!
//! Two ASCII formats are supported, both in meters:
//!   - XYZ[I]: one point per line, `x y z` or `x y z intensity`
//!     whitespace-separated, `#` starts a comment;
//!   - PLY: ASCII 1.0 with float `x`, `y`, `z` vertex properties in any
//!     property order (other properties and elements are ignored).
//!
//! The reader picks the format from the leading `ply` magic line.  Errors
//! carry the path and 1-based line number.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::scene::PointCloud;
use crate::Point3;

#[derive(Debug, thiserror::Error)]
pub enum CloudError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: no points")]
    Empty { path: PathBuf },
}

/// Reads a point cloud, dispatching on the PLY magic line.
pub fn read_point_cloud(path: impl AsRef<Path>) -> Result<PointCloud, CloudError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| CloudError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if text
        .lines()
        .next()
        .is_some_and(|first| first.trim().eq_ignore_ascii_case("ply"))
    {
        read_ply(path, &text)
    } else {
        read_xyz(path, &text)
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> CloudError {
    CloudError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn read_xyz(path: &Path, text: &str) -> Result<PointCloud, CloudError> {
    let mut points = Vec::new();
    let mut intensity: Vec<f64> = Vec::new();
    let mut columns: Option<usize> = None;
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let data = raw.split('#').next().unwrap_or("").trim();
        if data.is_empty() {
            continue;
        }
        let fields: Vec<&str> = data.split_whitespace().collect();
        if fields.len() != 3 && fields.len() != 4 {
            return Err(parse_err(
                path,
                line,
                format!("expected 3 or 4 columns, found {}", fields.len()),
            ));
        }
        let want = *columns.get_or_insert(fields.len());
        if fields.len() != want {
            return Err(parse_err(
                path,
                line,
                format!("expected {want} columns like the first point, found {}", fields.len()),
            ));
        }
        let mut values = [0.0f64; 4];
        for (slot, field) in values.iter_mut().zip(&fields) {
            *slot = field
                .parse()
                .map_err(|_| parse_err(path, line, format!("unreadable number {field:?}")))?;
        }
        points.push(Point3::new(values[0], values[1], values[2]));
        if want == 4 {
            intensity.push(values[3]);
        }
    }
    if points.is_empty() {
        return Err(CloudError::Empty {
            path: path.to_path_buf(),
        });
    }
    let mut cloud = PointCloud::from_points(points);
    if !intensity.is_empty() {
        cloud.intensity = Some(intensity);
    }
    Ok(cloud)
}

fn read_ply(path: &Path, text: &str) -> Result<PointCloud, CloudError> {
    let mut lines = text.lines().enumerate();
    lines.next(); // the magic line
    let mut vertex_count: Option<usize> = None;
    // Property slots of x, y, z within the vertex element.
    let mut coords = [None::<usize>; 3];
    let mut property_index = 0usize;
    let mut in_vertex_element = false;
    let mut header_end = 0usize;
    for (index, raw) in &mut lines {
        let line = index + 1;
        let mut words = raw.split_whitespace();
        match words.next() {
            Some("format") => {
                if words.next() != Some("ascii") {
                    return Err(parse_err(path, line, "only ascii PLY is supported"));
                }
            }
            Some("element") => {
                let name = words.next().unwrap_or("");
                in_vertex_element = name == "vertex";
                if in_vertex_element {
                    let count = words
                        .next()
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| parse_err(path, line, "bad vertex count"))?;
                    vertex_count = Some(count);
                    property_index = 0;
                }
            }
            Some("property") if in_vertex_element => {
                // "property <type> <name>"; list properties never hold
                // coordinates, skip them.
                let words: Vec<&str> = words.collect();
                if words.first() != Some(&"list") {
                    match words.last() {
                        Some(&"x") => coords[0] = Some(property_index),
                        Some(&"y") => coords[1] = Some(property_index),
                        Some(&"z") => coords[2] = Some(property_index),
                        _ => {}
                    }
                    property_index += 1;
                }
            }
            Some("end_header") => {
                header_end = line;
                break;
            }
            _ => {}
        }
    }
    if header_end == 0 {
        return Err(parse_err(path, 1, "missing end_header"));
    }
    let count = vertex_count.ok_or_else(|| parse_err(path, header_end, "no vertex element"))?;
    let [Some(xi), Some(yi), Some(zi)] = coords else {
        return Err(parse_err(path, header_end, "vertex needs x, y, z properties"));
    };
    if count == 0 {
        return Err(CloudError::Empty {
            path: path.to_path_buf(),
        });
    }
    let mut points = Vec::with_capacity(count);
    for (index, raw) in lines.take(count) {
        let line = index + 1;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        let coord = |slot: usize| -> Result<f64, CloudError> {
            fields
                .get(slot)
                .ok_or_else(|| parse_err(path, line, format!("vertex needs {property_index} values")))?
                .parse()
                .map_err(|_| parse_err(path, line, format!("unreadable number {:?}", fields[slot])))
        };
        points.push(Point3::new(coord(xi)?, coord(yi)?, coord(zi)?));
    }
    if points.len() != count {
        return Err(parse_err(
            path,
            header_end,
            format!("header promises {count} vertices, file has {}", points.len()),
        ));
    }
    Ok(PointCloud::from_points(points))
}

/// Writes a cloud as XYZ[I] text.  The `{}` float format round-trips
/// exactly, so write-then-read reproduces the cloud bit for bit.
pub fn write_xyz(path: impl AsRef<Path>, cloud: &PointCloud) -> Result<(), CloudError> {
    let path = path.as_ref();
    let wrap = |source: std::io::Error| CloudError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = Vec::with_capacity(cloud.len() * 24);
    for (i, p) in cloud.points.iter().enumerate() {
        match &cloud.intensity {
            Some(intensity) => writeln!(out, "{} {} {} {}", p.x, p.y, p.z, intensity[i]),
            None => writeln!(out, "{} {} {}", p.x, p.y, p.z),
        }
        .map_err(wrap)?;
    }
    fs::write(path, out).map_err(wrap)
}
