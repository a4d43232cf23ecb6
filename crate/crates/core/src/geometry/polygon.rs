//! Simple planar polygons: shoelace area and boundary-inclusive containment.

use super::point::point_segment_distance2;
use super::{Point2, Real};

/// Absolute tolerance (in input units) within which a point counts as lying
/// on a polygon edge and is therefore treated as inside.
pub const ON_BOUNDARY_TOLERANCE: f64 = 1e-9;

/// A simple (non-self-intersecting) polygon in the plane, stored as its
/// vertex ring without a repeated closing vertex.
///
/// Simplicity itself is the caller's contract; construction only enforces the
/// checkable parts (at least three vertices, nonzero area).
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarPolygon<F> {
    vertices: Vec<Point2<F>>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PolygonError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon is degenerate (zero area)")]
    ZeroArea,
}

impl<F: Real> PlanarPolygon<F> {
    pub fn new(vertices: Vec<Point2<F>>) -> Result<Self, PolygonError> {
        if vertices.len() < 3 {
            return Err(PolygonError::TooFewVertices(vertices.len()));
        }
        let poly = Self { vertices };
        if poly.area() <= F::zero() {
            return Err(PolygonError::ZeroArea);
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[Point2<F>] {
        &self.vertices
    }

    /// Unsigned enclosed area.
    pub fn area(&self) -> F {
        polygon_area(&self.vertices)
    }

    /// Boundary-inclusive containment test.
    pub fn contains(&self, p: Point2<F>) -> bool {
        point_in_polygon(p, &self.vertices)
    }

    /// Area centroid of the enclosed region.
    pub fn centroid(&self) -> Point2<F> {
        let mut cx = F::zero();
        let mut cy = F::zero();
        let mut twice_signed = F::zero();
        for (a, b) in self.edges() {
            let w = a.cross(b);
            cx = cx + (a.x + b.x) * w;
            cy = cy + (a.y + b.y) * w;
            twice_signed = twice_signed + w;
        }
        if twice_signed == F::zero() {
            // Degenerate ring; fall back to the vertex mean.
            let n = F::of(self.vertices.len() as f64);
            let mut s = Point2::zero();
            for v in &self.vertices {
                s = s + *v;
            }
            return s / n;
        }
        let three = F::of(3.0);
        Point2::new(cx / (three * twice_signed), cy / (three * twice_signed))
    }

    /// Largest distance from `origin` to any vertex.
    pub fn max_vertex_distance(&self, origin: Point2<F>) -> F {
        self.vertices
            .iter()
            .map(|v| v.distance(origin))
            .fold(F::zero(), F::max)
    }

    fn edges(&self) -> impl Iterator<Item = (Point2<F>, Point2<F>)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }
}

/// Unsigned shoelace area of a vertex ring.
///
/// Returns zero for fewer than three vertices.  Cyclic shifts and traversal
/// direction do not change the result.
pub fn polygon_area<F: Real>(vertices: &[Point2<F>]) -> F {
    if vertices.len() < 3 {
        return F::zero();
    }
    let mut twice = F::zero();
    let n = vertices.len();
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        twice = twice + a.cross(b);
    }
    (twice / F::of(2.0)).abs()
}

/// Boundary-inclusive point-in-polygon test against a vertex ring.
///
/// A point within [`ON_BOUNDARY_TOLERANCE`] of any edge counts as inside;
/// otherwise an even-odd ray crossing decides.
pub fn point_in_polygon<F: Real>(p: Point2<F>, vertices: &[Point2<F>]) -> bool {
    if vertices.len() < 3 {
        return false;
    }
    let tol = F::of(ON_BOUNDARY_TOLERANCE);
    let n = vertices.len();
    for i in 0..n {
        if point_segment_distance2(p, vertices[i], vertices[(i + 1) % n]) <= tol {
            return true;
        }
    }
    // Even-odd rule with a ray toward +x.
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[j];
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}
