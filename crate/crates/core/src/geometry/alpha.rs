//! Alpha-shape outer boundary of a planar point set.
//!
//! The classic disk criterion: a pair of points closer than `2*alpha` forms a
//! boundary edge when at least one of the two radius-`alpha` disks through
//! both points contains no other input point.  The boundary edges of each
//! connected component are then walked with a minimum-turn rule to extract
//! the component's outer ring, and the ring enclosing the largest area wins.
//! Output vertices are always input points.
//!
//! Determinism: neighbor candidates come from a hash grid but every
//! order-sensitive step (edge list, component choice, ring walk) works on
//! sorted indices, so equal inputs give bit-equal boundaries.

use super::grid2::Grid2;
use super::{PlanarPolygon, Point2, Real};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AlphaShapeError {
    #[error("alpha radius must be positive and finite")]
    InvalidAlpha,
    #[error("alpha shape needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("points do not enclose any area at this alpha radius")]
    Degenerate,
}

/// Extracts the outer boundary polygon of the largest connected alpha-shape
/// component of `points`.
///
/// Fails when fewer than three points are given, when `alpha` is not a
/// positive finite radius, or when no closed boundary with positive area
/// exists (collinear input, or `alpha` too small to connect anything).
pub fn alpha_shape_boundary<F: Real>(
    points: &[Point2<F>],
    alpha: F,
) -> Result<PlanarPolygon<F>, AlphaShapeError> {
    if !(alpha > F::zero()) || !alpha.is_finite() {
        return Err(AlphaShapeError::InvalidAlpha);
    }
    if points.len() < 3 {
        return Err(AlphaShapeError::TooFewPoints(points.len()));
    }

    let edges = boundary_edges(points, alpha);
    if edges.is_empty() {
        return Err(AlphaShapeError::Degenerate);
    }

    // Adjacency over boundary edges, neighbor lists sorted for determinism.
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); points.len()];
    for &(i, j) in &edges {
        adjacency[i as usize].push(j);
        adjacency[j as usize].push(i);
    }
    for list in &mut adjacency {
        list.sort_unstable();
        list.dedup();
    }

    let component = components(points.len(), &edges);

    // Walk the outer ring of every component that has boundary edges and keep
    // the largest enclosure.
    let mut roots: Vec<u32> = edges.iter().map(|&(i, _)| component[i as usize]).collect();
    roots.sort_unstable();
    roots.dedup();

    let mut best: Option<(F, u32, Vec<Point2<F>>)> = None;
    for root in roots {
        let Some(ring) = walk_outer_ring(points, &adjacency, &component, root) else {
            continue;
        };
        let area = super::polygon_area(&ring);
        if area <= F::zero() {
            continue;
        }
        let better = match &best {
            None => true,
            Some((a, r, _)) => area > *a || (area == *a && root < *r),
        };
        if better {
            best = Some((area, root, ring));
        }
    }

    let (_, _, ring) = best.ok_or(AlphaShapeError::Degenerate)?;
    PlanarPolygon::new(ring).map_err(|_| AlphaShapeError::Degenerate)
}

/// All alpha-boundary edges `(i, j)` with `i < j`, sorted.
fn boundary_edges<F: Real>(points: &[Point2<F>], alpha: F) -> Vec<(u32, u32)> {
    let grid = Grid2::build(points.iter().copied(), alpha);
    let two_alpha = alpha + alpha;
    let alpha2 = alpha * alpha;
    // Strict-inside threshold with a relative margin so co-circular points
    // (ubiquitous on sampling grids) do not erase valid edges.
    let inside2 = alpha2 * F::of(1.0 - 1e-9);

    let mut edges = Vec::new();
    let mut candidates: Vec<u32> = Vec::new();
    for i in 0..points.len() {
        let p = points[i];
        candidates.clear();
        grid.for_each_candidate_near(p, two_alpha, |j| {
            if (j as usize) > i {
                candidates.push(j);
            }
        });
        candidates.sort_unstable();
        for &j in &candidates {
            let q = points[j as usize];
            let d = p.distance(q);
            if d > two_alpha || d == F::zero() {
                continue;
            }
            let half = d / F::of(2.0);
            let h2 = alpha2 - half * half;
            let h = if h2 > F::zero() { h2.sqrt() } else { F::zero() };
            let mid = (p + q) / F::of(2.0);
            let dir = (q - p) / d;
            let n = dir.perp();
            let c1 = mid + n * h;
            let c2 = mid - n * h;

            // One empty disk keeps the edge, so the second disk only needs
            // a look when the first is occupied.  First-witness queries
            // from the center out stay O(1) deep inside dense clusters.
            let occupied = |c: Point2<F>| {
                let mut found = false;
                grid.for_each_candidate_near_center_out_while(c, alpha, |k| {
                    if k as usize != i
                        && k != j
                        && (points[k as usize] - c).norm_squared() < inside2
                    {
                        found = true;
                        return false;
                    }
                    true
                });
                found
            };
            if !occupied(c1) || !occupied(c2) {
                edges.push((i as u32, j));
            }
        }
    }
    edges
}

/// Union-find roots per vertex; vertices without edges stay their own root.
fn components(n: usize, edges: &[(u32, u32)]) -> Vec<u32> {
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(parent: &mut [u32], mut v: u32) -> u32 {
        while parent[v as usize] != v {
            parent[v as usize] = parent[parent[v as usize] as usize];
            v = parent[v as usize];
        }
        v
    }
    for &(i, j) in edges {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            // Smaller root wins to keep component ids stable.
            let (lo, hi) = if ri < rj { (ri, rj) } else { (rj, ri) };
            parent[hi as usize] = lo;
        }
    }
    (0..n as u32).map(|v| find(&mut parent, v)).collect()
}

/// Outer ring of one component, walked counterclockwise.
///
/// Starts at the lexicographically bottom-most vertex (which must lie on the
/// outer ring) and repeatedly takes the most clockwise available edge, i.e.
/// the minimum signed turn.  Terminates on repetition of the first directed
/// edge; returns `None` for rings that never close or enclose nothing.
fn walk_outer_ring<F: Real>(
    points: &[Point2<F>],
    adjacency: &[Vec<u32>],
    component: &[u32],
    root: u32,
) -> Option<Vec<Point2<F>>> {
    let members = || {
        (0..points.len() as u32)
            .filter(|&v| component[v as usize] == root && !adjacency[v as usize].is_empty())
    };
    let start = members().min_by(|&a, &b| {
        let pa = points[a as usize];
        let pb = points[b as usize];
        (pa.y, pa.x)
            .partial_cmp(&(pb.y, pb.x))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    })?;

    let edge_budget: usize = members().map(|v| adjacency[v as usize].len()).sum();
    let east = Point2::new(F::one(), F::zero());

    let first = next_vertex(points, adjacency, start, None, east)?;
    let mut ring: Vec<Point2<F>> = Vec::new();
    let (mut prev, mut cur) = (start, first);
    ring.push(points[start as usize]);
    for _ in 0..edge_budget * 2 + 4 {
        if cur == start {
            // About to repeat the opening edge: the ring is closed.
            let dir = points[cur as usize] - points[prev as usize];
            let next = next_vertex(points, adjacency, cur, Some(prev), dir)?;
            if next == first {
                return Some(ring);
            }
        }
        ring.push(points[cur as usize]);
        let dir = points[cur as usize] - points[prev as usize];
        let next = next_vertex(points, adjacency, cur, Some(prev), dir)?;
        prev = cur;
        cur = next;
    }
    None
}

/// Neighbor of `cur` with the minimum signed turn from `incoming`, preferring
/// not to backtrack to `prev` unless it is the only option.
fn next_vertex<F: Real>(
    points: &[Point2<F>],
    adjacency: &[Vec<u32>],
    cur: u32,
    prev: Option<u32>,
    incoming: Point2<F>,
) -> Option<u32> {
    let here = points[cur as usize];
    let neighbors = &adjacency[cur as usize];
    let mut best: Option<(F, F, u32)> = None;
    for &w in neighbors {
        if Some(w) == prev {
            continue;
        }
        let e = points[w as usize] - here;
        // Signed CCW turn from the incoming direction, in (-pi, pi].  An
        // exact reversal must rank as the largest turn (last resort), so wrap
        // the -pi branch of atan2 up to +pi.
        let mut turn = incoming.cross(e).atan2(incoming.dot(e));
        if turn <= F::of(-std::f64::consts::PI + 1e-9) {
            turn = F::of(std::f64::consts::PI);
        }
        let tie = e.norm();
        let better = match &best {
            None => true,
            Some((bt, btie, _)) => {
                turn < *bt || (turn == *bt && tie < *btie)
            }
        };
        if better {
            best = Some((turn, tie, w));
        }
    }
    match best {
        Some((_, _, w)) => Some(w),
        None => prev, // dead end: forced backtrack along the antenna
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    /// Dense grid over an axis-aligned rectangle.
    fn grid(x0: f64, x1: f64, y0: f64, y1: f64, step: f64) -> Vec<Point2<f64>> {
        let nx = ((x1 - x0) / step).round() as usize;
        let ny = ((y1 - y0) / step).round() as usize;
        let mut pts = Vec::new();
        for ix in 0..=nx {
            for iy in 0..=ny {
                pts.push(p2(x0 + step * ix as f64, y0 + step * iy as f64));
            }
        }
        pts
    }

    #[test]
    fn square_grid_recovers_square_area() {
        let pts = grid(-0.3, 0.3, -0.3, 0.3, 0.05);
        let poly = alpha_shape_boundary(&pts, 0.1).unwrap();
        let area = poly.area();
        assert!(
            (area - 0.36).abs() <= 0.36 * 0.02,
            "area {area} not within 2% of 0.36"
        );
        // Every boundary vertex must be one of the inputs.
        for v in poly.vertices() {
            assert!(pts.iter().any(|p| p.distance(*v) == 0.0));
        }
    }

    #[test]
    fn generous_alpha_gives_convex_hull_of_triangle() {
        let pts = vec![p2(0.0, 0.0), p2(1.0, 0.0), p2(0.5, 3f64.sqrt() / 2.0)];
        let poly = alpha_shape_boundary(&pts, 10.0).unwrap();
        assert!((poly.area() - 3f64.sqrt() / 4.0).abs() < 1e-9);
    }

    #[test]
    fn concave_outline_beats_hull() {
        // L shape: the alpha boundary must exclude the missing quadrant.
        let mut pts = grid(0.0, 1.0, 0.0, 0.5, 0.05);
        pts.extend(grid(0.0, 0.5, 0.5, 1.0, 0.05).into_iter().filter(|p| p.y > 0.5));
        let poly = alpha_shape_boundary(&pts, 0.1).unwrap();
        let area = poly.area();
        assert!((area - 0.75).abs() < 0.05, "L area {area}");
        assert!(area < 0.95, "must stay below the hull area");
    }

    #[test]
    fn largest_component_wins() {
        let mut pts = grid(0.0, 1.0, 0.0, 1.0, 0.1);
        // A far-away smaller square, beyond any 2*alpha link.
        pts.extend(grid(10.0, 10.4, 10.0, 10.4, 0.1));
        let poly = alpha_shape_boundary(&pts, 0.15).unwrap();
        assert!((poly.area() - 1.0).abs() < 0.05);
        assert!(poly.vertices().iter().all(|v| v.x < 5.0));
    }

    #[test]
    fn rejects_degenerate_input() {
        assert_eq!(
            alpha_shape_boundary::<f64>(&[p2(0.0, 0.0), p2(1.0, 1.0)], 1.0),
            Err(AlphaShapeError::TooFewPoints(2))
        );
        let collinear = vec![p2(0.0, 0.0), p2(1.0, 0.0), p2(2.0, 0.0)];
        assert_eq!(
            alpha_shape_boundary(&collinear, 1.0),
            Err(AlphaShapeError::Degenerate)
        );
        let spread = vec![p2(0.0, 0.0), p2(1.0, 0.0), p2(0.5, 1.0)];
        assert_eq!(
            alpha_shape_boundary(&spread, 0.01),
            Err(AlphaShapeError::Degenerate),
            "alpha too small to connect anything"
        );
        assert_eq!(
            alpha_shape_boundary(&spread, -1.0),
            Err(AlphaShapeError::InvalidAlpha)
        );
    }

    #[test]
    fn deterministic_across_runs() {
        let pts = grid(-0.3, 0.3, -0.3, 0.3, 0.05);
        let a = alpha_shape_boundary(&pts, 0.1).unwrap();
        let b = alpha_shape_boundary(&pts, 0.1).unwrap();
        assert_eq!(a.vertices(), b.vertices());
    }
}
