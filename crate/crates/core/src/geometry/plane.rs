//! Least-squares plane fit through a 3D point set.
//!
//! Covariance eigen-analysis: the fitted normal is the eigenvector of the
//! smallest covariance eigenvalue, and the RMS point-to-plane distance falls
//! out of that eigenvalue directly.  The 3x3 symmetric eigensolver is a
//! cyclic Jacobi iteration, which is exact to rounding in a handful of
//! sweeps at this size.

use super::{Point3, Real};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PlaneFitError {
    #[error("plane fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("points are collinear or coincident; the plane normal is not unique")]
    Degenerate,
}

/// Result of a least-squares plane fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneFit<F> {
    /// Centroid of the inputs; a point on the fitted plane.
    pub centroid: Point3<F>,
    /// Unit normal.  Sign is canonical (largest-magnitude component is
    /// positive); callers wanting a particular orientation flip it.
    pub normal: Point3<F>,
    /// Root-mean-square point-to-plane distance.
    pub rms: F,
}

/// Fits a plane to `points`, minimizing squared normal distances.
pub fn plane_fit<F: Real>(points: &[Point3<F>]) -> Result<PlaneFit<F>, PlaneFitError> {
    if points.len() < 3 {
        return Err(PlaneFitError::TooFewPoints(points.len()));
    }
    let n = F::of(points.len() as f64);
    let mut centroid = Point3::zero();
    for p in points {
        centroid = centroid + *p;
    }
    let centroid = centroid / n;

    let mut m = [[F::zero(); 3]; 3];
    for p in points {
        let d = *p - centroid;
        let v = [d.x, d.y, d.z];
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] = m[r][c] + v[r] * v[c];
            }
        }
    }
    for r in 0..3 {
        for c in 0..3 {
            m[r][c] = m[r][c] / n;
        }
    }

    let (eigenvalues, eigenvectors) = jacobi3(m);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| {
        eigenvalues[a]
            .partial_cmp(&eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let (smallest, middle, largest) = (order[0], order[1], order[2]);

    // A usable plane needs spread in two directions.
    let tiny = eigenvalues[largest] * F::of(1e-12);
    if eigenvalues[largest] <= F::zero() || eigenvalues[middle] <= tiny {
        return Err(PlaneFitError::Degenerate);
    }

    let raw = Point3::new(
        eigenvectors[0][smallest],
        eigenvectors[1][smallest],
        eigenvectors[2][smallest],
    );
    let mut normal = raw.normalized().ok_or(PlaneFitError::Degenerate)?;
    // Canonical sign: biggest-magnitude component positive.
    let (ax, ay, az) = (normal.x.abs(), normal.y.abs(), normal.z.abs());
    let lead = if ax >= ay && ax >= az {
        normal.x
    } else if ay >= az {
        normal.y
    } else {
        normal.z
    };
    if lead < F::zero() {
        normal = -normal;
    }

    let lam = eigenvalues[smallest].max(F::zero());
    Ok(PlaneFit {
        centroid,
        normal,
        rms: lam.sqrt(),
    })
}

/// Eigen decomposition of a symmetric 3x3 matrix by cyclic Jacobi rotations.
/// Returns eigenvalues and the matrix of eigenvectors as columns.
fn jacobi3<F: Real>(mut a: [[F; 3]; 3]) -> ([F; 3], [[F; 3]; 3]) {
    let mut v = [[F::zero(); 3]; 3];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = F::one();
    }
    for _sweep in 0..64 {
        let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        let scale = a[0][0] * a[0][0] + a[1][1] * a[1][1] + a[2][2] * a[2][2];
        if off <= (scale + off) * F::of(1e-30) {
            break;
        }
        for &(p, q) in &[(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q].abs() == F::zero() {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (F::of(2.0) * a[p][q]);
            let t = {
                let s = if theta < F::zero() { -F::one() } else { F::one() };
                s / (theta.abs() + (theta * theta + F::one()).sqrt())
            };
            let c = F::one() / (t * t + F::one()).sqrt();
            let s = t * c;

            let app = a[p][p];
            let aqq = a[q][q];
            let apq = a[p][q];
            a[p][p] = app - t * apq;
            a[q][q] = aqq + t * apq;
            a[p][q] = F::zero();
            a[q][p] = F::zero();
            for r in 0..3 {
                if r != p && r != q {
                    let arp = a[r][p];
                    let arq = a[r][q];
                    a[r][p] = c * arp - s * arq;
                    a[p][r] = a[r][p];
                    a[r][q] = s * arp + c * arq;
                    a[q][r] = a[r][q];
                }
            }
            for row in &mut v {
                let vrp = row[p];
                let vrq = row[q];
                row[p] = c * vrp - s * vrq;
                row[q] = s * vrp + c * vrq;
            }
        }
    }
    ([a[0][0], a[1][1], a[2][2]], v)
}
