//! Unit-quaternion rotations.

use super::{Point3, Real};

/// Rotation stored as a unit quaternion `w + xi + yj + zk`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation<F> {
    pub w: F,
    pub x: F,
    pub y: F,
    pub z: F,
}

impl<F: Real> Rotation<F> {
    pub fn identity() -> Self {
        Self {
            w: F::one(),
            x: F::zero(),
            y: F::zero(),
            z: F::zero(),
        }
    }

    /// Rotation by `angle` radians about `axis` (normalized internally).
    ///
    /// A zero axis yields the identity.
    pub fn from_axis_angle(axis: Point3<F>, angle: F) -> Self {
        match axis.normalized() {
            None => Self::identity(),
            Some(a) => {
                let half = angle / F::of(2.0);
                let s = half.sin();
                Self {
                    w: half.cos(),
                    x: a.x * s,
                    y: a.y * s,
                    z: a.z * s,
                }
                .renormalized()
            }
        }
    }

    fn renormalized(self) -> Self {
        let n = (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt();
        Self {
            w: self.w / n,
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
        }
    }

    pub fn inverse(self) -> Self {
        Self {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Applies the rotation to a vector (conjugation `q v q*`).
    pub fn apply(self, v: Point3<F>) -> Point3<F> {
        // q v q* expanded as v + 2 u x (u x v + w v) with u the vector part.
        let u = Point3::new(self.x, self.y, self.z);
        let t = u.cross(v) * F::of(2.0);
        v + t * self.w + u.cross(t)
    }

    /// Composition: `(a * b).apply(v) == a.apply(b.apply(v))`.
    pub fn compose(self, b: Self) -> Self {
        Self {
            w: self.w * b.w - self.x * b.x - self.y * b.y - self.z * b.z,
            x: self.w * b.x + self.x * b.w + self.y * b.z - self.z * b.y,
            y: self.w * b.y - self.x * b.z + self.y * b.w + self.z * b.x,
            z: self.w * b.z + self.x * b.y - self.y * b.x + self.z * b.w,
        }
        .renormalized()
    }
}

/// The rotation that maps direction `from` onto direction `to`.
///
/// Inputs need not be unit length, only nonzero; zero input yields the
/// identity.  Antiparallel inputs are handled deterministically by a half-turn
/// about a fixed axis perpendicular to `from` (built from whichever coordinate
/// axis is least aligned with it), so repeated runs agree bit for bit.
pub fn rotation_aligning<F: Real>(from: Point3<F>, to: Point3<F>) -> Rotation<F> {
    let (f, t) = match (from.normalized(), to.normalized()) {
        (Some(f), Some(t)) => (f, t),
        _ => return Rotation::identity(),
    };
    let c = f.dot(t);
    let near_opposite = c < F::of(-1.0 + 1e-12);
    if near_opposite {
        let pick = if f.x.abs() <= f.y.abs() && f.x.abs() <= f.z.abs() {
            Point3::new(F::one(), F::zero(), F::zero())
        } else if f.y.abs() <= f.z.abs() {
            Point3::new(F::zero(), F::one(), F::zero())
        } else {
            Point3::new(F::zero(), F::zero(), F::one())
        };
        let axis = f.cross(pick);
        return Rotation::from_axis_angle(axis, F::of(std::f64::consts::PI));
    }
    // Half-angle construction: q = normalize(1 + f.t, f x t).
    let axis = f.cross(t);
    Rotation {
        w: F::one() + c,
        x: axis.x,
        y: axis.y,
        z: axis.z,
    }
    .renormalized()
}
