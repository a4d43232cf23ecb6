//! Small fixed-size vector types.
//!
//! `Point3`/`Point2` double as points and displacement vectors; the pipeline
//! never needed the extra ceremony of separate point/vector types.

use std::ops::{Add, Div, Mul, Neg, Sub};

use super::Real;

/// 3D point or vector.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point3<F> {
    pub x: F,
    pub y: F,
    pub z: F,
}

/// 2D point or vector.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point2<F> {
    pub x: F,
    pub y: F,
}

impl<F: Real> Point3<F> {
    pub fn new(x: F, y: F, z: F) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(F::zero(), F::zero(), F::zero())
    }

    pub fn dot(self, o: Self) -> F {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_squared(self) -> F {
        self.dot(self)
    }

    pub fn norm(self) -> F {
        self.norm_squared().sqrt()
    }

    pub fn distance(self, o: Self) -> F {
        (self - o).norm()
    }

    /// Unit vector in the same direction, or `None` for a (near-)zero vector.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n <= F::of(1e-300) || !n.is_finite() {
            None
        } else {
            Some(self / n)
        }
    }

    /// Drops the z component.
    pub fn xy(self) -> Point2<F> {
        Point2::new(self.x, self.y)
    }

    /// Angle to `o` in radians, in `[0, pi]`.
    pub fn angle_to(self, o: Self) -> F {
        let denom = self.norm() * o.norm();
        if denom == F::zero() {
            return F::zero();
        }
        let c = (self.dot(o) / denom).max(-F::one()).min(F::one());
        c.acos()
    }
}

impl<F: Real> Point2<F> {
    pub fn new(x: F, y: F) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self::new(F::zero(), F::zero())
    }

    pub fn dot(self, o: Self) -> F {
        self.x * o.x + self.y * o.y
    }

    /// z component of the cross product of the embedded 3D vectors.
    pub fn cross(self, o: Self) -> F {
        self.x * o.y - self.y * o.x
    }

    pub fn norm_squared(self) -> F {
        self.dot(self)
    }

    pub fn norm(self) -> F {
        self.norm_squared().sqrt()
    }

    pub fn distance(self, o: Self) -> F {
        (self - o).norm()
    }

    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n <= F::of(1e-300) || !n.is_finite() {
            None
        } else {
            Some(self / n)
        }
    }

    /// Perpendicular vector, rotated +90 degrees.
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }
}

macro_rules! impl_vec_ops {
    ($ty:ident { $($c:ident),+ }) => {
        impl<F: Real> Add for $ty<F> {
            type Output = Self;
            fn add(self, o: Self) -> Self {
                Self { $($c: self.$c + o.$c),+ }
            }
        }
        impl<F: Real> Sub for $ty<F> {
            type Output = Self;
            fn sub(self, o: Self) -> Self {
                Self { $($c: self.$c - o.$c),+ }
            }
        }
        impl<F: Real> Neg for $ty<F> {
            type Output = Self;
            fn neg(self) -> Self {
                Self { $($c: -self.$c),+ }
            }
        }
        impl<F: Real> Mul<F> for $ty<F> {
            type Output = Self;
            fn mul(self, s: F) -> Self {
                Self { $($c: self.$c * s),+ }
            }
        }
        impl<F: Real> Div<F> for $ty<F> {
            type Output = Self;
            fn div(self, s: F) -> Self {
                Self { $($c: self.$c / s),+ }
            }
        }
    };
}

impl_vec_ops!(Point3 { x, y, z });
impl_vec_ops!(Point2 { x, y });

/// Distance from `p` to the segment `a..b` in the plane.
pub(crate) fn point_segment_distance2<F: Real>(p: Point2<F>, a: Point2<F>, b: Point2<F>) -> F {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == F::zero() {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).max(F::zero()).min(F::one());
    p.distance(a + ab * t)
}
