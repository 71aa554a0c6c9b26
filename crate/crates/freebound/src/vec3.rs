//! Vectors and small matrices in ambient 3-space.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// A point or vector in R^3 with double precision components.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const fn vec3(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3 { x, y, z }
}

impl Vec3 {
    pub const ZERO: Vec3 = vec3(0.0, 0.0, 0.0);
    pub const EX: Vec3 = vec3(1.0, 0.0, 0.0);
    pub const EY: Vec3 = vec3(0.0, 1.0, 0.0);
    pub const EZ: Vec3 = vec3(0.0, 0.0, 1.0);

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        vec3(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    /// Unit vector in the same direction. Returns `None` for vectors
    /// shorter than `1e-300` (cannot be normalized meaningfully).
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        if n < 1e-300 {
            None
        } else {
            Some(self / n)
        }
    }

    /// Component of `self` orthogonal to the unit vector `u`.
    pub fn reject_unit(self, u: Vec3) -> Vec3 {
        self - u * self.dot(u)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Vec3 {
        vec3(a[0], a[1], a[2])
    }

    pub fn splat(v: f64) -> Vec3 {
        vec3(v, v, v)
    }

    pub fn min_components(a: Vec3, b: Vec3) -> Vec3 {
        vec3(a.x.min(b.x), a.y.min(b.y), a.z.min(b.z))
    }

    pub fn max_components(a: Vec3, b: Vec3) -> Vec3 {
        vec3(a.x.max(b.x), a.y.max(b.y), a.z.max(b.z))
    }
}

/// Inversion at the unit sphere, `x -> x / |x|^2`.
///
/// An involution away from the origin; fixes the unit sphere pointwise.
pub fn sphere_inversion(x: Vec3) -> Vec3 {
    x / x.norm_sq()
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        vec3(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        vec3(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        vec3(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        vec3(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        vec3(self.x / s, self.y / s, self.z / s)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}

/// Row-major 3x3 matrix; used for analytic Jacobians and rotations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const ZERO: Mat3 = Mat3([[0.0; 3]; 3]);

    pub fn identity() -> Mat3 {
        Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    /// Outer product `a b^T`.
    pub fn outer(a: Vec3, b: Vec3) -> Mat3 {
        let (a, b) = (a.to_array(), b.to_array());
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i] * b[j];
            }
        }
        Mat3(m)
    }

    pub fn trace(self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn apply(self, v: Vec3) -> Vec3 {
        let a = v.to_array();
        let mut out = [0.0; 3];
        for (i, row) in self.0.iter().enumerate() {
            out[i] = row[0] * a[0] + row[1] * a[1] + row[2] * a[2];
        }
        Vec3::from_array(out)
    }

    pub fn transpose(self) -> Mat3 {
        let m = self.0;
        Mat3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    /// Rotation by `angle` about the given axis (Rodrigues formula).
    pub fn rotation(axis: Vec3, angle: f64) -> Mat3 {
        let u = axis.normalized().expect("rotation axis must be nonzero");
        let (s, c) = angle.sin_cos();
        let k = Mat3([
            [0.0, -u.z, u.y],
            [u.z, 0.0, -u.x],
            [-u.y, u.x, 0.0],
        ]);
        Mat3::identity() + k * s + k * k * (1.0 - c)
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, o: Mat3) -> Mat3 {
        let mut m = self.0;
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v += o.0[i][j];
            }
        }
        Mat3(m)
    }
}

impl Mul<f64> for Mat3 {
    type Output = Mat3;
    fn mul(self, s: f64) -> Mat3 {
        let mut m = self.0;
        for row in m.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        Mat3(m)
    }
}

impl Mul<Mat3> for Mat3 {
    type Output = Mat3;
    fn mul(self, o: Mat3) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        Mat3(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn finite_vec() -> impl Strategy<Value = Vec3> {
        let c = -10.0f64..10.0;
        (c.clone(), c.clone(), c).prop_map(|(x, y, z)| vec3(x, y, z))
    }

    proptest! {
        #[test]
        fn inversion_is_involutive(v in finite_vec()) {
            prop_assume!(v.norm() > 1e-3);
            let w = sphere_inversion(sphere_inversion(v));
            prop_assert!((w - v).norm() <= 1e-12 * v.norm().max(1.0));
        }

        #[test]
        fn inversion_norm(v in finite_vec()) {
            prop_assume!(v.norm() > 1e-3);
            let n = sphere_inversion(v).norm();
            prop_assert!((n - 1.0 / v.norm()).abs() < 1e-12 * (1.0 / v.norm()));
        }

        /// For x on the unit sphere, |x - x0| = |x0| |x - inv(x0)|.
        #[test]
        fn unit_sphere_chord_identity(dir in finite_vec(), x0 in finite_vec()) {
            prop_assume!(dir.norm() > 1e-3 && x0.norm() > 1e-3);
            let x = dir / dir.norm();
            let lhs = (x - x0).norm();
            let rhs = x0.norm() * (x - sphere_inversion(x0)).norm();
            prop_assert!((lhs - rhs).abs() < 1e-12 * lhs.max(1.0));
        }

        #[test]
        fn cross_is_orthogonal(a in finite_vec(), b in finite_vec()) {
            let c = a.cross(b);
            prop_assert!(c.dot(a).abs() < 1e-9);
            prop_assert!(c.dot(b).abs() < 1e-9);
        }
    }

    #[test]
    fn rotation_is_orthonormal() {
        let r = Mat3::rotation(vec3(1.0, 2.0, -0.5), 1.234);
        let rt_r = r.transpose() * r;
        let id = Mat3::identity();
        for i in 0..3 {
            for j in 0..3 {
                assert!((rt_r.0[i][j] - id.0[i][j]).abs() < 1e-14);
            }
        }
    }
}
