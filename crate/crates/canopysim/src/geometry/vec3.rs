use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// 3D vector in meters, world frame, z up.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Self = Self { x: 0.0, y: 0.0, z: 0.0 };
    pub const X: Self = Self { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Self = Self { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Self = Self { x: 0.0, y: 0.0, z: 1.0 };

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn splat(v: f64) -> Self {
        Self::new(v, v, v)
    }

    #[inline]
    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Unit vector in the same direction. Panics on the zero vector.
    #[inline]
    pub fn normalized(self) -> Self {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize zero-length vector");
        self / n
    }

    #[inline]
    pub fn distance(self, o: Self) -> f64 {
        (self - o).norm()
    }

    #[inline]
    pub fn min_by_component(self, o: Self) -> Self {
        Self::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    #[inline]
    pub fn max_by_component(self, o: Self) -> Self {
        Self::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    #[inline]
    pub fn lerp(self, o: Self, t: f64) -> Self {
        self + (o - self) * t
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Component by axis index (0 = x, 1 = y, 2 = z).
    #[inline]
    pub fn axis(self, i: usize) -> f64 {
        match i {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }
}

impl Add for Vec3 {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Self;
    #[inline]
    fn div(self, s: f64) -> Self {
        Self::new(self.x / s, self.y / s, self.z / s)
    }
}

/// Rotation matrix stored as the three rotated basis vectors (columns).
///
/// Used as a camera-to-world rotation: `cols[0]` is the camera forward axis
/// expressed in world coordinates, `cols[1]` the camera left axis, `cols[2]`
/// the camera up axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rot3 {
    pub cols: [Vec3; 3],
}

impl Rot3 {
    pub fn identity() -> Self {
        Self { cols: [Vec3::X, Vec3::Y, Vec3::Z] }
    }

    /// Rotation with forward axis at the given yaw (about world z) and pitch
    /// (positive tilts the forward axis up). Roll is zero.
    pub fn from_yaw_pitch(yaw: f64, pitch: f64) -> Self {
        let (sy, cy) = yaw.sin_cos();
        let (sp, cp) = pitch.sin_cos();
        let forward = Vec3::new(cp * cy, cp * sy, sp);
        let left = Vec3::new(-sy, cy, 0.0);
        let up = forward.cross(left);
        Self { cols: [forward, left, up] }
    }

    #[inline]
    pub fn forward(&self) -> Vec3 {
        self.cols[0]
    }

    #[inline]
    pub fn left(&self) -> Vec3 {
        self.cols[1]
    }

    #[inline]
    pub fn up(&self) -> Vec3 {
        self.cols[2]
    }

    /// Rotate a local-frame vector into the world frame.
    #[inline]
    pub fn apply(&self, v: Vec3) -> Vec3 {
        self.cols[0] * v.x + self.cols[1] * v.y + self.cols[2] * v.z
    }

    /// Rotate a world-frame vector into the local frame (inverse rotation).
    #[inline]
    pub fn apply_inverse(&self, v: Vec3) -> Vec3 {
        Vec3::new(self.cols[0].dot(v), self.cols[1].dot(v), self.cols[2].dot(v))
    }
}

impl Default for Rot3 {
    fn default() -> Self {
        Self::identity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn cross_follows_right_hand_rule() {
        let c = Vec3::X.cross(Vec3::Y);
        assert_abs_diff_eq!(c.z, 1.0);
    }

    #[test]
    fn yaw_pitch_frame_is_orthonormal() {
        let r = Rot3::from_yaw_pitch(0.7, -0.4);
        for i in 0..3 {
            assert_abs_diff_eq!(r.cols[i].norm(), 1.0, epsilon = 1e-12);
            for j in (i + 1)..3 {
                assert_abs_diff_eq!(r.cols[i].dot(r.cols[j]), 0.0, epsilon = 1e-12);
            }
        }
        // round trip
        let v = Vec3::new(0.3, -1.2, 2.0);
        let back = r.apply_inverse(r.apply(v));
        assert_abs_diff_eq!(back.distance(v), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn pitch_down_looks_down() {
        let r = Rot3::from_yaw_pitch(0.0, -FRAC_PI_2);
        assert_abs_diff_eq!(r.forward().z, -1.0, epsilon = 1e-12);
    }
}
