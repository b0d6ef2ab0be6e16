use super::vec3::{Rot3, Vec3};

/// Camera viewing volume: apex, camera-to-world rotation, angular extents,
/// and a far cutoff along the view axis (the maximum capture depth).
#[derive(Clone, Copy, Debug)]
pub struct Frustum {
    pub apex: Vec3,
    pub orientation: Rot3,
    pub hfov: f64,
    pub vfov: f64,
    pub far: f64,
    tan_h: f64,
    tan_v: f64,
}

impl Frustum {
    pub fn new(apex: Vec3, orientation: Rot3, hfov: f64, vfov: f64, far: f64) -> Self {
        assert!(hfov > 0.0 && hfov < std::f64::consts::PI, "hfov out of range");
        assert!(vfov > 0.0 && vfov < std::f64::consts::PI, "vfov out of range");
        assert!(far > 0.0, "far must be positive");
        Self {
            apex,
            orientation,
            hfov,
            vfov,
            far,
            tan_h: (hfov * 0.5).tan(),
            tan_v: (vfov * 0.5).tan(),
        }
    }

    /// True iff `p` is in front of the apex, within the angular bounds, and
    /// at depth <= far along the view axis.
    #[inline]
    pub fn contains(&self, p: Vec3) -> bool {
        let local = self.orientation.apply_inverse(p - self.apex);
        let depth = local.x;
        depth > 0.0
            && depth <= self.far
            && local.y.abs() <= depth * self.tan_h
            && local.z.abs() <= depth * self.tan_v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn f() -> Frustum {
        Frustum::new(Vec3::ZERO, Rot3::identity(), FRAC_PI_2, FRAC_PI_2, 20.0)
    }

    #[test]
    fn on_axis_point_inside() {
        assert!(f().contains(Vec3::new(1.0, 0.0, 0.0)));
    }

    #[test]
    fn behind_camera_outside() {
        assert!(!f().contains(Vec3::new(-1.0, 0.0, 0.0)));
    }

    #[test]
    fn beyond_far_outside() {
        assert!(!f().contains(Vec3::new(20.01, 0.0, 0.0)));
        assert!(f().contains(Vec3::new(20.0, 0.0, 0.0)));
    }

    #[test]
    fn on_axis_inside_for_all_depths() {
        let fr = Frustum::new(
            Vec3::new(1.0, 2.0, 3.0),
            Rot3::from_yaw_pitch(0.8, 0.2),
            1.0,
            0.7,
            15.0,
        );
        let axis = fr.orientation.forward();
        let mut d = 0.01;
        while d <= 15.0 {
            assert!(fr.contains(fr.apex + axis * d), "d = {d}");
            d += 0.37;
        }
    }

    #[test]
    fn angular_bounds() {
        // 90 degree hfov: |y| <= x
        assert!(f().contains(Vec3::new(1.0, 0.99, 0.0)));
        assert!(!f().contains(Vec3::new(1.0, 1.01, 0.0)));
    }
}
