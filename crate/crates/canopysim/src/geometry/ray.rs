use super::vec3::Vec3;

/// Self-intersection guard on the ray parameter: hits with `t <= EPS_RAY`
/// are ignored so a surface never occludes a point lying on it, and the
/// camera apex never hits geometry it sits on.
pub const EPS_RAY: f64 = 1e-6;

/// Ray with unit direction. `inv_dir` is cached for slab tests.
#[derive(Clone, Copy, Debug)]
pub struct Ray {
    pub origin: Vec3,
    pub dir: Vec3,
    pub inv_dir: Vec3,
}

impl Ray {
    /// Builds a ray, normalizing the direction.
    pub fn new(origin: Vec3, dir: Vec3) -> Self {
        let dir = dir.normalized();
        Self {
            origin,
            dir,
            inv_dir: Vec3::new(1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z),
        }
    }

    /// Ray from `origin` toward `target`. Returns the ray and the distance
    /// to the target.
    pub fn toward(origin: Vec3, target: Vec3) -> (Self, f64) {
        let d = target - origin;
        let dist = d.norm();
        (Self::new(origin, d), dist)
    }

    #[inline]
    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.dir * t
    }
}
