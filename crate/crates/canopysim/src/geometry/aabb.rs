use serde::{Deserialize, Serialize};

use super::ray::Ray;
use super::vec3::Vec3;

/// Axis-aligned bounding box, `min <= max` componentwise for non-empty boxes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    /// Inverted box that unions cleanly with anything.
    pub fn empty() -> Self {
        Self {
            min: Vec3::splat(f64::INFINITY),
            max: Vec3::splat(f64::NEG_INFINITY),
        }
    }

    pub fn from_min_max(min: Vec3, max: Vec3) -> Self {
        Self { min, max }
    }

    pub fn from_points(points: impl IntoIterator<Item = Vec3>) -> Self {
        let mut b = Self::empty();
        for p in points {
            b.grow(p);
        }
        b
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x || self.min.y > self.max.y || self.min.z > self.max.z
    }

    #[inline]
    pub fn grow(&mut self, p: Vec3) {
        self.min = self.min.min_by_component(p);
        self.max = self.max.max_by_component(p);
    }

    pub fn union(&self, o: &Aabb) -> Aabb {
        Aabb {
            min: self.min.min_by_component(o.min),
            max: self.max.max_by_component(o.max),
        }
    }

    pub fn inflate(&self, by: f64) -> Aabb {
        Aabb {
            min: self.min - Vec3::splat(by),
            max: self.max + Vec3::splat(by),
        }
    }

    #[inline]
    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    #[inline]
    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    /// Index of the longest axis (0 = x, 1 = y, 2 = z).
    pub fn longest_axis(&self) -> usize {
        let e = self.extent();
        if e.x >= e.y && e.x >= e.z {
            0
        } else if e.y >= e.z {
            1
        } else {
            2
        }
    }

    #[inline]
    pub fn contains(&self, p: Vec3) -> bool {
        p.x >= self.min.x
            && p.x <= self.max.x
            && p.y >= self.min.y
            && p.y <= self.max.y
            && p.z >= self.min.z
            && p.z <= self.max.z
    }

    /// Slab test: does the ray hit the box anywhere in `[0, t_max]`?
    /// Returns the entry parameter (clamped to 0) on hit.
    #[inline]
    pub fn ray_entry(&self, ray: &Ray, t_max: f64) -> Option<f64> {
        let inv = ray.inv_dir;
        let t1 = (self.min.x - ray.origin.x) * inv.x;
        let t2 = (self.max.x - ray.origin.x) * inv.x;
        let mut t_lo = t1.min(t2);
        let mut t_hi = t1.max(t2);

        let t1 = (self.min.y - ray.origin.y) * inv.y;
        let t2 = (self.max.y - ray.origin.y) * inv.y;
        t_lo = t_lo.max(t1.min(t2));
        t_hi = t_hi.min(t1.max(t2));

        let t1 = (self.min.z - ray.origin.z) * inv.z;
        let t2 = (self.max.z - ray.origin.z) * inv.z;
        t_lo = t_lo.max(t1.min(t2));
        t_hi = t_hi.min(t1.max(t2));

        if t_hi >= t_lo && t_hi >= 0.0 && t_lo <= t_max {
            Some(t_lo.max(0.0))
        } else {
            None
        }
    }

    /// Squared distance from a point to the box (0 inside).
    #[inline]
    pub fn distance_squared(&self, p: Vec3) -> f64 {
        let dx = (self.min.x - p.x).max(0.0).max(p.x - self.max.x);
        let dy = (self.min.y - p.y).max(0.0).max(p.y - self.max.y);
        let dz = (self.min.z - p.z).max(0.0).max(p.z - self.max.z);
        dx * dx + dy * dy + dz * dz
    }
}
