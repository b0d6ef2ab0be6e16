use serde::{Deserialize, Serialize};

use super::aabb::Aabb;
use super::ray::{Ray, EPS_RAY};
use super::vec3::Vec3;

/// What a triangle belongs to. Everything except `Fruit` occludes fruits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriangleKind {
    Trunk,
    Branch,
    Leaf,
    Fruit,
}

impl TriangleKind {
    pub fn is_occluder(self) -> bool {
        self != TriangleKind::Fruit
    }

    pub fn as_u8(self) -> u8 {
        match self {
            TriangleKind::Trunk => 0,
            TriangleKind::Branch => 1,
            TriangleKind::Leaf => 2,
            TriangleKind::Fruit => 3,
        }
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(TriangleKind::Trunk),
            1 => Some(TriangleKind::Branch),
            2 => Some(TriangleKind::Leaf),
            3 => Some(TriangleKind::Fruit),
            _ => None,
        }
    }
}

/// Scene triangle tagged with its tree and, for fruit surfaces, its fruit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub v0: Vec3,
    pub v1: Vec3,
    pub v2: Vec3,
    pub kind: TriangleKind,
    pub tree_id: u32,
    /// Present exactly when `kind == Fruit`.
    pub fruit_id: Option<u32>,
}

impl Triangle {
    pub fn new(v0: Vec3, v1: Vec3, v2: Vec3, kind: TriangleKind, tree_id: u32, fruit_id: Option<u32>) -> Self {
        debug_assert_eq!(fruit_id.is_some(), kind == TriangleKind::Fruit);
        Self { v0, v1, v2, kind, tree_id, fruit_id }
    }

    #[inline]
    pub fn centroid(&self) -> Vec3 {
        (self.v0 + self.v1 + self.v2) / 3.0
    }

    pub fn area(&self) -> f64 {
        (self.v1 - self.v0).cross(self.v2 - self.v0).norm() * 0.5
    }

    pub fn aabb(&self) -> Aabb {
        Aabb::from_points([self.v0, self.v1, self.v2])
    }
}

/// Möller–Trumbore ray/triangle intersection.
///
/// Returns the ray parameter `t` of the hit when `t` lies strictly inside
/// `(EPS_RAY, t_max)` and the hit point is strictly interior to the triangle
/// (edge grazes count as misses, keeping results deterministic). Degenerate
/// triangles never hit: their determinant vanishes.
#[inline]
pub fn ray_triangle_intersect(ray: &Ray, tri: &Triangle, t_max: f64) -> Option<f64> {
    const EPS_DET: f64 = 1e-12;

    let e1 = tri.v1 - tri.v0;
    let e2 = tri.v2 - tri.v0;
    let p = ray.dir.cross(e2);
    let det = e1.dot(p);
    if det.abs() < EPS_DET {
        return None; // parallel or degenerate
    }
    let inv_det = 1.0 / det;
    let s = ray.origin - tri.v0;
    let u = s.dot(p) * inv_det;
    if u <= 0.0 || u >= 1.0 {
        return None;
    }
    let q = s.cross(e1);
    let v = ray.dir.dot(q) * inv_det;
    if v <= 0.0 || u + v >= 1.0 {
        return None;
    }
    let t = e2.dot(q) * inv_det;
    if t > EPS_RAY && t < t_max {
        Some(t)
    } else {
        None
    }
}

/// Distance from a point to the closest point on a triangle
/// (Ericson, Real-Time Collision Detection, closest-point-on-triangle).
pub fn point_triangle_distance(p: Vec3, tri: &Triangle) -> f64 {
    let (a, b, c) = (tri.v0, tri.v1, tri.v2);
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;

    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return ap.norm();
    }

    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return bp.norm();
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let t = d1 / (d1 - d3);
        return (p - (a + ab * t)).norm();
    }

    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return cp.norm();
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let t = d2 / (d2 - d6);
        return (p - (a + ac * t)).norm();
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (p - (b + (c - b) * t)).norm();
    }

    // interior: project onto the plane
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (p - (a + ab * v + ac * w)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn plain(v0: Vec3, v1: Vec3, v2: Vec3) -> Triangle {
        Triangle::new(v0, v1, v2, TriangleKind::Leaf, 0, None)
    }

    fn spec_triangle() -> Triangle {
        plain(
            Vec3::new(-1.0, -1.0, 1.0),
            Vec3::new(1.0, -1.0, 1.0),
            Vec3::new(0.0, 1.0, 1.0),
        )
    }

    #[test]
    fn axis_aligned_hit() {
        let ray = Ray::new(Vec3::ZERO, Vec3::Z);
        let t = ray_triangle_intersect(&ray, &spec_triangle(), 10.0).expect("hit");
        assert_abs_diff_eq!(t, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn triangle_behind_ray_misses() {
        let ray = Ray::new(Vec3::ZERO, -Vec3::Z);
        assert!(ray_triangle_intersect(&ray, &spec_triangle(), 10.0).is_none());
    }

    #[test]
    fn degenerate_triangle_misses() {
        let tri = plain(Vec3::ZERO, Vec3::X, Vec3::X * 2.0);
        let ray = Ray::new(Vec3::new(0.5, -1.0, 0.0), Vec3::Y);
        assert!(ray_triangle_intersect(&ray, &tri, 10.0).is_none());
    }

    #[test]
    fn cyclic_permutation_invariance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut v = || Vec3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(1.0..3.0));
        for _ in 0..200 {
            let (a, b, c) = (v(), v(), v());
            let ray = Ray::new(Vec3::ZERO, Vec3::new(0.1, -0.05, 1.0));
            let t0 = ray_triangle_intersect(&ray, &plain(a, b, c), 100.0);
            let t1 = ray_triangle_intersect(&ray, &plain(b, c, a), 100.0);
            let t2 = ray_triangle_intersect(&ray, &plain(c, a, b), 100.0);
            assert_eq!(t0.is_some(), t1.is_some());
            assert_eq!(t0.is_some(), t2.is_some());
            if let (Some(x), Some(y), Some(z)) = (t0, t1, t2) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-9);
                assert_abs_diff_eq!(x, z, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn point_triangle_distance_cases() {
        let tri = plain(Vec3::ZERO, Vec3::X, Vec3::Y);
        // above the interior
        assert_abs_diff_eq!(point_triangle_distance(Vec3::new(0.25, 0.25, 1.0), &tri), 1.0, epsilon = 1e-12);
        // nearest to vertex a
        assert_abs_diff_eq!(
            point_triangle_distance(Vec3::new(-1.0, -1.0, 0.0), &tri),
            2.0_f64.sqrt(),
            epsilon = 1e-12
        );
        // nearest to edge ab
        assert_abs_diff_eq!(point_triangle_distance(Vec3::new(0.5, -2.0, 0.0), &tri), 2.0, epsilon = 1e-12);
    }
}
