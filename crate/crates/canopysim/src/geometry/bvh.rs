use super::aabb::Aabb;
use super::ray::Ray;
use super::triangle::{point_triangle_distance, ray_triangle_intersect, Triangle};

const LEAF_SIZE: usize = 4;

#[derive(Clone, Debug)]
enum NodeKind {
    Leaf { start: u32, count: u32 },
    Inner { left: u32, right: u32 },
}

#[derive(Clone, Debug)]
struct Node {
    bounds: Aabb,
    kind: NodeKind,
}

/// Bounding volume hierarchy over a triangle soup.
///
/// Built by median split on the longest axis of the centroid bounds, leaves
/// hold at most four triangles. Construction is deterministic for a fixed
/// input order: ties in the centroid sort are broken by input index.
#[derive(Clone, Debug)]
pub struct Bvh {
    nodes: Vec<Node>,
    order: Vec<u32>,
    triangles: Vec<Triangle>,
}

impl Bvh {
    /// Builds a BVH. An empty slice yields an empty-scene BVH on which every
    /// query misses.
    pub fn build(triangles: &[Triangle]) -> Self {
        let triangles = triangles.to_vec();
        let mut order: Vec<u32> = (0..triangles.len() as u32).collect();
        let mut nodes = Vec::new();
        if !triangles.is_empty() {
            let n = order.len();
            build_node(&triangles, &mut order, 0, n, &mut nodes);
        }
        Self { nodes, order, triangles }
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn bounds(&self) -> Aabb {
        if self.nodes.is_empty() {
            Aabb::empty()
        } else {
            self.nodes[0].bounds
        }
    }

    /// True iff any triangle accepted by `filter` intersects the ray in
    /// `(EPS_RAY, t_max)`. Exits on the first hit.
    pub fn any_hit(&self, ray: &Ray, t_max: f64, filter: impl Fn(&Triangle) -> bool) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        let mut stack = vec![0u32];
        while let Some(i) = stack.pop() {
            let node = &self.nodes[i as usize];
            if node.bounds.ray_entry(ray, t_max).is_none() {
                continue;
            }
            match node.kind {
                NodeKind::Leaf { start, count } => {
                    for &ti in &self.order[start as usize..(start + count) as usize] {
                        let tri = &self.triangles[ti as usize];
                        if filter(tri) && ray_triangle_intersect(ray, tri, t_max).is_some() {
                            return true;
                        }
                    }
                }
                NodeKind::Inner { left, right } => {
                    stack.push(left);
                    stack.push(right);
                }
            }
        }
        false
    }

    /// Nearest intersection in `(EPS_RAY, t_max)` among triangles accepted by
    /// `filter`. Returns `(t, triangle index)`.
    pub fn nearest_hit(&self, ray: &Ray, t_max: f64, filter: impl Fn(&Triangle) -> bool) -> Option<(f64, u32)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best: Option<(f64, u32)> = None;
        let mut limit = t_max;
        // stack of (node, entry t), visited nearer-child first
        let mut stack: Vec<(u32, f64)> = Vec::with_capacity(64);
        if let Some(t) = self.nodes[0].bounds.ray_entry(ray, limit) {
            stack.push((0, t));
        }
        while let Some((i, entry)) = stack.pop() {
            if entry >= limit {
                continue;
            }
            match self.nodes[i as usize].kind {
                NodeKind::Leaf { start, count } => {
                    for &ti in &self.order[start as usize..(start + count) as usize] {
                        let tri = &self.triangles[ti as usize];
                        if !filter(tri) {
                            continue;
                        }
                        if let Some(t) = ray_triangle_intersect(ray, tri, limit) {
                            limit = t;
                            best = Some((t, ti));
                        }
                    }
                }
                NodeKind::Inner { left, right } => {
                    let l = self.nodes[left as usize].bounds.ray_entry(ray, limit);
                    let r = self.nodes[right as usize].bounds.ray_entry(ray, limit);
                    // push farther first so nearer pops first
                    match (l, r) {
                        (Some(tl), Some(tr)) => {
                            if tl <= tr {
                                stack.push((right, tr));
                                stack.push((left, tl));
                            } else {
                                stack.push((left, tl));
                                stack.push((right, tr));
                            }
                        }
                        (Some(tl), None) => stack.push((left, tl)),
                        (None, Some(tr)) => stack.push((right, tr)),
                        (None, None) => {}
                    }
                }
            }
        }
        best
    }

    /// Distance from `p` to the nearest triangle surface, or `upper` when
    /// nothing is closer. Branch-and-bound over node boxes.
    pub fn nearest_distance(&self, p: super::vec3::Vec3, upper: f64) -> f64 {
        if self.nodes.is_empty() {
            return upper;
        }
        let mut best = upper;
        let mut stack: Vec<u32> = vec![0];
        while let Some(i) = stack.pop() {
            let node = &self.nodes[i as usize];
            if node.bounds.distance_squared(p) >= best * best {
                continue;
            }
            match node.kind {
                NodeKind::Leaf { start, count } => {
                    for &ti in &self.order[start as usize..(start + count) as usize] {
                        let d = point_triangle_distance(p, &self.triangles[ti as usize]);
                        if d < best {
                            best = d;
                        }
                    }
                }
                NodeKind::Inner { left, right } => {
                    let dl = self.nodes[left as usize].bounds.distance_squared(p);
                    let dr = self.nodes[right as usize].bounds.distance_squared(p);
                    if dl <= dr {
                        stack.push(right);
                        stack.push(left);
                    } else {
                        stack.push(left);
                        stack.push(right);
                    }
                }
            }
        }
        best
    }
}

fn build_node(tris: &[Triangle], order: &mut [u32], start: usize, count: usize, nodes: &mut Vec<Node>) -> u32 {
    let mut bounds = Aabb::empty();
    let mut centroid_bounds = Aabb::empty();
    for &ti in &order[start..start + count] {
        bounds = bounds.union(&tris[ti as usize].aabb());
        centroid_bounds.grow(tris[ti as usize].centroid());
    }

    let idx = nodes.len() as u32;
    nodes.push(Node { bounds, kind: NodeKind::Leaf { start: 0, count: 0 } });

    if count <= LEAF_SIZE {
        nodes[idx as usize].kind = NodeKind::Leaf { start: start as u32, count: count as u32 };
        return idx;
    }

    let axis = centroid_bounds.longest_axis();
    let slice = &mut order[start..start + count];
    slice.sort_by(|&a, &b| {
        let ca = tris[a as usize].centroid().axis(axis);
        let cb = tris[b as usize].centroid().axis(axis);
        ca.partial_cmp(&cb).unwrap().then(a.cmp(&b))
    });

    let mid = count / 2;
    let left = build_node(tris, order, start, mid, nodes);
    let right = build_node(tris, order, start + mid, count - mid, nodes);
    nodes[idx as usize].kind = NodeKind::Inner { left, right };
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{TriangleKind, Vec3};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_triangles(n: usize, seed: u64) -> Vec<Triangle> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v = |rng: &mut ChaCha8Rng| {
            Vec3::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0))
        };
        (0..n)
            .map(|i| {
                let a = v(&mut rng);
                let b = a + Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let c = a + Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let kind = match i % 4 {
                    0 => TriangleKind::Trunk,
                    1 => TriangleKind::Branch,
                    2 => TriangleKind::Leaf,
                    _ => TriangleKind::Fruit,
                };
                let fruit_id = (kind == TriangleKind::Fruit).then_some(i as u32);
                Triangle::new(a, b, c, kind, (i % 7) as u32, fruit_id)
            })
            .collect()
    }

    fn linear_any_hit(tris: &[Triangle], ray: &Ray, t_max: f64, filter: impl Fn(&Triangle) -> bool) -> bool {
        tris.iter().any(|t| filter(t) && ray_triangle_intersect(ray, t, t_max).is_some())
    }

    fn linear_nearest(tris: &[Triangle], ray: &Ray, t_max: f64) -> Option<f64> {
        tris.iter()
            .filter_map(|t| ray_triangle_intersect(ray, t, t_max))
            .min_by(|a, b| a.partial_cmp(b).unwrap())
    }

    #[test]
    fn empty_scene_misses() {
        let bvh = Bvh::build(&[]);
        let ray = Ray::new(Vec3::ZERO, Vec3::X);
        assert!(!bvh.any_hit(&ray, 100.0, |_| true));
        assert!(bvh.nearest_hit(&ray, 100.0, |_| true).is_none());
        assert_eq!(bvh.nearest_distance(Vec3::ZERO, 5.0), 5.0);
    }

    #[test]
    fn single_triangle_leaf() {
        let tris = random_triangles(1, 3);
        let bvh = Bvh::build(&tris);
        assert_eq!(bvh.nodes.len(), 1);
        assert!(matches!(bvh.nodes[0].kind, NodeKind::Leaf { count: 1, .. }));
    }

    #[test]
    fn occluding_triangle_midway() {
        let tri = Triangle::new(
            Vec3::new(-1.0, -1.0, 5.0),
            Vec3::new(1.0, -1.0, 5.0),
            Vec3::new(0.0, 1.0, 5.0),
            TriangleKind::Leaf,
            0,
            None,
        );
        let bvh = Bvh::build(&[tri]);
        let ray = Ray::new(Vec3::ZERO, Vec3::Z);
        assert!(bvh.any_hit(&ray, 10.0, |t| t.kind.is_occluder()));
        assert!(!bvh.any_hit(&ray, 10.0, |t| t.kind == TriangleKind::Fruit));
    }

    #[test]
    fn matches_linear_scan_on_random_scenes() {
        let tris = random_triangles(10_000, 11);
        let bvh = Bvh::build(&tris);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..1000 {
            let origin = Vec3::new(
                rng.gen_range(-12.0..12.0),
                rng.gen_range(-12.0..12.0),
                rng.gen_range(-12.0..12.0),
            );
            let dir = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if dir.norm() < 1e-3 {
                continue;
            }
            let ray = Ray::new(origin, dir);
            let t_max = rng.gen_range(1.0..40.0);
            let filter = |t: &Triangle| t.kind.is_occluder();
            assert_eq!(
                bvh.any_hit(&ray, t_max, filter),
                linear_any_hit(&tris, &ray, t_max, filter),
            );
            let near_bvh = bvh.nearest_hit(&ray, t_max, |_| true).map(|(t, _)| t);
            let near_lin = linear_nearest(&tris, &ray, t_max);
            match (near_bvh, near_lin) {
                (Some(a), Some(b)) => assert!((a - b).abs() < 1e-12),
                (a, b) => assert_eq!(a.is_some(), b.is_some()),
            }
        }
    }

    #[test]
    fn duplicate_triangles_both_retained() {
        let mut tris = random_triangles(8, 21);
        let dup = tris[0];
        tris.push(dup);
        let bvh = Bvh::build(&tris);
        let mut seen = vec![false; tris.len()];
        for node in &bvh.nodes {
            if let NodeKind::Leaf { start, count } = node.kind {
                for &ti in &bvh.order[start as usize..(start + count) as usize] {
                    assert!(!seen[ti as usize], "triangle {ti} in two leaves");
                    seen[ti as usize] = true;
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn nearest_distance_matches_linear() {
        let tris = random_triangles(500, 31);
        let bvh = Bvh::build(&tris);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let p = Vec3::new(
                rng.gen_range(-15.0..15.0),
                rng.gen_range(-15.0..15.0),
                rng.gen_range(-15.0..15.0),
            );
            let linear = tris
                .iter()
                .map(|t| point_triangle_distance(p, t))
                .fold(f64::INFINITY, f64::min);
            let got = bvh.nearest_distance(p, f64::INFINITY);
            assert!((got - linear).abs() < 1e-12, "{got} vs {linear}");
        }
    }

    #[test]
    fn deterministic_build() {
        let tris = random_triangles(2000, 77);
        let a = Bvh::build(&tris);
        let b = Bvh::build(&tris);
        assert_eq!(a.order, b.order);
        let ray = Ray::new(Vec3::new(-11.0, 0.0, 0.0), Vec3::X);
        assert_eq!(
            a.nearest_hit(&ray, 100.0, |_| true),
            b.nearest_hit(&ray, 100.0, |_| true)
        );
    }
}
