//! Parametric tree construction: a trunk, recursive tapering branch tiers,
//! leaf quads on terminal branches, and icosahedral fruits attached near
//! terminal-branch ends.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Triangle, TriangleKind, Vec3};

use super::{FruitRecord, TreeParams};

const TRUNK_SEGMENTS: usize = 8;
const BRANCH_SEGMENTS: usize = 6;
const TAPER: f64 = 0.65;
const RADIUS_DECAY: f64 = 0.55;
const MIN_BRANCH_RADIUS: f64 = 0.008;
/// Draws attempted per fruit before the separation constraint is waived.
/// Keeping the configured fruit count takes priority over spacing.
const SEPARATION_ATTEMPTS: usize = 100;

struct Branch {
    start: Vec3,
    dir: Vec3,
    length: f64,
    radius: f64,
    level: u32,
}

impl Branch {
    fn end(&self) -> Vec3 {
        self.start + self.dir * self.length
    }

    fn point_at(&self, u: f64) -> Vec3 {
        self.start + self.dir * (self.length * u)
    }

    fn tip_radius(&self) -> f64 {
        self.radius * TAPER
    }
}

/// Orthonormal basis perpendicular to a unit direction.
fn perp_basis(dir: Vec3) -> (Vec3, Vec3) {
    let helper = if dir.z.abs() < 0.9 { Vec3::Z } else { Vec3::X };
    let u = dir.cross(helper).normalized();
    let v = dir.cross(u);
    (u, v)
}

/// Generates one tree. All geometry is tagged with `tree_id`; fruits get
/// sequential fruit IDs starting at zero. Deterministic in (params, seed).
pub fn generate_tree(
    params: &TreeParams,
    tree_id: u32,
    base: Vec3,
    seed: u64,
) -> (Vec<Triangle>, Vec<FruitRecord>) {
    use rand_chacha::rand_core::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let branches = grow_skeleton(params, base, &mut rng);
    let mut triangles = Vec::new();

    for b in &branches {
        let kind = if b.level == 0 { TriangleKind::Trunk } else { TriangleKind::Branch };
        let segments = if b.level == 0 { TRUNK_SEGMENTS } else { BRANCH_SEGMENTS };
        mesh_tapered_cylinder(b, kind, tree_id, segments, &mut triangles);
    }

    let terminal_level = params.branching_levels - 1;
    let terminals: Vec<&Branch> = branches.iter().filter(|b| b.level == terminal_level).collect();

    grow_leaves(params, tree_id, &terminals, &mut rng, &mut triangles);
    let fruits = grow_fruits(params, tree_id, &terminals, &mut rng, &mut triangles);

    (triangles, fruits)
}

fn grow_skeleton(params: &TreeParams, base: Vec3, rng: &mut ChaCha8Rng) -> Vec<Branch> {
    let mut branches = vec![Branch {
        start: base,
        dir: Vec3::Z,
        length: params.trunk_height,
        radius: params.trunk_radius,
        level: 0,
    }];

    // First-tier branch length chosen so the geometric series of tiers
    // reaches roughly 90% of the configured canopy radius.
    let generations = params.branching_levels - 1;
    if generations == 0 {
        return branches;
    }
    let rho = params.branch_length_ratio;
    let series: f64 = (0..generations).map(|k| rho.powi(k as i32)).sum();
    let first_len = 0.9 * params.canopy_radius / series;

    let mut tier_start = 0usize;
    for level in 1..=generations {
        let tier_end = branches.len();
        for parent_idx in tier_start..tier_end {
            let n = rng.gen_range(params.branches_per_node.min..=params.branches_per_node.max);
            let parent_dir = branches[parent_idx].dir;
            let parent_end = branches[parent_idx].end();
            let parent_radius = branches[parent_idx].tip_radius();
            let (u, v) = perp_basis(parent_dir);
            let phase: f64 = rng.gen_range(0.0..1.0);
            for i in 0..n {
                let pitch = rng.gen_range(params.branch_pitch.min..=params.branch_pitch.max);
                let azimuth = std::f64::consts::TAU * ((i as f64 + phase + rng.gen_range(0.0..0.4)) / n as f64);
                let lateral = u * azimuth.cos() + v * azimuth.sin();
                let dir = (parent_dir * pitch.cos() + lateral * pitch.sin()).normalized();
                let length = first_len * rho.powi(level as i32 - 1) * rng.gen_range(0.85..1.15);
                branches.push(Branch {
                    start: parent_end,
                    dir,
                    length,
                    radius: (parent_radius * RADIUS_DECAY).max(MIN_BRANCH_RADIUS),
                    level,
                });
            }
        }
        tier_start = tier_end;
    }
    branches
}

fn mesh_tapered_cylinder(b: &Branch, kind: TriangleKind, tree_id: u32, segments: usize, out: &mut Vec<Triangle>) {
    let (u, v) = perp_basis(b.dir);
    let end = b.end();
    let r0 = b.radius;
    let r1 = b.tip_radius();
    let ring = |center: Vec3, r: f64, i: usize| {
        let a = std::f64::consts::TAU * i as f64 / segments as f64;
        center + (u * a.cos() + v * a.sin()) * r
    };
    for i in 0..segments {
        let j = (i + 1) % segments;
        let a0 = ring(b.start, r0, i);
        let a1 = ring(b.start, r0, j);
        let b0 = ring(end, r1, i);
        let b1 = ring(end, r1, j);
        out.push(Triangle::new(a0, a1, b0, kind, tree_id, None));
        out.push(Triangle::new(a1, b1, b0, kind, tree_id, None));
    }
}

fn grow_leaves(
    params: &TreeParams,
    tree_id: u32,
    terminals: &[&Branch],
    rng: &mut ChaCha8Rng,
    out: &mut Vec<Triangle>,
) {
    for terminal in terminals {
        let count = rng.gen_range(params.leaf_count_per_terminal.min..=params.leaf_count_per_terminal.max);
        for _ in 0..count {
            let anchor = terminal.point_at(rng.gen_range(0.3..=1.0));
            // random leaf plane
            let normal = random_unit(rng);
            let (e1, e2n) = perp_basis(normal);
            let spin = rng.gen_range(0.0..std::f64::consts::TAU);
            let major = (e1 * spin.cos() + e2n * spin.sin()) * params.leaf_size;
            let minor = normal.cross(major).normalized() * (params.leaf_size * 0.6);
            let c0 = anchor;
            let c1 = anchor + major;
            let c2 = anchor + major + minor;
            let c3 = anchor + minor;
            out.push(Triangle::new(c0, c1, c2, TriangleKind::Leaf, tree_id, None));
            out.push(Triangle::new(c0, c2, c3, TriangleKind::Leaf, tree_id, None));
        }
    }
}

fn grow_fruits(
    params: &TreeParams,
    tree_id: u32,
    terminals: &[&Branch],
    rng: &mut ChaCha8Rng,
    out: &mut Vec<Triangle>,
) -> Vec<FruitRecord> {
    let count = rng.gen_range(params.fruit_count.min..=params.fruit_count.max);
    if count == 0 || terminals.is_empty() {
        return Vec::new();
    }

    // Candidate attachment points: the endpoint plus two interior stations
    // per terminal branch, so heavy fruit loads still find room.
    let mut candidates: Vec<Vec3> = Vec::with_capacity(terminals.len() * 3);
    for t in terminals {
        for &station in &[1.0, 0.75, 0.5] {
            let p = t.point_at(station);
            let hang = t.tip_radius() + params.fruit_radius * 1.2;
            candidates.push(p - Vec3::Z * hang);
        }
    }

    let (z_lo, z_hi) = candidates.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
        (lo.min(c.z), hi.max(c.z))
    });
    let span = (z_hi - z_lo).max(1e-9);
    // canopy-interior weighting: bias 0 is uniform, larger favors mid heights
    let weight = |z: f64| {
        let h = (z - z_lo) / span;
        (-params.fruit_height_bias * (h - 0.5).abs() * 2.0).exp()
    };
    let mut weights: Vec<f64> = candidates.iter().map(|c| weight(c.z)).collect();

    let mut fruits: Vec<FruitRecord> = Vec::with_capacity(count as usize);
    for fruit_id in 0..count {
        let mut chosen: Option<usize> = None;
        let mut last_draw = 0usize;
        for _ in 0..SEPARATION_ATTEMPTS {
            let idx = weighted_draw(&weights, rng);
            last_draw = idx;
            let ok = fruits
                .iter()
                .all(|f| f.center.distance(candidates[idx]) >= params.fruit_separation);
            if ok {
                chosen = Some(idx);
                break;
            }
        }
        let idx = chosen.unwrap_or(last_draw);
        let center = candidates[idx];
        weights[idx] = 0.0; // a station holds at most one fruit
        if weights.iter().all(|&w| w <= 0.0) {
            for (w, c) in weights.iter_mut().zip(&candidates) {
                *w = weight(c.z); // refill if the pool is exhausted
            }
        }
        mesh_icosphere(center, params.fruit_radius, tree_id, fruit_id, out);
        fruits.push(FruitRecord {
            tree_id,
            fruit_id,
            center,
            radius: params.fruit_radius,
        });
    }
    fruits
}

fn weighted_draw(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return rng.gen_range(0..weights.len());
    }
    let mut x = rng.gen_range(0.0..total);
    for (i, w) in weights.iter().enumerate() {
        x -= w;
        if x <= 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm_squared();
        if n > 1e-4 && n <= 1.0 {
            return v / n.sqrt();
        }
    }
}

/// Regular icosahedron (20 faces) scaled to `radius` around `center`.
fn mesh_icosphere(center: Vec3, radius: f64, tree_id: u32, fruit_id: u32, out: &mut Vec<Triangle>) {
    let t = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let raw = [
        Vec3::new(-1.0, t, 0.0),
        Vec3::new(1.0, t, 0.0),
        Vec3::new(-1.0, -t, 0.0),
        Vec3::new(1.0, -t, 0.0),
        Vec3::new(0.0, -1.0, t),
        Vec3::new(0.0, 1.0, t),
        Vec3::new(0.0, -1.0, -t),
        Vec3::new(0.0, 1.0, -t),
        Vec3::new(t, 0.0, -1.0),
        Vec3::new(t, 0.0, 1.0),
        Vec3::new(-t, 0.0, -1.0),
        Vec3::new(-t, 0.0, 1.0),
    ];
    let verts: Vec<Vec3> = raw.iter().map(|v| center + v.normalized() * radius).collect();
    const FACES: [(usize, usize, usize); 20] = [
        (0, 11, 5),
        (0, 5, 1),
        (0, 1, 7),
        (0, 7, 10),
        (0, 10, 11),
        (1, 5, 9),
        (5, 11, 4),
        (11, 10, 2),
        (10, 7, 6),
        (7, 1, 8),
        (3, 9, 4),
        (3, 4, 2),
        (3, 2, 6),
        (3, 6, 8),
        (3, 8, 9),
        (4, 9, 5),
        (2, 4, 11),
        (6, 2, 10),
        (8, 6, 7),
        (9, 8, 1),
    ];
    for (a, b, c) in FACES {
        out.push(Triangle::new(
            verts[a],
            verts[b],
            verts[c],
            TriangleKind::Fruit,
            tree_id,
            Some(fruit_id),
        ));
    }
}
