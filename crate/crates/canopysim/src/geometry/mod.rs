//! Core geometric primitives: vectors, rays, triangles, boxes, frustums,
//! and a BVH for accelerated occlusion queries.
//!
//! Everything here is immutable after construction and safe to share across
//! threads for concurrent read-only queries.

mod aabb;
mod bvh;
mod frustum;
mod ray;
mod triangle;
mod vec3;

pub use aabb::Aabb;
pub use bvh::Bvh;
pub use frustum::Frustum;
pub use ray::{Ray, EPS_RAY};
pub use triangle::{point_triangle_distance, ray_triangle_intersect, Triangle, TriangleKind};
pub use vec3::{Rot3, Vec3};
