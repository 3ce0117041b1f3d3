//! Margin-aware pairwise intersection tests.

use crate::geometry::{Pose2, Vector2};
use crate::num::Real;

use super::shape::{CollisionShape, ShapeKind};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PairCheck<T> {
    Separated,
    /// `normal` points from the first shape towards the second; translating the
    /// second shape by `depth * normal` separates the inflated footprints.
    Colliding {
        depth: T,
        normal: Vector2<T>,
    },
}

impl<T> PairCheck<T> {
    pub fn is_colliding(&self) -> bool {
        matches!(self, PairCheck::Colliding { .. })
    }
}

/// Tests whether the margin-inflated footprints of two shapes intersect.
pub fn check_pair<T: Real>(a: &CollisionShape<T>, pa: &Pose2<T>, b: &CollisionShape<T>, pb: &Pose2<T>) -> PairCheck<T> {
    let d = pb.position() - pa.position();
    let reach = a.bounding_radius() + b.bounding_radius();
    if d.norm_squared() >= reach * reach {
        return PairCheck::Separated;
    }
    match (a.kind, b.kind) {
        (ShapeKind::Circle { .. }, ShapeKind::Circle { .. }) => {
            circle_circle(a.bounding_radius(), b.bounding_radius(), d)
        }
        (ShapeKind::Box { .. }, ShapeKind::Circle { .. }) => box_circle(a, pa, b.bounding_radius(), pb.position()),
        (ShapeKind::Circle { .. }, ShapeKind::Box { .. }) => {
            match box_circle(b, pb, a.bounding_radius(), pa.position()) {
                PairCheck::Colliding { depth, normal } => PairCheck::Colliding { depth, normal: -normal },
                PairCheck::Separated => PairCheck::Separated,
            }
        }
        (ShapeKind::Box { .. }, ShapeKind::Box { .. }) => box_box(a, pa, b, pb),
    }
}

fn circle_circle<T: Real>(ra: T, rb: T, d: Vector2<T>) -> PairCheck<T> {
    let dist = d.norm();
    let r = ra + rb;
    if dist >= r {
        return PairCheck::Separated;
    }
    let normal = d.normalized().unwrap_or(Vector2::new(T::one(), T::zero()));
    PairCheck::Colliding { depth: r - dist, normal }
}

/// Inflated box against a circle of (already inflated) radius `r`; normal from box to circle.
fn box_circle<T: Real>(bx: &CollisionShape<T>, pose: &Pose2<T>, r: T, center: Vector2<T>) -> PairCheck<T> {
    let (hx, hy) = bx.inflated_half_extents();
    let p = pose.inverse_transform_point(center);
    let inside = p.x.abs() <= hx && p.y.abs() <= hy;
    if inside {
        let dx = hx - p.x.abs();
        let dy = hy - p.y.abs();
        let sign = |v: T| if v < T::zero() { -T::one() } else { T::one() };
        let (depth, local_n) = if dx <= dy {
            (dx + r, Vector2::new(sign(p.x), T::zero()))
        } else {
            (dy + r, Vector2::new(T::zero(), sign(p.y)))
        };
        return PairCheck::Colliding { depth, normal: local_n.rotate(pose.yaw) };
    }
    let q = Vector2::new(p.x.max(-hx).min(hx), p.y.max(-hy).min(hy));
    let diff = p - q;
    let dist = diff.norm();
    if dist >= r {
        return PairCheck::Separated;
    }
    let local_n = diff.normalized().unwrap_or(Vector2::new(T::one(), T::zero()));
    PairCheck::Colliding { depth: r - dist, normal: local_n.rotate(pose.yaw) }
}

/// Separating-axis test over the four face normals of two inflated boxes.
fn box_box<T: Real>(a: &CollisionShape<T>, pa: &Pose2<T>, b: &CollisionShape<T>, pb: &Pose2<T>) -> PairCheck<T> {
    let (ahx, ahy) = a.inflated_half_extents();
    let (bhx, bhy) = b.inflated_half_extents();
    let (sa, ca) = pa.yaw.sin_cos();
    let (sb, cb) = pb.yaw.sin_cos();
    let ax = Vector2::new(ca, sa);
    let ay = Vector2::new(-sa, ca);
    let bx = Vector2::new(cb, sb);
    let by = Vector2::new(-sb, cb);
    let d = pb.position() - pa.position();

    let mut best_depth = T::infinity();
    let mut best_normal = ax;
    for axis in [ax, ay, bx, by] {
        let ra = ahx * ax.dot(axis).abs() + ahy * ay.dot(axis).abs();
        let rb = bhx * bx.dot(axis).abs() + bhy * by.dot(axis).abs();
        let dist = d.dot(axis);
        let overlap = ra + rb - dist.abs();
        if overlap <= T::zero() {
            return PairCheck::Separated;
        }
        if overlap < best_depth {
            best_depth = overlap;
            best_normal = if dist < T::zero() { -axis } else { axis };
        }
    }
    PairCheck::Colliding { depth: best_depth, normal: best_normal }
}

/// Signed distance between the inflated footprints: positive gap when separated,
/// minus the penetration depth when colliding.
pub fn separation<T: Real>(a: &CollisionShape<T>, pa: &Pose2<T>, b: &CollisionShape<T>, pb: &Pose2<T>) -> T {
    if let PairCheck::Colliding { depth, .. } = check_pair(a, pa, b, pb) {
        return -depth;
    }
    match (a.kind, b.kind) {
        (ShapeKind::Circle { .. }, ShapeKind::Circle { .. }) => {
            (pb.position() - pa.position()).norm() - a.bounding_radius() - b.bounding_radius()
        }
        (ShapeKind::Box { .. }, ShapeKind::Circle { .. }) => {
            box_point_distance(a, pa, pb.position()) - b.bounding_radius()
        }
        (ShapeKind::Circle { .. }, ShapeKind::Box { .. }) => {
            box_point_distance(b, pb, pa.position()) - a.bounding_radius()
        }
        (ShapeKind::Box { .. }, ShapeKind::Box { .. }) => {
            let ca = a.inflated_corners(pa).expect("box");
            let cb = b.inflated_corners(pb).expect("box");
            polygon_gap(&ca, &cb).min(polygon_gap(&cb, &ca))
        }
    }
}

fn box_point_distance<T: Real>(bx: &CollisionShape<T>, pose: &Pose2<T>, p: Vector2<T>) -> T {
    let (hx, hy) = bx.inflated_half_extents();
    let l = pose.inverse_transform_point(p);
    let dx = (l.x.abs() - hx).max(T::zero());
    let dy = (l.y.abs() - hy).max(T::zero());
    dx.hypot(dy)
}

/// Minimum distance from the vertices of `a` to the edges of `b`.
fn polygon_gap<T: Real>(a: &[Vector2<T>], b: &[Vector2<T>]) -> T {
    let mut best = T::infinity();
    for &p in a {
        for i in 0..b.len() {
            let s = b[i];
            let e = b[(i + 1) % b.len()];
            best = best.min(point_segment_distance(p, s, e));
        }
    }
    best
}

pub(crate) fn point_segment_distance<T: Real>(p: Vector2<T>, s: Vector2<T>, e: Vector2<T>) -> T {
    let d = e - s;
    let len2 = d.norm_squared();
    let t = if len2 > T::zero() { ((p - s).dot(d) / len2).max(T::zero()).min(T::one()) } else { T::zero() };
    (p - (s + d * t)).norm()
}
