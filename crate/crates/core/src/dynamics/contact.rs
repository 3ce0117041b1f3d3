//! Contact manifolds between physical (margin-free) convex pieces.

use serde::{Deserialize, Serialize};

use crate::collision::{check_pair, CollisionShape, PairCheck, ShapeKind};
use crate::geometry::{rect_corners, Pose2, Vector2};
use crate::num::Real;
use crate::scene::BodyId;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ContactPoint<T> {
    pub position: Vector2<T>,
    /// Unit normal pointing from body `a` to body `b`.
    pub normal: Vector2<T>,
    pub depth: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ContactManifold<T> {
    pub a: BodyId,
    pub b: BodyId,
    pub points: Vec<ContactPoint<T>>,
    pub friction: T,
}

/// Appends the contact points (at most two) between two margin-free pieces.
pub fn piece_contacts<T: Real>(
    a: &CollisionShape<T>,
    pa: &Pose2<T>,
    b: &CollisionShape<T>,
    pb: &Pose2<T>,
    out: &mut Vec<ContactPoint<T>>,
) {
    match (a.kind, b.kind) {
        (ShapeKind::Box { half_x: ahx, half_y: ahy }, ShapeKind::Box { half_x: bhx, half_y: bhy }) => {
            let d = pb.position() - pa.position();
            let reach = ahx.hypot(ahy) + bhx.hypot(bhy);
            if d.norm_squared() >= reach * reach {
                return;
            }
            box_box(&Quad::new(pa, ahx, ahy), &Quad::new(pb, bhx, bhy), out);
        }
        _ => {
            let PairCheck::Colliding { depth, normal } = check_pair(a, pa, b, pb) else { return };
            let point = match (a.kind, b.kind) {
                (ShapeKind::Circle { radius }, _) => pa.position() + normal * (radius - depth * T::half()),
                (_, ShapeKind::Circle { radius }) => pb.position() - normal * (radius - depth * T::half()),
                _ => unreachable!("box-box handled above"),
            };
            out.push(ContactPoint { position: point, normal, depth });
        }
    }
}

struct Quad<T> {
    v: [Vector2<T>; 4],
    n: [Vector2<T>; 4],
}

impl<T: Real> Quad<T> {
    fn new(pose: &Pose2<T>, hx: T, hy: T) -> Self {
        let v = rect_corners(pose, hx, hy);
        let (s, c) = pose.yaw.sin_cos();
        // outward normals of the edges v[i] -> v[i+1] of a CCW rectangle
        let n = [Vector2::new(s, -c), Vector2::new(c, s), Vector2::new(-s, c), Vector2::new(-c, -s)];
        Self { v, n }
    }
}

fn max_separation<T: Real>(p1: &Quad<T>, p2: &Quad<T>) -> (T, usize) {
    let mut best = (T::neg_infinity(), 0);
    for i in 0..4 {
        let mut s = T::infinity();
        for j in 0..4 {
            s = s.min(p1.n[i].dot(p2.v[j] - p1.v[i]));
        }
        if s > best.0 {
            best = (s, i);
        }
    }
    best
}

/// Keeps the part of the segment with `n . p <= offset`.
fn clip_segment<T: Real>(seg: &[Vector2<T>], n: Vector2<T>, offset: T) -> Vec<Vector2<T>> {
    let mut out = Vec::with_capacity(2);
    let d0 = n.dot(seg[0]) - offset;
    let d1 = n.dot(seg[1]) - offset;
    if d0 <= T::zero() {
        out.push(seg[0]);
    }
    if d1 <= T::zero() {
        out.push(seg[1]);
    }
    if d0 * d1 < T::zero() {
        let t = d0 / (d0 - d1);
        out.push(seg[0] + (seg[1] - seg[0]) * t);
    }
    out
}

/// Reference-face / incident-face clipping between two rectangles.
fn box_box<T: Real>(a: &Quad<T>, b: &Quad<T>, out: &mut Vec<ContactPoint<T>>) {
    let (sa, ea) = max_separation(a, b);
    if sa > T::zero() {
        return;
    }
    let (sb, eb) = max_separation(b, a);
    if sb > T::zero() {
        return;
    }
    let tol = T::lit(1e-7);
    let (rf, inc, edge, flip) = if sb > sa + tol { (b, a, eb, true) } else { (a, b, ea, false) };
    let nref = rf.n[edge];

    let mut ie = 0;
    let mut min_dot = T::infinity();
    for i in 0..4 {
        let d = nref.dot(inc.n[i]);
        if d < min_dot {
            min_dot = d;
            ie = i;
        }
    }
    let seg = [inc.v[ie], inc.v[(ie + 1) % 4]];
    let v1 = rf.v[edge];
    let v2 = rf.v[(edge + 1) % 4];
    let Some(t) = (v2 - v1).normalized() else { return };
    let seg = clip_segment(&seg, -t, -t.dot(v1));
    if seg.len() < 2 {
        return;
    }
    let seg = clip_segment(&seg, t, t.dot(v2));
    if seg.len() < 2 {
        return;
    }
    let normal = if flip { -nref } else { nref };
    for p in seg {
        let sep = nref.dot(p - v1);
        if sep <= T::zero() {
            out.push(ContactPoint { position: p - nref * (sep * T::half()), normal, depth: -sep });
        }
    }
}
