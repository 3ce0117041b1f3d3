//! Candidate-pair generation ahead of the narrowphase.

use std::collections::HashMap;

use crate::geometry::{Pose2, Vector2};
use crate::num::Real;
use crate::scene::{BodyId, BroadphaseMode};

use super::shape::CollisionShape;

/// Candidate index pairs `(i, j)` with `i < j` for bodies at `centers` with
/// bounding radii `radii`. Grid mode never drops a pair whose bounding
/// circles overlap.
pub fn candidate_index_pairs<T: Real>(
    centers: &[Vector2<T>],
    radii: &[T],
    mode: BroadphaseMode,
) -> Vec<(usize, usize)> {
    let n = centers.len();
    match mode {
        BroadphaseMode::Naive => {
            let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
            for i in 0..n {
                for j in i + 1..n {
                    out.push((i, j));
                }
            }
            out
        }
        BroadphaseMode::Grid => grid_pairs(centers, radii),
    }
}

fn grid_pairs<T: Real>(centers: &[Vector2<T>], radii: &[T]) -> Vec<(usize, usize)> {
    let n = centers.len();
    if n < 2 {
        return Vec::new();
    }
    // cell edge = largest bounding diameter, so overlapping bodies sit in adjacent cells
    let max_r = radii.iter().fold(T::zero(), |m, r| m.max(*r));
    let cell = (max_r * T::two()).max(T::epsilon());
    let key = |p: Vector2<T>| -> (i64, i64) {
        ((p.x / cell).floor().to_i64().unwrap_or(0), (p.y / cell).floor().to_i64().unwrap_or(0))
    };
    let keys: Vec<(i64, i64)> = centers.iter().map(|c| key(*c)).collect();
    let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::with_capacity(n);
    for (i, k) in keys.iter().enumerate() {
        cells.entry(*k).or_default().push(i);
    }
    let mut out = Vec::new();
    for (i, &(cx, cy)) in keys.iter().enumerate() {
        for dy in -1..=1 {
            for dx in -1..=1 {
                if let Some(members) = cells.get(&(cx + dx, cy + dy)) {
                    for &j in members {
                        if j > i {
                            let reach = radii[i] + radii[j];
                            if (centers[j] - centers[i]).norm_squared() < reach * reach {
                                out.push((i, j));
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Candidate unordered id pairs, each as `(smaller, larger)`, in lexicographic order.
pub fn broadphase_pairs<T: Real>(
    bodies: &[(BodyId, CollisionShape<T>, Pose2<T>)],
    mode: BroadphaseMode,
) -> Vec<(BodyId, BodyId)> {
    let centers: Vec<Vector2<T>> = bodies.iter().map(|b| b.2.position()).collect();
    let radii: Vec<T> = bodies.iter().map(|b| b.1.bounding_radius()).collect();
    let mut out: Vec<(BodyId, BodyId)> = candidate_index_pairs(&centers, &radii, mode)
        .into_iter()
        .map(|(i, j)| {
            let (a, b) = (bodies[i].0, bodies[j].0);
            if a < b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    out.sort_unstable();
    out
}
