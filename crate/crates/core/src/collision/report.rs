use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dynamics::WorldState;
use crate::geometry::{Pose2, Vector2};
use crate::num::Real;
use crate::scene::{BodyId, BroadphaseMode, Footprint, SceneConfig};

use super::broadphase::candidate_index_pairs;
use super::narrow::check_pair;
use super::shape::CollisionShape;
use super::tiles::tile_coverage;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PairEvent<T> {
    pub a: BodyId,
    pub b: BodyId,
    pub time: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BodyEvent<T> {
    pub id: BodyId,
    pub time: T,
}

/// Collisions detected at one step, grouped by category and sorted by id.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CollisionEvents<T> {
    pub mover_mover: Vec<PairEvent<T>>,
    /// `a` is the mover, `b` the obstacle.
    pub mover_obstacle: Vec<PairEvent<T>>,
    /// `a` is the object, `b` the obstacle.
    pub object_obstacle: Vec<PairEvent<T>>,
    pub mover_off_tiles: Vec<BodyEvent<T>>,
}

impl<T: Real> CollisionEvents<T> {
    pub fn is_empty(&self) -> bool {
        self.mover_mover.is_empty()
            && self.mover_obstacle.is_empty()
            && self.object_obstacle.is_empty()
            && self.mover_off_tiles.is_empty()
    }

    /// Mover-mover, mover-obstacle and object-obstacle events.
    pub fn collision_count(&self) -> usize {
        self.mover_mover.len() + self.mover_obstacle.len() + self.object_obstacle.len()
    }
}

/// Index pairs `(i, j)`, `i < j`, whose inflated footprints intersect.
pub fn colliding_index_pairs<T: Real>(
    shapes: &[CollisionShape<T>],
    poses: &[Pose2<T>],
    mode: BroadphaseMode,
) -> Vec<(usize, usize)> {
    let centers: Vec<Vector2<T>> = poses.iter().map(|p| p.position()).collect();
    let radii: Vec<T> = shapes.iter().map(|s| s.bounding_radius()).collect();
    let mut out = Vec::new();
    match mode {
        BroadphaseMode::Naive => {
            // no pair list is materialised; every pair is visited
            for i in 0..centers.len() {
                for j in i + 1..centers.len() {
                    let reach = radii[i] + radii[j];
                    if (centers[j] - centers[i]).norm_squared() < reach * reach
                        && check_pair(&shapes[i], &poses[i], &shapes[j], &poses[j]).is_colliding()
                    {
                        out.push((i, j));
                    }
                }
            }
        }
        BroadphaseMode::Grid => {
            for (i, j) in candidate_index_pairs(&centers, &radii, mode) {
                if check_pair(&shapes[i], &poses[i], &shapes[j], &poses[j]).is_colliding() {
                    out.push((i, j));
                }
            }
        }
    }
    out
}

fn ordered(a: BodyId, b: BodyId) -> (BodyId, BodyId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Categorised collision events for the current world state.
pub fn collision_report<T: Real>(
    world: &WorldState<T>,
    scene: &SceneConfig<T>,
    mode: BroadphaseMode,
) -> CollisionEvents<T> {
    let footprints: Vec<Footprint<T>> = scene.objects.iter().filter_map(|o| o.footprint().ok()).collect();
    collision_report_with(world, scene, &footprints, mode).0
}

/// As [`collision_report`], with object footprints precomputed by the caller.
/// Also returns the wall time in seconds spent on mover-mover pair checks.
pub(crate) fn collision_report_with<T: Real>(
    world: &WorldState<T>,
    scene: &SceneConfig<T>,
    footprints: &[Footprint<T>],
    mode: BroadphaseMode,
) -> (CollisionEvents<T>, f64) {
    let time = world.time;
    let shapes: Vec<CollisionShape<T>> = scene.movers.iter().map(|m| m.shape).collect();
    let poses: Vec<Pose2<T>> = world.movers.iter().map(|m| m.planar_pose()).collect();
    let mut events = CollisionEvents::default();

    let start = Instant::now();
    let pairs = colliding_index_pairs(&shapes, &poses, mode);
    let pairwise = start.elapsed().as_secs_f64();
    for (i, j) in pairs {
        let (a, b) = ordered(world.movers[i].id, world.movers[j].id);
        events.mover_mover.push(PairEvent { a, b, time });
    }
    events.mover_mover.sort_by_key(|e| (e.a, e.b));

    for (i, m) in world.movers.iter().enumerate() {
        for obs in &scene.obstacles {
            if check_pair(&shapes[i], &poses[i], &obs.shape, &obs.pose).is_colliding() {
                events.mover_obstacle.push(PairEvent { a: m.id, b: obs.id, time });
            }
        }
        if !tile_coverage(&shapes[i], &poses[i], &scene.grid).is_within() {
            events.mover_off_tiles.push(BodyEvent { id: m.id, time });
        }
    }
    events.mover_obstacle.sort_by_key(|e| (e.a, e.b));
    events.mover_off_tiles.sort_by_key(|e| e.id);

    for (obj, fp) in world.objects.iter().zip(footprints) {
        for obs in &scene.obstacles {
            let hit = fp.pieces.iter().any(|piece| {
                let shape = piece.collision_shape(T::zero());
                check_pair(&shape, &piece.world_pose(&obj.pose), &obs.shape, &obs.pose).is_colliding()
            });
            if hit {
                events.object_obstacle.push(PairEvent { a: obj.id, b: obs.id, time });
            }
        }
    }
    events.object_obstacle.sort_by_key(|e| (e.a, e.b));
    (events, pairwise)
}
