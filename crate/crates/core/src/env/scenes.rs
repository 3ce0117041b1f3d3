//! Built-in scenes for the task families.

use crate::collision::CollisionShape;
use crate::geometry::Pose2;
use crate::scene::{generate_grid_scene, BodyId, MoverShapeKind, ObjectSpec, ObstacleSpec, PhysicsParams, SceneConfig};
use crate::Scene;

use super::task::TaskFamily;

pub const BUILTIN_SCENES: [&str; 4] = ["push_box", "push_t", "push_obstacles", "grid4x3_3movers"];

fn single_mover(nx: usize, ny: usize) -> Scene {
    generate_grid_scene(nx, ny, 1, MoverShapeKind::Box, PhysicsParams::default()).expect("built-in grid fits one mover")
}

/// 4x4 tiles, one mover, one 0.1 m box.
pub fn push_box_scene() -> Scene {
    let mut s = single_mover(4, 4);
    let c = s.grid.tile_center(2, 2);
    s.objects.push(ObjectSpec::default_box(BodyId(1), Pose2::new(c.x, c.y, 0.0)));
    s
}

/// 4x4 tiles, one mover, one T-shaped object.
pub fn push_t_scene() -> Scene {
    let mut s = single_mover(4, 4);
    let c = s.grid.tile_center(2, 2);
    s.objects.push(ObjectSpec::default_t(BodyId(1), Pose2::new(c.x, c.y, 0.0)));
    s
}

/// 4x4 tiles, one mover, one box and two static square obstacles.
pub fn push_obstacles_scene() -> Scene {
    let mut s = push_box_scene();
    let shape = CollisionShape::new_box(0.04, 0.04, 0.0);
    for (k, (x, y)) in [(0.36, 0.6), (0.6, 0.36)].into_iter().enumerate() {
        s.obstacles.push(ObstacleSpec {
            id: BodyId(2 + k as u32),
            shape,
            pose: Pose2::new(x, y, 0.0),
            is_static: true,
        });
    }
    s
}

/// 4x3 tiles with three movers.
pub fn traj_scene() -> Scene {
    generate_grid_scene(4, 3, 3, MoverShapeKind::Box, PhysicsParams::default()).expect("4x3 grid fits three movers")
}

pub fn builtin_scene(name: &str) -> Option<Scene> {
    match name {
        "push_box" => Some(push_box_scene()),
        "push_t" => Some(push_t_scene()),
        "push_obstacles" => Some(push_obstacles_scene()),
        "grid4x3_3movers" => Some(traj_scene()),
        _ => None,
    }
}

pub fn default_scene(family: TaskFamily) -> SceneConfig<f64> {
    match family {
        TaskFamily::PushBox => push_box_scene(),
        TaskFamily::PushT => push_t_scene(),
        TaskFamily::PushWithObstacles => push_obstacles_scene(),
        TaskFamily::MultiMoverTrajectory => traj_scene(),
    }
}
