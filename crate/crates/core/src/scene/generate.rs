use serde::{Deserialize, Serialize};

use crate::geometry::Pose2;
use crate::num::Real;

use super::error::SceneError;
use super::types::{BodyId, MoverSpec, PhysicsParams, SceneConfig, TileGrid, DEFAULT_TILE_SIZE};

/// Collision shape used to approximate movers in generated scenes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoverShapeKind {
    Box,
    Circle,
}

impl MoverShapeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MoverShapeKind::Box => "box",
            MoverShapeKind::Circle => "circle",
        }
    }
}

impl std::str::FromStr for MoverShapeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "box" => Ok(MoverShapeKind::Box),
            "circle" => Ok(MoverShapeKind::Circle),
            other => Err(format!("unknown shape `{other}` (expected box or circle)")),
        }
    }
}

/// Builds a full `nx × ny` grid of default tiles with one mover on each of the
/// first `n_movers` tile centers in row-major order.
pub fn generate_grid_scene<T: Real>(
    nx: usize,
    ny: usize,
    n_movers: usize,
    shape: MoverShapeKind,
    physics: PhysicsParams<T>,
) -> Result<SceneConfig<T>, SceneError> {
    generate_grid_scene_with_tile(nx, ny, T::lit(DEFAULT_TILE_SIZE), n_movers, shape, physics)
}

pub fn generate_grid_scene_with_tile<T: Real>(
    nx: usize,
    ny: usize,
    tile_size: T,
    n_movers: usize,
    shape: MoverShapeKind,
    physics: PhysicsParams<T>,
) -> Result<SceneConfig<T>, SceneError> {
    if nx == 0 || ny == 0 {
        return Err(SceneError::InvalidParams(format!("grid must be at least 1x1, got {nx}x{ny}")));
    }
    if !(tile_size > T::zero() && tile_size.is_finite()) {
        return Err(SceneError::InvalidParams(format!("tile_size must be positive, got {tile_size}")));
    }
    if !(physics.dt > T::zero() && physics.v_max > T::zero() && physics.a_max > T::zero()) {
        return Err(SceneError::InvalidParams("dt, v_max and a_max must be positive".into()));
    }
    if n_movers > nx * ny {
        return Err(SceneError::TooManyMovers { n_movers, tiles: nx * ny });
    }
    let grid = TileGrid::new(nx, ny, tile_size);
    let movers = (0..n_movers)
        .map(|k| {
            let c = grid.tile_center(k % nx, k / nx);
            let pose = Pose2::new(c.x, c.y, T::zero());
            let id = BodyId(k as u32);
            match shape {
                MoverShapeKind::Box => MoverSpec::default_box(id, pose),
                MoverShapeKind::Circle => MoverSpec::default_circle(id, pose),
            }
        })
        .collect();
    Ok(SceneConfig { grid, physics, movers, objects: Vec::new(), obstacles: Vec::new(), seed: 0 })
}
