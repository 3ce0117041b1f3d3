use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::collision::CollisionShape;
use crate::geometry::{Aabb, Pose2, Vector2};
use crate::num::Real;

/// Identifier of a mover, object or obstacle. Unique across all bodies of a scene.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BodyId(pub u32);

impl fmt::Display for BodyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Default square tile edge in meters.
pub const DEFAULT_TILE_SIZE: f64 = 0.24;
/// Default mover footprint: 155 mm square.
pub const DEFAULT_MOVER_HALF: f64 = 0.0775;
pub const DEFAULT_MOVER_MASS: f64 = 0.8;
pub const DEFAULT_MOVER_YAW_INERTIA: f64 = 0.0032;
pub const DEFAULT_HOVER_HEIGHT: f64 = 0.002;
pub const DEFAULT_SAFETY_MARGIN: f64 = 0.005;

/// Rectangular grid of square tiles, possibly with holes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TileGrid<T> {
    pub nx: usize,
    pub ny: usize,
    pub tile_size: T,
    #[serde(default)]
    pub missing: BTreeSet<(usize, usize)>,
    /// World position of the lower-left corner of tile (0, 0).
    pub origin: Vector2<T>,
}

impl<T: Real> TileGrid<T> {
    pub fn new(nx: usize, ny: usize, tile_size: T) -> Self {
        Self { nx, ny, tile_size, missing: BTreeSet::new(), origin: Vector2::zero() }
    }

    pub fn is_present(&self, ix: i64, iy: i64) -> bool {
        ix >= 0
            && iy >= 0
            && (ix as usize) < self.nx
            && (iy as usize) < self.ny
            && (self.missing.is_empty() || !self.missing.contains(&(ix as usize, iy as usize)))
    }

    pub fn tile_count(&self) -> usize {
        self.nx * self.ny - self.missing.len()
    }

    pub fn area(&self) -> T {
        T::lit(self.tile_count() as f64) * self.tile_size * self.tile_size
    }

    pub fn tile_center(&self, ix: usize, iy: usize) -> Vector2<T> {
        let h = T::half();
        Vector2::new(
            self.origin.x + (T::lit(ix as f64) + h) * self.tile_size,
            self.origin.y + (T::lit(iy as f64) + h) * self.tile_size,
        )
    }

    pub fn tile_rect(&self, ix: i64, iy: i64) -> Aabb<T> {
        let x0 = self.origin.x + T::lit(ix as f64) * self.tile_size;
        let y0 = self.origin.y + T::lit(iy as f64) * self.tile_size;
        Aabb::new(Vector2::new(x0, y0), Vector2::new(x0 + self.tile_size, y0 + self.tile_size))
    }

    /// Bounding box of the full grid, including missing tiles.
    pub fn bounds(&self) -> Aabb<T> {
        Aabb::new(
            self.origin,
            Vector2::new(
                self.origin.x + T::lit(self.nx as f64) * self.tile_size,
                self.origin.y + T::lit(self.ny as f64) * self.tile_size,
            ),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct MoverSpec<T> {
    pub id: BodyId,
    pub shape: CollisionShape<T>,
    pub mass: T,
    pub yaw_inertia: T,
    pub hover_height: T,
    pub start_pose: Pose2<T>,
}

impl<T: Real> MoverSpec<T> {
    /// Mover with the default 155 mm square footprint.
    pub fn default_box(id: BodyId, start_pose: Pose2<T>) -> Self {
        let h = T::lit(DEFAULT_MOVER_HALF);
        Self::with_shape(id, CollisionShape::new_box(h, h, T::lit(DEFAULT_SAFETY_MARGIN)), start_pose)
    }

    /// Mover approximated by the circle inscribed in the default footprint.
    pub fn default_circle(id: BodyId, start_pose: Pose2<T>) -> Self {
        let r = T::lit(DEFAULT_MOVER_HALF);
        Self::with_shape(id, CollisionShape::new_circle(r, T::lit(DEFAULT_SAFETY_MARGIN)), start_pose)
    }

    pub fn with_shape(id: BodyId, shape: CollisionShape<T>, start_pose: Pose2<T>) -> Self {
        Self {
            id,
            shape,
            mass: T::lit(DEFAULT_MOVER_MASS),
            yaw_inertia: T::lit(DEFAULT_MOVER_YAW_INERTIA),
            hover_height: T::lit(DEFAULT_HOVER_HEIGHT),
            start_pose,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    /// dimensions: `[length_x, width_y]`
    Box,
    /// dimensions: `[radius]`
    Cylinder,
    /// dimensions: `[stem_length, stem_width, bar_length, bar_width]`
    TShape,
    /// dimensions: `[stem_length, stem_width, bar_length, bar_width]`
    LShape,
    /// dimensions: `[stem_length, stem_width, bar_length, bar_width]`
    XShape,
}

impl ObjectKind {
    pub fn dimension_count(self) -> usize {
        match self {
            ObjectKind::Box => 2,
            ObjectKind::Cylinder => 1,
            ObjectKind::TShape | ObjectKind::LShape | ObjectKind::XShape => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ObjectSpec<T> {
    pub id: BodyId,
    pub kind: ObjectKind,
    pub dimensions: Vec<T>,
    pub mass: T,
    pub friction_ground: T,
    pub friction_mover: T,
    pub start_pose: Pose2<T>,
}

impl<T: Real> ObjectSpec<T> {
    /// 0.1 m cube-footprint box of 0.5 kg.
    pub fn default_box(id: BodyId, start_pose: Pose2<T>) -> Self {
        Self {
            id,
            kind: ObjectKind::Box,
            dimensions: vec![T::lit(0.1), T::lit(0.1)],
            mass: T::lit(0.5),
            friction_ground: T::lit(0.3),
            friction_mover: T::lit(0.4),
            start_pose,
        }
    }

    pub fn default_t(id: BodyId, start_pose: Pose2<T>) -> Self {
        Self {
            id,
            kind: ObjectKind::TShape,
            dimensions: vec![T::lit(0.12), T::lit(0.04), T::lit(0.16), T::lit(0.04)],
            mass: T::lit(0.5),
            friction_ground: T::lit(0.3),
            friction_mover: T::lit(0.4),
            start_pose,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ObstacleSpec<T> {
    pub id: BodyId,
    pub shape: CollisionShape<T>,
    pub pose: Pose2<T>,
    #[serde(rename = "static", default = "default_true")]
    pub is_static: bool,
}

fn default_true() -> bool {
    true
}

/// Per-degree-of-freedom impedance gains for the held mover channels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ImpedanceGains<T> {
    pub z: T,
    pub roll: T,
    pub pitch: T,
    pub yaw: T,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BroadphaseMode {
    /// All n(n-1)/2 pairs.
    Naive,
    /// Uniform spatial hash.
    #[default]
    Grid,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ContactParams<T> {
    pub iterations: u32,
    pub baumgarte: T,
    pub slop: T,
    pub restitution: T,
    /// Coulomb coefficient for mover contact against static obstacles.
    pub obstacle_friction: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PhysicsParams<T> {
    pub dt: T,
    pub v_max: T,
    pub a_max: T,
    pub gravity: T,
    #[serde(rename = "K")]
    pub stiffness: ImpedanceGains<T>,
    #[serde(rename = "D")]
    pub damping: ImpedanceGains<T>,
    /// Planar position-hold stiffness (N/m) for movers without a command.
    pub hold_stiffness: T,
    pub contact: ContactParams<T>,
    pub broadphase: BroadphaseMode,
}

impl<T: Real> Default for PhysicsParams<T> {
    /// 1 ms cycle, 2 m/s and 10 m/s² limits. Impedance gains are critically
    /// damped for the default mover (tilt inertia taken as half the yaw inertia).
    fn default() -> Self {
        let l = T::lit;
        Self {
            dt: l(0.001),
            v_max: l(2.0),
            a_max: l(10.0),
            gravity: l(9.81),
            stiffness: ImpedanceGains { z: l(2000.0), roll: l(1.0), pitch: l(1.0), yaw: l(2.0) },
            damping: ImpedanceGains { z: l(80.0), roll: l(0.08), pitch: l(0.08), yaw: l(0.16) },
            hold_stiffness: l(400.0),
            contact: ContactParams {
                iterations: 8,
                baumgarte: l(0.2),
                slop: l(1e-4),
                restitution: l(0.0),
                obstacle_friction: l(0.4),
            },
            broadphase: BroadphaseMode::Grid,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SceneConfig<T> {
    pub grid: TileGrid<T>,
    pub physics: PhysicsParams<T>,
    pub movers: Vec<MoverSpec<T>>,
    #[serde(default)]
    pub objects: Vec<ObjectSpec<T>>,
    #[serde(default)]
    pub obstacles: Vec<ObstacleSpec<T>>,
    #[serde(default)]
    pub seed: u64,
}

impl<T: Real> SceneConfig<T> {
    pub fn mover(&self, id: BodyId) -> Option<&MoverSpec<T>> {
        self.movers.iter().find(|m| m.id == id)
    }

    pub fn next_free_id(&self) -> BodyId {
        let max = self
            .movers
            .iter()
            .map(|m| m.id)
            .chain(self.objects.iter().map(|o| o.id))
            .chain(self.obstacles.iter().map(|o| o.id))
            .max();
        BodyId(max.map_or(0, |m| m.0 + 1))
    }
}
