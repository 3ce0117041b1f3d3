//! Planar footprints of pushable objects as unions of disjoint convex pieces.

use crate::collision::CollisionShape;
use crate::geometry::{rect_corners, Pose2, Vector2};
use crate::num::Real;

use super::types::{ObjectKind, ObjectSpec};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PieceShape<T> {
    Rect { half_x: T, half_y: T },
    Circle { radius: T },
}

/// One convex piece, axis-aligned in the body frame and centered at `offset`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Piece<T> {
    pub shape: PieceShape<T>,
    pub offset: Vector2<T>,
}

impl<T: Real> Piece<T> {
    pub fn area(&self) -> T {
        match self.shape {
            PieceShape::Rect { half_x, half_y } => T::lit(4.0) * half_x * half_y,
            PieceShape::Circle { radius } => T::PI() * radius * radius,
        }
    }

    /// World pose of the piece for a body at `body`.
    pub fn world_pose(&self, body: &Pose2<T>) -> Pose2<T> {
        let p = body.transform_point(self.offset);
        Pose2 { x: p.x, y: p.y, yaw: body.yaw }
    }

    /// Collision shape of this piece, inflated by `margin`.
    pub fn collision_shape(&self, margin: T) -> CollisionShape<T> {
        match self.shape {
            PieceShape::Rect { half_x, half_y } => CollisionShape::new_box(half_x, half_y, margin),
            PieceShape::Circle { radius } => CollisionShape::new_circle(radius, margin),
        }
    }

    /// Counter-clockwise polygon of a rectangle piece; `None` for circles.
    pub fn polygon(&self, body: &Pose2<T>) -> Option<[Vector2<T>; 4]> {
        match self.shape {
            PieceShape::Rect { half_x, half_y } => Some(rect_corners(&self.world_pose(body), half_x, half_y)),
            PieceShape::Circle { .. } => None,
        }
    }

    /// Whether the body-frame point lies inside the piece.
    pub fn contains_local(&self, p: Vector2<T>) -> bool {
        let d = p - self.offset;
        match self.shape {
            PieceShape::Rect { half_x, half_y } => d.x.abs() < half_x && d.y.abs() < half_y,
            PieceShape::Circle { radius } => d.norm_squared() < radius * radius,
        }
    }
}

/// Object footprint with its area centroid at the body origin.
#[derive(Clone, Debug, PartialEq)]
pub struct Footprint<T> {
    pub pieces: Vec<Piece<T>>,
}

impl<T: Real> Footprint<T> {
    pub fn area(&self) -> T {
        self.pieces.iter().fold(T::zero(), |acc, p| acc + p.area())
    }

    /// Yaw moment of inertia about the body origin for a uniform density plate.
    pub fn yaw_inertia(&self, mass: T) -> T {
        let area = self.area();
        let twelfth = T::one() / T::lit(12.0);
        self.pieces.iter().fold(T::zero(), |acc, p| {
            let m = mass * p.area() / area;
            let own = match p.shape {
                PieceShape::Rect { half_x, half_y } => {
                    m * (T::lit(4.0) * half_x * half_x + T::lit(4.0) * half_y * half_y) * twelfth
                }
                PieceShape::Circle { radius } => m * radius * radius * T::half(),
            };
            acc + own + m * p.offset.norm_squared()
        })
    }

    pub fn bounding_radius(&self) -> T {
        self.pieces.iter().fold(T::zero(), |acc, p| {
            let r = match p.shape {
                PieceShape::Rect { half_x, half_y } => half_x.hypot(half_y),
                PieceShape::Circle { radius } => radius,
            };
            acc.max(p.offset.norm() + r)
        })
    }

    /// Body-frame half-extent along +x, used as the pushing standoff.
    pub fn half_extent_x(&self) -> T {
        self.pieces.iter().fold(T::zero(), |acc, p| {
            let e = match p.shape {
                PieceShape::Rect { half_x, .. } => half_x,
                PieceShape::Circle { radius } => radius,
            };
            acc.max((p.offset.x + e).abs()).max((p.offset.x - e).abs())
        })
    }

    pub fn contains_local(&self, p: Vector2<T>) -> bool {
        self.pieces.iter().any(|piece| piece.contains_local(p))
    }
}

/// Why a set of object dimensions is not usable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionError(pub String);

fn rect<T: Real>(x0: T, y0: T, x1: T, y1: T) -> Piece<T> {
    let h = T::half();
    Piece {
        shape: PieceShape::Rect { half_x: (x1 - x0) * h, half_y: (y1 - y0) * h },
        offset: Vector2::new((x0 + x1) * h, (y0 + y1) * h),
    }
}

/// Decomposes an object into disjoint pieces and recenters them on the area centroid.
pub fn object_footprint<T: Real>(kind: ObjectKind, dims: &[T]) -> Result<Footprint<T>, DimensionError> {
    if dims.len() != kind.dimension_count() {
        return Err(DimensionError(format!(
            "{kind:?} needs {} dimensions, got {}",
            kind.dimension_count(),
            dims.len()
        )));
    }
    if let Some(bad) = dims.iter().find(|d| !(**d > T::zero() && d.is_finite())) {
        return Err(DimensionError(format!("{kind:?} dimension {bad} must be positive")));
    }
    let h = T::half();
    let pieces = match kind {
        ObjectKind::Box => vec![rect(-dims[0] * h, -dims[1] * h, dims[0] * h, dims[1] * h)],
        ObjectKind::Cylinder => vec![Piece { shape: PieceShape::Circle { radius: dims[0] }, offset: Vector2::zero() }],
        ObjectKind::TShape => {
            let (sl, sw, bl, bw) = (dims[0], dims[1], dims[2], dims[3]);
            vec![rect(-bl * h, T::zero(), bl * h, bw), rect(-sw * h, -sl, sw * h, T::zero())]
        }
        ObjectKind::LShape => {
            let (sl, sw, bl, bw) = (dims[0], dims[1], dims[2], dims[3]);
            vec![rect(T::zero(), T::zero(), sw, sl), rect(sw, T::zero(), sw + bl, bw)]
        }
        ObjectKind::XShape => {
            let (sl, sw, bl, bw) = (dims[0], dims[1], dims[2], dims[3]);
            if sl <= bw {
                return Err(DimensionError("x_shape stem_length must exceed bar_width".into()));
            }
            vec![
                rect(-bl * h, -bw * h, bl * h, bw * h),
                rect(-sw * h, bw * h, sw * h, sl * h),
                rect(-sw * h, -sl * h, sw * h, -bw * h),
            ]
        }
    };
    let area = pieces.iter().fold(T::zero(), |a, p| a + p.area());
    let centroid = pieces.iter().fold(Vector2::zero(), |c, p| c + p.offset * (p.area() / area));
    let pieces = pieces.into_iter().map(|p| Piece { offset: p.offset - centroid, ..p }).collect();
    Ok(Footprint { pieces })
}

impl<T: Real> ObjectSpec<T> {
    pub fn footprint(&self) -> Result<Footprint<T>, DimensionError> {
        object_footprint(self.kind, &self.dimensions)
    }
}
