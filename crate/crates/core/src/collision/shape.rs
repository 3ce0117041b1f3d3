use serde::{Deserialize, Serialize};

use crate::geometry::{rect_corners, Aabb, Pose2, Vector2};
use crate::num::Real;

/// Yaw below which a box footprint is treated as axis-aligned.
pub const AXIS_ALIGNED_EPS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ShapeKind<T> {
    Box { half_x: T, half_y: T },
    Circle { radius: T },
}

/// Box or circle footprint plus a safety margin that inflates it outward.
///
/// Boxes are inflated by growing their half-extents, so the inflated box has
/// square corners rather than the rounded corners of an exact Minkowski sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ShapeDoc<T>", into = "ShapeDoc<T>", bound = "T: Real")]
pub struct CollisionShape<T> {
    pub kind: ShapeKind<T>,
    pub margin: T,
}

impl<T: Real> CollisionShape<T> {
    pub fn new_box(half_x: T, half_y: T, margin: T) -> Self {
        Self { kind: ShapeKind::Box { half_x, half_y }, margin }
    }

    pub fn new_circle(radius: T, margin: T) -> Self {
        Self { kind: ShapeKind::Circle { radius }, margin }
    }

    pub fn with_margin(mut self, margin: T) -> Self {
        self.margin = margin;
        self
    }

    pub fn is_valid(&self) -> bool {
        let pos = |v: T| v > T::zero() && v.is_finite();
        let dims = match self.kind {
            ShapeKind::Box { half_x, half_y } => pos(half_x) && pos(half_y),
            ShapeKind::Circle { radius } => pos(radius),
        };
        dims && self.margin >= T::zero() && self.margin.is_finite()
    }

    /// Half-extents after margin inflation (the radius twice for circles).
    pub fn inflated_half_extents(&self) -> (T, T) {
        match self.kind {
            ShapeKind::Box { half_x, half_y } => (half_x + self.margin, half_y + self.margin),
            ShapeKind::Circle { radius } => (radius + self.margin, radius + self.margin),
        }
    }

    /// Radius of the circle centered at the pose that encloses the inflated shape.
    pub fn bounding_radius(&self) -> T {
        match self.kind {
            ShapeKind::Box { .. } => {
                let (hx, hy) = self.inflated_half_extents();
                hx.hypot(hy)
            }
            ShapeKind::Circle { radius } => radius + self.margin,
        }
    }

    /// Largest half-extent of the geometric (uninflated) shape along the local axes.
    pub fn max_half_extent(&self) -> T {
        match self.kind {
            ShapeKind::Box { half_x, half_y } => half_x.max(half_y),
            ShapeKind::Circle { radius } => radius,
        }
    }

    pub fn area(&self) -> T {
        match self.kind {
            ShapeKind::Box { half_x, half_y } => T::lit(4.0) * half_x * half_y,
            ShapeKind::Circle { radius } => T::PI() * radius * radius,
        }
    }

    /// Bounding box of the inflated footprint at `pose`.
    pub fn aabb(&self, pose: &Pose2<T>) -> Aabb<T> {
        let c = pose.position();
        match self.kind {
            ShapeKind::Circle { .. } => {
                let r = self.bounding_radius();
                Aabb::from_center_half(c, r, r)
            }
            ShapeKind::Box { .. } => {
                let (hx, hy) = self.inflated_half_extents();
                if pose.yaw.abs() < T::lit(AXIS_ALIGNED_EPS) {
                    return Aabb::from_center_half(c, hx, hy);
                }
                let (s, co) = pose.yaw.sin_cos();
                let ex = hx * co.abs() + hy * s.abs();
                let ey = hx * s.abs() + hy * co.abs();
                Aabb::from_center_half(c, ex, ey)
            }
        }
    }

    /// Corners of the inflated box, counter-clockwise. `None` for circles.
    pub fn inflated_corners(&self, pose: &Pose2<T>) -> Option<[Vector2<T>; 4]> {
        match self.kind {
            ShapeKind::Box { .. } => {
                let (hx, hy) = self.inflated_half_extents();
                Some(rect_corners(pose, hx, hy))
            }
            ShapeKind::Circle { .. } => None,
        }
    }

    /// Whether `p` lies inside the inflated footprint at `pose`.
    pub fn contains_point(&self, pose: &Pose2<T>, p: Vector2<T>) -> bool {
        match self.kind {
            ShapeKind::Circle { .. } => {
                let r = self.bounding_radius();
                (p - pose.position()).norm_squared() < r * r
            }
            ShapeKind::Box { .. } => {
                let (hx, hy) = self.inflated_half_extents();
                let l = pose.inverse_transform_point(p);
                l.x.abs() < hx && l.y.abs() < hy
            }
        }
    }

    pub fn cast<U: Real>(&self) -> CollisionShape<U> {
        let c = |v: T| U::lit(v.to_f64_lossy());
        CollisionShape {
            kind: match self.kind {
                ShapeKind::Box { half_x, half_y } => ShapeKind::Box { half_x: c(half_x), half_y: c(half_y) },
                ShapeKind::Circle { radius } => ShapeKind::Circle { radius: c(radius) },
            },
            margin: c(self.margin),
        }
    }
}

/// On-disk form: `{"kind": "box"|"circle", "params": [...], "margin": m}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ShapeDoc<T> {
    pub kind: String,
    pub params: Vec<T>,
    pub margin: T,
}

impl<T: Real> TryFrom<ShapeDoc<T>> for CollisionShape<T> {
    type Error = String;

    fn try_from(d: ShapeDoc<T>) -> Result<Self, String> {
        let kind = match (d.kind.as_str(), d.params.as_slice()) {
            ("box", [hx, hy]) => ShapeKind::Box { half_x: *hx, half_y: *hy },
            ("circle", [r]) => ShapeKind::Circle { radius: *r },
            ("box", p) => return Err(format!("box shape needs 2 params [half_x, half_y], got {}", p.len())),
            ("circle", p) => return Err(format!("circle shape needs 1 param [radius], got {}", p.len())),
            (k, _) => return Err(format!("unknown shape kind `{k}` (expected box or circle)")),
        };
        Ok(CollisionShape { kind, margin: d.margin })
    }
}

impl<T: Real> From<CollisionShape<T>> for ShapeDoc<T> {
    fn from(s: CollisionShape<T>) -> Self {
        let (kind, params) = match s.kind {
            ShapeKind::Box { half_x, half_y } => ("box", vec![half_x, half_y]),
            ShapeKind::Circle { radius } => ("circle", vec![radius]),
        };
        ShapeDoc { kind: kind.to_string(), params, margin: s.margin }
    }
}
