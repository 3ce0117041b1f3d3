use crate::geometry::{circle_intersection_area, convex_intersection_area, Pose2};
use crate::num::Real;
use crate::scene::{Footprint, PieceShape};

/// Fraction of the object footprint at `object_pose` that overlaps the same
/// footprint placed at `goal_pose`.
///
/// Pieces of a footprint are disjoint, so summing pairwise piece overlaps is exact.
pub fn coverage<T: Real>(footprint: &Footprint<T>, object_pose: &Pose2<T>, goal_pose: &Pose2<T>) -> T {
    let area = footprint.area();
    if area <= T::zero() {
        return T::zero();
    }
    let mut overlap = T::zero();
    for a in &footprint.pieces {
        let pa = a.world_pose(object_pose);
        for b in &footprint.pieces {
            let pb = b.world_pose(goal_pose);
            let reach = a.collision_shape(T::zero()).bounding_radius() + b.collision_shape(T::zero()).bounding_radius();
            if (pb.position() - pa.position()).norm_squared() >= reach * reach {
                continue;
            }
            overlap = overlap
                + match (a.shape, b.shape) {
                    (PieceShape::Circle { radius: ra }, PieceShape::Circle { radius: rb }) => {
                        circle_intersection_area(ra, rb, (pb.position() - pa.position()).norm())
                    }
                    (PieceShape::Rect { .. }, PieceShape::Rect { .. }) => {
                        let qa = a.polygon(object_pose).expect("rect piece");
                        let qb = b.polygon(goal_pose).expect("rect piece");
                        convex_intersection_area(&qa, &qb)
                    }
                    // footprints mix circles and rectangles only across kinds
                    _ => T::zero(),
                };
        }
    }
    (overlap / area).max(T::zero()).min(T::one())
}
