//! Boundary checks: is a footprint fully above present tiles?

use crate::geometry::{Aabb, Pose2, Vector2};
use crate::num::Real;
use crate::scene::TileGrid;

use super::shape::{CollisionShape, ShapeKind};

/// Slack, in tile units, that keeps footprints touching a tile edge from
/// registering an overlap with the neighbouring cell.
const CELL_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TileCoverage<T> {
    Within,
    /// `violation_area_hint` is the area of the footprint's bounding box that is
    /// not above a present tile.
    OffTiles {
        violation_area_hint: T,
    },
}

impl<T> TileCoverage<T> {
    pub fn is_within(&self) -> bool {
        matches!(self, TileCoverage::Within)
    }
}

/// Checks that the margin-inflated footprint lies inside the union of present tiles.
///
/// Exact for circles and axis-aligned boxes; rotated boxes are tested through
/// their bounding box, which never reports a false `Within`.
pub fn tile_coverage<T: Real>(shape: &CollisionShape<T>, pose: &Pose2<T>, grid: &TileGrid<T>) -> TileCoverage<T> {
    let aabb = shape.aabb(pose);
    match shape.kind {
        ShapeKind::Box { .. } => aabb_coverage(&aabb, grid),
        ShapeKind::Circle { .. } => circle_coverage(pose.position(), shape.bounding_radius(), &aabb, grid),
    }
}

/// Coverage test for an arbitrary axis-aligned region.
pub fn aabb_coverage<T: Real>(aabb: &Aabb<T>, grid: &TileGrid<T>) -> TileCoverage<T> {
    let (x0, x1, y0, y1) = cell_range(aabb, grid);
    let all_present = (y0..=y1).all(|iy| (x0..=x1).all(|ix| grid.is_present(ix, iy)));
    if all_present {
        TileCoverage::Within
    } else {
        TileCoverage::OffTiles { violation_area_hint: uncovered_area(aabb, grid, (x0, x1, y0, y1)) }
    }
}

fn circle_coverage<T: Real>(c: Vector2<T>, r: T, aabb: &Aabb<T>, grid: &TileGrid<T>) -> TileCoverage<T> {
    let range = cell_range(aabb, grid);
    let (x0, x1, y0, y1) = range;
    let slack = T::lit(CELL_EPS) * grid.tile_size;
    for iy in y0..=y1 {
        for ix in x0..=x1 {
            if grid.is_present(ix, iy) {
                continue;
            }
            let cell = grid.tile_rect(ix, iy);
            let dx = (cell.min.x - c.x).max(c.x - cell.max.x).max(T::zero());
            let dy = (cell.min.y - c.y).max(c.y - cell.max.y).max(T::zero());
            if dx.hypot(dy) < r - slack {
                return TileCoverage::OffTiles { violation_area_hint: uncovered_area(aabb, grid, range) };
            }
        }
    }
    TileCoverage::Within
}

/// Inclusive range of cell indices whose interior overlaps the box.
fn cell_range<T: Real>(aabb: &Aabb<T>, grid: &TileGrid<T>) -> (i64, i64, i64, i64) {
    let eps = T::lit(CELL_EPS);
    let ts = grid.tile_size;
    let lo = |v: T, o: T| ((v - o) / ts + eps).floor().to_i64().unwrap_or(i64::MIN / 4);
    let hi = |v: T, o: T| ((v - o) / ts - eps).ceil().to_i64().unwrap_or(i64::MAX / 4) - 1;
    (
        lo(aabb.min.x, grid.origin.x),
        hi(aabb.max.x, grid.origin.x),
        lo(aabb.min.y, grid.origin.y),
        hi(aabb.max.y, grid.origin.y),
    )
}

fn uncovered_area<T: Real>(aabb: &Aabb<T>, grid: &TileGrid<T>, (x0, x1, y0, y1): (i64, i64, i64, i64)) -> T {
    let mut covered = T::zero();
    for iy in y0.max(0)..=y1.min(grid.ny as i64 - 1) {
        for ix in x0.max(0)..=x1.min(grid.nx as i64 - 1) {
            if grid.is_present(ix, iy) {
                if let Some(i) = grid.tile_rect(ix, iy).intersection(aabb) {
                    covered = covered + i.area();
                }
            }
        }
    }
    (aabb.area() - covered).max(T::zero())
}
