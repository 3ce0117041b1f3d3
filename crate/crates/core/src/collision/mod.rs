//! Margin-aware collision queries, tile boundary checks and event reporting.

mod broadphase;
mod narrow;
mod report;
mod shape;
mod tiles;

pub use broadphase::{broadphase_pairs, candidate_index_pairs};
pub use narrow::{check_pair, separation, PairCheck};
pub(crate) use report::collision_report_with;
pub use report::{colliding_index_pairs, collision_report, BodyEvent, CollisionEvents, PairEvent};
pub use shape::{CollisionShape, ShapeDoc, ShapeKind, AXIS_ALIGNED_EPS};
pub use tiles::{aabb_coverage, tile_coverage, TileCoverage};
