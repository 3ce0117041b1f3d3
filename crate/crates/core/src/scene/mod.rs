//! Declarative scene description: tile grid, movers, objects, obstacles and physics parameters.

mod error;
mod footprint;
mod format;
mod generate;
mod types;
mod validate;

pub use error::SceneError;
pub use footprint::{object_footprint, DimensionError, Footprint, Piece, PieceShape};
pub use format::{parse_scene, parse_scene_with, serialize_scene, ParseOptions, ParsedScene};
pub use generate::{generate_grid_scene, generate_grid_scene_with_tile, MoverShapeKind};
pub use types::*;
pub use validate::{validate_scene, ValidationReport, Violation, ViolationCode};
