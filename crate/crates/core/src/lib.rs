//! Planar maglev mover swarm simulator with task environments, scripted
//! baselines and a benchmark harness.
//!
//! The geometry, collision, scene and dynamics layers are generic over the
//! scalar type ([`num::Real`]). Environments, baselines and benchmarks run on
//! `f64`; the aliases below name the common concrete types.

pub mod baselines;
pub mod benchmarks;
pub mod collision;
pub mod dynamics;
pub mod env;
pub mod geometry;
pub mod num;
pub mod scene;

pub use num::Real;

pub type Vec2 = geometry::Vector2<f64>;
pub type Vec2f = geometry::Vector2<f32>;
pub type Pose2d = geometry::Pose2<f64>;
pub type Pose2f = geometry::Pose2<f32>;
pub type Scene = scene::SceneConfig<f64>;
pub type Scenef = scene::SceneConfig<f32>;
pub type World = dynamics::WorldState<f64>;
pub type Worldf = dynamics::WorldState<f32>;
pub type Sim = dynamics::Simulator<f64>;
pub type Simf = dynamics::Simulator<f32>;
