//! Planar rigid-body stepping with clamped acceleration commands, impedance-held
//! levitation channels and sequential-impulse contacts.

mod contact;
mod control;
mod solver;
mod state;
mod step;

pub use contact::{piece_contacts, ContactManifold, ContactPoint};
pub use control::{clamp_acceleration, clamp_command, hold_acceleration, impedance_wrench, HoldWrench};
pub use solver::{solve_contacts, BodyPair, GroundFriction, SolverBody};
pub use state::{MoverState, ObjectState, Pose6, Twist2, Twist6, WorldState};
pub use step::{step_world, Commands, DynamicsError, Simulator, StepInfo, StepTimings};
