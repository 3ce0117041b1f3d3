//! Scripted controllers for every task: a PD goal seeker, reciprocal
//! multi-mover avoidance and a behind-object push controller.

mod avoid;
mod goto;
mod push;

pub use avoid::{reciprocal_avoid, AvoidConfig};
pub use goto::{pd_goto, pd_raw, track_velocity, GOTO_KD, GOTO_KP};
pub use push::{
    approach_waypoint, footprint_support, shape_support, ControllerState, Phase, PushController, PushGains,
    REALIGN_ANGLE, STANDOFF_CLEARANCE,
};
