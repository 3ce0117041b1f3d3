use serde::{Deserialize, Serialize};

use crate::collision::{CollisionShape, ShapeKind};
use crate::dynamics::{clamp_command, MoverState, ObjectState};
use crate::num::wrap_angle;
use crate::scene::{DimensionError, Footprint, MoverSpec, ObjectSpec, PhysicsParams, PieceShape};
use crate::{Pose2d, Vec2};

use super::goto::{pd_goto, track_velocity};

/// Clearance between mover and object at the approach waypoint, m.
pub const STANDOFF_CLEARANCE: f64 = 0.01;
/// Misalignment of the pushing line that sends the mover back to approach, rad.
pub const REALIGN_ANGLE: f64 = 0.3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    #[default]
    Approach,
    Align,
    Push,
    Hold,
}

/// Per-episode controller memory.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ControllerState {
    pub phase: Phase,
    pub waypoint: Option<Vec2>,
    /// Steps spent in the current phase.
    pub phase_steps: u64,
}

impl ControllerState {
    fn enter(&mut self, phase: Phase) {
        if self.phase != phase {
            self.phase = phase;
            self.phase_steps = 0;
        }
    }
}

/// Tunables of the push controller.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PushGains {
    /// Cruise speed while pushing, m/s.
    pub push_speed: f64,
    /// Cruise speed while circling the object, m/s.
    pub orbit_speed: f64,
    /// Velocity tracking gain, 1/s.
    pub track_gain: f64,
    /// Lateral correction gain while pushing, 1/s.
    pub lateral_gain: f64,
    /// Bearing error up to which the mover heads straight for the waypoint, rad.
    pub direct_bearing: f64,
    /// Distance to the waypoint that ends the approach, m.
    pub waypoint_tolerance: f64,
    /// Object-goal distance at which the controller stops, m.
    pub hold_distance: f64,
    /// Rotate the object towards the goal yaw while pushing.
    pub yaw_nudge: bool,
}

impl Default for PushGains {
    fn default() -> Self {
        Self {
            push_speed: 0.25,
            orbit_speed: 0.4,
            track_gain: 12.0,
            lateral_gain: 6.0,
            direct_bearing: 0.5,
            waypoint_tolerance: 0.01,
            hold_distance: 0.005,
            yaw_nudge: false,
        }
    }
}

/// Distance from a footprint's reference point to its boundary along `dir` (world frame).
pub fn footprint_support(fp: &Footprint<f64>, yaw: f64, dir: Vec2) -> f64 {
    let l = dir.rotate(-yaw);
    fp.pieces
        .iter()
        .map(|p| {
            let c = p.offset.dot(l);
            match p.shape {
                PieceShape::Rect { half_x, half_y } => c + half_x * l.x.abs() + half_y * l.y.abs(),
                PieceShape::Circle { radius } => c + radius * l.norm(),
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Support distance of a margin-free mover shape along `dir`.
pub fn shape_support(shape: &CollisionShape<f64>, yaw: f64, dir: Vec2) -> f64 {
    let l = dir.rotate(-yaw);
    match shape.kind {
        ShapeKind::Box { half_x, half_y } => half_x * l.x.abs() + half_y * l.y.abs(),
        ShapeKind::Circle { radius } => radius * l.norm(),
    }
}

/// Point behind the object on the object-goal line at
/// `object half-extent + mover half-extent + clearance`.
pub fn approach_waypoint(object: Vec2, goal: Vec2, object_half: f64, mover_half: f64) -> Vec2 {
    let dir = (goal - object).normalized().unwrap_or(Vec2::new(1.0, 0.0));
    object - dir * (object_half + mover_half + STANDOFF_CLEARANCE)
}

/// Behind-object pushing controller for a single mover.
#[derive(Clone, Debug)]
pub struct PushController {
    pub state: ControllerState,
    pub gains: PushGains,
    footprint: Footprint<f64>,
    mover_shape: CollisionShape<f64>,
    params: PhysicsParams<f64>,
    /// Acceleration that balances the object's sliding friction, m/s².
    feedforward: f64,
}

impl PushController {
    pub fn new(
        object: &ObjectSpec<f64>,
        mover: &MoverSpec<f64>,
        params: &PhysicsParams<f64>,
    ) -> Result<Self, DimensionError> {
        Ok(Self {
            state: ControllerState::default(),
            gains: PushGains::default(),
            footprint: object.footprint()?,
            mover_shape: mover.shape.with_margin(0.0),
            params: *params,
            feedforward: object.friction_ground * object.mass * params.gravity / mover.mass,
        })
    }

    pub fn with_gains(mut self, gains: PushGains) -> Self {
        self.gains = gains;
        self
    }

    pub fn reset(&mut self) {
        self.state = ControllerState::default();
    }

    fn contact_distance(&self, object: &ObjectState<f64>, mover_yaw: f64, dir: Vec2) -> f64 {
        footprint_support(&self.footprint, object.pose.yaw, -dir) + shape_support(&self.mover_shape, mover_yaw, dir)
    }

    fn orbit_radius(&self) -> f64 {
        self.footprint.bounding_radius() + self.mover_shape.bounding_radius() + 2.0 * STANDOFF_CLEARANCE
    }

    /// Next acceleration command; advances the internal phase.
    pub fn command(&mut self, mover: &MoverState<f64>, object: &ObjectState<f64>, goal: &Pose2d) -> Vec2 {
        self.state.phase_steps += 1;
        let o = object.pose.position();
        let m = mover.position();
        let to_goal = goal.position() - o;
        let dist = to_goal.norm();
        let yaw_err = wrap_angle(goal.yaw - object.pose.yaw);
        let yaw_done = !self.gains.yaw_nudge || yaw_err.abs() < 0.05;
        if dist <= self.gains.hold_distance && yaw_done {
            self.state.enter(Phase::Hold);
        } else if self.state.phase == Phase::Hold {
            self.state.enter(Phase::Approach);
        }
        if self.state.phase == Phase::Hold {
            return clamp_command(mover.planar_velocity() * -self.gains.track_gain, mover, &self.params);
        }
        let dir = to_goal.normalized().unwrap_or(Vec2::new(1.0, 0.0));
        let contact = self.contact_distance(object, mover.pose.yaw, dir);
        let behind = o - dir * (contact + STANDOFF_CLEARANCE);
        self.state.waypoint = Some(behind);

        if self.state.phase == Phase::Push {
            let rel = o - m;
            let misaligned = rel.normalized().is_none_or(|r| r.dot(dir).clamp(-1.0, 1.0).acos() > REALIGN_ANGLE);
            let lost = rel.norm() > contact + 4.0 * STANDOFF_CLEARANCE;
            if misaligned || lost {
                self.state.enter(Phase::Approach);
            }
        }

        match self.state.phase {
            Phase::Approach => {
                let r = m - o;
                let back = -dir;
                let bearing = wrap_angle(r.y.atan2(r.x) - back.y.atan2(back.x));
                if bearing.abs() > self.gains.direct_bearing {
                    let step = bearing.signum() * bearing.abs().min(0.8);
                    let target_angle = r.y.atan2(r.x) - step;
                    let radius = self.orbit_radius();
                    let target = o + Vec2::new(target_angle.cos(), target_angle.sin()) * radius;
                    let d = target - m;
                    let v_des = d.normalized().map_or(Vec2::zero(), |u| u * self.gains.orbit_speed.min(4.0 * d.norm()));
                    return track_velocity(mover, v_des, self.gains.track_gain, &self.params);
                }
                if (m - behind).norm() < self.gains.waypoint_tolerance {
                    self.state.enter(Phase::Align);
                }
                pd_goto(mover, behind, &self.params)
            }
            Phase::Align => {
                if (m - behind).norm() > 3.0 * self.gains.waypoint_tolerance {
                    self.state.enter(Phase::Approach);
                } else if mover.planar_velocity().norm() < 0.05 {
                    self.state.enter(Phase::Push);
                }
                pd_goto(mover, behind, &self.params)
            }
            Phase::Push => {
                let side = dir.perp();
                let mut lateral_target = 0.0;
                if self.gains.yaw_nudge {
                    lateral_target = -0.03 * (yaw_err / 0.5).clamp(-1.0, 1.0);
                }
                let lateral = (m - o).dot(side) - lateral_target;
                let speed = self.gains.push_speed.min(2.0 * dist).max(0.05);
                let v_des = dir * speed - side * (self.gains.lateral_gain * lateral);
                let a = (v_des - mover.planar_velocity()) * self.gains.track_gain + dir * self.feedforward;
                clamp_command(a, mover, &self.params)
            }
            Phase::Hold => unreachable!(),
        }
    }
}
