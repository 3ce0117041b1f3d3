use crate::geometry::Vector2;
use crate::num::{wrap_angle, Real};
use crate::scene::{ImpedanceGains, PhysicsParams};

use super::state::MoverState;

/// Clamps a commanded planar acceleration for a mover moving at `v`.
///
/// The command is first limited to `a_max` in norm. It is then scaled by the
/// largest `s` in `[0, 1]` that keeps `|v + s a dt| <= v_max`. When the mover
/// is already faster than `v_max` (after a contact impulse, say) no such `s`
/// exists and the scale minimising the resulting speed is used instead.
pub fn clamp_acceleration<T: Real>(cmd: Vector2<T>, v: Vector2<T>, params: &PhysicsParams<T>) -> Vector2<T> {
    if !cmd.is_finite() {
        return Vector2::zero();
    }
    let shrink = T::one() - T::lit(4.0) * T::epsilon();
    let mut a = cmd;
    let n = a.norm();
    if n > params.a_max {
        a = a * (params.a_max / n);
        while a.norm() > params.a_max {
            a = a * shrink;
        }
    }
    let vmax2 = params.v_max * params.v_max;
    let fits = |a: Vector2<T>| (v + a * params.dt).norm_squared() <= vmax2;
    if fits(a) {
        return a;
    }
    let w = a * params.dt;
    let qa = w.norm_squared();
    if qa == T::zero() {
        return a;
    }
    let qb = T::two() * v.dot(w);
    let qc = v.norm_squared() - vmax2;
    if qc > T::zero() {
        let s = -v.dot(w) / qa;
        // rounding puts an already minimising command within a few ulps of 1
        if s >= T::one() - T::lit(1e-9) {
            return a;
        }
        return a * s.max(T::zero());
    }
    let disc = (qb * qb - T::lit(4.0) * qa * qc).max(T::zero()).sqrt();
    let mut s = if qb >= T::zero() { -(qc + qc) / (qb + disc) } else { (disc - qb) / (qa + qa) };
    s = s.max(T::zero()).min(T::one());
    for _ in 0..8 {
        if fits(a * s) {
            return a * s;
        }
        s = s * shrink;
    }
    Vector2::zero()
}

pub fn clamp_command<T: Real>(cmd: Vector2<T>, mover: &MoverState<T>, params: &PhysicsParams<T>) -> Vector2<T> {
    clamp_acceleration(cmd, mover.planar_velocity(), params)
}

/// Generalised forces on the held channels `(z, roll, pitch, yaw)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HoldWrench<T> {
    pub force_z: T,
    pub torque_roll: T,
    pub torque_pitch: T,
    pub torque_yaw: T,
}

/// `K (target - value) - D rate` on each held channel. Levitation height,
/// roll and pitch are held at their targets; yaw is held at `yaw_target`.
pub fn impedance_wrench<T: Real>(
    mover: &MoverState<T>,
    hover_height: T,
    yaw_target: T,
    k: &ImpedanceGains<T>,
    d: &ImpedanceGains<T>,
) -> HoldWrench<T> {
    let p = &mover.pose;
    let v = &mover.velocity;
    HoldWrench {
        force_z: k.z * (hover_height - p.z) - d.z * v.vz,
        torque_roll: -k.roll * p.roll - d.roll * v.roll_rate,
        torque_pitch: -k.pitch * p.pitch - d.pitch * v.pitch_rate,
        torque_yaw: k.yaw * wrap_angle(yaw_target - p.yaw) - d.yaw * v.yaw_rate,
    }
}

/// Acceleration of the planar position hold used for movers without a command.
pub fn hold_acceleration<T: Real>(
    anchor: Vector2<T>,
    position: Vector2<T>,
    velocity: Vector2<T>,
    mass: T,
    stiffness: T,
) -> Vector2<T> {
    let damping = T::two() * (stiffness * mass).sqrt();
    ((anchor - position) * stiffness - velocity * damping) * (T::one() / mass)
}
