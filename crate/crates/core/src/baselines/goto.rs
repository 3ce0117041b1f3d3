use crate::dynamics::{clamp_command, MoverState};
use crate::scene::PhysicsParams;
use crate::Vec2;

/// Position gain in 1/s².
pub const GOTO_KP: f64 = 25.0;
/// Velocity gain in 1/s; critically damped with [`GOTO_KP`].
pub const GOTO_KD: f64 = 10.0;

/// Unclamped `Kp (goal - p) - Kd v`.
pub fn pd_raw(mover: &MoverState<f64>, goal: Vec2) -> Vec2 {
    (goal - mover.position()) * GOTO_KP - mover.planar_velocity() * GOTO_KD
}

/// Goal-seeking planar command, clamped to the mover's limits.
pub fn pd_goto(mover: &MoverState<f64>, goal: Vec2, params: &PhysicsParams<f64>) -> Vec2 {
    clamp_command(pd_raw(mover, goal), mover, params)
}

/// Velocity-tracking command `k (v_des - v)`, clamped.
pub fn track_velocity(mover: &MoverState<f64>, v_des: Vec2, gain: f64, params: &PhysicsParams<f64>) -> Vec2 {
    clamp_command((v_des - mover.planar_velocity()) * gain, mover, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Commands;
    use crate::geometry::Pose2;
    use crate::scene::{BodyId, MoverSpec};
    use crate::{Scene, Sim};

    fn at(x: f64, y: f64) -> MoverState<f64> {
        MoverState::at_rest(BodyId(0), Pose2::new(x, y, 0.0), 0.002)
    }

    #[test]
    fn at_goal_is_zero() {
        let p = PhysicsParams::default();
        let a = pd_goto(&at(0.3, 0.4), Vec2::new(0.3, 0.4), &p);
        assert_eq!(a, Vec2::zero());
    }

    #[test]
    fn points_at_goal() {
        let p = PhysicsParams::default();
        let a = pd_goto(&at(0.0, 0.0), Vec2::new(1.0, 0.0), &p);
        assert!(a.x > 0.0);
        assert_eq!(a.y, 0.0);
        assert_eq!(clamp_command(a, &at(0.0, 0.0), &p), a);
    }

    #[test]
    fn closed_loop_converges() {
        let mut scene: Scene =
            crate::scene::generate_grid_scene(4, 4, 1, crate::scene::MoverShapeKind::Box, PhysicsParams::default())
                .unwrap();
        scene.movers[0] = MoverSpec::default_box(BodyId(0), Pose2::new(0.2, 0.2, 0.0));
        let sim = Sim::new(scene).unwrap();
        let mut w = sim.initial_state();
        let goal = Vec2::new(0.7, 0.2);
        let mut reached = None;
        for k in 0..3000 {
            let a = pd_goto(&w.movers[0], goal, &sim.scene().physics);
            sim.step(&mut w, &Commands::from([(BodyId(0), a)])).unwrap();
            if reached.is_none() && (w.movers[0].position() - goal).norm() < 0.1 {
                reached = Some(k);
            }
        }
        assert!(reached.is_some());
        assert!((w.movers[0].position() - goal).norm() < 1e-3);
    }
}
