use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::collision::{separation, CollisionShape};
use crate::dynamics::{clamp_command, MoverState};
use crate::geometry::Aabb;
use crate::geometry::Pose2;
use crate::scene::{BodyId, PhysicsParams};
use crate::{Pose2d, Vec2};

use super::goto::pd_raw;

/// Gains of the reciprocal avoidance layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AvoidConfig {
    /// Center distance below which neighbours interact, in mover diameters.
    pub influence_diameters: f64,
    /// Deceleration each mover reserves for braking, m/s².
    pub braking_accel: f64,
    /// Relative deceleration assumed between two neighbours, m/s².
    pub pair_accel: f64,
    /// Part of the relative deceleration each neighbour supplies itself.
    pub pair_share: f64,
    /// Gap kept in reserve when braking, m.
    pub buffer: f64,
    /// Decay rate of the barrier, 1/s.
    pub gamma: f64,
    /// Peak sideways acceleration when the goal lies behind a neighbour, m/s².
    pub sidestep: f64,
    /// Peak sideways acceleration of a mover standing on a neighbour's path, m/s².
    pub make_way: f64,
    /// Tile area the movers must stay above. No wall terms when absent.
    pub bounds: Option<Aabb<f64>>,
}

impl Default for AvoidConfig {
    fn default() -> Self {
        Self {
            influence_diameters: 3.0,
            braking_accel: 2.0,
            pair_accel: 2.0,
            pair_share: 1.0,
            buffer: 0.01,
            gamma: 10.0,
            sidestep: 4.0,
            make_way: 4.0,
            bounds: None,
        }
    }
}

impl AvoidConfig {
    pub fn with_bounds(mut self, bounds: Aabb<f64>) -> Self {
        self.bounds = Some(bounds);
        self
    }
}

fn diameter(shape: &CollisionShape<f64>) -> f64 {
    2.0 * shape.with_margin(0.0).max_half_extent()
}

/// Half-plane `a · n >= rhs` on a mover's acceleration.
#[derive(Clone, Copy, Debug)]
struct Constraint {
    n: Vec2,
    rhs: f64,
    wall: bool,
}

/// Relative deceleration `accel` of which the mover supplies `share`.
#[derive(Clone, Copy, Debug)]
struct Braking {
    accel: f64,
    share: f64,
    wall: bool,
}

/// Braking-distance barrier `h = gap - buffer - c² / 2A` on a gap closing at
/// `closing`. Requires `dh/dt >= -gamma h`.
fn barrier(cfg: &AvoidConfig, n: Vec2, gap: f64, closing: f64, b: Braking, a_max: f64) -> Option<Constraint> {
    if closing <= 0.0 {
        return None;
    }
    let h = gap - cfg.buffer - closing * closing / (2.0 * b.accel);
    let rhs = b.share * (b.accel - cfg.gamma * h * b.accel / closing);
    (rhs > -a_max).then_some(Constraint { n, rhs: rhs.min(a_max), wall: b.wall })
}

/// Unit gradient of the separation with respect to the first shape's position.
fn gap_normal(a: &CollisionShape<f64>, pa: &Pose2d, b: &CollisionShape<f64>, pb: &Pose2d) -> Option<Vec2> {
    const EPS: f64 = 1e-6;
    let at = |dx: f64, dy: f64| separation(a, &Pose2::new(pa.x + dx, pa.y + dy, pa.yaw), b, pb);
    let gx = at(EPS, 0.0) - at(-EPS, 0.0);
    let gy = at(0.0, EPS) - at(0.0, -EPS);
    Vec2::new(gx, gy).normalized()
}

/// Goal-seeking commands for all movers with pairwise reciprocal avoidance.
///
/// Each mover's desired command is the PD goal law plus two sideways terms:
/// a step toward the side its goal is on when that goal lies behind a
/// neighbour, and a step off the path of a neighbour heading through it. The
/// command is then projected onto braking barriers for every neighbour within
/// the influence radius and for the tile boundary when configured. Each mover
/// brakes as if its neighbours held their velocity.
pub fn reciprocal_avoid(
    states: &[MoverState<f64>],
    goals: &[Vec2],
    shapes: &[CollisionShape<f64>],
    params: &PhysicsParams<f64>,
    cfg: &AvoidConfig,
) -> BTreeMap<BodyId, Vec2> {
    let a_max = params.a_max;
    let pair = Braking { accel: cfg.pair_accel, share: cfg.pair_share, wall: false };
    let wall = Braking { accel: cfg.braking_accel, share: 1.0, wall: true };
    let mut out = BTreeMap::new();
    for (i, m) in states.iter().enumerate() {
        let p = m.position();
        let pose = m.planar_pose();
        let v = m.planar_velocity();
        let mut desired = pd_raw(m, goals[i]);
        let mut constraints = Vec::new();
        for (j, o) in states.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = p - o.position();
            let dist = d.norm();
            let radius = cfg.influence_diameters * diameter(&shapes[i]).max(diameter(&shapes[j]));
            if dist >= radius || dist == 0.0 {
                continue;
            }
            let to_goal = goals[i] - p;
            let n_center = d * (1.0 / dist);
            if to_goal.dot(n_center) < 0.0 && to_goal.norm() > 0.5 * dist {
                let side = if to_goal.dot(n_center.perp()) >= 0.0 { 1.0 } else { -1.0 };
                desired += n_center.perp() * (side * cfg.sidestep * (radius - dist) / radius);
            }
            let their_goal = goals[j] - o.position();
            let remaining = their_goal.norm();
            if remaining > 0.5 * dist {
                let u = their_goal * (1.0 / remaining);
                let ahead = d.dot(u);
                let lateral = u.cross(d);
                let width = diameter(&shapes[i]).max(diameter(&shapes[j]));
                if ahead > 0.0 && ahead < remaining + width && lateral.abs() < width {
                    let side = if lateral >= 0.0 { 1.0 } else { -1.0 };
                    desired += u.perp() * (side * cfg.make_way * (radius - dist) / radius);
                }
            }
            let gap = separation(&shapes[i], &pose, &shapes[j], &o.planar_pose());
            let n = gap_normal(&shapes[i], &pose, &shapes[j], &o.planar_pose()).unwrap_or(n_center);
            let closing = -(v - o.planar_velocity()).dot(n);
            constraints.extend(barrier(cfg, n, gap, closing, pair, a_max));
        }
        if let Some(b) = &cfg.bounds {
            let (hx, hy) = shapes[i].inflated_half_extents();
            let walls = [
                (p.x - hx - b.min.x, Vec2::new(1.0, 0.0)),
                (b.max.x - p.x - hx, Vec2::new(-1.0, 0.0)),
                (p.y - hy - b.min.y, Vec2::new(0.0, 1.0)),
                (b.max.y - p.y - hy, Vec2::new(0.0, -1.0)),
            ];
            for (gap, n) in walls {
                constraints.extend(barrier(cfg, n, gap, -v.dot(n), wall, a_max));
            }
        }
        let a = if constraints.is_empty() { desired } else { project(desired, &constraints, a_max) };
        out.insert(m.id, clamp_command(a, m, params));
    }
    out
}

/// Closest point to `desired` in the `a_max` disc that satisfies the
/// half-planes. When they cannot all hold, neighbour demands are capped at a
/// shrinking level until they vanish, then wall demands too.
fn project(desired: Vec2, constraints: &[Constraint], a_max: f64) -> Vec2 {
    const CAPS: [f64; 5] = [1.0, 0.75, 0.5, 0.25, 0.0];
    const RELAXED: [f64; 4] = [-0.25, -0.5, -0.75, -1.0];
    let levels = CAPS.iter().chain(&RELAXED).map(|&c| (c, 1.0)).chain(CAPS.iter().map(|&c| (-1.0, c)));
    for (pair_cap, wall_cap) in levels {
        let capped: Vec<Constraint> = constraints
            .iter()
            .map(|c| {
                let cap = if c.wall { wall_cap } else { pair_cap };
                Constraint { rhs: c.rhs.min(cap * a_max), ..*c }
            })
            .collect();
        if let Some(a) = closest_feasible(desired, &capped, a_max) {
            return a;
        }
    }
    Vec2::zero()
}

/// Closest feasible point by enumerating interior, edge and vertex candidates.
fn closest_feasible(desired: Vec2, constraints: &[Constraint], a_max: f64) -> Option<Vec2> {
    const TOL: f64 = 1e-9;
    let feasible = |a: Vec2| a.norm() <= a_max + TOL && constraints.iter().all(|c| a.dot(c.n) >= c.rhs - TOL);
    let on_disc = |a: Vec2| {
        let n = a.norm();
        if n > a_max {
            a * (a_max / n)
        } else {
            a
        }
    };
    let mut candidates = vec![desired, on_disc(desired)];
    for (k, c) in constraints.iter().enumerate() {
        let foot = desired + c.n * (c.rhs - desired.dot(c.n));
        candidates.push(foot);
        let t = c.n.perp();
        let half_chord = a_max * a_max - c.rhs * c.rhs;
        if half_chord >= 0.0 {
            let h = half_chord.sqrt();
            candidates.push(c.n * c.rhs + t * h);
            candidates.push(c.n * c.rhs - t * h);
        }
        for e in &constraints[k + 1..] {
            let det = c.n.cross(e.n);
            if det.abs() > 1e-12 {
                let x = (c.rhs * e.n.y - e.rhs * c.n.y) / det;
                let y = (c.n.x * e.rhs - e.n.x * c.rhs) / det;
                candidates.push(Vec2::new(x, y));
            }
        }
    }
    candidates
        .into_iter()
        .filter(|&a| feasible(a))
        .min_by(|a, b| (*a - desired).norm_squared().total_cmp(&(*b - desired).norm_squared()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::pd_goto;

    fn mover(id: u32, x: f64, y: f64, vx: f64) -> MoverState<f64> {
        let mut m = MoverState::at_rest(BodyId(id), Pose2::new(x, y, 0.0), 0.002);
        m.velocity.vx = vx;
        m
    }

    fn shape() -> CollisionShape<f64> {
        CollisionShape::new_box(0.0775, 0.0775, 0.005)
    }

    #[test]
    fn single_mover_is_pd_goto() {
        let p = PhysicsParams::default();
        let m = mover(0, 0.2, 0.3, 0.4);
        let g = Vec2::new(0.7, 0.1);
        let cmds = reciprocal_avoid(std::slice::from_ref(&m), &[g], &[shape()], &p, &AvoidConfig::default());
        assert_eq!(cmds[&BodyId(0)], pd_goto(&m, g, &p));
    }

    #[test]
    fn head_on_is_mirror_symmetric() {
        let p = PhysicsParams::default();
        let a = mover(0, -0.2, 0.0, 0.5);
        let b = mover(1, 0.2, 0.0, -0.5);
        let goals = [Vec2::new(0.6, 0.0), Vec2::new(-0.6, 0.0)];
        let cmds = reciprocal_avoid(&[a, b], &goals, &[shape(), shape()], &p, &AvoidConfig::default());
        let (ca, cb) = (cmds[&BodyId(0)], cmds[&BodyId(1)]);
        assert!((ca.x + cb.x).abs() < 1e-9);
        assert!((ca.y + cb.y).abs() < 1e-9);
        assert!(ca.y * cb.y < 0.0);
    }

    #[test]
    fn outputs_survive_clamping() {
        let p = PhysicsParams::default();
        let ms = [mover(0, 0.0, 0.0, 1.9), mover(1, 0.2, 0.05, -1.0), mover(2, 0.1, 0.3, 0.0)];
        let goals = [Vec2::new(0.5, 0.0), Vec2::new(-0.5, 0.0), Vec2::new(0.1, -0.4)];
        let cmds = reciprocal_avoid(&ms, &goals, &[shape(); 3], &p, &AvoidConfig::default());
        for m in &ms {
            let a = cmds[&m.id];
            assert_eq!(clamp_command(a, m, &p), a);
        }
    }

    #[test]
    fn projection_satisfies_feasible_constraint() {
        let c = [Constraint { n: Vec2::new(1.0, 0.0), rhs: 2.0, wall: false }];
        let a = project(Vec2::new(-5.0, 1.0), &c, 10.0);
        assert!(a.x >= 2.0 - 1e-12);
        assert!((a.y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_respects_disc_and_corner() {
        let c = [
            Constraint { n: Vec2::new(1.0, 0.0), rhs: 6.0, wall: false },
            Constraint { n: Vec2::new(0.0, 1.0), rhs: 6.0, wall: false },
        ];
        let a = project(Vec2::new(-10.0, 0.0), &c, 10.0);
        assert!(a.norm() <= 10.0 + 1e-9);
        assert!(a.x >= 6.0 - 1e-9 && a.y >= 6.0 - 1e-9);
        let brute = (0..=2000)
            .flat_map(|i| (0..=2000).map(move |j| Vec2::new(-10.0 + i as f64 * 0.01, -10.0 + j as f64 * 0.01)))
            .filter(|p| p.norm() <= 10.0 && p.x >= 6.0 && p.y >= 6.0)
            .map(|p| (p - Vec2::new(-10.0, 0.0)).norm())
            .fold(f64::INFINITY, f64::min);
        assert!((a - Vec2::new(-10.0, 0.0)).norm() <= brute + 1e-9);
    }

    #[test]
    fn fast_approach_brakes() {
        let p = PhysicsParams::default();
        let a = mover(0, -0.1, 0.0, 1.5);
        let b = mover(1, 0.1, 0.0, 0.0);
        let goals = [Vec2::new(0.6, 0.0), Vec2::new(0.1, 0.0)];
        let cmds = reciprocal_avoid(&[a, b], &goals, &[shape(), shape()], &p, &AvoidConfig::default());
        assert!(cmds[&BodyId(0)].x < 0.0);
    }
}
