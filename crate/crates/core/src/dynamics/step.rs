use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collision::{collision_report_with, CollisionEvents, CollisionShape};
use crate::geometry::{Pose2, Vector2};
use crate::num::{wrap_angle, Real};
use crate::scene::{BodyId, Footprint, SceneConfig};

use super::contact::{piece_contacts, ContactManifold};
use super::control::{clamp_acceleration, hold_acceleration, impedance_wrench};
use super::solver::{solve_contacts, BodyPair, GroundFriction, SolverBody};
use super::state::WorldState;

/// Planar acceleration commands keyed by mover id. Movers without an entry hold position.
pub type Commands<T> = BTreeMap<BodyId, Vector2<T>>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("no mover with id {0}")]
    UnknownMoverId(BodyId),
    #[error("no object with id {0}")]
    UnknownObjectId(BodyId),
    #[error("world state does not match the scene: {0}")]
    WorldMismatch(String),
    #[error("scene cannot be simulated: {0}")]
    InvalidScene(String),
}

/// Wall-clock seconds spent in each phase of one step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepTimings {
    pub control: f64,
    pub contacts: f64,
    pub integrate: f64,
    pub collide: f64,
    /// Part of `collide` spent on mover-mover pair checks.
    pub pairwise: f64,
}

impl StepTimings {
    pub fn total(&self) -> f64 {
        self.control + self.contacts + self.integrate + self.collide
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct StepInfo<T> {
    pub events: CollisionEvents<T>,
    /// Accelerations actually applied, in mover order.
    pub applied: Vec<(BodyId, Vector2<T>)>,
    pub contact_count: usize,
    pub timings: StepTimings,
}

impl<T: Real> StepInfo<T> {
    pub fn applied_for(&self, id: BodyId) -> Option<Vector2<T>> {
        self.applied.iter().find(|(i, _)| *i == id).map(|(_, a)| *a)
    }
}

struct Prim<T> {
    shape: CollisionShape<T>,
    offset: Vector2<T>,
}

/// Steps worlds of one scene, holding the scene's precomputed footprints.
#[derive(Clone, Debug)]
pub struct Simulator<T> {
    scene: SceneConfig<T>,
    footprints: Vec<Footprint<T>>,
    object_inertia: Vec<T>,
    mover_index: HashMap<BodyId, usize>,
    object_index: HashMap<BodyId, usize>,
}

impl<T: Real> Simulator<T> {
    pub fn new(scene: SceneConfig<T>) -> Result<Self, DynamicsError> {
        let mut footprints = Vec::with_capacity(scene.objects.len());
        for o in &scene.objects {
            footprints
                .push(o.footprint().map_err(|e| DynamicsError::InvalidScene(format!("object {}: {}", o.id, e.0)))?);
        }
        let object_inertia = scene.objects.iter().zip(&footprints).map(|(o, fp)| fp.yaw_inertia(o.mass)).collect();
        let mover_index = scene.movers.iter().enumerate().map(|(i, m)| (m.id, i)).collect();
        let object_index = scene.objects.iter().enumerate().map(|(i, o)| (o.id, i)).collect();
        Ok(Self { scene, footprints, object_inertia, mover_index, object_index })
    }

    pub fn scene(&self) -> &SceneConfig<T> {
        &self.scene
    }

    pub fn footprints(&self) -> &[Footprint<T>] {
        &self.footprints
    }

    pub fn object_inertia(&self, index: usize) -> T {
        self.object_inertia[index]
    }

    pub fn initial_state(&self) -> WorldState<T> {
        WorldState::from_scene(&self.scene)
    }

    pub fn step(&self, world: &mut WorldState<T>, commands: &Commands<T>) -> Result<StepInfo<T>, DynamicsError> {
        self.step_with_forces(world, commands, &[])
    }

    /// Steps with additional planar forces (N) applied at object centers of mass.
    pub fn step_with_forces(
        &self,
        world: &mut WorldState<T>,
        commands: &Commands<T>,
        object_forces: &[(BodyId, Vector2<T>)],
    ) -> Result<StepInfo<T>, DynamicsError> {
        self.check_world(world)?;
        if let Some(id) = commands.keys().find(|id| !self.mover_index.contains_key(id)) {
            return Err(DynamicsError::UnknownMoverId(*id));
        }
        if let Some((id, _)) = object_forces.iter().find(|(id, _)| !self.object_index.contains_key(id)) {
            return Err(DynamicsError::UnknownObjectId(*id));
        }
        let p = &self.scene.physics;
        let dt = p.dt;
        let mut timings = StepTimings::default();

        let start = Instant::now();
        let mut applied = Vec::with_capacity(world.movers.len());
        let half = T::half();
        for (m, spec) in world.movers.iter_mut().zip(&self.scene.movers) {
            let raw = match commands.get(&m.id) {
                Some(a) => {
                    m.hold_anchor = None;
                    *a
                }
                None => {
                    let anchor = *m.hold_anchor.get_or_insert(m.position());
                    hold_acceleration(anchor, m.position(), m.planar_velocity(), spec.mass, p.hold_stiffness)
                }
            };
            let a = clamp_acceleration(raw, m.planar_velocity(), p);
            m.last_command = a;
            m.set_planar_velocity(m.planar_velocity() + a * dt);
            let w = impedance_wrench(m, spec.hover_height, spec.start_pose.yaw, &p.stiffness, &p.damping);
            let tilt_inertia = spec.yaw_inertia * half;
            let v = &mut m.velocity;
            v.vz = v.vz + w.force_z / spec.mass * dt;
            v.roll_rate = v.roll_rate + w.torque_roll / tilt_inertia * dt;
            v.pitch_rate = v.pitch_rate + w.torque_pitch / tilt_inertia * dt;
            v.yaw_rate = v.yaw_rate + w.torque_yaw / spec.yaw_inertia * dt;
            applied.push((m.id, a));
        }
        for (id, f) in object_forces {
            let k = self.object_index[id];
            let o = &mut world.objects[k];
            o.velocity.vx = o.velocity.vx + f.x / self.scene.objects[k].mass * dt;
            o.velocity.vy = o.velocity.vy + f.y / self.scene.objects[k].mass * dt;
        }
        timings.control = start.elapsed().as_secs_f64();

        let start = Instant::now();
        let (manifolds, pairs) = self.contacts(world);
        let contact_count = manifolds.iter().map(|m| m.points.len()).sum();
        let nm = world.movers.len();
        let mut pseudo: Vec<(Vector2<T>, T)> = Vec::new();
        if !manifolds.is_empty() || !world.objects.is_empty() {
            let mut bodies = Vec::with_capacity(nm + world.objects.len() + self.scene.obstacles.len());
            for (m, spec) in world.movers.iter().zip(&self.scene.movers) {
                bodies.push(SolverBody::dynamic(
                    m.position(),
                    spec.mass,
                    spec.yaw_inertia,
                    m.planar_velocity(),
                    m.velocity.yaw_rate,
                ));
            }
            for (k, o) in world.objects.iter().enumerate() {
                let mass = self.scene.objects[k].mass;
                bodies.push(SolverBody::dynamic(
                    o.pose.position(),
                    mass,
                    self.object_inertia[k],
                    o.velocity.linear(),
                    o.velocity.yaw_rate,
                ));
            }
            for obs in &self.scene.obstacles {
                bodies.push(SolverBody::fixed(obs.pose.position()));
            }
            let r_factor = T::lit(2.0 * std::f64::consts::SQRT_2 / 3.0);
            let ground: Vec<GroundFriction<T>> = self
                .scene
                .objects
                .iter()
                .enumerate()
                .map(|(k, o)| {
                    let load = o.friction_ground * o.mass * p.gravity;
                    let r_eff = r_factor * (self.object_inertia[k] / o.mass).sqrt();
                    GroundFriction { body: nm + k, max_force: load, max_torque: load * r_eff }
                })
                .collect();
            solve_contacts(&manifolds, &pairs, &mut bodies, &ground, &p.contact, dt);
            for (m, b) in world.movers.iter_mut().zip(&bodies) {
                m.set_planar_velocity(b.velocity);
                m.velocity.yaw_rate = b.angular_velocity;
            }
            for (o, b) in world.objects.iter_mut().zip(&bodies[nm..]) {
                o.velocity.vx = b.velocity.x;
                o.velocity.vy = b.velocity.y;
                o.velocity.yaw_rate = b.angular_velocity;
            }
            pseudo = bodies.iter().map(|b| (b.pseudo_velocity, b.pseudo_angular_velocity)).collect();
        }
        timings.contacts = start.elapsed().as_secs_f64();

        let start = Instant::now();
        let vmax = p.v_max;
        for (i, m) in world.movers.iter_mut().enumerate() {
            let mut v = m.planar_velocity();
            let speed = v.norm();
            if speed > vmax {
                v = v * (vmax / speed);
                m.set_planar_velocity(v);
            }
            let (pv, pw) = pseudo.get(i).copied().unwrap_or((Vector2::zero(), T::zero()));
            let vel = m.velocity;
            let pose = &mut m.pose;
            pose.x = pose.x + (v.x + pv.x) * dt;
            pose.y = pose.y + (v.y + pv.y) * dt;
            pose.z = pose.z + vel.vz * dt;
            pose.roll = pose.roll + vel.roll_rate * dt;
            pose.pitch = pose.pitch + vel.pitch_rate * dt;
            pose.yaw = wrap_angle(pose.yaw + (vel.yaw_rate + pw) * dt);
        }
        for (k, o) in world.objects.iter_mut().enumerate() {
            let (pv, pw) = pseudo.get(nm + k).copied().unwrap_or((Vector2::zero(), T::zero()));
            let v = o.velocity;
            o.pose = Pose2::new(
                o.pose.x + (v.vx + pv.x) * dt,
                o.pose.y + (v.vy + pv.y) * dt,
                o.pose.yaw + (v.yaw_rate + pw) * dt,
            );
        }
        world.step_index += 1;
        world.time = T::lit(world.step_index as f64) * dt;
        timings.integrate = start.elapsed().as_secs_f64();

        let start = Instant::now();
        let (events, pairwise) = collision_report_with(world, &self.scene, &self.footprints, p.broadphase);
        timings.collide = start.elapsed().as_secs_f64();
        timings.pairwise = pairwise;

        Ok(StepInfo { events, applied, contact_count, timings })
    }

    fn check_world(&self, world: &WorldState<T>) -> Result<(), DynamicsError> {
        if world.movers.len() != self.scene.movers.len() || world.objects.len() != self.scene.objects.len() {
            return Err(DynamicsError::WorldMismatch(format!(
                "{} movers and {} objects in the world, {} and {} in the scene",
                world.movers.len(),
                world.objects.len(),
                self.scene.movers.len(),
                self.scene.objects.len()
            )));
        }
        let movers_ok = world.movers.iter().zip(&self.scene.movers).all(|(m, s)| m.id == s.id);
        let objects_ok = world.objects.iter().zip(&self.scene.objects).all(|(o, s)| o.id == s.id);
        if !(movers_ok && objects_ok) {
            return Err(DynamicsError::WorldMismatch("body ids are not in scene order".into()));
        }
        Ok(())
    }

    /// Contact manifolds for mover-object, mover-obstacle, object-object and
    /// object-obstacle pairs. Mover-mover overlap is never resolved.
    pub fn contacts(&self, world: &WorldState<T>) -> (Vec<ContactManifold<T>>, Vec<BodyPair>) {
        let mut manifolds = Vec::new();
        let mut pairs = Vec::new();
        let scene = &self.scene;
        if scene.objects.is_empty() && scene.obstacles.is_empty() {
            return (manifolds, pairs);
        }
        let nm = world.movers.len();
        let no = world.objects.len();
        let zero = T::zero();
        let mover_prims: Vec<Prim<T>> =
            scene.movers.iter().map(|m| Prim { shape: m.shape.with_margin(zero), offset: Vector2::zero() }).collect();
        let object_prims: Vec<Vec<Prim<T>>> = self
            .footprints
            .iter()
            .map(|fp| fp.pieces.iter().map(|pc| Prim { shape: pc.collision_shape(zero), offset: pc.offset }).collect())
            .collect();
        let obstacle_prims: Vec<Prim<T>> = scene
            .obstacles
            .iter()
            .map(|o| Prim { shape: o.shape.with_margin(zero), offset: Vector2::zero() })
            .collect();

        let mover_poses: Vec<Pose2<T>> = world.movers.iter().map(|m| m.planar_pose()).collect();
        let object_poses: Vec<Pose2<T>> = world.objects.iter().map(|o| o.pose).collect();
        let object_radius: Vec<T> = self.footprints.iter().map(|f| f.bounding_radius()).collect();

        let mut emit = |ia: usize,
                        ida: BodyId,
                        pa: &Pose2<T>,
                        prims_a: &[Prim<T>],
                        ib: usize,
                        idb: BodyId,
                        pb: &Pose2<T>,
                        prims_b: &[Prim<T>],
                        friction: T| {
            for qa in prims_a {
                let wa = Pose2 { yaw: pa.yaw, ..Pose2::from_position(pa.transform_point(qa.offset)) };
                for qb in prims_b {
                    let wb = Pose2 { yaw: pb.yaw, ..Pose2::from_position(pb.transform_point(qb.offset)) };
                    let mut points = Vec::new();
                    piece_contacts(&qa.shape, &wa, &qb.shape, &wb, &mut points);
                    if !points.is_empty() {
                        manifolds.push(ContactManifold { a: ida, b: idb, points, friction });
                        pairs.push(BodyPair { a: ia, b: ib });
                    }
                }
            }
        };

        let near = |pa: &Pose2<T>, ra: T, pb: &Pose2<T>, rb: T| {
            let r = ra + rb;
            (pb.position() - pa.position()).norm_squared() < r * r
        };

        for (i, m) in world.movers.iter().enumerate() {
            let ra = mover_prims[i].shape.bounding_radius();
            let pa = &mover_poses[i];
            for (k, o) in world.objects.iter().enumerate() {
                if near(pa, ra, &object_poses[k], object_radius[k]) {
                    let mu = scene.objects[k].friction_mover;
                    emit(
                        i,
                        m.id,
                        pa,
                        std::slice::from_ref(&mover_prims[i]),
                        nm + k,
                        o.id,
                        &object_poses[k],
                        &object_prims[k],
                        mu,
                    );
                }
            }
            for (k, obs) in scene.obstacles.iter().enumerate() {
                if near(pa, ra, &obs.pose, obstacle_prims[k].shape.bounding_radius()) {
                    let mu = scene.physics.contact.obstacle_friction;
                    emit(
                        i,
                        m.id,
                        pa,
                        std::slice::from_ref(&mover_prims[i]),
                        nm + no + k,
                        obs.id,
                        &obs.pose,
                        std::slice::from_ref(&obstacle_prims[k]),
                        mu,
                    );
                }
            }
        }
        for (k, o) in world.objects.iter().enumerate() {
            let pa = &object_poses[k];
            for (l, o2) in world.objects.iter().enumerate().skip(k + 1) {
                if near(pa, object_radius[k], &object_poses[l], object_radius[l]) {
                    let mu = (scene.objects[k].friction_mover * scene.objects[l].friction_mover).sqrt();
                    emit(nm + k, o.id, pa, &object_prims[k], nm + l, o2.id, &object_poses[l], &object_prims[l], mu);
                }
            }
            for (j, obs) in scene.obstacles.iter().enumerate() {
                if near(pa, object_radius[k], &obs.pose, obstacle_prims[j].shape.bounding_radius()) {
                    let mu = scene.physics.contact.obstacle_friction;
                    emit(
                        nm + k,
                        o.id,
                        pa,
                        &object_prims[k],
                        nm + no + j,
                        obs.id,
                        &obs.pose,
                        std::slice::from_ref(&obstacle_prims[j]),
                        mu,
                    );
                }
            }
        }
        (manifolds, pairs)
    }
}

/// Advances a copy of `world` by one step.
pub fn step_world<T: Real>(
    world: &WorldState<T>,
    commands: &Commands<T>,
    scene: &SceneConfig<T>,
) -> Result<(WorldState<T>, StepInfo<T>), DynamicsError> {
    let sim = Simulator::new(scene.clone())?;
    let mut next = world.clone();
    let info = sim.step(&mut next, commands)?;
    Ok((next, info))
}
