use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collision::{check_pair, tile_coverage, CollisionEvents};
use crate::dynamics::{Commands, DynamicsError, Simulator, StepInfo};
use crate::geometry::{Aabb, Pose2, Vector2};
use crate::scene::{validate_scene, BodyId, Footprint};
use crate::{Pose2d, Scene, Vec2, World};

use super::coverage::coverage;
use super::observation::ObservationLayout;
use super::task::{RewardMode, TaskFamily, TaskSpec};

/// Rejected samples allowed per reset before giving up.
pub const MAX_SAMPLING_ATTEMPTS: usize = 1000;

/// Clearance kept between sampled footprints and the tile boundary.
const SAMPLING_CLEARANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("scene does not fit the task: {0}")]
    SceneTaskMismatch(String),
    #[error("no valid start/goal configuration after {0} attempts")]
    SamplingExhausted(usize),
    #[error("bad action: {0}")]
    ActionShape(String),
    #[error("the episode has ended; call reset first")]
    SteppedTerminatedEpisode,
    #[error("the environment must be reset before stepping")]
    NeedsReset,
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Start poses and goals of one episode.
///
/// Push tasks have one goal (for the object); the trajectory task has one goal
/// per mover, in mover order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoalSample {
    pub goals: Vec<Pose2d>,
    pub mover_starts: Vec<Pose2d>,
    pub object_starts: Vec<Pose2d>,
}

/// Task-level evaluation of one world state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub is_success: bool,
    /// Object-goal distance for position push tasks.
    pub distance: Option<f64>,
    /// Object-goal coverage for PushT.
    pub coverage: Option<f64>,
    /// Per-mover goal distance for the trajectory task.
    pub mover_distances: Vec<f64>,
}

impl Evaluation {
    /// Remaining error: distance, uncovered fraction, or the largest mover distance.
    pub fn progress(&self) -> f64 {
        if let Some(d) = self.distance {
            d
        } else if let Some(c) = self.coverage {
            1.0 - c
        } else {
            self.mover_distances.iter().copied().fold(0.0, f64::max)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionInfo {
    pub is_success: bool,
    /// A collision that ends the episode for this task occurred at this step.
    pub fatal: bool,
    pub events: CollisionEvents<f64>,
    pub goal: Vec<Pose2d>,
    pub evaluation: Evaluation,
    pub step: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub observation: Vec<f64>,
    pub reward: f64,
    pub terminated: bool,
    pub truncated: bool,
    pub info: TransitionInfo,
}

/// Per-agent maps for the multi-agent contract. All agents end jointly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiTransition {
    pub observations: BTreeMap<BodyId, Vec<f64>>,
    pub rewards: BTreeMap<BodyId, f64>,
    pub terminated: BTreeMap<BodyId, bool>,
    pub truncated: BTreeMap<BodyId, bool>,
    pub info: TransitionInfo,
}

/// Raw result of one control cycle, before observations are assembled.
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub step: StepInfo<f64>,
    pub evaluation: Evaluation,
    pub fatal: bool,
    pub reward: f64,
    pub terminated: bool,
    pub truncated: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    NeedsReset,
    Running,
    Done,
}

/// Whether the world state satisfies the task's success predicate.
pub fn is_success(task: &TaskSpec, world: &World, goal: &GoalSample, scene: &Scene) -> bool {
    evaluate(task, world, goal, scene).is_success
}

/// Distance / coverage bookkeeping plus the success predicate. Thresholds are inclusive.
pub fn evaluate(task: &TaskSpec, world: &World, goal: &GoalSample, scene: &Scene) -> Evaluation {
    let thr = task.success_threshold;
    match task.family {
        TaskFamily::PushBox | TaskFamily::PushWithObstacles => {
            let (Some(o), Some(g)) = (world.objects.first(), goal.goals.first()) else {
                return Evaluation { is_success: false, distance: None, coverage: None, mover_distances: vec![] };
            };
            let d = (o.pose.position() - g.position()).norm();
            Evaluation { is_success: d <= thr, distance: Some(d), coverage: None, mover_distances: vec![] }
        }
        TaskFamily::PushT => {
            let fp = scene.objects.first().and_then(|o| o.footprint().ok());
            let (Some(o), Some(g), Some(fp)) = (world.objects.first(), goal.goals.first(), fp) else {
                return Evaluation { is_success: false, distance: None, coverage: None, mover_distances: vec![] };
            };
            let c = coverage(&fp, &o.pose, g);
            Evaluation { is_success: c >= thr, distance: None, coverage: Some(c), mover_distances: vec![] }
        }
        TaskFamily::MultiMoverTrajectory => {
            let ds: Vec<f64> =
                world.movers.iter().zip(&goal.goals).map(|(m, g)| (m.position() - g.position()).norm()).collect();
            let ok = !ds.is_empty() && ds.len() == world.movers.len() && ds.iter().all(|d| *d <= thr);
            Evaluation { is_success: ok, distance: None, coverage: None, mover_distances: ds }
        }
    }
}

fn fatal_for(task: &TaskSpec, events: &CollisionEvents<f64>) -> bool {
    match task.family {
        TaskFamily::MultiMoverTrajectory => !events.mover_mover.is_empty() || !events.mover_off_tiles.is_empty(),
        TaskFamily::PushWithObstacles => {
            !events.mover_off_tiles.is_empty()
                || !events.mover_obstacle.is_empty()
                || !events.object_obstacle.is_empty()
        }
        TaskFamily::PushBox | TaskFamily::PushT => !events.mover_off_tiles.is_empty() || !events.mover_mover.is_empty(),
    }
}

pub struct Env {
    task: TaskSpec,
    base: Scene,
    scene: Scene,
    sim: Simulator<f64>,
    world: World,
    goal: GoalSample,
    rng: ChaCha8Rng,
    status: Status,
    footprint: Option<Footprint<f64>>,
    layout: ObservationLayout,
}

/// Creates an environment; call [`Env::reset`] before stepping.
pub fn make_env(task: TaskSpec, scene: Scene, seed: u64) -> Result<Env, EnvError> {
    if !task.is_valid() {
        return Err(EnvError::SceneTaskMismatch(format!("invalid task parameters for {}", task.family)));
    }
    let report = validate_scene(&scene);
    if !report.is_empty() {
        return Err(EnvError::SceneTaskMismatch(format!("scene is invalid: {report}")));
    }
    if scene.movers.is_empty() {
        return Err(EnvError::SceneTaskMismatch("the task needs at least one mover".into()));
    }
    if task.family.is_push() && scene.objects.is_empty() {
        return Err(EnvError::SceneTaskMismatch(format!("{} needs an object to push", task.family)));
    }
    if task.family == TaskFamily::PushWithObstacles && scene.obstacles.is_empty() {
        return Err(EnvError::SceneTaskMismatch("push_obstacles needs at least one obstacle".into()));
    }
    let footprint = match scene.objects.first() {
        Some(o) => Some(o.footprint().map_err(|e| EnvError::SceneTaskMismatch(e.0))?),
        None => None,
    };
    let layout = if task.family.is_push() {
        ObservationLayout::push(task.family)
    } else {
        ObservationLayout::trajectory(scene.movers.len())
    };
    let sim = Simulator::new(scene.clone())?;
    let world = sim.initial_state();
    let goal = GoalSample {
        goals: Vec::new(),
        mover_starts: scene.movers.iter().map(|m| m.start_pose).collect(),
        object_starts: scene.objects.iter().map(|o| o.start_pose).collect(),
    };
    Ok(Env {
        task,
        base: scene.clone(),
        scene,
        sim,
        world,
        goal,
        rng: ChaCha8Rng::seed_from_u64(seed),
        status: Status::NeedsReset,
        footprint,
        layout,
    })
}

impl Env {
    pub fn task(&self) -> &TaskSpec {
        &self.task
    }

    /// Scene of the current episode, with sampled start poses.
    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn simulator(&self) -> &Simulator<f64> {
        &self.sim
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    /// Direct access to the dynamic state, e.g. to place bodies by hand.
    pub fn world_mut(&mut self) -> &mut World {
        &mut self.world
    }

    pub fn goal(&self) -> &GoalSample {
        &self.goal
    }

    pub fn set_goal(&mut self, goals: Vec<Pose2d>) {
        self.goal.goals = goals;
    }

    pub fn layout(&self) -> &ObservationLayout {
        &self.layout
    }

    pub fn agent_ids(&self) -> Vec<BodyId> {
        self.scene.movers.iter().map(|m| m.id).collect()
    }

    pub fn is_done(&self) -> bool {
        self.status == Status::Done
    }

    pub fn evaluate(&self) -> Evaluation {
        evaluate(&self.task, &self.world, &self.goal, &self.scene)
    }

    /// Samples a new episode. `seed` reseeds the generator; otherwise the
    /// generator continues from the previous episode.
    pub fn reset(&mut self, seed: Option<u64>) -> Result<Vec<f64>, EnvError> {
        self.reset_inner(seed)?;
        Ok(self.observation())
    }

    pub fn reset_multi(&mut self, seed: Option<u64>) -> Result<BTreeMap<BodyId, Vec<f64>>, EnvError> {
        self.reset_inner(seed)?;
        Ok(self.observations())
    }

    fn reset_inner(&mut self, seed: Option<u64>) -> Result<(), EnvError> {
        if let Some(s) = seed {
            self.rng = ChaCha8Rng::seed_from_u64(s);
        }
        self.status = Status::NeedsReset;
        let (scene, goal) = self.sample()?;
        self.sim = Simulator::new(scene.clone())?;
        self.world = self.sim.initial_state();
        self.scene = scene;
        self.goal = goal;
        self.status = Status::Running;
        Ok(())
    }

    fn region(&self) -> Aabb<f64> {
        self.task.goal_region.unwrap_or_else(|| self.base.grid.bounds())
    }

    fn uniform_in(rng: &mut ChaCha8Rng, region: &Aabb<f64>, inset: f64) -> Option<Vec2> {
        let (x0, x1) = (region.min.x + inset, region.max.x - inset);
        let (y0, y1) = (region.min.y + inset, region.max.y - inset);
        if !(x0 < x1 && y0 < y1) {
            return None;
        }
        Some(Vector2::new(rng.gen_range(x0..x1), rng.gen_range(y0..y1)))
    }

    /// Whether the object footprint at `pose` is above tiles and clear of obstacles.
    fn object_fits(&self, fp: &Footprint<f64>, pose: &Pose2d) -> bool {
        fp.pieces.iter().all(|pc| {
            let shape = pc.collision_shape(SAMPLING_CLEARANCE);
            let p = pc.world_pose(pose);
            tile_coverage(&shape, &p, &self.base.grid).is_within()
                && self.base.obstacles.iter().all(|o| !check_pair(&shape, &p, &o.shape, &o.pose).is_colliding())
        })
    }

    fn sample(&mut self) -> Result<(Scene, GoalSample), EnvError> {
        let region = self.region();
        for _ in 0..MAX_SAMPLING_ATTEMPTS {
            if let Some(found) = self.sample_once(&region) {
                return Ok(found);
            }
        }
        Err(EnvError::SamplingExhausted(MAX_SAMPLING_ATTEMPTS))
    }

    fn sample_once(&mut self, region: &Aabb<f64>) -> Option<(Scene, GoalSample)> {
        let mut scene = self.base.clone();
        let mut goals = Vec::new();
        let mover_inset = |s: &Scene, i: usize| {
            let (hx, hy) = s.movers[i].shape.inflated_half_extents();
            hx.max(hy) + SAMPLING_CLEARANCE
        };
        if self.task.family.is_push() {
            let fp = self.footprint.clone().expect("push tasks have an object");
            let inset = fp.bounding_radius() + SAMPLING_CLEARANCE;
            let rng = &mut self.rng;
            let p = Self::uniform_in(rng, region, inset)?;
            let yaw = rng.gen_range(-PI..PI);
            let start = Pose2::new(p.x, p.y, yaw);
            let g = Self::uniform_in(rng, region, inset)?;
            let goal_yaw = if self.task.family.uses_coverage() { rng.gen_range(-PI..PI) } else { 0.0 };
            let goal = Pose2::new(g.x, g.y, goal_yaw);
            let m = Self::uniform_in(rng, region, mover_inset(&scene, 0))?;
            if !self.object_fits(&fp, &start) || !self.object_fits(&fp, &goal) {
                return None;
            }
            let solved = if self.task.family.uses_coverage() {
                coverage(&fp, &start, &goal) >= self.task.success_threshold
            } else {
                (start.position() - goal.position()).norm() <= self.task.success_threshold
            };
            if solved {
                return None;
            }
            scene.objects[0].start_pose = start;
            scene.movers[0].start_pose = Pose2::new(m.x, m.y, 0.0);
            goals.push(goal);
        } else {
            for i in 0..scene.movers.len() {
                let inset = mover_inset(&scene, i);
                let s = Self::uniform_in(&mut self.rng, region, inset)?;
                let g = Self::uniform_in(&mut self.rng, region, inset)?;
                scene.movers[i].start_pose = Pose2::new(s.x, s.y, 0.0);
                goals.push(Pose2::new(g.x, g.y, 0.0));
            }
            for i in 0..scene.movers.len() {
                let shape = scene.movers[i].shape;
                if (scene.movers[i].start_pose.position() - goals[i].position()).norm() <= self.task.success_threshold {
                    return None;
                }
                if !tile_coverage(&shape, &goals[i], &scene.grid).is_within() {
                    return None;
                }
                for j in i + 1..scene.movers.len() {
                    if check_pair(&shape, &goals[i], &scene.movers[j].shape, &goals[j]).is_colliding() {
                        return None;
                    }
                }
                if scene.obstacles.iter().any(|o| check_pair(&shape, &goals[i], &o.shape, &o.pose).is_colliding()) {
                    return None;
                }
            }
        }
        if !validate_scene(&scene).is_empty() {
            return None;
        }
        let sample = GoalSample {
            goals,
            mover_starts: scene.movers.iter().map(|m| m.start_pose).collect(),
            object_starts: scene.objects.iter().map(|o| o.start_pose).collect(),
        };
        Some((scene, sample))
    }

    fn check_running(&self) -> Result<(), EnvError> {
        match self.status {
            Status::NeedsReset => Err(EnvError::NeedsReset),
            Status::Done => Err(EnvError::SteppedTerminatedEpisode),
            Status::Running => Ok(()),
        }
    }

    /// Single-agent contract: `action = [ax, ay]` for the first mover. Other
    /// movers, if any, hold position.
    pub fn step(&mut self, action: &[f64]) -> Result<Transition, EnvError> {
        self.check_running()?;
        if action.len() != 2 {
            return Err(EnvError::ActionShape(format!("expected 2 values, got {}", action.len())));
        }
        if !self.task.family.is_push() && self.scene.movers.len() != 1 {
            return Err(EnvError::ActionShape(format!(
                "{} movers need per-agent actions; use step_multi",
                self.scene.movers.len()
            )));
        }
        let cmds = Commands::from([(self.scene.movers[0].id, Vector2::new(action[0], action[1]))]);
        let out = self.step_commands(&cmds)?;
        let info = self.info(&out);
        Ok(Transition {
            observation: self.observation(),
            reward: out.reward,
            terminated: out.terminated,
            truncated: out.truncated,
            info,
        })
    }

    /// Multi-agent contract: one action per mover id.
    pub fn step_multi(&mut self, actions: &BTreeMap<BodyId, [f64; 2]>) -> Result<MultiTransition, EnvError> {
        self.check_running()?;
        let ids = self.agent_ids();
        if let Some(missing) = ids.iter().find(|id| !actions.contains_key(id)) {
            return Err(EnvError::ActionShape(format!("no action for agent {missing}")));
        }
        if let Some(extra) = actions.keys().find(|id| !ids.contains(id)) {
            return Err(EnvError::ActionShape(format!("unknown agent {extra}")));
        }
        let cmds: Commands<f64> = actions.iter().map(|(id, a)| (*id, Vector2::new(a[0], a[1]))).collect();
        let out = self.step_commands(&cmds)?;
        let info = self.info(&out);
        let observations = self.observations();
        let each = |v| ids.iter().map(|id| (*id, v)).collect::<BTreeMap<_, _>>();
        Ok(MultiTransition {
            observations,
            rewards: each(out.reward),
            terminated: ids.iter().map(|id| (*id, out.terminated)).collect(),
            truncated: ids.iter().map(|id| (*id, out.truncated)).collect(),
            info,
        })
    }

    /// Advances one control cycle with explicit commands (movers without an
    /// entry hold position) and applies the task's termination rules.
    pub fn step_commands(&mut self, commands: &Commands<f64>) -> Result<StepOutcome, EnvError> {
        self.check_running()?;
        let step = self.sim.step(&mut self.world, commands)?;
        let mut evaluation = self.evaluate();
        let fatal = fatal_for(&self.task, &step.events);
        if fatal && self.task.terminate_on_fatal {
            evaluation.is_success = false;
        }
        let ends_on_fatal = fatal && self.task.terminate_on_fatal;
        let terminated = evaluation.is_success || ends_on_fatal;
        let truncated = !terminated && self.world.step_index >= self.task.horizon;
        let reward = match self.task.reward_mode {
            RewardMode::Sparse => {
                if evaluation.is_success {
                    0.0
                } else {
                    -1.0
                }
            }
            RewardMode::Dense => match self.task.family {
                TaskFamily::MultiMoverTrajectory => {
                    let d = &evaluation.mover_distances;
                    -d.iter().sum::<f64>() / d.len().max(1) as f64
                }
                _ => -evaluation.progress(),
            },
        };
        if terminated || truncated {
            self.status = Status::Done;
        }
        Ok(StepOutcome { step, evaluation, fatal, reward, terminated, truncated })
    }

    fn info(&self, out: &StepOutcome) -> TransitionInfo {
        TransitionInfo {
            is_success: out.evaluation.is_success,
            fatal: out.fatal,
            events: out.step.events.clone(),
            goal: self.goal.goals.clone(),
            evaluation: out.evaluation.clone(),
            step: self.world.step_index,
        }
    }

    /// Single-agent observation (the first mover's view for trajectory tasks).
    pub fn observation(&self) -> Vec<f64> {
        if self.task.family.is_push() {
            self.push_observation()
        } else {
            self.trajectory_observation(0)
        }
    }

    /// Per-agent observations keyed by mover id.
    pub fn observations(&self) -> BTreeMap<BodyId, Vec<f64>> {
        if self.task.family.is_push() {
            let obs = self.push_observation();
            return self.agent_ids().into_iter().map(|id| (id, obs.clone())).collect();
        }
        (0..self.world.movers.len()).map(|i| (self.world.movers[i].id, self.trajectory_observation(i))).collect()
    }

    fn push_observation(&self) -> Vec<f64> {
        let m = &self.world.movers[0];
        let o = &self.world.objects[0];
        let g = self.goal.goals.first().copied().unwrap_or_default();
        let mut v = Vec::with_capacity(self.layout.len);
        v.extend([m.pose.x, m.pose.y, m.pose.yaw, m.velocity.vx, m.velocity.vy, m.velocity.yaw_rate]);
        v.extend([o.pose.x, o.pose.y, o.pose.yaw, o.velocity.vx, o.velocity.vy, o.velocity.yaw_rate]);
        v.extend([g.x, g.y]);
        if self.task.family.uses_coverage() {
            v.push(g.yaw);
        }
        v.extend([o.pose.x - g.x, o.pose.y - g.y, m.pose.x - o.pose.x, m.pose.y - o.pose.y]);
        v
    }

    fn trajectory_observation(&self, agent: usize) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.layout.len);
        let goal = |i: usize| self.goal.goals.get(i).copied().unwrap_or_default();
        let m = &self.world.movers[agent];
        let g = goal(agent);
        v.extend([m.pose.x, m.pose.y, m.pose.yaw, m.velocity.vx, m.velocity.vy, m.velocity.yaw_rate]);
        v.extend([g.x, g.y, g.x - m.pose.x, g.y - m.pose.y]);
        for (i, o) in self.world.movers.iter().enumerate() {
            if i == agent {
                continue;
            }
            let g = goal(i);
            v.extend([o.pose.x, o.pose.y, o.pose.yaw, o.velocity.vx, o.velocity.vy, o.velocity.yaw_rate, g.x, g.y]);
        }
        v
    }
}
