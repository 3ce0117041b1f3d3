use std::time::Instant;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::baselines::{reciprocal_avoid, AvoidConfig, PushController, PushGains};
use crate::dynamics::Commands;
use crate::env::{make_env, Env, EnvError, TaskSpec};
use crate::{Scene, Vec2};

use super::record::{EpisodeRecord, StepRecord};

/// Scripted controller matching the task family.
pub enum Baseline {
    Push(Box<PushController>),
    Avoid(AvoidConfig),
}

impl Baseline {
    pub fn for_env(env: &Env) -> Result<Self, EnvError> {
        let scene = env.scene();
        if env.task().family.is_push() {
            let gains = PushGains { yaw_nudge: env.task().family.uses_coverage(), ..PushGains::default() };
            let c = PushController::new(&scene.objects[0], &scene.movers[0], &scene.physics)
                .map_err(|e| EnvError::SceneTaskMismatch(e.0))?
                .with_gains(gains);
            Ok(Baseline::Push(Box::new(c)))
        } else {
            Ok(Baseline::Avoid(AvoidConfig::default().with_bounds(scene.grid.bounds())))
        }
    }

    pub fn commands(&mut self, env: &Env) -> Commands<f64> {
        let world = env.world();
        match self {
            Baseline::Push(c) => {
                let goal = env.goal().goals[0];
                let a = c.command(&world.movers[0], &world.objects[0], &goal);
                Commands::from([(world.movers[0].id, a)])
            }
            Baseline::Avoid(cfg) => {
                let goals: Vec<Vec2> = env.goal().goals.iter().map(|g| g.position()).collect();
                let shapes: Vec<_> = env.scene().movers.iter().map(|m| m.shape).collect();
                reciprocal_avoid(&world.movers, &goals, &shapes, &env.scene().physics, cfg).into_iter().collect()
            }
        }
    }
}

fn snapshot(
    env: &Env,
    commands: Vec<Vec2>,
    events: crate::collision::CollisionEvents<f64>,
    success: bool,
) -> StepRecord {
    let w = env.world();
    StepRecord {
        step: w.step_index,
        mover_poses: w.movers.iter().map(|m| m.planar_pose()).collect(),
        mover_velocities: w.movers.iter().map(|m| m.planar_velocity()).collect(),
        commands,
        object_poses: w.objects.iter().map(|o| o.pose).collect(),
        events,
        success,
    }
}

/// Runs one seeded episode with the task's baseline controller.
pub fn run_episode(task: &TaskSpec, scene: &Scene, seed: u64) -> Result<EpisodeRecord, EnvError> {
    let mut env = make_env(task.clone(), scene.clone(), seed)?;
    env.reset(Some(seed))?;
    let mut baseline = Baseline::for_env(&env)?;
    let mut hasher = Sha256::new();
    env.world().hash_into(&mut hasher);
    let n = env.world().movers.len();
    let mut steps = vec![snapshot(&env, vec![Vec2::zero(); n], Default::default(), false)];
    let mut compute = Vec::new();
    let fatal = loop {
        let t0 = Instant::now();
        let cmds = baseline.commands(&env);
        compute.push(t0.elapsed().as_secs_f64());
        let out = env.step_commands(&cmds)?;
        env.world().hash_into(&mut hasher);
        let applied = out.step.applied.iter().map(|(_, a)| *a).collect();
        steps.push(snapshot(&env, applied, out.step.events, out.evaluation.is_success));
        if out.terminated || out.truncated {
            break out.fatal && task.terminate_on_fatal;
        }
    };
    Ok(EpisodeRecord {
        task: task.family,
        seed,
        dt: env.scene().physics.dt,
        success_threshold: task.success_threshold,
        scene: env.scene().clone(),
        goals: env.goal().goals.clone(),
        steps,
        compute_time_s: compute,
        fatal,
        trajectory_hash: hex::encode(hasher.finalize()),
    })
}

/// Runs `episodes` episodes with seeds `seed, seed + 1, ...` on the rayon
/// pool. Records come back in seed order whatever the scheduling.
pub fn run_benchmark(
    task: &TaskSpec,
    scene: &Scene,
    episodes: usize,
    seed: u64,
) -> Result<Vec<EpisodeRecord>, EnvError> {
    (0..episodes as u64).into_par_iter().map(|k| run_episode(task, scene, seed.wrapping_add(k))).collect()
}
