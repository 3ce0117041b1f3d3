use serde::{Deserialize, Serialize};

use crate::collision::CollisionEvents;
use crate::env::TaskFamily;
use crate::scene::BodyId;
use crate::{Pose2d, Scene, Vec2};

/// State of every body after one control cycle.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    pub mover_poses: Vec<Pose2d>,
    pub mover_velocities: Vec<Vec2>,
    /// Accelerations applied during the step, after clamping.
    pub commands: Vec<Vec2>,
    pub object_poses: Vec<Pose2d>,
    #[serde(default, skip_serializing_if = "CollisionEvents::is_empty")]
    pub events: CollisionEvents<f64>,
    pub success: bool,
}

/// Everything observed during one episode.
///
/// `steps[0]` is the reset state (step 0, no commands); `steps[k]` follows the
/// k-th control cycle. Every series in a step is index-aligned with the
/// scene's movers or objects.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub task: TaskFamily,
    pub seed: u64,
    pub dt: f64,
    pub success_threshold: f64,
    pub scene: Scene,
    pub goals: Vec<Pose2d>,
    pub steps: Vec<StepRecord>,
    /// Controller compute time per control invocation, s, one entry per control
    /// cycle of the full episode (kept whole by [`EpisodeRecord::decimated`]).
    #[serde(default)]
    pub compute_time_s: Vec<f64>,
    /// The episode ended on a fatal collision.
    #[serde(default)]
    pub fatal: bool,
    /// Hex SHA-256 over the full state of every step.
    #[serde(default)]
    pub trajectory_hash: String,
}

impl EpisodeRecord {
    pub fn mover_ids(&self) -> Vec<BodyId> {
        self.scene.movers.iter().map(|m| m.id).collect()
    }

    pub fn last_step(&self) -> u64 {
        self.steps.last().map_or(0, |s| s.step)
    }

    /// Simulated duration, s.
    pub fn duration(&self) -> f64 {
        self.last_step() as f64 * self.dt
    }

    pub fn is_success(&self) -> bool {
        self.steps.last().is_some_and(|s| s.success)
    }

    /// Goals attempted: one per episode for push tasks, one per mover for the
    /// trajectory task.
    pub fn goal_count(&self) -> usize {
        match self.task {
            TaskFamily::MultiMoverTrajectory => self.scene.movers.len(),
            _ => 1,
        }
    }

    /// Keeps every `stride`-th step plus the final one.
    pub fn decimated(&self, stride: usize) -> EpisodeRecord {
        let stride = stride.max(1);
        let mut out = self.clone();
        let n = self.steps.len();
        out.steps = self
            .steps
            .iter()
            .enumerate()
            .filter(|(k, _)| k % stride == 0 || *k + 1 == n)
            .map(|(_, s)| s.clone())
            .collect();
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}
