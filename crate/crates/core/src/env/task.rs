use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::Aabb;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskFamily {
    PushBox,
    PushT,
    PushWithObstacles,
    MultiMoverTrajectory,
}

impl TaskFamily {
    pub const ALL: [TaskFamily; 4] =
        [TaskFamily::PushBox, TaskFamily::PushT, TaskFamily::PushWithObstacles, TaskFamily::MultiMoverTrajectory];

    /// Short name used on the command line.
    pub fn cli_name(self) -> &'static str {
        match self {
            TaskFamily::PushBox => "push_box",
            TaskFamily::PushT => "push_t",
            TaskFamily::PushWithObstacles => "push_obstacles",
            TaskFamily::MultiMoverTrajectory => "traj",
        }
    }

    pub fn is_push(self) -> bool {
        !matches!(self, TaskFamily::MultiMoverTrajectory)
    }

    /// Success is measured by coverage rather than distance.
    pub fn uses_coverage(self) -> bool {
        matches!(self, TaskFamily::PushT)
    }
}

impl fmt::Display for TaskFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for TaskFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        TaskFamily::ALL
            .into_iter()
            .find(|t| t.cli_name() == s)
            .ok_or_else(|| format!("unknown task `{s}` (expected push_box, push_t, push_obstacles or traj)"))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardMode {
    /// 0 on success, -1 otherwise.
    #[default]
    Sparse,
    /// Negative distance, or negative uncovered fraction for coverage tasks.
    Dense,
}

/// Task family plus success threshold, horizon and sampling configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub family: TaskFamily,
    /// Meters for position tasks, coverage ratio for PushT.
    pub success_threshold: f64,
    /// Maximum number of steps per episode.
    pub horizon: u64,
    pub reward_mode: RewardMode,
    /// Region for start and goal sampling; the tile bounds when absent.
    pub goal_region: Option<Aabb<f64>>,
    /// End the episode on a fatal collision.
    pub terminate_on_fatal: bool,
}

impl TaskSpec {
    pub fn new(family: TaskFamily) -> Self {
        let (success_threshold, horizon) = match family {
            TaskFamily::PushBox | TaskFamily::PushWithObstacles => (0.05, 50_000),
            TaskFamily::PushT => (0.7, 50_000),
            TaskFamily::MultiMoverTrajectory => (0.10, 30_000),
        };
        let terminate_on_fatal = matches!(family, TaskFamily::PushWithObstacles | TaskFamily::MultiMoverTrajectory);
        Self {
            family,
            success_threshold,
            horizon,
            reward_mode: RewardMode::Sparse,
            goal_region: None,
            terminate_on_fatal,
        }
    }

    pub fn with_reward(mut self, mode: RewardMode) -> Self {
        self.reward_mode = mode;
        self
    }

    pub fn with_horizon(mut self, horizon: u64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn is_valid(&self) -> bool {
        let t = self.success_threshold;
        let threshold_ok = t > 0.0 && t.is_finite() && (!self.family.uses_coverage() || t <= 1.0);
        threshold_ok && self.horizon >= 1
    }
}
