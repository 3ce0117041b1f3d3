//! Task environments over the simulator: seeded episode sampling, rewards,
//! success predicates and termination, with single- and multi-agent contracts.

mod coverage;
#[allow(clippy::module_inception)]
mod env;
mod observation;
mod scenes;
mod task;

pub use coverage::coverage;
pub use env::{
    evaluate, is_success, make_env, Env, EnvError, Evaluation, GoalSample, MultiTransition, StepOutcome, Transition,
    TransitionInfo, MAX_SAMPLING_ATTEMPTS,
};
pub use observation::{LayoutField, ObservationLayout, LAYOUT_VERSION};
pub use scenes::{
    builtin_scene, default_scene, push_box_scene, push_obstacles_scene, push_t_scene, traj_scene, BUILTIN_SCENES,
};
pub use task::{RewardMode, TaskFamily, TaskSpec};
