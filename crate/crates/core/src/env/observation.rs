use serde::{Deserialize, Serialize};

use super::task::TaskFamily;

/// Version of the observation layout; bumped whenever field order changes.
pub const LAYOUT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutField {
    pub name: String,
    pub offset: usize,
    pub len: usize,
    pub units: String,
}

/// Flat observation vector description, emitted as JSON for external trainers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservationLayout {
    pub version: u32,
    pub task: TaskFamily,
    pub len: usize,
    pub fields: Vec<LayoutField>,
}

impl ObservationLayout {
    fn build(task: TaskFamily, spec: &[(&str, usize, &str)]) -> Self {
        let mut fields = Vec::with_capacity(spec.len());
        let mut offset = 0;
        for (name, len, units) in spec {
            fields.push(LayoutField { name: name.to_string(), offset, len: *len, units: units.to_string() });
            offset += len;
        }
        Self { version: LAYOUT_VERSION, task, len: offset, fields }
    }

    /// Single-mover pushing layout.
    pub fn push(task: TaskFamily) -> Self {
        let goal_len = if task.uses_coverage() { 3 } else { 2 };
        Self::build(
            task,
            &[
                ("mover_pose", 3, "m, m, rad"),
                ("mover_velocity", 3, "m/s, m/s, rad/s"),
                ("object_pose", 3, "m, m, rad"),
                ("object_velocity", 3, "m/s, m/s, rad/s"),
                ("goal", goal_len, if goal_len == 3 { "m, m, rad" } else { "m, m" }),
                ("object_minus_goal", 2, "m, m"),
                ("mover_minus_object", 2, "m, m"),
            ],
        )
    }

    /// Per-agent trajectory layout: the agent's own block followed by one block
    /// per other mover in id order.
    pub fn trajectory(n_movers: usize) -> Self {
        let mut spec: Vec<(String, usize, &str)> = vec![
            ("own_pose".into(), 3, "m, m, rad"),
            ("own_velocity".into(), 3, "m/s, m/s, rad/s"),
            ("own_goal".into(), 2, "m, m"),
            ("own_goal_minus_pose".into(), 2, "m, m"),
        ];
        for k in 1..n_movers {
            spec.push((format!("other{k}_pose"), 3, "m, m, rad"));
            spec.push((format!("other{k}_velocity"), 3, "m/s, m/s, rad/s"));
            spec.push((format!("other{k}_goal"), 2, "m, m"));
        }
        let borrowed: Vec<(&str, usize, &str)> = spec.iter().map(|(n, l, u)| (n.as_str(), *l, *u)).collect();
        Self::build(TaskFamily::MultiMoverTrajectory, &borrowed)
    }

    pub fn field(&self, name: &str) -> Option<&LayoutField> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layout serializes")
    }
}
