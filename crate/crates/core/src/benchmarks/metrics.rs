use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::collision::CollisionEvents;
use crate::env::{coverage, TaskFamily};
use crate::scene::BodyId;

use super::record::EpisodeRecord;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum MetricsError {
    #[error("records contain {goals} goals but n1 = {n1}")]
    CountMismatch { goals: usize, n1: usize },
    #[error("need {needed} successes, records contain {available}")]
    InsufficientSuccesses { needed: usize, available: usize },
    #[error("window of {t_ms} ms exceeds the recorded {span_ms} ms")]
    WindowTooLong { t_ms: f64, span_ms: f64 },
    #[error("records carry no controller timings")]
    MissingTimings,
    #[error("invalid metrics config: {0}")]
    InvalidConfig(String),
}

/// Goal counts and parameters of the metric suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsConfig {
    /// Total number of goals.
    pub n1: usize,
    /// Successes used for throughput and correction means; goals per mover for makespan.
    pub n2: usize,
    /// Completions for the trajectory throughput.
    pub n3: usize,
    /// Completions for the process time.
    pub n4: usize,
    /// Smoothness window, ms.
    pub t_ms: f64,
    /// Smoothness weights on velocity, acceleration and jerk norms.
    pub weights: [f64; 3],
    /// Correction hysteresis, in units of the progress measure.
    pub h: f64,
}

impl MetricsConfig {
    pub fn is_valid(&self) -> bool {
        self.n1 >= 1
            && self.n2 >= 1
            && self.n3 >= 1
            && self.n4 >= 1
            && self.t_ms > 0.0
            && self.weights.iter().all(|w| *w >= 0.0)
            && self.h > 0.0
    }

    /// Counts taken from the records themselves: every goal, every success,
    /// the whole recorded span, unit weights and `h` = 10% of the threshold.
    pub fn from_records(records: &[EpisodeRecord]) -> Self {
        let n1 = records.iter().map(|r| r.goal_count()).sum::<usize>().max(1);
        let completions = completion_times_ms(records);
        let (n2, n3) = match records.first().map(|r| r.task) {
            Some(TaskFamily::MultiMoverTrajectory) => {
                let per_mover = mover_completion_counts(records).into_iter().min().unwrap_or(0);
                (per_mover.max(1), completions.len().max(1))
            }
            _ => {
                let s = records.iter().filter(|r| r.is_success()).count().max(1);
                (s, s)
            }
        };
        let t_ms = total_span_ms(records).floor().max(1.0);
        let threshold = records.first().map_or(0.05, |r| r.success_threshold);
        Self { n1, n2, n3, n4: n3, t_ms, weights: [1.0, 1.0, 1.0], h: 0.1 * threshold }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PushMetrics {
    pub success_rate: f64,
    pub throughput: Option<f64>,
    pub overshoot_corrections: Option<f64>,
    pub distance_corrections: Option<f64>,
    pub collisions: f64,
    /// Absent for single-mover scenes.
    pub mover_mover: Option<f64>,
    pub mover_obstacle: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajMetrics {
    pub success_rate: f64,
    pub makespan_ms: Option<f64>,
    pub throughput_ms: Option<f64>,
    pub collisions: f64,
    pub mover_mover: f64,
    pub mover_obstacle: f64,
    pub smoothness: Option<f64>,
    pub process_time_s: Option<f64>,
}

/// Successful goals over `n1`.
pub fn success_rate(records: &[EpisodeRecord], n1: usize) -> Result<f64, MetricsError> {
    let goals: usize = records.iter().map(|r| r.goal_count()).sum();
    if goals > n1 || n1 == 0 {
        return Err(MetricsError::CountMismatch { goals, n1 });
    }
    let reached: usize = records.iter().map(|r| completion_steps(r).iter().flatten().count()).sum();
    Ok(reached as f64 / n1 as f64)
}

/// `n2` over the summed episode time of the first `n2` successful episodes, goals/s.
pub fn push_throughput(records: &[EpisodeRecord], n2: usize) -> Result<f64, MetricsError> {
    let times: Vec<f64> = records.iter().filter(|r| r.is_success()).map(|r| r.duration()).take(n2).collect();
    if times.len() < n2 || n2 == 0 {
        return Err(MetricsError::InsufficientSuccesses { needed: n2, available: times.len() });
    }
    Ok(n2 as f64 / times.iter().sum::<f64>())
}

#[derive(Clone, Copy, Debug)]
struct Window {
    start: usize,
    end: usize,
}

fn overshoot_windows(along_track: &[f64], h: f64) -> Vec<Window> {
    let mut out = Vec::new();
    let mut armed: Option<usize> = None;
    for (k, &s) in along_track.iter().enumerate() {
        match armed {
            None if s > h => armed = Some(k),
            Some(start) if s <= 0.0 => {
                out.push(Window { start, end: k });
                armed = None;
            }
            _ => {}
        }
    }
    out
}

fn distance_windows(progress: &[f64], h: f64) -> Vec<Window> {
    let mut out = Vec::new();
    let Some(&first) = progress.first() else { return out };
    let (mut peak, mut min) = (first, first);
    let mut rise: Option<usize> = None;
    for (k, &x) in progress.iter().enumerate() {
        if let Some(start) = rise {
            if x < min + h {
                out.push(Window { start, end: k });
                rise = None;
                min = min.min(x);
            }
            continue;
        }
        if x < min {
            min = x;
        } else if peak - min >= h && x > min + h {
            rise = Some(k);
        } else if x > peak {
            peak = x;
            min = x;
        }
    }
    out
}

/// Corrective movements in one approach: `(overshoot, distance)`.
///
/// A distance correction is a rise of the progress measure by more than `h`
/// above its running minimum, after it fell by at least `h` from the preceding
/// peak, that later comes back below the minimum plus `h`. An overshoot
/// correction is the along-track coordinate (zero at the goal, positive past
/// it) exceeding `h` and later returning to zero or below. A distance
/// correction that overlaps an overshoot correction is not counted.
pub fn count_corrections(progress: &[f64], along_track: &[f64], h: f64) -> (usize, usize) {
    let over = overshoot_windows(along_track, h);
    let dist = distance_windows(progress, h);
    let overlaps = |d: &Window| over.iter().any(|o| d.start <= o.end && o.start <= d.end);
    (over.len(), dist.iter().filter(|d| !overlaps(d)).count())
}

/// Progress (distance or uncovered fraction) and along-track series of a push record.
pub fn push_series(record: &EpisodeRecord) -> (Vec<f64>, Vec<f64>) {
    let Some(goal) = record.goals.first() else { return (vec![], vec![]) };
    let start = record.steps.first().and_then(|s| s.object_poses.first()).copied().unwrap_or_default();
    let u = (goal.position() - start.position()).normalized().unwrap_or(crate::Vec2::new(1.0, 0.0));
    let fp =
        if record.task.uses_coverage() { record.scene.objects.first().and_then(|o| o.footprint().ok()) } else { None };
    let mut progress = Vec::with_capacity(record.steps.len());
    let mut track = Vec::with_capacity(record.steps.len());
    for s in &record.steps {
        let Some(o) = s.object_poses.first() else { continue };
        let d = o.position() - goal.position();
        progress.push(match &fp {
            Some(fp) => 1.0 - coverage(fp, o, goal),
            None => d.norm(),
        });
        track.push(d.dot(u));
    }
    (progress, track)
}

/// Step at which each goal of the record was reached, if it was.
///
/// Push goals are reached at the successful final step. A trajectory goal is
/// reached when its mover enters the threshold for the last time, provided it
/// is still inside at the end and the episode did not end on a fatal collision.
pub fn completion_steps(record: &EpisodeRecord) -> Vec<Option<u64>> {
    if record.task.is_push() {
        return vec![record.is_success().then(|| record.last_step())];
    }
    let n = record.scene.movers.len();
    (0..n)
        .map(|i| {
            if record.fatal {
                return None;
            }
            let goal = record.goals.get(i)?.position();
            let inside = |k: usize| {
                record.steps[k]
                    .mover_poses
                    .get(i)
                    .is_some_and(|p| (p.position() - goal).norm() <= record.success_threshold)
            };
            let mut k = record.steps.len();
            while k > 0 && inside(k - 1) {
                k -= 1;
            }
            (k < record.steps.len()).then(|| record.steps[k].step)
        })
        .collect()
}

fn total_span_ms(records: &[EpisodeRecord]) -> f64 {
    records.iter().map(|r| r.last_step() as f64 * (r.dt * 1000.0)).sum()
}

/// Start of each record on the concatenated simulation timeline, ms.
fn offsets_ms(records: &[EpisodeRecord]) -> Vec<f64> {
    let mut acc = 0.0;
    records
        .iter()
        .map(|r| {
            let o = acc;
            acc += r.last_step() as f64 * (r.dt * 1000.0);
            o
        })
        .collect()
}

/// Completion times of all goals on the concatenated timeline, ms, with the
/// goal's mover index.
fn completion_events_ms(records: &[EpisodeRecord]) -> Vec<(f64, usize)> {
    let mut out = Vec::new();
    for (r, o) in records.iter().zip(offsets_ms(records)) {
        for (i, c) in completion_steps(r).into_iter().enumerate() {
            if let Some(step) = c {
                out.push((o + step as f64 * (r.dt * 1000.0), i));
            }
        }
    }
    out
}

fn completion_times_ms(records: &[EpisodeRecord]) -> Vec<f64> {
    let mut t: Vec<f64> = completion_events_ms(records).into_iter().map(|(t, _)| t).collect();
    t.sort_by(f64::total_cmp);
    t
}

fn mover_completion_counts(records: &[EpisodeRecord]) -> Vec<usize> {
    let n = records.iter().map(|r| r.scene.movers.len()).max().unwrap_or(0);
    let mut counts = vec![0; n];
    for (_, i) in completion_events_ms(records) {
        counts[i] += 1;
    }
    counts
}

/// Time at which the slowest mover completes its `n2`-th goal, ms.
pub fn makespan(records: &[EpisodeRecord], n2: usize) -> Result<f64, MetricsError> {
    let n = records.iter().map(|r| r.scene.movers.len()).max().unwrap_or(0);
    if n == 0 || n2 == 0 {
        return Err(MetricsError::InsufficientSuccesses { needed: n2, available: 0 });
    }
    let mut per_mover: Vec<Vec<f64>> = vec![Vec::new(); n];
    for (t, i) in completion_events_ms(records) {
        per_mover[i].push(t);
    }
    let mut worst = 0.0f64;
    for times in &mut per_mover {
        times.sort_by(f64::total_cmp);
        let Some(t) = times.get(n2 - 1) else {
            return Err(MetricsError::InsufficientSuccesses { needed: n2, available: times.len() });
        };
        worst = worst.max(*t);
    }
    Ok(worst)
}

/// Time of the `n3`-th goal completion by any mover, ms.
pub fn traj_throughput(records: &[EpisodeRecord], n3: usize) -> Result<f64, MetricsError> {
    let t = completion_times_ms(records);
    if n3 == 0 || t.len() < n3 {
        return Err(MetricsError::InsufficientSuccesses { needed: n3, available: t.len() });
    }
    Ok(t[n3 - 1])
}

/// Mean over movers and samples in the first `t_ms` of
/// `w_v |v| + w_a |a| + w_j |j|`, with `a` the applied command and `j` its
/// finite difference. Samples are steps `k >= 1` of each record.
pub fn smoothness(records: &[EpisodeRecord], t_ms: f64, weights: [f64; 3]) -> Result<f64, MetricsError> {
    let span_ms = total_span_ms(records);
    if t_ms > span_ms + 1e-9 {
        return Err(MetricsError::WindowTooLong { t_ms, span_ms });
    }
    let [wv, wa, wj] = weights;
    let mut sum = 0.0;
    let mut count = 0usize;
    for (r, offset) in records.iter().zip(offsets_ms(records)) {
        for k in 1..r.steps.len() {
            let (prev, cur) = (&r.steps[k - 1], &r.steps[k]);
            if offset + cur.step as f64 * (r.dt * 1000.0) > t_ms + 1e-9 {
                break;
            }
            let gap = (cur.step - prev.step) as f64 * r.dt;
            for i in 0..cur.commands.len() {
                let v = cur.mover_velocities[i].norm();
                let a = cur.commands[i];
                let j = (a - prev.commands[i]) * (1.0 / gap);
                sum += wv * v + wa * a.norm() + wj * j.norm();
                count += 1;
            }
        }
    }
    if count == 0 {
        return Ok(0.0);
    }
    Ok(sum / count as f64)
}

/// Controller compute time spent until the `n4`-th goal completion, s.
pub fn process_time(records: &[EpisodeRecord], n4: usize) -> Result<f64, MetricsError> {
    if records.iter().any(|r| r.compute_time_s.len() as u64 != r.last_step()) {
        return Err(MetricsError::MissingTimings);
    }
    let t = completion_times_ms(records);
    if n4 == 0 || t.len() < n4 {
        return Err(MetricsError::InsufficientSuccesses { needed: n4, available: t.len() });
    }
    let until_ms = t[n4 - 1];
    let mut total = 0.0;
    for (r, offset) in records.iter().zip(offsets_ms(records)) {
        for (k, c) in r.compute_time_s.iter().enumerate() {
            if offset + k as f64 * (r.dt * 1000.0) > until_ms {
                break;
            }
            total += c;
        }
    }
    Ok(total)
}

/// Collision onsets per category: `(mover_mover, mover_obstacle, object_obstacle)`.
/// A contact that persists over consecutive steps counts once.
pub fn collision_onsets(record: &EpisodeRecord) -> (usize, usize, usize) {
    fn pairs(e: &[crate::collision::PairEvent<f64>]) -> BTreeSet<(BodyId, BodyId)> {
        e.iter().map(|p| (p.a, p.b)).collect()
    }
    let mut prev = [BTreeSet::new(), BTreeSet::new(), BTreeSet::new()];
    let mut counts = [0usize; 3];
    let empty = CollisionEvents::default();
    for s in &record.steps {
        let e = if s.events.is_empty() { &empty } else { &s.events };
        let cur = [pairs(&e.mover_mover), pairs(&e.mover_obstacle), pairs(&e.object_obstacle)];
        for c in 0..3 {
            counts[c] += cur[c].difference(&prev[c]).count();
        }
        prev = cur;
    }
    (counts[0], counts[1], counts[2])
}

pub fn compute_push_metrics(records: &[EpisodeRecord], cfg: &MetricsConfig) -> Result<PushMetrics, MetricsError> {
    if !cfg.is_valid() {
        return Err(MetricsError::InvalidConfig(format!("{cfg:?}")));
    }
    let success_rate = success_rate(records, cfg.n1)?;
    let throughput = push_throughput(records, cfg.n2).ok();
    let successes: Vec<&EpisodeRecord> = records.iter().filter(|r| r.is_success()).take(cfg.n2).collect();
    let (overshoot, distance) = if successes.len() == cfg.n2 {
        let (mut o, mut d) = (0usize, 0usize);
        for r in &successes {
            let (progress, track) = push_series(r);
            let (a, b) = count_corrections(&progress, &track, cfg.h);
            o += a;
            d += b;
        }
        (Some(o as f64 / cfg.n2 as f64), Some(d as f64 / cfg.n2 as f64))
    } else {
        (None, None)
    };
    let (mut mm, mut mo, mut oo) = (0usize, 0usize, 0usize);
    for r in records {
        let (a, b, c) = collision_onsets(r);
        mm += a;
        mo += b;
        oo += c;
    }
    let n1 = cfg.n1 as f64;
    let multi = records.iter().any(|r| r.scene.movers.len() > 1);
    Ok(PushMetrics {
        success_rate,
        throughput,
        overshoot_corrections: overshoot,
        distance_corrections: distance,
        collisions: (mm + mo + oo) as f64 / n1,
        mover_mover: multi.then_some(mm as f64 / n1),
        mover_obstacle: mo as f64 / n1,
    })
}

pub fn compute_traj_metrics(records: &[EpisodeRecord], cfg: &MetricsConfig) -> Result<TrajMetrics, MetricsError> {
    if !cfg.is_valid() {
        return Err(MetricsError::InvalidConfig(format!("{cfg:?}")));
    }
    let success_rate = success_rate(records, cfg.n1)?;
    let (mut mm, mut mo, mut oo) = (0usize, 0usize, 0usize);
    for r in records {
        let (a, b, c) = collision_onsets(r);
        mm += a;
        mo += b;
        oo += c;
    }
    Ok(TrajMetrics {
        success_rate,
        makespan_ms: makespan(records, cfg.n2).ok(),
        throughput_ms: traj_throughput(records, cfg.n3).ok(),
        collisions: (mm + mo + oo) as f64,
        mover_mover: mm as f64,
        mover_obstacle: mo as f64,
        smoothness: smoothness(records, cfg.t_ms, cfg.weights).ok(),
        process_time_s: process_time(records, cfg.n4).ok(),
    })
}

/// Exported metric set of one benchmark batch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub task: TaskFamily,
    pub episodes: usize,
    pub success_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub throughput_goals_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overshoot_corrections: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_corrections: Option<f64>,
    pub collisions: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mover_mover_collisions: Option<f64>,
    pub mover_obstacle_collisions: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub makespan_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub throughput_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smoothness: Option<f64>,
    pub smoothness_weights: [f64; 3],
    /// Wall-clock controller time; not reproducible bit for bit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub process_time_s: Option<f64>,
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    pub n4: usize,
    pub t_ms: f64,
    /// Hex SHA-256 over the trajectory hashes of all episodes, in seed order.
    pub trajectory_hash: String,
}

/// Fields holding wall-clock measurements.
pub const WALL_TIME_FIELDS: [&str; 1] = ["process_time_s"];

const CSV_FIELDS: [&str; 20] = [
    "task",
    "episodes",
    "success_rate",
    "throughput_goals_per_s",
    "overshoot_corrections",
    "distance_corrections",
    "collisions",
    "mover_mover_collisions",
    "mover_obstacle_collisions",
    "makespan_ms",
    "throughput_ms",
    "smoothness",
    "smoothness_weights",
    "process_time_s",
    "n1",
    "n2",
    "n3",
    "n4",
    "t_ms",
    "trajectory_hash",
];

impl MetricsReport {
    /// Task-appropriate metric suite over the records.
    pub fn compute(records: &[EpisodeRecord], cfg: &MetricsConfig) -> Result<Self, MetricsError> {
        let task = records.first().map_or(TaskFamily::PushBox, |r| r.task);
        let mut h = Sha256::new();
        for r in records {
            h.update(r.trajectory_hash.as_bytes());
        }
        let trajectory_hash = hex::encode(h.finalize());
        let mut rep = MetricsReport {
            task,
            episodes: records.len(),
            success_rate: 0.0,
            throughput_goals_per_s: None,
            overshoot_corrections: None,
            distance_corrections: None,
            collisions: 0.0,
            mover_mover_collisions: None,
            mover_obstacle_collisions: 0.0,
            makespan_ms: None,
            throughput_ms: None,
            smoothness: None,
            smoothness_weights: cfg.weights,
            process_time_s: None,
            n1: cfg.n1,
            n2: cfg.n2,
            n3: cfg.n3,
            n4: cfg.n4,
            t_ms: cfg.t_ms,
            trajectory_hash,
        };
        if task.is_push() {
            let m = compute_push_metrics(records, cfg)?;
            rep.success_rate = m.success_rate;
            rep.throughput_goals_per_s = m.throughput;
            rep.overshoot_corrections = m.overshoot_corrections;
            rep.distance_corrections = m.distance_corrections;
            rep.collisions = m.collisions;
            rep.mover_mover_collisions = m.mover_mover;
            rep.mover_obstacle_collisions = m.mover_obstacle;
        } else {
            let m = compute_traj_metrics(records, cfg)?;
            rep.success_rate = m.success_rate;
            rep.makespan_ms = m.makespan_ms;
            rep.throughput_ms = m.throughput_ms;
            rep.collisions = m.collisions;
            rep.mover_mover_collisions = Some(m.mover_mover);
            rep.mover_obstacle_collisions = m.mover_obstacle;
            rep.smoothness = m.smoothness;
            rep.process_time_s = m.process_time_s;
        }
        Ok(rep)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with the wall-clock fields removed, for reproducibility checks.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(o) = v.as_object_mut() {
            for f in WALL_TIME_FIELDS {
                o.remove(f);
            }
        }
        serde_json::to_string_pretty(&v).expect("value serializes")
    }

    /// Header plus one row; absent values are empty cells.
    pub fn to_csv(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        let cells: Vec<String> = CSV_FIELDS
            .iter()
            .map(|f| match v.get(*f) {
                None | Some(serde_json::Value::Null) => String::new(),
                Some(serde_json::Value::String(s)) => s.clone(),
                Some(serde_json::Value::Array(a)) => a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";"),
                Some(x) => x.to_string(),
            })
            .collect();
        format!("{}\n{}\n", CSV_FIELDS.join(","), cells.join(","))
    }
}
