#![allow(dead_code)]

use std::collections::BTreeSet;
use std::f64::consts::PI;

use magbot::benchmarks::*;
use magbot::collision::{CollisionEvents, PairEvent};
use magbot::env::{push_box_scene, traj_scene, TaskFamily};
use magbot::scene::BodyId;
use magbot::{Pose2d, Scene, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DT: f64 = 0.001;

pub fn step(k: u64, movers: Vec<Pose2d>, commands: Vec<Vec2>, success: bool) -> StepRecord {
    let n = movers.len();
    StepRecord {
        step: k,
        mover_poses: movers,
        mover_velocities: vec![Vec2::zero(); n],
        commands,
        object_poses: vec![],
        events: CollisionEvents::default(),
        success,
    }
}

pub fn record(task: TaskFamily, scene: Scene, goals: Vec<Pose2d>, steps: Vec<StepRecord>) -> EpisodeRecord {
    let last = steps.last().map_or(0, |s| s.step);
    EpisodeRecord {
        task,
        seed: 0,
        dt: DT,
        success_threshold: if task == TaskFamily::MultiMoverTrajectory { 0.1 } else { 0.05 },
        scene,
        goals,
        steps,
        compute_time_s: vec![0.0; last as usize],
        fatal: false,
        trajectory_hash: String::new(),
    }
}

/// Push record lasting `last` steps, successful or not.
pub fn push_record(last: u64, success: bool) -> EpisodeRecord {
    let at = Pose2d::new(0.3, 0.3, 0.0);
    let steps = vec![step(0, vec![at], vec![Vec2::zero()], false), step(last, vec![at], vec![Vec2::zero()], success)];
    record(TaskFamily::PushBox, push_box_scene(), vec![Pose2d::new(0.5, 0.5, 0.0)], steps)
}

pub fn mover_event(step: &mut StepRecord, a: u32, b: u32) {
    step.events.mover_obstacle.push(PairEvent { a: BodyId(a), b: BodyId(b), time: step.step as f64 * DT });
}

/// Three-mover record where mover `i` sits on its goal from step `arrive[i]`
/// to `last` and far away before.
pub fn traj_record(arrive: [u64; 3], last: u64) -> EpisodeRecord {
    let goals = vec![Pose2d::new(0.2, 0.2, 0.0), Pose2d::new(0.5, 0.5, 0.0), Pose2d::new(0.8, 0.2, 0.0)];
    let away = Pose2d::new(0.0, 0.7, 0.0);
    let steps = (0..=last)
        .map(|k| {
            let poses = (0..3).map(|i| if k >= arrive[i] { goals[i] } else { away }).collect();
            step(k, poses, vec![Vec2::zero(); 3], arrive.iter().all(|&a| k >= a))
        })
        .collect();
    record(TaskFamily::MultiMoverTrajectory, traj_scene(), goals, steps)
}

pub fn single_mover_motion(last: u64, x: impl Fn(f64) -> (f64, f64, f64)) -> EpisodeRecord {
    let steps = (0..=last)
        .map(|k| {
            let t = k as f64 * DT;
            let (p, v, a) = x(t);
            let mut s = step(k, vec![Pose2d::new(p, 0.3, 0.0)], vec![Vec2::new(a, 0.0)], false);
            s.mover_velocities = vec![Vec2::new(v, 0.0)];
            s
        })
        .collect();
    record(TaskFamily::PushBox, push_box_scene(), vec![Pose2d::new(0.5, 0.5, 0.0)], steps)
}

pub fn random_traj_record(rng: &mut ChaCha8Rng, seed: u64) -> EpisodeRecord {
    let last = rng.gen_range(5..60u64);
    let goals: Vec<Pose2d> =
        (0..3).map(|_| Pose2d::new(rng.gen_range(0.1..0.8), rng.gen_range(0.1..0.6), 0.0)).collect();
    let mut pos: Vec<Vec2> = goals.iter().map(|g| g.position() + Vec2::new(0.15, 0.0)).collect();
    let mut steps = Vec::new();
    let mut contact = false;
    for k in 0..=last {
        for p in &mut pos {
            *p += Vec2::new(rng.gen_range(-0.04..0.03), rng.gen_range(-0.02..0.02));
        }
        let commands = (0..3).map(|_| Vec2::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0))).collect();
        let mut s = step(k, pos.iter().map(|p| Pose2d::new(p.x, p.y, 0.0)).collect(), commands, false);
        s.mover_velocities = (0..3).map(|_| Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
        if k > 0 && rng.gen_bool(0.2) {
            contact = !contact;
        }
        if contact {
            s.events.mover_mover.push(PairEvent { a: BodyId(0), b: BodyId(2), time: k as f64 * DT });
        }
        steps.push(s);
    }
    let mut r = record(TaskFamily::MultiMoverTrajectory, traj_scene(), goals, steps);
    let g = r.goals.clone();
    let done = |s: &StepRecord| s.mover_poses.iter().zip(&g).all(|(p, g)| (p.position() - g.position()).norm() <= 0.1);
    for s in &mut r.steps {
        s.success = done(s);
    }
    r.seed = seed;
    r.fatal = rng.gen_bool(0.1);
    r.compute_time_s = (0..last).map(|_| rng.gen_range(0.0..1e-3)).collect();
    r
}

pub mod reference {
    //! Straightforward re-computation of the metric suite from raw records.

    use super::*;

    pub fn completion(r: &EpisodeRecord, i: usize) -> Option<u64> {
        if r.task != TaskFamily::MultiMoverTrajectory {
            let last = r.steps.last()?;
            return last.success.then_some(last.step);
        }
        if r.fatal {
            return None;
        }
        let g = r.goals[i];
        let mut entered = None;
        for s in &r.steps {
            let p = s.mover_poses[i];
            let d = ((p.x - g.x).powi(2) + (p.y - g.y).powi(2)).sqrt();
            if d <= r.success_threshold {
                entered.get_or_insert(s.step);
            } else {
                entered = None;
            }
        }
        entered
    }

    /// `(time ms, mover)` of every completion.
    pub fn events(recs: &[EpisodeRecord]) -> Vec<(f64, usize)> {
        let mut out = Vec::new();
        let mut offset = 0.0;
        for r in recs {
            let goals = if r.task == TaskFamily::MultiMoverTrajectory { r.scene.movers.len() } else { 1 };
            for i in 0..goals {
                if let Some(k) = completion(r, i) {
                    out.push((offset + k as f64 * (r.dt * 1000.0), i));
                }
            }
            offset += r.steps.last().unwrap().step as f64 * (r.dt * 1000.0);
        }
        out
    }

    pub fn onsets(r: &EpisodeRecord) -> usize {
        let mut prev: BTreeSet<(u32, u32)> = BTreeSet::new();
        let mut n = 0;
        for s in &r.steps {
            let cur: BTreeSet<(u32, u32)> = s.events.mover_mover.iter().map(|e| (e.a.0, e.b.0)).collect();
            n += cur.iter().filter(|p| !prev.contains(p)).count();
            prev = cur;
        }
        n
    }

    pub fn smoothness(recs: &[EpisodeRecord], t_ms: f64, w: [f64; 3]) -> f64 {
        let (mut sum, mut count) = (0.0, 0usize);
        let mut offset = 0.0;
        for r in recs {
            for k in 1..r.steps.len() {
                let s = &r.steps[k];
                if offset + s.step as f64 * (r.dt * 1000.0) > t_ms + 1e-9 {
                    break;
                }
                let h = (s.step - r.steps[k - 1].step) as f64 * r.dt;
                for i in 0..s.commands.len() {
                    let v = s.mover_velocities[i];
                    let a = s.commands[i];
                    let p = r.steps[k - 1].commands[i];
                    let j = Vec2::new((a.x - p.x) * (1.0 / h), (a.y - p.y) * (1.0 / h));
                    sum += w[0] * v.x.hypot(v.y) + w[1] * a.x.hypot(a.y) + w[2] * j.x.hypot(j.y);
                    count += 1;
                }
            }
            offset += r.steps.last().unwrap().step as f64 * (r.dt * 1000.0);
        }
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }
}

/// Metric rows checked against synthetic records and the reference.
pub mod checks {
    use super::*;

    pub fn success_rate_examples() {
        let mut recs: Vec<EpisodeRecord> = (0..199).map(|_| push_record(10, true)).collect();
        recs.push(push_record(10, false));
        assert_eq!(success_rate(&recs, 200).unwrap(), 0.995);
        let none: Vec<_> = (0..10).map(|_| push_record(10, false)).collect();
        assert_eq!(success_rate(&none, 10).unwrap(), 0.0);
        let all: Vec<_> = (0..200).map(|_| push_record(10, true)).collect();
        assert_eq!(success_rate(&all, 200).unwrap(), 1.0);
    }

    pub fn push_throughput_examples() {
        let recs: Vec<_> = (0..100).map(|k| push_record(if k < 60 { 845 } else { 846 }, true)).collect();
        let t = push_throughput(&recs, 100).unwrap();
        assert!((t - 100.0 / 84.54).abs() < 1e-9);
        assert_eq!((t * 1e4).round() / 1e4, 1.1829);
        assert_eq!(push_throughput(&[push_record(2000, true)], 1).unwrap(), 0.5);
        let tens: Vec<_> = (0..10).map(|_| push_record(1000, true)).collect();
        assert!((push_throughput(&tens, 10).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(push_throughput(&tens[..3], 4), Err(MetricsError::InsufficientSuccesses { .. })));
    }

    pub fn push_metrics_examples() {
        let cfg = MetricsConfig { n1: 1, n2: 1, n3: 1, n4: 1, t_ms: 1.0, weights: [1.0; 3], h: 0.005 };
        let m = compute_push_metrics(&[push_record(10, true)], &cfg).unwrap();
        assert_eq!(m.success_rate, 1.0);
        assert_eq!((m.collisions, m.mover_obstacle), (0.0, 0.0));
        assert_eq!((m.overshoot_corrections, m.distance_corrections), (Some(0.0), Some(0.0)));
        assert_eq!(m.mover_mover, None);

        let mut recs: Vec<_> = (0..4).map(|_| push_record(10, true)).collect();
        mover_event(&mut recs[1].steps[1], 0, 100);
        mover_event(&mut recs[3].steps[1], 0, 100);
        let cfg = MetricsConfig { n1: 4, n2: 4, ..cfg };
        let m = compute_push_metrics(&recs, &cfg).unwrap();
        assert_eq!(m.mover_obstacle, 0.5);
        assert_eq!(m.collisions, 0.5);
    }

    pub fn makespan_examples() {
        let r = traj_record([900, 1000, 1200], 1200);
        assert_eq!(makespan(std::slice::from_ref(&r), 1).unwrap(), 1200.0);
        let same = traj_record([700, 700, 700], 800);
        assert_eq!(makespan(&[same], 1).unwrap(), 700.0);
        assert!(matches!(makespan(&[r], 2), Err(MetricsError::InsufficientSuccesses { .. })));
    }

    pub fn traj_throughput_examples() {
        let r = traj_record([100, 200, 300], 300);
        assert_eq!(traj_throughput(std::slice::from_ref(&r), 3).unwrap(), 300.0);
        assert_eq!(traj_throughput(std::slice::from_ref(&r), 1).unwrap(), 100.0);
        assert!(traj_throughput(&[r], 4).is_err());
    }

    pub fn completions_use_the_concatenated_timeline() {
        let recs = [traj_record([100, 200, 300], 400), traj_record([50, 350, 150], 350)];
        assert_eq!(traj_throughput(&recs, 4).unwrap(), 450.0);
        assert_eq!(makespan(&recs, 2).unwrap(), 750.0);
    }

    pub fn smoothness_examples() {
        let rest = single_mover_motion(100, |_| (0.3, 0.0, 0.0));
        assert_eq!(smoothness(&[rest], 100.0, [1.0; 3]).unwrap(), 0.0);

        let line = single_mover_motion(100, |t| (0.1 + t, 1.0, 0.0));
        assert_eq!(smoothness(std::slice::from_ref(&line), 100.0, [1.0; 3]).unwrap(), 1.0);
        assert!(matches!(smoothness(&[line], 200.0, [1.0; 3]), Err(MetricsError::WindowTooLong { .. })));

        let w = 2.0 * PI;
        let sine = single_mover_motion(1000, |t| ((w * t).sin(), w * (w * t).cos(), -w * w * (w * t).sin()));
        let s = smoothness(&[sine], 1000.0, [0.0, 0.0, 1.0]).unwrap();
        let expected = 16.0 * PI * PI;
        assert!((s - expected).abs() / expected < 0.01, "{s} vs {expected}");
    }

    pub fn process_time_examples() {
        let zero = traj_record([10, 20, 30], 30);
        assert_eq!(process_time(&[zero], 3).unwrap(), 0.0);

        let recs: Vec<_> = (0..100)
            .map(|_| {
                let mut r = traj_record([1000; 3], 1000);
                r.compute_time_s = vec![0.0004; 1000];
                r
            })
            .collect();
        let p = process_time(&recs, 300).unwrap();
        assert!((p - 40.0).abs() < 1e-9, "{p}");

        let mut missing = traj_record([10, 20, 30], 30);
        missing.compute_time_s.clear();
        assert_eq!(process_time(&[missing], 1), Err(MetricsError::MissingTimings));
    }

    pub fn persistent_contact_counts_once() {
        let mut r = traj_record([10, 20, 30], 30);
        for k in 5..9 {
            r.steps[k].events.mover_mover.push(PairEvent { a: BodyId(0), b: BodyId(1), time: k as f64 * DT });
        }
        r.steps[12].events.mover_mover.push(PairEvent { a: BodyId(0), b: BodyId(1), time: 0.012 });
        assert_eq!(collision_onsets(&r), (2, 0, 0));
    }

    pub fn suite_matches_reference_on_random_records() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let recs: Vec<_> = (0..100).map(|k| random_traj_record(&mut rng, k)).collect();
        let cfg = MetricsConfig::from_records(&recs);
        let m = compute_traj_metrics(&recs, &cfg).unwrap();

        let events = reference::events(&recs);
        assert!(!events.is_empty());
        assert_eq!(m.success_rate, events.len() as f64 / 300.0);
        assert_eq!(cfg.n1, 300);

        let mut all: Vec<f64> = events.iter().map(|e| e.0).collect();
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(m.throughput_ms, Some(all[cfg.n3 - 1]));

        let per_mover: Vec<Vec<f64>> = (0..3)
            .map(|i| {
                let mut t: Vec<f64> = events.iter().filter(|e| e.1 == i).map(|e| e.0).collect();
                t.sort_by(|a, b| a.partial_cmp(b).unwrap());
                t
            })
            .collect();
        let span = per_mover.iter().map(|t| t[cfg.n2 - 1]).fold(0.0, f64::max);
        assert_eq!(m.makespan_ms, Some(span));

        let mm: usize = recs.iter().map(reference::onsets).sum();
        assert_eq!(m.mover_mover, mm as f64);
        assert_eq!(m.collisions, mm as f64);

        assert_eq!(m.smoothness, Some(reference::smoothness(&recs, cfg.t_ms, cfg.weights)));

        let until = all[cfg.n4 - 1];
        let mut total = 0.0;
        let mut offset = 0.0;
        for r in &recs {
            for (k, c) in r.compute_time_s.iter().enumerate() {
                if offset + k as f64 * (r.dt * 1000.0) <= until {
                    total += c;
                }
            }
            offset += r.steps.last().unwrap().step as f64 * (r.dt * 1000.0);
        }
        assert_eq!(m.process_time_s, Some(total));
    }

    pub fn push_suite_matches_reference_on_random_records() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let recs: Vec<_> = (0..100)
            .map(|_| {
                let mut r = push_record(rng.gen_range(100..3000), rng.gen_bool(0.7));
                if rng.gen_bool(0.3) {
                    mover_event(&mut r.steps[1], 0, 100);
                }
                r
            })
            .collect();
        let ok: Vec<&EpisodeRecord> = recs.iter().filter(|r| r.is_success()).collect();
        let cfg = MetricsConfig { n1: 100, n2: ok.len(), n3: 1, n4: 1, t_ms: 1.0, weights: [1.0; 3], h: 0.005 };
        let m = compute_push_metrics(&recs, &cfg).unwrap();
        assert_eq!(m.success_rate, ok.len() as f64 / 100.0);
        let secs: f64 = ok.iter().map(|r| r.steps[1].step as f64 * DT).sum();
        assert_eq!(m.throughput, Some(ok.len() as f64 / secs));
        let hits = recs.iter().filter(|r| !r.steps[1].events.mover_obstacle.is_empty()).count();
        assert_eq!(m.mover_obstacle, hits as f64 / 100.0);
    }
}
