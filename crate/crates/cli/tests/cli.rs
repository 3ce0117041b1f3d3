use std::path::Path;
use std::process::{Command, Output};

use magbot::benchmarks::{EpisodeRecord, StepRecord};
use magbot::scene::{generate_grid_scene, serialize_scene, MoverShapeKind, PhysicsParams};
use magbot::Scene;

fn magbot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magbot")).args(args).output().expect("binary runs")
}

fn magbot_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magbot")).args(args).env(key, val).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn bench_into(dir: &Path, task: &str, episodes: &str) -> Output {
    magbot(&["bench", "--task", task, "--episodes", episodes, "--seed", "3", "--out", s(dir)])
}

#[test]
fn bench_writes_metrics_and_records() {
    let dir = tempfile::tempdir().unwrap();
    let o = bench_into(dir.path(), "traj", "3");
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("metrics.json")).unwrap()).unwrap();
    let rate = json["success_rate"].as_f64().expect("success_rate field");
    assert!((0.0..=1.0).contains(&rate));
    assert_eq!(json["episodes"].as_u64(), Some(3));
    let csv = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with("task,episodes,success_rate"));
    for seed in 3..6 {
        assert!(dir.path().join(format!("records/traj_seed{seed}.json")).exists());
    }
}

#[test]
fn bench_format_selects_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = magbot(&[
        "bench",
        "--task",
        "push_box",
        "--episodes",
        "1",
        "--format",
        "csv",
        "--no-records",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("metrics.csv").exists());
    assert!(!dir.path().join("metrics.json").exists());
    assert!(!dir.path().join("records").exists());
}

#[test]
fn bench_is_deterministic_across_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |d: &Path| {
        vec!["bench", "--task", "push_box", "--episodes", "4", "--seed", "11", "--out", s(d)]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>()
    };
    let run = |d: &Path, threads: &str| {
        let v = args(d);
        let refs: Vec<&str> = v.iter().map(String::as_str).collect();
        magbot_env(&refs, "MAGBOT_THREADS", threads)
    };
    assert_eq!(code(&run(a.path(), "1")), 0);
    assert_eq!(code(&run(b.path(), "4")), 0);
    let strip = |d: &Path| {
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(d.join("metrics.json")).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("process_time_s");
        v
    };
    assert_eq!(strip(a.path()), strip(b.path()));
    for seed in 11..15 {
        let f = format!("records/push_box_seed{seed}.json");
        let ra = EpisodeRecord::from_json(&std::fs::read_to_string(a.path().join(&f)).unwrap()).unwrap();
        let rb = EpisodeRecord::from_json(&std::fs::read_to_string(b.path().join(&f)).unwrap()).unwrap();
        assert_eq!(ra.trajectory_hash, rb.trajectory_hash);
        assert_eq!(ra.steps, rb.steps);
    }
}

#[test]
fn bad_thread_count_is_invalid_input() {
    let dir = tempfile::tempdir().unwrap();
    let o =
        magbot_env(&["bench", "--task", "traj", "--episodes", "1", "--out", s(dir.path())], "MAGBOT_THREADS", "zero");
    assert_eq!(code(&o), 2);
}

#[test]
fn bench_accepts_builtin_scene_names() {
    let dir = tempfile::tempdir().unwrap();
    let o =
        magbot(&["bench", "--task", "traj", "--scene", "grid4x3_3movers", "--episodes", "1", "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn mismatched_scene_is_invalid_input() {
    let dir = tempfile::tempdir().unwrap();
    let o =
        magbot(&["bench", "--task", "push_t", "--scene", "grid4x3_3movers", "--episodes", "1", "--out", s(dir.path())]);
    assert_eq!(code(&o), 2);
}

fn valid_scene() -> String {
    let scene: Scene = generate_grid_scene(2, 2, 1, MoverShapeKind::Box, PhysicsParams::default()).unwrap();
    serialize_scene(&scene)
}

fn outside_scene() -> String {
    let mut v: serde_json::Value = serde_json::from_str(&valid_scene()).unwrap();
    v["movers"][0]["start_pose"] = serde_json::json!([3.0, 3.0, 0.0]);
    v.to_string()
}

#[test]
fn validate_reports_status() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, valid_scene()).unwrap();
    let o = magbot(&["validate", "--scene", s(&good)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let outside = dir.path().join("outside.json");
    std::fs::write(&outside, outside_scene()).unwrap();
    let o = magbot(&["validate", "--scene", s(&outside)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("ValidationError"));

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ not json").unwrap();
    assert_eq!(code(&magbot(&["validate", "--scene", s(&broken)])), 2);
    assert_eq!(code(&magbot(&["validate", "--scene", s(&dir.path().join("missing.json"))])), 2);
}

#[test]
fn bench_rejects_invalid_scene_file() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, outside_scene()).unwrap();
    let o = magbot(&["bench", "--task", "traj", "--scene", s(&bad), "--episodes", "1", "--out", s(dir.path())]);
    assert_eq!(code(&o), 2);
}

#[test]
fn scale_filters_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let o = magbot(&["scale", "--grids", "2:1,4:4", "--shapes", "circle", "--steps", "3", "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("timing.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("grid,n_movers,shape,mean_s,std_s"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.split(',').nth(2) == Some("circle")));
}

#[test]
fn scale_rejects_empty_grid_list() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&magbot(&["scale", "--grids", "", "--out", s(dir.path())])), 2);
    assert_eq!(code(&magbot(&["scale", "--grids", "4-4", "--out", s(dir.path())])), 2);
}

#[test]
fn scale_rejects_overfull_grid() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&magbot(&["scale", "--grids", "2:5", "--steps", "1", "--out", s(dir.path())])), 2);
}

fn long_record(dir: &Path, n_steps: u64) -> std::path::PathBuf {
    let out = dir.join("bench");
    let o = magbot(&["bench", "--task", "traj", "--episodes", "1", "--seed", "0", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let path = out.join("records/traj_seed0.json");
    let mut rec = EpisodeRecord::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let last: StepRecord = rec.steps.last().unwrap().clone();
    rec.steps.truncate(n_steps as usize);
    while (rec.steps.len() as u64) < n_steps {
        let mut s = last.clone();
        s.step = rec.steps.len() as u64;
        rec.steps.push(s);
    }
    let p = dir.join("long.json");
    std::fs::write(&p, rec.to_json()).unwrap();
    p
}

#[test]
fn render_writes_one_frame_per_stride() {
    let dir = tempfile::tempdir().unwrap();
    let rec = long_record(dir.path(), 1000);
    let frames = dir.path().join("frames");
    let o = magbot(&["render", s(&rec), "--out", s(&frames), "--stride", "100"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut names: Vec<String> =
        std::fs::read_dir(&frames).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names.len(), 10);
    assert_eq!(names[0], "frame_000000.svg");
    assert_eq!(names[9], "frame_000900.svg");
    let svg = std::fs::read_to_string(frames.join(&names[3])).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains("stroke-dasharray"));
}

#[test]
fn render_rejects_empty_or_malformed_records() {
    let dir = tempfile::tempdir().unwrap();
    let rec = long_record(dir.path(), 10);
    let mut r = EpisodeRecord::from_json(&std::fs::read_to_string(&rec).unwrap()).unwrap();
    r.steps.clear();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r.to_json()).unwrap();
    let frames = dir.path().join("frames");
    assert_eq!(code(&magbot(&["render", s(&empty), "--out", s(&frames)])), 2);

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "[1, 2").unwrap();
    assert_eq!(code(&magbot(&["render", s(&garbage), "--out", s(&frames)])), 2);
    assert_eq!(code(&magbot(&["render", s(&rec), "--out", s(&frames), "--stride", "0"])), 2);
}
