//! Acceptance suite. Prints one PASS/FAIL line per check and exits non-zero
//! if any check fails.

mod common;

use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use magbot::benchmarks::{
    collision_onsets, run_benchmark, scalability_sweep, time_point, EpisodeRecord, MetricsConfig, MetricsReport,
    DEFAULT_SWEEP, DEFAULT_SWEEP_STEPS,
};
use magbot::collision::{check_pair, separation, CollisionShape, ShapeKind};
use magbot::dynamics::Commands;
use magbot::env::{
    coverage, evaluate, is_success, push_box_scene, push_t_scene, traj_scene, GoalSample, TaskFamily, TaskSpec,
};
use magbot::geometry::Pose2;
use magbot::scene::{
    generate_grid_scene, BodyId, BroadphaseMode, Footprint, MoverShapeKind, ObjectKind, ObjectSpec, PhysicsParams,
    PieceShape,
};
use magbot::{Pose2d, Scene, Sim, Vec2, World};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> String;

const CHECKS: [(&str, Check); 10] = [
    ("step-time budget at 1024 movers", step_time_budget),
    ("quadratic naive pair checks", quadratic_pair_checks),
    ("collision verdicts match point sampling", collision_oracle),
    ("integration, clamping and impedance", dynamics_checks),
    ("coulomb slip threshold", coulomb_slip),
    ("inclusive success thresholds", task_thresholds),
    ("t-shape coverage matches sampling", coverage_oracle),
    ("metric suite", metric_suite),
    ("baseline success floors", baseline_floors),
    ("bench determinism", determinism),
];

fn main() {
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, check)) in CHECKS.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check));
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("{:>2} PASS {name} ({detail}) [{secs:.1} s]", k + 1),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("{:>2} FAIL {name}: {msg} [{secs:.1} s]", k + 1);
            }
        }
    }
    println!("{} of {} acceptance checks passed", CHECKS.len() - failed, CHECKS.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn within(t: Duration, limit_s: u64, what: &str) {
    assert!(t <= Duration::from_secs(limit_s), "{what} took {:.1} s, limit {limit_s} s", t.as_secs_f64());
}

fn step_time_budget() -> String {
    let t0 = Instant::now();
    let shapes = [MoverShapeKind::Box, MoverShapeKind::Circle];
    let table = scalability_sweep(&DEFAULT_SWEEP, &shapes, DEFAULT_SWEEP_STEPS, BroadphaseMode::Grid).unwrap();
    within(t0.elapsed(), 300, "full sweep");
    let boxes = table.find(57, 1024, MoverShapeKind::Box).expect("box row");
    let circles = table.find(57, 1024, MoverShapeKind::Circle).expect("circle row");
    assert!(boxes.mean_s <= 0.050, "box step {:.2} ms", boxes.mean_s * 1e3);
    assert!(circles.mean_s <= 0.024, "circle step {:.2} ms", circles.mean_s * 1e3);
    format!("box {:.2} ms, circle {:.2} ms per step", boxes.mean_s * 1e3, circles.mean_s * 1e3)
}

fn quadratic_pair_checks() -> String {
    let mut slopes = Vec::new();
    for shape in [MoverShapeKind::Box, MoverShapeKind::Circle] {
        let pts: Vec<(f64, f64)> = [(15, 64), (29, 256), (57, 1024)]
            .iter()
            .map(|&(g, n)| {
                let row = time_point(g, n, shape, 100, BroadphaseMode::Naive).unwrap();
                ((n as f64).ln(), row.pairwise_mean_s.ln())
            })
            .collect();
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / 3.0;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / 3.0;
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!((1.5..=2.5).contains(&slope), "{} slope {slope:.3}", shape.as_str());
        slopes.push(format!("{} slope {slope:.2}", shape.as_str()));
    }
    slopes.join(", ")
}

fn random_shape(rng: &mut ChaCha8Rng) -> CollisionShape<f64> {
    let margin = if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..0.01) };
    if rng.gen_bool(0.5) {
        CollisionShape::new_box(rng.gen_range(0.02..0.09), rng.gen_range(0.02..0.09), margin)
    } else {
        CollisionShape::new_circle(rng.gen_range(0.02..0.09), margin)
    }
}

/// Point inside the margin-inflated shape, computed in the body frame.
fn inside(s: &CollisionShape<f64>, pose: &Pose2d, p: Vec2) -> bool {
    let (dx, dy) = (p.x - pose.x, p.y - pose.y);
    let (sn, cs) = pose.yaw.sin_cos();
    let (lx, ly) = (cs * dx + sn * dy, -sn * dx + cs * dy);
    match s.kind {
        ShapeKind::Box { half_x, half_y } => lx.abs() <= half_x + s.margin && ly.abs() <= half_y + s.margin,
        ShapeKind::Circle { radius } => lx.hypot(ly) <= radius + s.margin,
    }
}

fn circumradius(s: &CollisionShape<f64>) -> f64 {
    match s.kind {
        ShapeKind::Box { half_x, half_y } => (half_x + s.margin).hypot(half_y + s.margin),
        ShapeKind::Circle { radius } => radius + s.margin,
    }
}

/// Jittered-grid search for a point inside both shapes.
fn sampled_overlap(
    rng: &mut ChaCha8Rng,
    a: &CollisionShape<f64>,
    pa: &Pose2d,
    b: &CollisionShape<f64>,
    pb: &Pose2d,
) -> bool {
    let (ra, rb) = (circumradius(a), circumradius(b));
    let x0 = (pa.x - ra).max(pb.x - rb);
    let x1 = (pa.x + ra).min(pb.x + rb);
    let y0 = (pa.y - ra).max(pb.y - rb);
    let y1 = (pa.y + ra).min(pb.y + rb);
    if x0 >= x1 || y0 >= y1 {
        return false;
    }
    let cell = 2.5e-4;
    let (nx, ny) = (((x1 - x0) / cell).ceil() as usize, ((y1 - y0) / cell).ceil() as usize);
    for i in 0..nx {
        for j in 0..ny {
            let p = Vec2::new(x0 + (i as f64 + rng.gen::<f64>()) * cell, y0 + (j as f64 + rng.gen::<f64>()) * cell);
            if inside(a, pa, p) && inside(b, pb, p) {
                return true;
            }
        }
    }
    false
}

fn collision_oracle() -> String {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut compared, mut colliding, mut disagreements) = (0, 0, 0);
    for _ in 0..10_000 {
        let a = random_shape(&mut rng);
        let b = random_shape(&mut rng);
        let pa = Pose2::new(0.0, 0.0, rng.gen_range(-PI..PI));
        let reach = circumradius(&a) + circumradius(&b);
        let dir = rng.gen_range(-PI..PI);
        let d = rng.gen_range(0.3..1.1) * reach;
        let pb = Pose2::new(d * dir.cos(), d * dir.sin(), rng.gen_range(-PI..PI));
        if separation(&a, &pa, &b, &pb).abs() <= 1e-3 {
            continue;
        }
        compared += 1;
        let hit = check_pair(&a, &pa, &b, &pb).is_colliding();
        colliding += usize::from(hit);
        if hit != sampled_overlap(&mut rng, &a, &pa, &b, &pb) {
            disagreements += 1;
        }
    }
    assert_eq!(disagreements, 0, "{disagreements} of {compared} verdicts disagree");

    for _ in 0..1000 {
        let a = random_shape(&mut rng);
        let b = random_shape(&mut rng);
        let pa = Pose2::new(0.0, 0.0, rng.gen_range(-PI..PI));
        let d = rng.gen_range(0.0..1.2) * (circumradius(&a) + circumradius(&b));
        let dir = rng.gen_range(-PI..PI);
        let pb = Pose2::new(d * dir.cos(), d * dir.sin(), rng.gen_range(-PI..PI));
        let mut margins: Vec<f64> = (0..5).map(|_| rng.gen_range(0.0..0.03)).collect();
        margins.sort_by(f64::total_cmp);
        let mut prev: Option<(f64, bool)> = None;
        for m in margins {
            let (am, bm) = (a.with_margin(m), b.with_margin(m));
            let sep = separation(&am, &pa, &bm, &pb);
            let hit = check_pair(&am, &pa, &bm, &pb).is_colliding();
            if let Some((ps, ph)) = prev {
                assert!(sep <= ps + 1e-12, "separation grew with margin");
                assert!(hit || !ph, "collision vanished with larger margin");
            }
            prev = Some((sep, hit));
        }
    }
    within(t0.elapsed(), 120, "collision checks");
    format!("{compared} pairs outside the band ({colliding} colliding), 0 disagreements; 5000 margin cases monotone")
}

fn one_mover_scene(n: usize) -> Scene {
    generate_grid_scene(n, n, 1, MoverShapeKind::Box, PhysicsParams::default()).unwrap()
}

fn dynamics_checks() -> String {
    let sim = Sim::new(one_mover_scene(8)).unwrap();
    let mut w = sim.initial_state();
    let x0 = w.movers[0].pose.x;
    let push = Commands::from([(BodyId(0), Vec2::new(1.0, 0.0))]);
    for _ in 0..1000 {
        sim.step(&mut w, &push).unwrap();
    }
    let dx = w.movers[0].pose.x - x0;
    let closed_form = 1000.0 * 1001.0 / 2.0 * 1e-6;
    assert!((dx - 0.5005).abs() < 1e-12 && (dx - closed_form).abs() < 1e-12, "displacement {dx}");

    let sim = Sim::new(one_mover_scene(40)).unwrap();
    let mut w = sim.initial_state();
    let centre = Vec2::new(w.movers[0].pose.x, w.movers[0].pose.y);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut vmax, mut amax) = (0.0f64, 0.0f64);
    for k in 0..100_000 {
        let p = Vec2::new(w.movers[0].pose.x, w.movers[0].pose.y);
        let cmd = if k % 500 < 50 {
            (centre - p) * 50.0
        } else {
            Vec2::new(rng.gen_range(-40.0..40.0), rng.gen_range(-40.0..40.0))
        };
        let info = sim.step(&mut w, &Commands::from([(BodyId(0), cmd)])).unwrap();
        vmax = vmax.max(w.movers[0].planar_velocity().norm());
        amax = amax.max(info.applied_for(BodyId(0)).unwrap().norm());
    }
    assert!(vmax <= 2.0 + 1e-9, "speed {vmax}");
    assert!(amax <= 10.0 + 1e-9, "acceleration {amax}");

    let s = one_mover_scene(3);
    let (kyaw, dyaw, inertia) = (s.physics.stiffness.yaw, s.physics.damping.yaw, s.movers[0].yaw_inertia);
    let omega = (kyaw / inertia).sqrt();
    let zeta = dyaw / (2.0 * (kyaw * inertia).sqrt());
    let sim = Sim::new(s).unwrap();
    let mut w = sim.initial_state();
    let y0 = 0.1;
    w.movers[0].pose.yaw = y0;
    let hold = Commands::from([(BodyId(0), Vec2::zero())]);
    let (mut worst, mut undershoot) = (0.0f64, 0.0f64);
    for n in 1..=1000 {
        sim.step(&mut w, &hold).unwrap();
        let t = n as f64 * 1e-3;
        let oracle = if (zeta - 1.0).abs() < 1e-9 {
            y0 * (1.0 + omega * t) * (-omega * t).exp()
        } else if zeta > 1.0 {
            let r = (zeta * zeta - 1.0).sqrt();
            let (s1, s2) = (-omega * (zeta - r), -omega * (zeta + r));
            y0 * (s2 * (s1 * t).exp() - s1 * (s2 * t).exp()) / (s2 - s1)
        } else {
            let wd = omega * (1.0 - zeta * zeta).sqrt();
            y0 * (-zeta * omega * t).exp() * ((wd * t).cos() + zeta * omega / wd * (wd * t).sin())
        };
        worst = worst.max((w.movers[0].pose.yaw - oracle).abs());
        undershoot = undershoot.max(-w.movers[0].pose.yaw);
    }
    let final_yaw = w.movers[0].pose.yaw.abs();
    assert!(final_yaw < 1e-3, "yaw after 1 s {final_yaw}");
    assert!(undershoot <= 0.05 * y0, "overshoot {:.2}%", undershoot / y0 * 100.0);
    assert!(worst < 5e-3, "deviation from second-order response {worst}");
    format!(
        "displacement {dx:.12} m, peak speed {vmax:.6} m/s, peak accel {amax:.6} m/s^2, yaw {final_yaw:.1e} rad after 1 s"
    )
}

fn coulomb_slip() -> String {
    let mut s = generate_grid_scene(4, 4, 0, MoverShapeKind::Box, PhysicsParams::default()).unwrap();
    s.objects.push(ObjectSpec::default_box(BodyId(0), Pose2::new(0.48, 0.48, 0.0)));
    let (mass, mu) = (s.objects[0].mass, s.objects[0].friction_ground);
    assert_eq!((mass, mu), (0.5, 0.3));
    let sim = Sim::new(s).unwrap();
    let mut w = sim.initial_state();
    let mut slip = None;
    for n in 1..4000 {
        let f = n as f64 * 1e-3;
        sim.step_with_forces(&mut w, &Commands::new(), &[(BodyId(0), Vec2::new(f, 0.0))]).unwrap();
        if w.objects[0].velocity.linear().norm() > 1e-9 {
            slip = Some(f);
            break;
        }
    }
    let f = slip.expect("box never slipped");
    let analytic = mu * mass * 9.81;
    assert!((f - analytic).abs() / analytic <= 0.05, "slip at {f} N against {analytic} N");
    format!("slip at {f:.4} N, analytic {analytic:.4} N")
}

fn goal_at(p: Pose2d) -> GoalSample {
    GoalSample { goals: vec![p], mover_starts: vec![], object_starts: vec![] }
}

fn task_thresholds() -> String {
    let scene = push_box_scene();
    let task = TaskSpec::new(TaskFamily::PushBox);
    let goal = goal_at(Pose2::new(0.3, 0.3, 0.0));
    let mut world = World::from_scene(&scene);
    world.objects[0].pose = Pose2::new(0.35, 0.3, 0.0);
    assert!(is_success(&task, &world, &goal, &scene), "0.050 m should succeed");
    world.objects[0].pose = Pose2::new(0.351, 0.3, 0.0);
    assert!(!is_success(&task, &world, &goal, &scene), "0.051 m should fail");

    let mut scene = push_t_scene();
    scene.objects[0] = ObjectSpec { kind: ObjectKind::Box, dimensions: vec![10.0, 1.0], ..scene.objects[0].clone() };
    let task = TaskSpec::new(TaskFamily::PushT);
    let goal = goal_at(Pose2::new(0.0, 0.0, 0.0));
    let mut world = World::from_scene(&scene);
    world.objects[0].pose = Pose2::new(3.0, 0.0, 0.0);
    let e = evaluate(&task, &world, &goal, &scene);
    assert_eq!(e.coverage, Some(0.7));
    assert!(e.is_success, "coverage 0.70 should succeed");

    let mut scene = traj_scene();
    scene.movers.truncate(1);
    let task = TaskSpec::new(TaskFamily::MultiMoverTrajectory);
    let goal = goal_at(Pose2::new(0.2, 0.2, 0.0));
    let mut world = World::from_scene(&scene);
    world.movers[0].set_planar_pose(Pose2::new(0.3, 0.2, 0.0));
    assert!(is_success(&task, &world, &goal, &scene), "0.10 m should succeed");
    "0.050 m true, 0.051 m false, coverage 0.70 true, 0.10 m true".into()
}

fn in_footprint(fp: &Footprint<f64>, body: &Pose2d, p: Vec2) -> bool {
    fp.pieces.iter().any(|piece| {
        let w = piece.world_pose(body);
        let (sn, cs) = w.yaw.sin_cos();
        let (dx, dy) = (p.x - w.x, p.y - w.y);
        let (lx, ly) = (cs * dx + sn * dy, -sn * dx + cs * dy);
        match piece.shape {
            PieceShape::Rect { half_x, half_y } => lx.abs() <= half_x && ly.abs() <= half_y,
            PieceShape::Circle { radius } => lx.hypot(ly) <= radius,
        }
    })
}

fn coverage_oracle() -> String {
    let fp = push_t_scene().objects[0].footprint().unwrap();
    let reach = fp
        .pieces
        .iter()
        .map(|p| {
            let r = match p.shape {
                PieceShape::Rect { half_x, half_y } => half_x.hypot(half_y),
                PieceShape::Circle { radius } => radius,
            };
            p.offset.norm() + r
        })
        .fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let goal = Pose2::new(rng.gen_range(0.2..0.8), rng.gen_range(0.2..0.8), rng.gen_range(-PI..PI));
        let obj = Pose2::new(
            goal.x + rng.gen_range(-0.08..0.08),
            goal.y + rng.gen_range(-0.08..0.08),
            goal.yaw + rng.gen_range(-1.0..1.0),
        );
        let exact = coverage(&fp, &obj, &goal);
        let (mut hits, mut total) = (0u64, 0u64);
        for _ in 0..1_000_000 {
            let p = Vec2::new(obj.x + rng.gen_range(-reach..reach), obj.y + rng.gen_range(-reach..reach));
            if in_footprint(&fp, &obj, p) {
                total += 1;
                if in_footprint(&fp, &goal, p) {
                    hits += 1;
                }
            }
        }
        let estimate = hits as f64 / total as f64;
        worst = worst.max((exact - estimate).abs());
    }
    assert!(worst <= 0.01, "max deviation {worst:.4}");
    format!("max deviation {worst:.4} over 100 pose pairs")
}

fn metric_suite() -> String {
    use common::checks::*;
    let cases: [fn(); 11] = [
        success_rate_examples,
        push_throughput_examples,
        push_metrics_examples,
        makespan_examples,
        traj_throughput_examples,
        completions_use_the_concatenated_timeline,
        smoothness_examples,
        process_time_examples,
        persistent_contact_counts_once,
        suite_matches_reference_on_random_records,
        push_suite_matches_reference_on_random_records,
    ];
    for case in cases {
        case();
    }
    format!("{} metric cases, 100 random records each for push and trajectory", cases.len())
}

fn report(recs: &[EpisodeRecord]) -> MetricsReport {
    MetricsReport::compute(recs, &MetricsConfig::from_records(recs)).unwrap()
}

fn baseline_floors() -> String {
    let t0 = Instant::now();
    let push = run_benchmark(&TaskSpec::new(TaskFamily::PushBox), &push_box_scene(), 200, 0).unwrap();
    let push_rate = report(&push).success_rate;
    let traj = run_benchmark(&TaskSpec::new(TaskFamily::MultiMoverTrajectory), &traj_scene(), 100, 0).unwrap();
    let traj_rate = traj.iter().filter(|r| r.is_success()).count() as f64 / traj.len() as f64;
    let mover_mover: usize = traj.iter().map(|r| collision_onsets(r).0).sum();
    within(t0.elapsed(), 900, "baseline runs");
    assert!(push_rate >= 0.80, "push_box success {push_rate}");
    assert!(traj_rate >= 0.95, "trajectory success {traj_rate}");
    assert_eq!(mover_mover, 0, "mover-mover collision events");
    format!("push_box {:.1}%, trajectory {:.1}% with 0 mover-mover events", push_rate * 100.0, traj_rate * 100.0)
}

fn determinism() -> String {
    let mut checked = 0;
    for family in
        [TaskFamily::PushBox, TaskFamily::PushT, TaskFamily::PushWithObstacles, TaskFamily::MultiMoverTrajectory]
    {
        let task = TaskSpec::new(family);
        let scene = magbot::env::default_scene(family);
        let a = run_benchmark(&task, &scene, 6, 40).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_benchmark(&task, &scene, 6, 40)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(!x.trajectory_hash.is_empty());
            assert_eq!(x.trajectory_hash, y.trajectory_hash, "{family} seed {}", x.seed);
        }
        assert_eq!(report(&a).deterministic_json(), report(&b).deterministic_json(), "{family} metrics");
        checked += a.len();
    }
    format!("{checked} episodes over 4 tasks rerun with identical hashes and metric JSON")
}
