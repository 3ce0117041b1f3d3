use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dynamics::Commands;
use crate::scene::{generate_grid_scene, BroadphaseMode, MoverShapeKind, PhysicsParams, SceneError};
use crate::{Sim, Vec2};

/// Square grid side and mover count of each default sweep point, from a
/// single mover up to 1024 movers on 57×57 tiles.
pub const DEFAULT_SWEEP: [(usize, usize); 6] = [(2, 1), (4, 4), (8, 16), (15, 64), (29, 256), (57, 1024)];

pub const DEFAULT_SWEEP_STEPS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub grid: usize,
    pub n_movers: usize,
    pub shape: MoverShapeKind,
    /// Mean wall time per step, s.
    pub mean_s: f64,
    /// Sample standard deviation of the step time, s.
    pub std_s: f64,
    /// Mean wall time of the mover-mover pair checks per step, s.
    pub pairwise_mean_s: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimingTable {
    pub rows: Vec<TimingRow>,
}

impl TimingTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("grid,n_movers,shape,mean_s,std_s\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{:e},{:e}\n", r.grid, r.n_movers, r.shape.as_str(), r.mean_s, r.std_s));
        }
        s
    }

    pub fn find(&self, grid: usize, n_movers: usize, shape: MoverShapeKind) -> Option<&TimingRow> {
        self.rows.iter().find(|r| r.grid == grid && r.n_movers == n_movers && r.shape == shape)
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Times `steps` zero-command steps on a generated `grid × grid` scene.
pub fn time_point(
    grid: usize,
    n_movers: usize,
    shape: MoverShapeKind,
    steps: usize,
    broadphase: BroadphaseMode,
) -> Result<TimingRow, SceneError> {
    let physics = PhysicsParams { broadphase, ..PhysicsParams::default() };
    let scene = generate_grid_scene(grid, grid, n_movers, shape, physics)?;
    let sim = Sim::new(scene).map_err(|e| SceneError::InvalidParams(e.to_string()))?;
    let mut world = sim.initial_state();
    let commands: Commands<f64> = world.movers.iter().map(|m| (m.id, Vec2::zero())).collect();
    let mut total = Vec::with_capacity(steps);
    let mut pairwise = Vec::with_capacity(steps);
    for _ in 0..steps.max(1) {
        let t0 = Instant::now();
        let info = sim.step(&mut world, &commands).map_err(|e| SceneError::InvalidParams(e.to_string()))?;
        total.push(t0.elapsed().as_secs_f64());
        pairwise.push(info.timings.pairwise);
    }
    let (mean_s, std_s) = mean_std(&total);
    let (pairwise_mean_s, _) = mean_std(&pairwise);
    Ok(TimingRow { grid, n_movers, shape, mean_s, std_s, pairwise_mean_s })
}

/// Step-time table over grid points and shapes, ordered by mover count.
pub fn scalability_sweep(
    points: &[(usize, usize)],
    shapes: &[MoverShapeKind],
    steps: usize,
    broadphase: BroadphaseMode,
) -> Result<TimingTable, SceneError> {
    let mut order: Vec<(usize, usize)> = points.to_vec();
    order.sort_by_key(|&(g, n)| (n, g));
    let mut rows = Vec::new();
    for (grid, n) in order {
        for &shape in shapes {
            rows.push(time_point(grid, n, shape, steps, broadphase)?);
        }
    }
    Ok(TimingTable { rows })
}
