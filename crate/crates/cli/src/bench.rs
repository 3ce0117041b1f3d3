use std::fs;
use std::path::PathBuf;

use clap::Args;
use magbot::benchmarks::{run_benchmark, MetricsConfig, MetricsReport};
use magbot::env::{EnvError, TaskFamily, TaskSpec};

use crate::{io_error, load_scene, thread_cap, Broadphase, CliError, CliResult, Format};

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Task family: push_box, push_t, push_obstacles or traj.
    #[arg(long)]
    task: TaskFamily,
    /// Scene file or built-in scene name. Defaults to the task's scene.
    #[arg(long)]
    scene: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    episodes: usize,
    /// Seed of the first episode; episode k uses seed + k.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Metric export formats.
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["json", "csv"])]
    format: Vec<Format>,
    #[arg(long, value_enum)]
    broadphase: Option<Broadphase>,
    /// Keep every n-th step in the written episode records.
    #[arg(long, default_value_t = 1)]
    record_stride: usize,
    /// Skip writing episode records.
    #[arg(long)]
    no_records: bool,
}

fn env_error(e: EnvError) -> CliError {
    match e {
        EnvError::SceneTaskMismatch(_) | EnvError::SamplingExhausted(_) => CliError::Invalid(e.to_string()),
        other => CliError::Internal(other.to_string()),
    }
}

pub fn run(a: BenchArgs) -> CliResult<()> {
    if a.episodes == 0 {
        return Err(CliError::Invalid("--episodes must be at least 1".into()));
    }
    if a.record_stride == 0 {
        return Err(CliError::Invalid("--record-stride must be at least 1".into()));
    }
    let mut scene = load_scene(a.scene.as_deref(), a.task)?;
    if let Some(b) = a.broadphase {
        scene.physics.broadphase = b.into();
    }
    let task = TaskSpec::new(a.task);
    let records = match thread_cap()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Internal(e.to_string()))?
            .install(|| run_benchmark(&task, &scene, a.episodes, a.seed)),
        None => run_benchmark(&task, &scene, a.episodes, a.seed),
    }
    .map_err(env_error)?;

    let cfg = MetricsConfig::from_records(&records);
    let report = MetricsReport::compute(&records, &cfg).map_err(|e| CliError::Internal(e.to_string()))?;

    fs::create_dir_all(&a.out).map_err(|e| io_error(&a.out, e))?;
    for f in &a.format {
        let (name, body) = match f {
            Format::Json => ("metrics.json", report.to_json() + "\n"),
            Format::Csv => ("metrics.csv", report.to_csv()),
        };
        let path = a.out.join(name);
        fs::write(&path, body).map_err(|e| io_error(&path, e))?;
    }
    if !a.no_records {
        let dir = a.out.join("records");
        fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
        for r in &records {
            let path = dir.join(format!("{}_seed{}.json", a.task, r.seed));
            fs::write(&path, r.decimated(a.record_stride).to_json()).map_err(|e| io_error(&path, e))?;
        }
    }

    let mm = report.mover_mover_collisions.map_or(String::from("-"), |c| c.to_string());
    println!(
        "{}: {} episodes, success_rate {:.4}, collisions {}, mover_mover {}",
        a.task, report.episodes, report.success_rate, report.collisions, mm
    );
    println!("metrics written to {}", a.out.display());
    Ok(())
}
