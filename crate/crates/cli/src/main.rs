//! `magbot` command-line runner.

mod bench;
mod render;
mod scale;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use magbot::env::{builtin_scene, default_scene, TaskFamily};
use magbot::scene::{parse_scene_with, BroadphaseMode, MoverShapeKind, ParseOptions, SceneError};
use magbot::Scene;

/// Exit status 2 for bad input, 1 for everything else.
#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Internal(m) => write!(f, "error: {m}"),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Internal(format!("{}: {e}", path.display()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Broadphase {
    Naive,
    Grid,
}

impl From<Broadphase> for BroadphaseMode {
    fn from(b: Broadphase) -> Self {
        match b {
            Broadphase::Naive => BroadphaseMode::Naive,
            Broadphase::Grid => BroadphaseMode::Grid,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "magbot", version, about = "Maglev mover swarm benchmarks, scalability sweeps and rendering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run seeded episodes with the scripted baseline and export metrics.
    Bench(bench::BenchArgs),
    /// Time simulation steps over growing mover counts.
    Scale(scale::ScaleArgs),
    /// Write SVG frames of a recorded episode.
    Render(render::RenderArgs),
    /// Check a scene file against the schema and scene invariants.
    Validate {
        /// Scene file.
        #[arg(long)]
        scene: PathBuf,
        /// Ignore unknown keys, listing them as warnings.
        #[arg(long)]
        lenient: bool,
    },
}

/// Scene from a file path or built-in name, or the task default.
pub fn load_scene(arg: Option<&Path>, task: TaskFamily) -> CliResult<Scene> {
    let Some(path) = arg else { return Ok(default_scene(task)) };
    if !path.exists() {
        if let Some(s) = path.to_str().and_then(builtin_scene) {
            return Ok(s);
        }
    }
    read_scene(path, false)
}

fn read_scene(path: &Path, lenient: bool) -> CliResult<Scene> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    let parsed = parse_scene_with(&text, ParseOptions { lenient }).map_err(|e| scene_error(path, e))?;
    for w in &parsed.warnings {
        eprintln!("warning: ignored unknown key {w}");
    }
    Ok(parsed.scene)
}

fn scene_error(path: &Path, e: SceneError) -> CliError {
    match e {
        SceneError::Validation(r) => CliError::Invalid(format!("{}: ValidationError\n{r}", path.display())),
        other => CliError::Invalid(format!("{}: {other}", path.display())),
    }
}

/// Worker count from `MAGBOT_THREADS`, if set.
pub fn thread_cap() -> CliResult<Option<usize>> {
    match std::env::var("MAGBOT_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Invalid(format!("MAGBOT_THREADS must be a positive integer, got `{v}`"))),
        },
    }
}

pub fn parse_shapes(list: &[MoverShapeKind]) -> Vec<MoverShapeKind> {
    let mut v = list.to_vec();
    v.sort();
    v.dedup();
    v
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Bench(a) => bench::run(a),
        Command::Scale(a) => scale::run(a),
        Command::Render(a) => render::run(a),
        Command::Validate { scene, lenient } => {
            let s = read_scene(&scene, lenient)?;
            println!(
                "{}: ok ({}x{} tiles, {} movers, {} objects, {} obstacles)",
                scene.display(),
                s.grid.nx,
                s.grid.ny,
                s.movers.len(),
                s.objects.len(),
                s.obstacles.len()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
