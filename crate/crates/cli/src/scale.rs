use std::fs;
use std::path::PathBuf;

use clap::Args;
use magbot::benchmarks::{scalability_sweep, TimingTable, DEFAULT_SWEEP, DEFAULT_SWEEP_STEPS};
use magbot::scene::MoverShapeKind;

use crate::{io_error, parse_shapes, Broadphase, CliError, CliResult, Format};

/// Mean step time allowed at 1024 movers, s.
const BOX_BUDGET_S: f64 = 0.050;
const CIRCLE_BUDGET_S: f64 = 0.024;

#[derive(Args, Debug)]
pub struct ScaleArgs {
    /// Sweep points as `grid:movers` pairs, comma separated.
    #[arg(long)]
    grids: Option<String>,
    #[arg(long, value_delimiter = ',', default_values = ["box", "circle"])]
    shapes: Vec<MoverShapeKind>,
    #[arg(long, default_value_t = DEFAULT_SWEEP_STEPS)]
    steps: usize,
    #[arg(long, value_enum, default_value = "grid")]
    broadphase: Broadphase,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["csv"])]
    format: Vec<Format>,
}

fn parse_points(s: &str) -> CliResult<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (g, n) = item
            .split_once(':')
            .ok_or_else(|| CliError::Invalid(format!("sweep point `{item}` is not grid:movers")))?;
        let parse =
            |v: &str| v.trim().parse::<usize>().map_err(|_| CliError::Invalid(format!("bad number in `{item}`")));
        out.push((parse(g)?, parse(n)?));
    }
    if out.is_empty() {
        return Err(CliError::Invalid("empty grid list".into()));
    }
    Ok(out)
}

fn verdicts(t: &TimingTable) -> Vec<String> {
    t.rows
        .iter()
        .filter(|r| r.n_movers == 1024)
        .map(|r| {
            let budget = match r.shape {
                MoverShapeKind::Box => BOX_BUDGET_S,
                MoverShapeKind::Circle => CIRCLE_BUDGET_S,
            };
            let verdict = if r.mean_s <= budget { "within" } else { "OVER" };
            format!(
                "{} movers, {}: {:.2} ms per step, budget {:.0} ms, {verdict}",
                r.n_movers,
                r.shape.as_str(),
                r.mean_s * 1e3,
                budget * 1e3
            )
        })
        .collect()
}

pub fn run(a: ScaleArgs) -> CliResult<()> {
    let points = match &a.grids {
        Some(s) => parse_points(s)?,
        None => DEFAULT_SWEEP.to_vec(),
    };
    let shapes = parse_shapes(&a.shapes);
    if shapes.is_empty() {
        return Err(CliError::Invalid("no shapes selected".into()));
    }
    if a.steps == 0 {
        return Err(CliError::Invalid("--steps must be at least 1".into()));
    }
    let table = scalability_sweep(&points, &shapes, a.steps, a.broadphase.into())
        .map_err(|e| CliError::Invalid(e.to_string()))?;

    fs::create_dir_all(&a.out).map_err(|e| io_error(&a.out, e))?;
    for f in &a.format {
        let (name, body) = match f {
            Format::Csv => ("timing.csv", table.to_csv()),
            Format::Json => ("timing.json", serde_json::to_string_pretty(&table).expect("table serializes") + "\n"),
        };
        let path = a.out.join(name);
        fs::write(&path, body).map_err(|e| io_error(&path, e))?;
    }
    print!("{}", table.to_csv());
    for line in verdicts(&table) {
        println!("{line}");
    }
    Ok(())
}
