use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::Args;
use magbot::benchmarks::{EpisodeRecord, StepRecord};
use magbot::collision::{CollisionShape, ShapeKind};
use magbot::geometry::rect_corners;
use magbot::scene::{Footprint, PieceShape};
use magbot::{Pose2d, Vec2};

use crate::{io_error, CliError, CliResult};

/// Pixels per metre.
const SCALE: f64 = 500.0;
const PAD: f64 = 20.0;

#[derive(Args, Debug)]
pub struct RenderArgs {
    /// Episode record written by `bench`.
    record: PathBuf,
    #[arg(long, default_value = "frames")]
    out: PathBuf,
    /// Render steps whose index is a multiple of this.
    #[arg(long, default_value_t = 1)]
    stride: u64,
}

struct Canvas {
    min: Vec2,
    height: f64,
    svg: String,
}

impl Canvas {
    fn px(&self, p: Vec2) -> (f64, f64) {
        ((p.x - self.min.x) * SCALE + PAD, self.height - PAD - (p.y - self.min.y) * SCALE)
    }

    fn polygon(&mut self, pts: &[Vec2], style: &str) {
        let pts: Vec<String> = pts
            .iter()
            .map(|&p| {
                let (x, y) = self.px(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(self.svg, r#"<polygon points="{}" {style}/>"#, pts.join(" "));
    }

    fn circle(&mut self, c: Vec2, r: f64, style: &str) {
        let (x, y) = self.px(c);
        let _ = writeln!(self.svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}" {style}/>"#, r * SCALE);
    }

    fn label(&mut self, p: Vec2, text: &str) {
        let (x, y) = self.px(p);
        let _ = writeln!(
            self.svg,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="10" text-anchor="middle" dominant-baseline="middle">{text}</text>"#
        );
    }

    fn shape(&mut self, shape: &CollisionShape<f64>, pose: &Pose2d, style: &str, margin_style: &str) {
        match shape.kind {
            ShapeKind::Box { half_x, half_y } => {
                self.polygon(&rect_corners(pose, half_x, half_y), style);
                if shape.margin > 0.0 {
                    let (hx, hy) = shape.inflated_half_extents();
                    self.polygon(&rect_corners(pose, hx, hy), margin_style);
                }
            }
            ShapeKind::Circle { radius } => {
                let c = Vec2::new(pose.x, pose.y);
                self.circle(c, radius, style);
                if shape.margin > 0.0 {
                    self.circle(c, radius + shape.margin, margin_style);
                }
            }
        }
    }

    fn footprint(&mut self, fp: &Footprint<f64>, pose: &Pose2d, style: &str) {
        for piece in &fp.pieces {
            match piece.shape {
                PieceShape::Rect { .. } => {
                    if let Some(poly) = piece.polygon(pose) {
                        self.polygon(&poly, style);
                    }
                }
                PieceShape::Circle { radius } => {
                    let w = piece.world_pose(pose);
                    self.circle(Vec2::new(w.x, w.y), radius, style);
                }
            }
        }
    }
}

const TILE: &str = r##"fill="#e8e8e8" stroke="#b0b0b0" stroke-width="1""##;
const MOVER: &str = r##"fill="#4a78c2" fill-opacity="0.8" stroke="#1d3c70" stroke-width="1""##;
const MARGIN: &str = r##"fill="none" stroke="#1d3c70" stroke-width="1" stroke-dasharray="4 3""##;
const OBJECT: &str = r##"fill="#e09b3d" fill-opacity="0.85" stroke="#8a5412" stroke-width="1""##;
const OBSTACLE: &str = r##"fill="#555555" stroke="#222222" stroke-width="1""##;
const GOAL: &str = r##"fill="none" stroke="#2e9e4f" stroke-width="1.5" stroke-dasharray="6 3""##;

fn frame(rec: &EpisodeRecord, footprints: &[Footprint<f64>], step: &StepRecord) -> String {
    let grid = &rec.scene.grid;
    let b = grid.bounds();
    let width = (b.max.x - b.min.x) * SCALE + 2.0 * PAD;
    let height = (b.max.y - b.min.y) * SCALE + 2.0 * PAD;
    let mut c = Canvas { min: b.min, height, svg: String::new() };
    let _ = writeln!(
        c.svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.2} {height:.2}">"#
    );
    let _ = writeln!(c.svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    for ix in 0..grid.nx as i64 {
        for iy in 0..grid.ny as i64 {
            if grid.is_present(ix, iy) {
                let r = grid.tile_rect(ix, iy);
                let pts = [r.min, Vec2::new(r.max.x, r.min.y), r.max, Vec2::new(r.min.x, r.max.y)];
                c.polygon(&pts, TILE);
            }
        }
    }

    if rec.task.is_push() {
        for (fp, g) in footprints.iter().zip(&rec.goals) {
            c.footprint(fp, g, GOAL);
        }
    } else {
        for (m, g) in rec.scene.movers.iter().zip(&rec.goals) {
            c.shape(&m.shape.with_margin(0.0), g, GOAL, GOAL);
        }
    }

    for o in &rec.scene.obstacles {
        c.shape(&o.shape, &o.pose, OBSTACLE, MARGIN);
    }
    for (fp, pose) in footprints.iter().zip(&step.object_poses) {
        c.footprint(fp, pose, OBJECT);
    }
    for (m, pose) in rec.scene.movers.iter().zip(&step.mover_poses) {
        c.shape(&m.shape, pose, MOVER, MARGIN);
        c.label(Vec2::new(pose.x, pose.y), &m.id.to_string());
    }

    let t = step.step as f64 * rec.dt;
    let _ = writeln!(
        c.svg,
        r#"<text x="{PAD}" y="{:.0}" font-size="12">{} seed {} step {} t={t:.3}s</text>"#,
        PAD * 0.75,
        rec.task,
        rec.seed,
        step.step
    );
    c.svg.push_str("</svg>\n");
    c.svg
}

pub fn run(a: RenderArgs) -> CliResult<()> {
    if a.stride == 0 {
        return Err(CliError::Invalid("--stride must be at least 1".into()));
    }
    let text = fs::read_to_string(&a.record).map_err(|e| CliError::Invalid(format!("{}: {e}", a.record.display())))?;
    let rec = EpisodeRecord::from_json(&text)
        .map_err(|e| CliError::Invalid(format!("{}: malformed record: {e}", a.record.display())))?;
    if rec.steps.is_empty() {
        return Err(CliError::Invalid(format!("{}: record has no steps", a.record.display())));
    }
    let footprints = rec
        .scene
        .objects
        .iter()
        .map(|o| o.footprint())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Invalid(format!("{}: bad object dimensions: {e:?}", a.record.display())))?;
    let n_movers = rec.scene.movers.len();
    let n_objects = footprints.len();
    if rec.steps.iter().any(|s| s.mover_poses.len() != n_movers || s.object_poses.len() != n_objects) {
        return Err(CliError::Invalid(format!("{}: step poses do not match the scene", a.record.display())));
    }

    fs::create_dir_all(&a.out).map_err(|e| io_error(&a.out, e))?;
    let mut written = 0usize;
    for step in rec.steps.iter().filter(|s| s.step % a.stride == 0) {
        let path = a.out.join(format!("frame_{:06}.svg", step.step));
        fs::write(&path, frame(&rec, &footprints, step)).map_err(|e| io_error(&path, e))?;
        written += 1;
    }
    println!("{written} frames written to {}", a.out.display());
    Ok(())
}
