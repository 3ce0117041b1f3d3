use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::collision::{check_pair, colliding_index_pairs, tile_coverage, CollisionShape, TileCoverage};
use crate::geometry::Pose2;
use crate::num::Real;

use super::footprint::Footprint;
use super::types::{BodyId, BroadphaseMode, SceneConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ViolationCode {
    MoverOverlap,
    MoverOffTiles,
    BadDimension,
    DuplicateId,
    ObstacleOffGrid,
    ObjectOverlap,
    ObjectOffTiles,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub ids: Vec<BodyId>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    fn push(&mut self, code: ViolationCode, ids: Vec<BodyId>, message: impl Into<String>) {
        self.violations.push(Violation { code, ids, message: message.into() });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "no violations");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{:?}: {}", v.code, v.message)?;
        }
        Ok(())
    }
}

fn positive<T: Real>(v: T) -> bool {
    v > T::zero() && v.is_finite()
}

fn non_negative<T: Real>(v: T) -> bool {
    v >= T::zero() && v.is_finite()
}

/// Checks every scene invariant and lists the violations; an empty report means the scene is valid.
pub fn validate_scene<T: Real>(scene: &SceneConfig<T>) -> ValidationReport {
    use ViolationCode::*;
    let mut r = ValidationReport::default();

    let g = &scene.grid;
    let grid_ok = g.nx >= 1 && g.ny >= 1 && positive(g.tile_size) && g.origin.is_finite();
    if !grid_ok {
        r.push(BadDimension, vec![], format!("grid {}x{} with tile_size {} is invalid", g.nx, g.ny, g.tile_size));
    }
    for &(ix, iy) in &g.missing {
        if ix >= g.nx || iy >= g.ny {
            r.push(BadDimension, vec![], format!("missing tile ({ix}, {iy}) is outside the {}x{} grid", g.nx, g.ny));
        }
    }

    let p = &scene.physics;
    let gains = [p.stiffness, p.damping].into_iter().flat_map(|k| [k.z, k.roll, k.pitch, k.yaw]);
    let physics_ok = positive(p.dt)
        && positive(p.v_max)
        && positive(p.a_max)
        && non_negative(p.gravity)
        && non_negative(p.hold_stiffness)
        && gains.into_iter().all(non_negative)
        && p.contact.iterations >= 1
        && non_negative(p.contact.baumgarte)
        && p.contact.baumgarte <= T::one()
        && non_negative(p.contact.slop)
        && non_negative(p.contact.restitution)
        && p.contact.restitution <= T::one()
        && non_negative(p.contact.obstacle_friction);
    if !physics_ok {
        r.push(BadDimension, vec![], "physics parameters out of range");
    }

    let mut seen: BTreeMap<BodyId, usize> = BTreeMap::new();
    for id in scene
        .movers
        .iter()
        .map(|m| m.id)
        .chain(scene.objects.iter().map(|o| o.id))
        .chain(scene.obstacles.iter().map(|o| o.id))
    {
        *seen.entry(id).or_default() += 1;
    }
    for (id, n) in seen {
        if n > 1 {
            r.push(DuplicateId, vec![id], format!("id {id} is used by {n} bodies"));
        }
    }

    let mut movers_ok = Vec::with_capacity(scene.movers.len());
    for m in &scene.movers {
        let ok = m.shape.is_valid()
            && positive(m.mass)
            && positive(m.yaw_inertia)
            && positive(m.hover_height)
            && m.start_pose.is_finite();
        if !ok {
            r.push(BadDimension, vec![m.id], format!("mover {} has invalid shape, mass, inertia or pose", m.id));
        }
        movers_ok.push(ok);
    }

    let two = T::two();
    let mut footprints: Vec<Option<Footprint<T>>> = Vec::with_capacity(scene.objects.len());
    for o in &scene.objects {
        let fp = match o.footprint() {
            Ok(fp) => Some(fp),
            Err(e) => {
                r.push(BadDimension, vec![o.id], format!("object {}: {}", o.id, e.0));
                None
            }
        };
        let mu_ok = |mu: T| non_negative(mu) && mu <= two;
        if !(positive(o.mass) && mu_ok(o.friction_ground) && mu_ok(o.friction_mover) && o.start_pose.is_finite()) {
            r.push(BadDimension, vec![o.id], format!("object {} has invalid mass, friction or pose", o.id));
        }
        footprints.push(fp.filter(|_| o.start_pose.is_finite()));
    }

    let mut obstacles_ok = Vec::with_capacity(scene.obstacles.len());
    for o in &scene.obstacles {
        let ok = o.shape.is_valid() && o.pose.is_finite();
        if !ok {
            r.push(BadDimension, vec![o.id], format!("obstacle {} has an invalid shape or pose", o.id));
        } else if !o.is_static {
            r.push(BadDimension, vec![o.id], format!("obstacle {} must be static", o.id));
        } else if grid_ok && !g.bounds().contains_aabb(&o.shape.aabb(&o.pose)) {
            r.push(ObstacleOffGrid, vec![o.id], format!("obstacle {} extends beyond the tile grid", o.id));
        }
        obstacles_ok.push(ok);
    }

    // Overlap checks only consider bodies whose own parameters are valid.
    let valid_movers: Vec<usize> = (0..scene.movers.len()).filter(|&i| movers_ok[i]).collect();
    let shapes: Vec<CollisionShape<T>> = valid_movers.iter().map(|&i| scene.movers[i].shape).collect();
    let poses: Vec<Pose2<T>> = valid_movers.iter().map(|&i| scene.movers[i].start_pose).collect();
    for (a, b) in colliding_index_pairs(&shapes, &poses, BroadphaseMode::Grid) {
        let (ma, mb) = (&scene.movers[valid_movers[a]], &scene.movers[valid_movers[b]]);
        r.push(MoverOverlap, vec![ma.id, mb.id], format!("movers {} and {} overlap", ma.id, mb.id));
    }

    for &i in &valid_movers {
        let m = &scene.movers[i];
        if grid_ok {
            if let TileCoverage::OffTiles { violation_area_hint } = tile_coverage(&m.shape, &m.start_pose, g) {
                r.push(
                    MoverOffTiles,
                    vec![m.id],
                    format!("mover {} is not above tiles ({violation_area_hint} m² uncovered)", m.id),
                );
            }
        }
        for (o, ok) in scene.obstacles.iter().zip(&obstacles_ok) {
            if *ok && check_pair(&m.shape, &m.start_pose, &o.shape, &o.pose).is_colliding() {
                r.push(MoverOverlap, vec![m.id, o.id], format!("mover {} overlaps obstacle {}", m.id, o.id));
            }
        }
        for (o, fp) in scene.objects.iter().zip(&footprints) {
            let Some(fp) = fp else { continue };
            let hit = fp.pieces.iter().any(|pc| {
                check_pair(&m.shape, &m.start_pose, &pc.collision_shape(T::zero()), &pc.world_pose(&o.start_pose))
                    .is_colliding()
            });
            if hit {
                r.push(MoverOverlap, vec![m.id, o.id], format!("mover {} overlaps object {}", m.id, o.id));
            }
        }
    }

    for (k, (o, fp)) in scene.objects.iter().zip(&footprints).enumerate() {
        let Some(fp) = fp else { continue };
        if grid_ok {
            let off = fp
                .pieces
                .iter()
                .any(|pc| !tile_coverage(&pc.collision_shape(T::zero()), &pc.world_pose(&o.start_pose), g).is_within());
            if off {
                r.push(ObjectOffTiles, vec![o.id], format!("object {} is not above tiles", o.id));
            }
        }
        for (obs, ok) in scene.obstacles.iter().zip(&obstacles_ok) {
            if *ok && footprint_hits(fp, &o.start_pose, &obs.shape, &obs.pose) {
                r.push(ObjectOverlap, vec![o.id, obs.id], format!("object {} overlaps obstacle {}", o.id, obs.id));
            }
        }
        for (o2, fp2) in scene.objects.iter().zip(&footprints).skip(k + 1) {
            let Some(fp2) = fp2 else { continue };
            let hit = fp2.pieces.iter().any(|pc| {
                footprint_hits(fp, &o.start_pose, &pc.collision_shape(T::zero()), &pc.world_pose(&o2.start_pose))
            });
            if hit {
                r.push(ObjectOverlap, vec![o.id, o2.id], format!("objects {} and {} overlap", o.id, o2.id));
            }
        }
    }
    r
}

fn footprint_hits<T: Real>(
    fp: &Footprint<T>,
    pose: &Pose2<T>,
    shape: &CollisionShape<T>,
    shape_pose: &Pose2<T>,
) -> bool {
    fp.pieces
        .iter()
        .any(|pc| check_pair(&pc.collision_shape(T::zero()), &pc.world_pose(pose), shape, shape_pose).is_colliding())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{generate_grid_scene, MoverShapeKind, ObjectSpec, ObstacleSpec, PhysicsParams};

    fn base() -> SceneConfig<f64> {
        generate_grid_scene(3, 3, 2, MoverShapeKind::Box, PhysicsParams::default()).unwrap()
    }

    #[test]
    fn generated_scene_is_clean() {
        assert!(validate_scene(&base()).is_empty());
    }

    #[test]
    fn identical_poses_overlap() {
        let mut s = base();
        s.movers[1].start_pose = s.movers[0].start_pose;
        assert!(validate_scene(&s).contains(ViolationCode::MoverOverlap));
    }

    #[test]
    fn mover_on_missing_tile() {
        let mut s = base();
        s.grid.missing.insert((1, 0));
        let r = validate_scene(&s);
        assert!(r.contains(ViolationCode::MoverOffTiles), "{r}");
    }

    #[test]
    fn duplicate_and_bad_dimensions() {
        let mut s = base();
        s.movers[1].id = s.movers[0].id;
        s.movers[1].mass = 0.0;
        let r = validate_scene(&s);
        assert!(r.contains(ViolationCode::DuplicateId));
        assert!(r.contains(ViolationCode::BadDimension));
    }

    #[test]
    fn obstacle_off_grid_and_object_checks() {
        let mut s = base();
        s.obstacles.push(ObstacleSpec {
            id: BodyId(10),
            shape: CollisionShape::new_box(0.05, 0.05, 0.0),
            pose: Pose2::new(-0.01, 0.5, 0.0),
            is_static: true,
        });
        let c = s.grid.tile_center(2, 2);
        s.objects.push(ObjectSpec::default_box(BodyId(11), Pose2::new(c.x, c.y, 0.0)));
        let r = validate_scene(&s);
        assert!(r.contains(ViolationCode::ObstacleOffGrid));
        assert!(!r.contains(ViolationCode::ObjectOverlap));
        s.objects[0].start_pose = s.movers[0].start_pose;
        assert!(validate_scene(&s).contains(ViolationCode::MoverOverlap));
        s.objects[0].start_pose = Pose2::new(0.0, 0.0, 0.0);
        assert!(validate_scene(&s).contains(ViolationCode::ObjectOffTiles));
    }
}
