//! Sequential-impulse contact solver with split-impulse position correction.

use crate::geometry::Vector2;
use crate::num::Real;
use crate::scene::ContactParams;

use super::contact::ContactManifold;

/// Planar rigid body as seen by the solver. Static bodies have zero inverse mass and inertia.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverBody<T> {
    pub position: Vector2<T>,
    pub inv_mass: T,
    pub inv_inertia: T,
    pub velocity: Vector2<T>,
    pub angular_velocity: T,
    /// Position-correction velocities; applied to positions only, never stored.
    pub pseudo_velocity: Vector2<T>,
    pub pseudo_angular_velocity: T,
}

impl<T: Real> SolverBody<T> {
    pub fn dynamic(position: Vector2<T>, mass: T, inertia: T, velocity: Vector2<T>, angular_velocity: T) -> Self {
        Self {
            position,
            inv_mass: T::one() / mass,
            inv_inertia: T::one() / inertia,
            velocity,
            angular_velocity,
            pseudo_velocity: Vector2::zero(),
            pseudo_angular_velocity: T::zero(),
        }
    }

    pub fn fixed(position: Vector2<T>) -> Self {
        Self {
            position,
            inv_mass: T::zero(),
            inv_inertia: T::zero(),
            velocity: Vector2::zero(),
            angular_velocity: T::zero(),
            pseudo_velocity: Vector2::zero(),
            pseudo_angular_velocity: T::zero(),
        }
    }

    pub fn kinetic_energy(&self) -> T {
        if self.inv_mass == T::zero() {
            return T::zero();
        }
        let h = T::half();
        h * self.velocity.norm_squared() / self.inv_mass
            + h * self.angular_velocity * self.angular_velocity / self.inv_inertia
    }

    fn apply(&mut self, impulse: Vector2<T>, r: Vector2<T>) {
        self.velocity += impulse * self.inv_mass;
        self.angular_velocity = self.angular_velocity + self.inv_inertia * r.cross(impulse);
    }

    fn apply_pseudo(&mut self, impulse: Vector2<T>, r: Vector2<T>) {
        self.pseudo_velocity += impulse * self.inv_mass;
        self.pseudo_angular_velocity = self.pseudo_angular_velocity + self.inv_inertia * r.cross(impulse);
    }
}

/// Friction between a body and the tile surface, solved as a planar friction joint:
/// the linear impulse per step is bounded by `mu m g dt` and the angular one by
/// `mu m g r_eff dt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroundFriction<T> {
    pub body: usize,
    pub max_force: T,
    pub max_torque: T,
}

/// Index of a manifold's bodies in the solver body list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BodyPair {
    pub a: usize,
    pub b: usize,
}

struct PointConstraint<T> {
    a: usize,
    b: usize,
    ra: Vector2<T>,
    rb: Vector2<T>,
    normal: Vector2<T>,
    normal_mass: T,
    tangent_mass: T,
    friction: T,
    velocity_bias: T,
    position_bias: T,
    normal_impulse: T,
    tangent_impulse: T,
    pseudo_impulse: T,
}

fn effective_mass<T: Real>(
    ba: &SolverBody<T>,
    bb: &SolverBody<T>,
    ra: Vector2<T>,
    rb: Vector2<T>,
    dir: Vector2<T>,
) -> T {
    let rna = ra.cross(dir);
    let rnb = rb.cross(dir);
    let k = ba.inv_mass + bb.inv_mass + ba.inv_inertia * rna * rna + bb.inv_inertia * rnb * rnb;
    if k > T::zero() {
        T::one() / k
    } else {
        T::zero()
    }
}

fn relative_velocity<T: Real>(ba: &SolverBody<T>, bb: &SolverBody<T>, ra: Vector2<T>, rb: Vector2<T>) -> Vector2<T> {
    let va = ba.velocity + ra.perp() * ba.angular_velocity;
    let vb = bb.velocity + rb.perp() * bb.angular_velocity;
    vb - va
}

fn relative_pseudo_velocity<T: Real>(
    ba: &SolverBody<T>,
    bb: &SolverBody<T>,
    ra: Vector2<T>,
    rb: Vector2<T>,
) -> Vector2<T> {
    let va = ba.pseudo_velocity + ra.perp() * ba.pseudo_angular_velocity;
    let vb = bb.pseudo_velocity + rb.perp() * bb.pseudo_angular_velocity;
    vb - va
}

fn pair_mut<T>(v: &mut [T], a: usize, b: usize) -> (&mut T, &mut T) {
    assert_ne!(a, b, "contact between a body and itself");
    if a < b {
        let (lo, hi) = v.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(a);
        (&mut hi[0], &mut lo[b])
    }
}

/// Resolves contacts by sequential impulses, updating body velocities and
/// pseudo-velocities in place. `pairs[k]` locates the bodies of `manifolds[k]`.
pub fn solve_contacts<T: Real>(
    manifolds: &[ContactManifold<T>],
    pairs: &[BodyPair],
    bodies: &mut [SolverBody<T>],
    ground: &[GroundFriction<T>],
    params: &ContactParams<T>,
    dt: T,
) {
    debug_assert_eq!(manifolds.len(), pairs.len());
    let inv_dt = T::one() / dt;
    let restitution_threshold = T::lit(1e-3);
    let mut cs = Vec::new();
    for (m, pair) in manifolds.iter().zip(pairs) {
        let (ba, bb) = (&bodies[pair.a], &bodies[pair.b]);
        for p in &m.points {
            let ra = p.position - ba.position;
            let rb = p.position - bb.position;
            let n = p.normal;
            let vn = relative_velocity(ba, bb, ra, rb).dot(n);
            let velocity_bias = if vn < -restitution_threshold { -params.restitution * vn } else { T::zero() };
            cs.push(PointConstraint {
                a: pair.a,
                b: pair.b,
                ra,
                rb,
                normal: n,
                normal_mass: effective_mass(ba, bb, ra, rb, n),
                tangent_mass: effective_mass(ba, bb, ra, rb, n.perp()),
                friction: m.friction,
                velocity_bias,
                position_bias: params.baumgarte * inv_dt * (p.depth - params.slop).max(T::zero()),
                normal_impulse: T::zero(),
                tangent_impulse: T::zero(),
                pseudo_impulse: T::zero(),
            });
        }
    }
    let mut ground_linear = vec![Vector2::zero(); ground.len()];
    let mut ground_angular = vec![T::zero(); ground.len()];

    for _ in 0..params.iterations {
        for (k, g) in ground.iter().enumerate() {
            let body = &mut bodies[g.body];
            if body.inv_mass > T::zero() {
                let max = g.max_force * dt;
                let old = ground_linear[k];
                let mut acc = old - body.velocity * (T::one() / body.inv_mass);
                let n = acc.norm();
                if n > max {
                    acc = acc * (max / n);
                }
                ground_linear[k] = acc;
                body.velocity += (acc - old) * body.inv_mass;
            }
            if body.inv_inertia > T::zero() {
                let max = g.max_torque * dt;
                let old = ground_angular[k];
                let acc = (old - body.angular_velocity / body.inv_inertia).max(-max).min(max);
                ground_angular[k] = acc;
                body.angular_velocity = body.angular_velocity + (acc - old) * body.inv_inertia;
            }
        }
        for c in cs.iter_mut() {
            let (ba, bb) = pair_mut(bodies, c.a, c.b);
            let t = c.normal.perp();
            let vt = relative_velocity(ba, bb, c.ra, c.rb).dot(t);
            let limit = c.friction * c.normal_impulse;
            let old = c.tangent_impulse;
            c.tangent_impulse = (old - c.tangent_mass * vt).max(-limit).min(limit);
            let imp = t * (c.tangent_impulse - old);
            ba.apply(-imp, c.ra);
            bb.apply(imp, c.rb);

            let vn = relative_velocity(ba, bb, c.ra, c.rb).dot(c.normal);
            let old = c.normal_impulse;
            c.normal_impulse = (old - c.normal_mass * (vn - c.velocity_bias)).max(T::zero());
            let imp = c.normal * (c.normal_impulse - old);
            ba.apply(-imp, c.ra);
            bb.apply(imp, c.rb);
        }
    }

    for _ in 0..params.iterations {
        for c in cs.iter_mut() {
            let (ba, bb) = pair_mut(bodies, c.a, c.b);
            let vn = relative_pseudo_velocity(ba, bb, c.ra, c.rb).dot(c.normal);
            let old = c.pseudo_impulse;
            c.pseudo_impulse = (old - c.normal_mass * (vn - c.position_bias)).max(T::zero());
            let imp = c.normal * (c.pseudo_impulse - old);
            ba.apply_pseudo(-imp, c.ra);
            bb.apply_pseudo(imp, c.rb);
        }
    }
}
