use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::geometry::{Pose2, Vector2};
use crate::num::{wrap_angle, Real};
use crate::scene::{BodyId, SceneConfig};

/// Full mover pose. `z`, `roll` and `pitch` are held by the impedance law.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Pose6<T> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub roll: T,
    pub pitch: T,
    pub yaw: T,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Twist6<T> {
    pub vx: T,
    pub vy: T,
    pub vz: T,
    pub roll_rate: T,
    pub pitch_rate: T,
    pub yaw_rate: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct MoverState<T> {
    pub id: BodyId,
    pub pose: Pose6<T>,
    pub velocity: Twist6<T>,
    /// Planar acceleration applied during the last step, after clamping.
    pub last_command: Vector2<T>,
    /// Position held while the mover receives no command.
    pub hold_anchor: Option<Vector2<T>>,
}

impl<T: Real> MoverState<T> {
    pub fn at_rest(id: BodyId, planar: Pose2<T>, hover_height: T) -> Self {
        let z = T::zero();
        Self {
            id,
            pose: Pose6 { x: planar.x, y: planar.y, z: hover_height, roll: z, pitch: z, yaw: planar.yaw },
            velocity: Twist6::default(),
            last_command: Vector2::zero(),
            hold_anchor: None,
        }
    }

    #[inline]
    pub fn position(&self) -> Vector2<T> {
        Vector2::new(self.pose.x, self.pose.y)
    }

    #[inline]
    pub fn planar_pose(&self) -> Pose2<T> {
        Pose2 { x: self.pose.x, y: self.pose.y, yaw: self.pose.yaw }
    }

    #[inline]
    pub fn planar_velocity(&self) -> Vector2<T> {
        Vector2::new(self.velocity.vx, self.velocity.vy)
    }

    pub fn set_planar_pose(&mut self, p: Pose2<T>) {
        self.pose.x = p.x;
        self.pose.y = p.y;
        self.pose.yaw = wrap_angle(p.yaw);
    }

    pub fn set_planar_velocity(&mut self, v: Vector2<T>) {
        self.velocity.vx = v.x;
        self.velocity.vy = v.y;
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Twist2<T> {
    pub vx: T,
    pub vy: T,
    pub yaw_rate: T,
}

impl<T: Real> Twist2<T> {
    pub fn linear(&self) -> Vector2<T> {
        Vector2::new(self.vx, self.vy)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ObjectState<T> {
    pub id: BodyId,
    pub pose: Pose2<T>,
    pub velocity: Twist2<T>,
}

/// Dynamic state of every body plus the simulation clock.
///
/// `movers` and `objects` are index-aligned with the scene's lists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct WorldState<T> {
    pub time: T,
    pub step_index: u64,
    pub movers: Vec<MoverState<T>>,
    pub objects: Vec<ObjectState<T>>,
}

impl<T: Real> WorldState<T> {
    pub fn from_scene(scene: &SceneConfig<T>) -> Self {
        Self {
            time: T::zero(),
            step_index: 0,
            movers: scene.movers.iter().map(|m| MoverState::at_rest(m.id, m.start_pose, m.hover_height)).collect(),
            objects: scene
                .objects
                .iter()
                .map(|o| ObjectState { id: o.id, pose: o.start_pose, velocity: Twist2::default() })
                .collect(),
        }
    }

    pub fn mover(&self, id: BodyId) -> Option<&MoverState<T>> {
        self.movers.iter().find(|m| m.id == id)
    }

    pub fn mover_mut(&mut self, id: BodyId) -> Option<&mut MoverState<T>> {
        self.movers.iter_mut().find(|m| m.id == id)
    }

    pub fn object(&self, id: BodyId) -> Option<&ObjectState<T>> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn is_finite(&self) -> bool {
        let m = self.movers.iter().all(|m| {
            let p = m.pose;
            let v = m.velocity;
            [p.x, p.y, p.z, p.roll, p.pitch, p.yaw, v.vx, v.vy, v.vz, v.roll_rate, v.pitch_rate, v.yaw_rate]
                .iter()
                .all(|x| x.is_finite())
        });
        m && self.objects.iter().all(|o| o.pose.is_finite() && o.velocity.linear().is_finite())
    }

    /// Feeds every state value's bit pattern into `h`.
    pub fn hash_into(&self, h: &mut Sha256) {
        let mut put = |x: T| h.update(x.to_f64_lossy().to_bits().to_le_bytes());
        put(self.time);
        for m in &self.movers {
            let p = m.pose;
            let v = m.velocity;
            for x in [p.x, p.y, p.z, p.roll, p.pitch, p.yaw, v.vx, v.vy, v.vz, v.roll_rate, v.pitch_rate, v.yaw_rate] {
                put(x);
            }
        }
        for o in &self.objects {
            for x in [o.pose.x, o.pose.y, o.pose.yaw, o.velocity.vx, o.velocity.vy, o.velocity.yaw_rate] {
                put(x);
            }
        }
    }

    /// Hex SHA-256 of the current state.
    pub fn state_hash(&self) -> String {
        let mut h = Sha256::new();
        self.hash_into(&mut h);
        hex::encode(h.finalize())
    }
}
