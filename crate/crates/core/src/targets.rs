//! Target swarm: spawning at the entry edge and flocking motion.
//!
//! Targets follow the classic three steering rules (cohesion, alignment,
//! separation) plus a drift term that pulls their velocity back toward the
//! cruise velocity aimed at the exit edge. The update is synchronous: every
//! target steers off the previous step's state, so results are independent
//! of iteration order.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Rect, Vec2};

/// A tracked vehicle crossing the field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    pub id: u64,
    pub pos: Vec2,
    pub vel: Vec2,
    /// Cleared once the target crosses the exit edge; dead targets take no
    /// further part in flocking or tracking.
    pub alive: bool,
}

/// Flocking parameters. All radii are in field length units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlockParams {
    /// Radius within which flockmates influence cohesion and alignment.
    pub neighbor_radius: f64,
    /// Radius within which separation pushes flockmates apart.
    pub sep_radius: f64,
    pub w_cohesion: f64,
    pub w_alignment: f64,
    pub w_separation: f64,
    /// Unit vector toward the exit edge.
    pub drift: Vec2,
    /// Pull of the velocity back toward `v_cruise * drift`.
    pub w_drift: f64,
    pub v_cruise: f64,
    pub v_max: f64,
}

impl Default for FlockParams {
    fn default() -> Self {
        FlockParams {
            neighbor_radius: 5.0,
            sep_radius: 1.0,
            w_cohesion: 1.0,
            w_alignment: 1.0,
            w_separation: 1.5,
            drift: Vec2::new(1.0, 0.0),
            w_drift: 0.5,
            v_cruise: 1.0,
            v_max: 2.0,
        }
    }
}

impl FlockParams {
    /// Checks the structural constraints; call after building one by hand.
    pub fn validate(&self) -> crate::error::Result<()> {
        use crate::error::Error;
        let finite = [
            self.neighbor_radius,
            self.sep_radius,
            self.w_cohesion,
            self.w_alignment,
            self.w_separation,
            self.w_drift,
            self.v_cruise,
            self.v_max,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite || !self.drift.is_finite() {
            return Err(Error::InvalidParameter("non-finite flock parameter".into()));
        }
        if !(self.neighbor_radius > 0.0) || !(self.sep_radius > 0.0) {
            return Err(Error::InvalidParameter("flock radii must be positive".into()));
        }
        if self.sep_radius > self.neighbor_radius {
            return Err(Error::InvalidParameter(
                "separation radius must not exceed neighbor radius".into(),
            ));
        }
        if self.v_cruise > self.v_max {
            return Err(Error::InvalidParameter(
                "cruise speed must not exceed max speed".into(),
            ));
        }
        let weights = [
            self.w_cohesion,
            self.w_alignment,
            self.w_separation,
            self.w_drift,
        ];
        if weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidParameter("flock weights must be >= 0".into()));
        }
        Ok(())
    }
}

/// Spawn velocity jitter, as a fraction of cruise speed per component.
const SPAWN_JITTER: f64 = 0.05;

/// Spawns `count` targets in the entry band `x in [0, sep_radius]`,
/// `y in (0, b)`, moving at cruise velocity plus a small jitter.
///
/// Ids come from `next_id`, which the caller owns so ids stay unique across
/// waves. Draw order per target is fixed (x, y, jx, jy), so a given rng
/// state always yields the same wave.
pub fn spawn_wave(
    rng: &mut ChaCha8Rng,
    count: u32,
    field: Rect,
    params: &FlockParams,
    next_id: &mut u64,
) -> Vec<Target> {
    let mut wave = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let x = rng.random_range(0.0..params.sep_radius.min(field.l));
        let y = rng.random_range(0.0..field.b);
        let jitter_scale = SPAWN_JITTER * params.v_cruise;
        let jx = rng.random_range(-jitter_scale..=jitter_scale);
        let jy = rng.random_range(-jitter_scale..=jitter_scale);
        let vel = (params.drift * params.v_cruise + Vec2::new(jx, jy)).clamp_length(params.v_max);
        wave.push(Target {
            id: *next_id,
            pos: Vec2::new(x, y),
            vel,
            alive: true,
        });
        *next_id += 1;
    }
    wave
}

/// Advances every alive target by one step of length `dt`.
///
/// Steering per target:
/// cohesion toward the neighbour centroid, alignment toward the mean
/// neighbour velocity, separation away from close flockmates weighted by
/// inverse squared distance, and drift back toward cruise velocity. The new
/// velocity is clamped to `v_max` and positions advance with the new
/// velocity. Targets reflect off the lateral walls `y = 0` and `y = b`; a
/// target whose x exceeds `l` is marked exited.
pub fn flock_step(targets: &[Target], params: &FlockParams, field: Rect, dt: f64) -> Vec<Target> {
    debug_assert!(dt > 0.0);
    let mut out = Vec::with_capacity(targets.len());
    for t in targets {
        if !t.alive {
            out.push(*t);
            continue;
        }
        let steer = steering(*t, targets, params);
        let vel = (t.vel + steer * dt).clamp_length(params.v_max);
        let mut pos = t.pos + vel * dt;
        let mut vel = vel;
        reflect_lateral(&mut pos, &mut vel, field.b);
        let alive = pos.x <= field.l;
        out.push(Target {
            id: t.id,
            pos,
            vel,
            alive,
        });
    }
    out
}

fn steering(t: Target, targets: &[Target], params: &FlockParams) -> Vec2 {
    let mut centroid = Vec2::ZERO;
    let mut mean_vel = Vec2::ZERO;
    let mut neighbors = 0usize;
    let mut separation = Vec2::ZERO;

    for other in targets {
        if !other.alive || other.id == t.id {
            continue;
        }
        let offset = other.pos - t.pos;
        let d_sq = offset.length_sq();
        if d_sq > params.neighbor_radius * params.neighbor_radius {
            continue;
        }
        centroid += other.pos;
        mean_vel += other.vel;
        neighbors += 1;
        if d_sq <= params.sep_radius * params.sep_radius && d_sq > 0.0 {
            separation += (t.pos - other.pos) * (1.0 / d_sq);
        }
    }

    let mut steer = (params.drift * params.v_cruise - t.vel) * params.w_drift;
    if neighbors > 0 {
        let inv = 1.0 / neighbors as f64;
        steer += (centroid * inv - t.pos) * params.w_cohesion;
        steer += (mean_vel * inv - t.vel) * params.w_alignment;
    }
    steer + separation * params.w_separation
}

/// Bounces `pos`/`vel` off the walls `y = 0` and `y = b`. Loops because a
/// large step could overshoot past both walls on a narrow field.
fn reflect_lateral(pos: &mut Vec2, vel: &mut Vec2, b: f64) {
    let mut guard = 0;
    while (pos.y < 0.0 || pos.y > b) && guard < 64 {
        if pos.y < 0.0 {
            pos.y = -pos.y;
            vel.y = -vel.y;
        } else {
            pos.y = 2.0 * b - pos.y;
            vel.y = -vel.y;
        }
        guard += 1;
    }
    // Pathological speeds only: pin inside rather than loop forever.
    if guard == 64 {
        pos.y = pos.y.clamp(0.0, b);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;

    fn field() -> Rect {
        Rect::new(50.0, 20.0).unwrap()
    }

    #[test]
    fn spawn_zero_is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut next = 0;
        let wave = spawn_wave(&mut rng, 0, field(), &FlockParams::default(), &mut next);
        assert!(wave.is_empty());
        assert_eq!(next, 0);
    }

    #[test]
    fn spawn_is_deterministic() {
        let params = FlockParams::default();
        let mk = || {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            let mut next = 0;
            spawn_wave(&mut rng, 5, field(), &params, &mut next)
        };
        assert_eq!(mk(), mk());
    }

    #[test]
    fn spawn_positions_and_speeds_in_bounds() {
        let params = FlockParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut next = 10;
        let wave = spawn_wave(&mut rng, 5, field(), &params, &mut next);
        assert_eq!(next, 15);
        for t in &wave {
            assert!(t.pos.x >= 0.0 && t.pos.x <= params.sep_radius);
            assert!(t.pos.y >= 0.0 && t.pos.y <= field().b);
            assert!(t.vel.length() <= params.v_max);
            assert!(t.vel.x > 0.0);
        }
    }

    #[test]
    fn lone_cruising_target_keeps_velocity() {
        let params = FlockParams::default();
        let t = Target {
            id: 0,
            pos: Vec2::new(5.0, 10.0),
            vel: params.drift * params.v_cruise,
            alive: true,
        };
        let next = flock_step(&[t], &params, field(), 0.1);
        assert_abs_diff_eq!(next[0].vel.x, t.vel.x, epsilon = 1e-15);
        assert_abs_diff_eq!(next[0].vel.y, t.vel.y, epsilon = 1e-15);
        assert_abs_diff_eq!(next[0].pos.x, 5.0 + 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(next[0].pos.y, 10.0, epsilon = 1e-15);
    }

    #[test]
    fn separation_pushes_pair_apart() {
        // Two stationary targets 0.5 apart, separation only:
        // steer = 1.5 * (+-0.5 / 0.25) = +-3.0, dt = 0.1 => vel +-0.3,
        // positions move to -0.03 and 0.53, distance 0.56.
        let params = FlockParams {
            w_cohesion: 0.0,
            w_alignment: 0.0,
            w_separation: 1.5,
            w_drift: 0.0,
            ..FlockParams::default()
        };
        let a = Target {
            id: 0,
            pos: Vec2::new(10.0, 10.0),
            vel: Vec2::ZERO,
            alive: true,
        };
        let b = Target {
            id: 1,
            pos: Vec2::new(10.5, 10.0),
            vel: Vec2::ZERO,
            alive: true,
        };
        let next = flock_step(&[a, b], &params, field(), 0.1);
        let d = next[0].pos.distance(next[1].pos);
        assert_abs_diff_eq!(d, 0.56, epsilon = 1e-12);
        assert!(d > 0.5);
    }

    #[test]
    fn symmetric_ring_centroid_is_fixed_under_cohesion() {
        let params = FlockParams {
            neighbor_radius: 100.0,
            w_cohesion: 1.0,
            w_alignment: 0.0,
            w_separation: 0.0,
            w_drift: 0.0,
            ..FlockParams::default()
        };
        let center = Vec2::new(25.0, 10.0);
        let m = 8;
        let ring: Vec<Target> = (0..m)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
                Target {
                    id: i as u64,
                    pos: center + Vec2::new(3.0 * a.cos(), 3.0 * a.sin()),
                    vel: Vec2::ZERO,
                    alive: true,
                }
            })
            .collect();
        let before: Vec2 = ring.iter().fold(Vec2::ZERO, |acc, t| acc + t.pos) * (1.0 / m as f64);
        let next = flock_step(&ring, &params, field(), 0.1);
        let after: Vec2 = next.iter().fold(Vec2::ZERO, |acc, t| acc + t.pos) * (1.0 / m as f64);
        assert_abs_diff_eq!(before.x, after.x, epsilon = 1e-12);
        assert_abs_diff_eq!(before.y, after.y, epsilon = 1e-12);
    }

    #[test]
    fn exit_edge_absorbs() {
        let params = FlockParams::default();
        let t = Target {
            id: 0,
            pos: Vec2::new(49.95, 10.0),
            vel: Vec2::new(1.0, 0.0),
            alive: true,
        };
        let next = flock_step(&[t], &params, field(), 0.1);
        assert!(!next[0].alive);
    }

    #[test]
    fn walls_reflect() {
        let params = FlockParams::default();
        let t = Target {
            id: 0,
            pos: Vec2::new(5.0, 0.05),
            vel: Vec2::new(0.0, -2.0),
            alive: true,
        };
        let next = flock_step(&[t], &params, field(), 0.1);
        assert!(next[0].pos.y >= 0.0);
        assert!(next[0].vel.y > 0.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn speed_and_containment_hold(seed in 0u64..1000, count in 1u32..30, steps in 1usize..200) {
                let params = FlockParams::default();
                let f = Rect::new(50.0, 20.0).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut next_id = 0;
                let mut targets = spawn_wave(&mut rng, count, f, &params, &mut next_id);
                for _ in 0..steps {
                    targets = flock_step(&targets, &params, f, 0.1);
                    for t in targets.iter().filter(|t| t.alive) {
                        prop_assert!(t.vel.length() <= params.v_max + 1e-9);
                        prop_assert!(t.pos.y >= 0.0 && t.pos.y <= f.b);
                    }
                }
            }

            #[test]
            fn lone_target_progresses(seed in 0u64..1000) {
                let params = FlockParams::default();
                let f = Rect::new(1e6, 20.0).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut next_id = 0;
                let mut targets = spawn_wave(&mut rng, 1, f, &params, &mut next_id);
                let mut last_x = targets[0].pos.x;
                for _ in 0..500 {
                    targets = flock_step(&targets, &params, f, 0.1);
                    prop_assert!(targets[0].pos.x > last_x);
                    last_x = targets[0].pos.x;
                }
            }
        }
    }
}
