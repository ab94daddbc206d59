//! Deterministic discrete-time simulation loop and metrics output.
//!
//! Each step runs fixed phases: spawn due waves, move the flock, refresh
//! observations and tracks, then append metrics. Everything downstream of
//! the 64-bit seed is reproducible: target spawning draws from a dedicated
//! RNG stream, flocking and tracking are pure functions of state, and all
//! iteration orders are fixed.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::Rect;
use crate::network::{deploy, neighbor_graph, NeighborGraph, Sensor};
use crate::planner::{optimal_plan, plan_with_count, Plan, SensorSpec};
use crate::targets::{flock_step, spawn_wave, FlockParams, Target};
use crate::tracking::{Event, EventKind, StepView, TrackTable, DEFAULT_STRENGTH_WINDOW};

/// RNG stream id for target spawning, derived from the run seed.
const SPAWN_STREAM: u64 = 1;

/// Fleet sizing: let the planner choose, or force a count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensorCount {
    Auto,
    Fixed(u32),
}

/// Full description of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub field: Rect,
    pub spec: SensorSpec,
    pub sensor_count: SensorCount,
    pub flock: FlockParams,
    /// Waves of `(step, count)` spawns; ids are assigned in schedule order.
    pub spawn_schedule: Vec<(u64, u32)>,
    pub dt: f64,
    pub steps: u64,
    pub seed: u64,
    /// Trend window length for the handoff rule.
    pub strength_window: usize,
    /// Exited targets with continuity below this count as missed.
    pub missed_threshold: f64,
}

impl SimConfig {
    /// A config with the standard defaults: auto fleet, one wave of
    /// `target_count` targets at step 0, dt 0.1, 2000 steps.
    pub fn new(field: Rect, spec: SensorSpec, target_count: u32) -> Self {
        SimConfig {
            field,
            spec,
            sensor_count: SensorCount::Auto,
            flock: FlockParams::default(),
            spawn_schedule: vec![(0, target_count)],
            dt: 0.1,
            steps: 2000,
            seed: 0,
            strength_window: DEFAULT_STRENGTH_WINDOW,
            missed_threshold: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.steps < 1 {
            return Err(Error::InvalidParameter("steps must be >= 1".into()));
        }
        if self.strength_window < 2 {
            return Err(Error::InvalidParameter(
                "strength window must be >= 2".into(),
            ));
        }
        self.flock.validate()
    }

    pub fn target_total(&self) -> u32 {
        self.spawn_schedule.iter().map(|(_, c)| c).sum()
    }
}

/// One row of the per-step metrics stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMetrics {
    pub step: u64,
    pub in_field: u32,
    pub owned: u32,
    /// Owned over in-field targets; 1.0 when the field is empty.
    pub coverage_ratio: f64,
    pub handoffs_cum: u64,
}

/// End-of-run aggregates over exited targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub spawned: u32,
    pub exited: u32,
    /// Mean continuity over exited targets; 1.0 when none exited.
    pub mean_continuity: f64,
    /// Worst front-strip continuity over exited targets; 1.0 outside Case 3.
    pub min_front_continuity: f64,
    pub total_handoffs: u64,
    pub missed: u32,
}

/// Complete simulation state between steps.
#[derive(Debug)]
pub struct WorldState {
    pub config: SimConfig,
    pub plan: Plan,
    pub step: u64,
    pub sensors: Vec<Sensor>,
    pub graph: NeighborGraph,
    pub targets: Vec<Target>,
    pub tracks: TrackTable,
    pub events: Vec<Event>,
    pub metrics: Vec<StepMetrics>,
    spawn_rng: ChaCha8Rng,
    next_target_id: u64,
    spawned_total: u32,
}

/// Plans, deploys and seeds a world. Fails on Case 4 plans (directly or
/// discovered during deployment) without constructing any state.
pub fn init(config: SimConfig) -> Result<WorldState> {
    config.validate()?;
    let plan = match config.sensor_count {
        SensorCount::Auto => optimal_plan(config.field, &config.spec),
        SensorCount::Fixed(n) => {
            if n < 1 {
                return Err(Error::InvalidParameter("sensor count must be >= 1".into()));
            }
            plan_with_count(config.field, &config.spec, n)
        }
    };
    let sensors = deploy(&plan)?;
    let graph = neighbor_graph(&sensors);
    let mut spawn_rng = ChaCha8Rng::seed_from_u64(config.seed);
    spawn_rng.set_stream(SPAWN_STREAM);
    let window = config.strength_window;
    Ok(WorldState {
        config,
        plan,
        step: 0,
        sensors,
        graph,
        targets: Vec::new(),
        tracks: TrackTable::new(window),
        events: Vec::new(),
        metrics: Vec::new(),
        spawn_rng,
        next_target_id: 0,
        spawned_total: 0,
    })
}

/// Advances the world one step: spawn, flock, track, record.
pub fn step(world: &mut WorldState) {
    let step = world.step;

    // Spawn phase.
    let due: u32 = world
        .config
        .spawn_schedule
        .iter()
        .filter(|(s, _)| *s == step)
        .map(|(_, c)| *c)
        .sum();
    if due > 0 {
        let wave = spawn_wave(
            &mut world.spawn_rng,
            due,
            world.config.field,
            &world.config.flock,
            &mut world.next_target_id,
        );
        world.spawned_total += wave.len() as u32;
        for t in &wave {
            world.events.push(Event {
                step,
                kind: EventKind::Spawn,
                target: t.id,
                from_sensor: None,
                to_sensor: None,
            });
        }
        world.targets.extend(wave);
    }

    // Motion phase.
    world.targets = flock_step(
        &world.targets,
        &world.config.flock,
        world.config.field,
        world.config.dt,
    );

    // Observation and tracking phase.
    let view = StepView {
        step,
        sensors: &world.sensors,
        graph: &world.graph,
        targets: &world.targets,
        field: world.config.field,
        front_depth: world.plan.front_depth,
    };
    let events = world.tracks.update_tracks(&view);
    world.events.extend(events);

    // Metrics phase.
    let in_field: Vec<&Target> = world
        .targets
        .iter()
        .filter(|t| t.alive && world.config.field.contains(t.pos))
        .collect();
    let owned = in_field
        .iter()
        .filter(|t| world.tracks.owner_of(t.id).is_some())
        .count() as u32;
    let in_field = in_field.len() as u32;
    let coverage_ratio = if in_field == 0 {
        1.0
    } else {
        owned as f64 / in_field as f64
    };
    world.metrics.push(StepMetrics {
        step,
        in_field,
        owned,
        coverage_ratio,
        handoffs_cum: world.tracks.total_handoffs(),
    });

    // Conservation: every spawned target is still accounted for.
    debug_assert_eq!(world.spawned_total as usize, world.targets.len());

    world.step += 1;
}

/// Runs a config to completion.
pub fn run(config: SimConfig) -> Result<(RunSummary, WorldState)> {
    let mut world = init(config)?;
    for _ in 0..world.config.steps {
        step(&mut world);
    }
    let summary = summarize(&world);
    Ok((summary, world))
}

/// Aggregates the exited-target statistics.
pub fn summarize(world: &WorldState) -> RunSummary {
    let exited: Vec<_> = world.tracks.records().filter(|r| r.exited).collect();
    let mean_continuity = if exited.is_empty() {
        1.0
    } else {
        exited.iter().map(|r| r.continuity()).sum::<f64>() / exited.len() as f64
    };
    let min_front_continuity = exited
        .iter()
        .map(|r| r.front_continuity())
        .fold(1.0, f64::min);
    let missed = exited
        .iter()
        .filter(|r| r.continuity() < world.config.missed_threshold)
        .count() as u32;
    RunSummary {
        spawned: world.spawned_total,
        exited: exited.len() as u32,
        mean_continuity,
        min_front_continuity,
        total_handoffs: world.tracks.total_handoffs(),
        missed,
    }
}

// ---------------------------------------------------------------------------
// Stable text output
// ---------------------------------------------------------------------------

/// Writes the per-step metrics stream as CSV. The format is part of the
/// external contract: header first, `\n` line endings, ratios with six
/// decimals.
pub fn write_metrics_csv<W: Write>(world: &WorldState, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "step,in_field,owned,coverage_ratio,handoffs_cum")?;
    for m in &world.metrics {
        writeln!(
            out,
            "{},{},{},{:.6},{}",
            m.step, m.in_field, m.owned, m.coverage_ratio, m.handoffs_cum
        )?;
    }
    Ok(())
}

/// Writes the lifecycle event stream as CSV. Absent sensor columns stay
/// empty.
pub fn write_events_csv<W: Write>(world: &WorldState, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "step,kind,target_id,from_sensor,to_sensor")?;
    for e in &world.events {
        let from = e.from_sensor.map(|s| s.to_string()).unwrap_or_default();
        let to = e.to_sensor.map(|s| s.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{},{}", e.step, e.kind.as_str(), e.target, from, to)?;
    }
    Ok(())
}

/// One-line run summary, stable across runs of the same config.
pub fn summary_line(summary: &RunSummary) -> String {
    format!(
        "spawned={} exited={} mean_continuity={:.6} min_front_continuity={:.6} total_handoffs={} missed={}",
        summary.spawned,
        summary.exited,
        summary.mean_continuity,
        summary.min_front_continuity,
        summary.total_handoffs,
        summary.missed
    )
}
