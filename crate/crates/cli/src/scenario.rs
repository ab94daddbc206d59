//! Scenario file parsing.
//!
//! Scenario files are plain text with `[section]` headers and `key = value`
//! lines. Three sections exist: `[scenario]` (field, sensor spec, run
//! length), `[flock]` (steering weights, radii, speeds) and `[tracking]`
//! (capacity, trend window). Unknown sections or keys are rejected, values
//! must be finite, and decimal parsing always uses the dot separator.
//!
//! ```text
//! [scenario]
//! length = 50
//! breadth = 20
//! primary_radius = 2
//! secondary_radius = 4
//! sensor_count = auto
//! target_count = 20
//! steps = 2000
//! dt = 0.1
//! seed = 6
//! spawn_schedule = 0:5, 400:5, 800:5, 1200:5
//!
//! [flock]
//! w_separation = 1.5
//!
//! [tracking]
//! capacity = 5
//! window = 3
//! ```

use std::collections::BTreeMap;

use swarmtrack_core::engine::{SensorCount, SimConfig};
use swarmtrack_core::geometry::{Rect, Vec2};
use swarmtrack_core::planner::SensorSpec;
use swarmtrack_core::targets::FlockParams;

#[derive(Debug)]
pub struct ScenarioError(pub String);

impl std::fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "scenario: {}", self.0)
    }
}

impl std::error::Error for ScenarioError {}

type ParseResult<T> = Result<T, ScenarioError>;

fn err<T>(msg: impl Into<String>) -> ParseResult<T> {
    Err(ScenarioError(msg.into()))
}

/// Parses a scenario document into a simulation config.
pub fn parse_scenario(text: &str) -> ParseResult<SimConfig> {
    let sections = split_sections(text)?;
    for name in sections.keys() {
        if !["scenario", "flock", "tracking"].contains(&name.as_str()) {
            return err(format!("unknown section [{name}]"));
        }
    }
    let empty = BTreeMap::new();
    let scenario = sections
        .get("scenario")
        .ok_or_else(|| ScenarioError("missing [scenario] section".into()))?;
    let flock_keys = sections.get("flock").unwrap_or(&empty);
    let tracking_keys = sections.get("tracking").unwrap_or(&empty);

    let mut scenario = Keys::new("scenario", scenario);
    let mut flock_section = Keys::new("flock", flock_keys);
    let mut tracking = Keys::new("tracking", tracking_keys);

    let length = scenario.require_f64("length")?;
    let breadth = scenario.require_f64("breadth")?;
    let primary = scenario.require_f64("primary_radius")?;
    let secondary = scenario.require_f64("secondary_radius")?;
    let target_count = scenario.require_u64("target_count")? as u32;
    let steps = scenario.f64_or("steps", 2000.0)? as u64;
    let dt = scenario.f64_or("dt", 0.1)?;
    let seed = scenario.u64_or("seed", 0)?;
    let sensor_count = match scenario.take("sensor_count") {
        None => SensorCount::Auto,
        Some(v) if v == "auto" => SensorCount::Auto,
        Some(v) => match v.parse::<u32>() {
            Ok(n) if n >= 1 => SensorCount::Fixed(n),
            _ => return err(format!("sensor_count must be \"auto\" or a positive integer, got {v:?}")),
        },
    };
    let spawn_schedule = match scenario.take("spawn_schedule") {
        None => vec![(0, target_count)],
        Some(v) => {
            let schedule = parse_schedule(&v)?;
            let total: u32 = schedule.iter().map(|(_, c)| c).sum();
            if total != target_count {
                return err(format!(
                    "spawn_schedule spawns {total} targets but target_count is {target_count}"
                ));
            }
            schedule
        }
    };
    scenario.finish()?;

    let capacity = tracking.u64_or("capacity", 5)? as u32;
    let window = tracking.u64_or("window", 3)? as usize;
    tracking.finish()?;

    let defaults = FlockParams::default();
    let flock = FlockParams {
        neighbor_radius: flock_section.f64_or("neighbor_radius", defaults.neighbor_radius)?,
        sep_radius: flock_section.f64_or("separation_radius", defaults.sep_radius)?,
        w_cohesion: flock_section.f64_or("w_cohesion", defaults.w_cohesion)?,
        w_alignment: flock_section.f64_or("w_alignment", defaults.w_alignment)?,
        w_separation: flock_section.f64_or("w_separation", defaults.w_separation)?,
        w_drift: flock_section.f64_or("w_drift", defaults.w_drift)?,
        v_cruise: flock_section.f64_or("v_cruise", defaults.v_cruise)?,
        v_max: flock_section.f64_or("v_max", defaults.v_max)?,
        drift: Vec2::new(1.0, 0.0),
    };
    flock_section.finish()?;

    let field = Rect::new(length, breadth).map_err(|e| ScenarioError(e.to_string()))?;
    let spec = SensorSpec::new(primary, secondary, capacity)
        .map_err(|e| ScenarioError(e.to_string()))?;

    let mut config = SimConfig::new(field, spec, target_count);
    config.sensor_count = sensor_count;
    config.flock = flock;
    config.spawn_schedule = spawn_schedule;
    config.dt = dt;
    config.steps = steps;
    config.seed = seed;
    config.strength_window = window;
    config.validate().map_err(|e| ScenarioError(e.to_string()))?;
    Ok(config)
}

fn split_sections(text: &str) -> ParseResult<BTreeMap<String, BTreeMap<String, String>>> {
    let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return err(format!("line {}: malformed section header", lineno + 1));
            };
            let name = name.trim().to_string();
            if sections.contains_key(&name) {
                return err(format!("line {}: duplicate section [{name}]", lineno + 1));
            }
            sections.insert(name.clone(), BTreeMap::new());
            current = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return err(format!("line {}: expected key = value", lineno + 1));
        };
        let Some(section) = &current else {
            return err(format!("line {}: key outside any section", lineno + 1));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let map = sections.get_mut(section).unwrap();
        if map.insert(key.clone(), value).is_some() {
            return err(format!("line {}: duplicate key {key}", lineno + 1));
        }
    }
    Ok(sections)
}

fn parse_schedule(v: &str) -> ParseResult<Vec<(u64, u32)>> {
    let mut schedule = Vec::new();
    for part in v.split(',') {
        let part = part.trim();
        let Some((step, count)) = part.split_once(':') else {
            return err(format!("spawn_schedule entry {part:?} is not step:count"));
        };
        let step = step
            .trim()
            .parse::<u64>()
            .map_err(|_| ScenarioError(format!("bad step in spawn_schedule entry {part:?}")))?;
        let count = count
            .trim()
            .parse::<u32>()
            .map_err(|_| ScenarioError(format!("bad count in spawn_schedule entry {part:?}")))?;
        schedule.push((step, count));
    }
    Ok(schedule)
}

/// One section's keys, consumed as they are read so leftovers can be
/// rejected.
struct Keys {
    section: &'static str,
    map: BTreeMap<String, String>,
}

impl Keys {
    fn new(section: &'static str, map: &BTreeMap<String, String>) -> Self {
        Keys {
            section,
            map: map.clone(),
        }
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn require_f64(&mut self, key: &str) -> ParseResult<f64> {
        match self.take(key) {
            Some(v) => parse_f64(self.section, key, &v),
            None => err(format!("[{}] is missing required key {key}", self.section)),
        }
    }

    fn f64_or(&mut self, key: &str, default: f64) -> ParseResult<f64> {
        match self.take(key) {
            Some(v) => parse_f64(self.section, key, &v),
            None => Ok(default),
        }
    }

    fn require_u64(&mut self, key: &str) -> ParseResult<u64> {
        match self.take(key) {
            Some(v) => parse_u64(self.section, key, &v),
            None => err(format!("[{}] is missing required key {key}", self.section)),
        }
    }

    fn u64_or(&mut self, key: &str, default: u64) -> ParseResult<u64> {
        match self.take(key) {
            Some(v) => parse_u64(self.section, key, &v),
            None => Ok(default),
        }
    }

    fn finish(self) -> ParseResult<()> {
        if let Some(key) = self.map.keys().next() {
            return err(format!("[{}] has unknown key {key}", self.section));
        }
        Ok(())
    }
}

fn parse_f64(section: &str, key: &str, v: &str) -> ParseResult<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| ScenarioError(format!("[{section}] {key} = {v:?} is not a number")))?;
    if !x.is_finite() {
        return err(format!("[{section}] {key} must be finite"));
    }
    Ok(x)
}

fn parse_u64(section: &str, key: &str, v: &str) -> ParseResult<u64> {
    v.parse()
        .map_err(|_| ScenarioError(format!("[{section}] {key} = {v:?} is not a non-negative integer")))
}
