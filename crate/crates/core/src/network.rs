//! Sensor fleet construction: deployment layouts per case and the
//! secondary-zone neighbour graph.
//!
//! Case 1 and Case 2 lay the covering lattice over the whole field and park
//! any leftover sensors at the exit edge. Case 3 covers the front strip
//! `[0, l/(2k)]` with the lattice and spreads the remaining sensors as relay
//! nodes over the rear on a uniform grid chosen so that grid neighbours stay
//! within secondary range of each other.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::geometry::{cover_rectangle, Rect, Vec2};
use crate::planner::{CaseLabel, Plan, SensorSpec};
use crate::targets::Target;

/// What a deployed sensor is doing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensorRole {
    /// Part of a covering lattice (whole field in Case 1/2, front strip in
    /// Case 3).
    FrontCover,
    /// Stationary relay in the Case 3 rear region.
    RearRelay,
    /// Parked surplus sensor; never observes.
    Resting,
}

impl std::fmt::Display for SensorRole {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SensorRole::FrontCover => "front",
            SensorRole::RearRelay => "relay",
            SensorRole::Resting => "resting",
        };
        f.write_str(s)
    }
}

/// A deployed sensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensor {
    pub id: u32,
    pub pos: Vec2,
    pub spec: SensorSpec,
    pub role: SensorRole,
    pub secondary_active: bool,
}

impl Sensor {
    pub fn observes(&self) -> bool {
        self.role != SensorRole::Resting
    }
}

/// Secondary-zone adjacency: sensors `i` and `j` are neighbours when their
/// secondary zones overlap, i.e. `distance <= 2R`. Holds only observing
/// (non-resting) sensors; symmetric, no self edges.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NeighborGraph {
    adjacency: BTreeMap<u32, BTreeSet<u32>>,
}

impl NeighborGraph {
    pub fn neighbors(&self, id: u32) -> impl Iterator<Item = u32> + '_ {
        self.adjacency.get(&id).into_iter().flatten().copied()
    }

    pub fn are_neighbors(&self, a: u32, b: u32) -> bool {
        self.adjacency.get(&a).is_some_and(|set| set.contains(&b))
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    /// True when every node in `ids` is reachable from the first one.
    /// Vacuously true for empty or singleton sets.
    pub fn is_connected_over(&self, ids: &[u32]) -> bool {
        let Some(&start) = ids.first() else {
            return true;
        };
        let members: BTreeSet<u32> = ids.iter().copied().collect();
        let mut seen = BTreeSet::new();
        let mut stack = vec![start];
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                continue;
            }
            for nb in self.neighbors(id) {
                if members.contains(&nb) && !seen.contains(&nb) {
                    stack.push(nb);
                }
            }
        }
        seen.len() == members.len()
    }
}

/// Builds the secondary-overlap graph over all observing sensors.
pub fn neighbor_graph(sensors: &[Sensor]) -> NeighborGraph {
    let mut adjacency: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    let observing: Vec<&Sensor> = sensors.iter().filter(|s| s.observes()).collect();
    for s in &observing {
        adjacency.entry(s.id).or_default();
    }
    for (i, a) in observing.iter().enumerate() {
        for b in observing.iter().skip(i + 1) {
            let reach = 2.0 * a.spec.secondary_radius.min(b.spec.secondary_radius);
            if a.pos.distance(b.pos) <= reach {
                adjacency.get_mut(&a.id).unwrap().insert(b.id);
                adjacency.get_mut(&b.id).unwrap().insert(a.id);
            }
        }
    }
    NeighborGraph { adjacency }
}

/// Lays out the fleet for `plan`. The output always holds exactly `plan.n`
/// sensors with ids `0..n`, front lattice first, then relays, then resting.
///
/// Errors when the plan is Case 4, or when the covering lattice alone would
/// exceed the fleet (no sensor left to relay in Case 3, or a lattice larger
/// than the fleet in Case 1/2) — both mean the fleet cannot actually track
/// the field and the plan is reclassified Case 4.
pub fn deploy(plan: &Plan) -> Result<Vec<Sensor>> {
    match plan.case {
        CaseLabel::Case1 | CaseLabel::Case2 => deploy_full_cover(plan),
        CaseLabel::Case3 => deploy_front_and_relays(plan),
        CaseLabel::Case4 => Err(Error::Infeasible(format!(
            "fleet of {} cannot track a field of area {:.3} (K = {:.3})",
            plan.n,
            plan.field.area(),
            plan.k
        ))),
    }
}

fn deploy_full_cover(plan: &Plan) -> Result<Vec<Sensor>> {
    let centers = cover_rectangle(plan.field, plan.spec.primary_radius)?;
    if centers.len() as u32 > plan.n {
        return Err(Error::Infeasible(format!(
            "covering the field needs {} sensors but the plan holds {}",
            centers.len(),
            plan.n
        )));
    }
    let mut sensors: Vec<Sensor> = centers
        .iter()
        .enumerate()
        .map(|(i, &pos)| Sensor {
            id: i as u32,
            pos,
            spec: plan.spec,
            role: SensorRole::FrontCover,
            secondary_active: false,
        })
        .collect();
    append_resting(&mut sensors, plan, plan.n - centers.len() as u32);
    Ok(sensors)
}

fn deploy_front_and_relays(plan: &Plan) -> Result<Vec<Sensor>> {
    let front_depth = plan
        .front_depth
        .ok_or_else(|| Error::InvalidParameter("Case 3 plan without front depth".into()))?;
    let front = Rect::new(front_depth, plan.field.b)?;

    // A fleet of one cannot split into cover and relays; it degenerates to
    // a single sensor centered in the front strip.
    if plan.n == 1 {
        return Ok(vec![Sensor {
            id: 0,
            pos: Vec2::new(front.l / 2.0, front.b / 2.0),
            spec: plan.spec,
            role: SensorRole::FrontCover,
            secondary_active: true,
        }]);
    }

    let centers = cover_rectangle(front, plan.spec.primary_radius)?;
    if centers.len() as u32 >= plan.n {
        return Err(Error::Infeasible(format!(
            "covering the front strip needs {} sensors, leaving no relay out of {}",
            centers.len(),
            plan.n
        )));
    }
    let relay_count = plan.n - centers.len() as u32;
    let rear = RearRegion {
        x0: front_depth,
        x1: plan.field.l,
        b: plan.field.b,
    };
    let relay_positions = rear.grid(relay_count, 2.0 * plan.spec.secondary_radius)?;

    let mut sensors: Vec<Sensor> = centers
        .iter()
        .enumerate()
        .map(|(i, &pos)| Sensor {
            id: i as u32,
            pos,
            spec: plan.spec,
            role: SensorRole::FrontCover,
            secondary_active: true,
        })
        .collect();
    for pos in relay_positions {
        sensors.push(Sensor {
            id: sensors.len() as u32,
            pos,
            spec: plan.spec,
            role: SensorRole::RearRelay,
            secondary_active: true,
        });
    }
    Ok(sensors)
}

fn append_resting(sensors: &mut Vec<Sensor>, plan: &Plan, count: u32) {
    // Parked along the exit edge, evenly spaced.
    for j in 0..count {
        let y = plan.field.b * (j as f64 + 0.5) / count as f64;
        sensors.push(Sensor {
            id: sensors.len() as u32,
            pos: Vec2::new(plan.field.l, y),
            spec: plan.spec,
            role: SensorRole::Resting,
            secondary_active: false,
        });
    }
}

struct RearRegion {
    x0: f64,
    x1: f64,
    b: f64,
}

impl RearRegion {
    /// Spreads `m` relays over the region on a uniform grid.
    ///
    /// Grids are enumerated by row count; a grid is viable when each cell
    /// center stays within `reach` of its grid neighbours (column pitch and
    /// row pitch both within reach), which makes the relay subgraph
    /// connected. Among viable grids the most nearly square cell wins; if no
    /// grid is viable the relays cannot maintain secondary-zone contact and
    /// the deployment is infeasible.
    fn grid(&self, m: u32, reach: f64) -> Result<Vec<Vec2>> {
        let len = self.x1 - self.x0;
        let mut best: Option<(f64, u32, u32)> = None;
        for rows in 1..=m {
            let cols = m.div_ceil(rows);
            let pitch_x = len / cols as f64;
            let pitch_y = self.b / rows as f64;
            let connected = (cols == 1 || pitch_x <= reach) && (rows == 1 || pitch_y <= reach);
            if !connected {
                continue;
            }
            let squareness = (pitch_x / pitch_y).ln().abs();
            if best.is_none_or(|(s, _, _)| squareness < s) {
                best = Some((squareness, rows, cols));
            }
        }
        let Some((_, rows, cols)) = best else {
            return Err(Error::Infeasible(format!(
                "no relay grid for {m} sensors keeps secondary zones overlapping"
            )));
        };
        let pitch_x = len / cols as f64;
        let pitch_y = self.b / rows as f64;
        // Fill column by column so a partial last column still touches its
        // complete neighbour column.
        let mut out = Vec::with_capacity(m as usize);
        'fill: for c in 0..cols {
            for r in 0..rows {
                if out.len() as u32 == m {
                    break 'fill;
                }
                out.push(Vec2::new(
                    self.x0 + (c as f64 + 0.5) * pitch_x,
                    (r as f64 + 0.5) * pitch_y,
                ));
            }
        }
        Ok(out)
    }
}

/// Ids of alive targets inside the sensor's primary zone, nearest first
/// (ties broken by lower id), truncated to the sensor's capacity.
pub fn observed_targets(sensor: &Sensor, targets: &[Target]) -> Vec<u64> {
    debug_assert!(sensor.observes());
    let r = sensor.spec.primary_radius;
    let mut in_zone: Vec<(f64, u64)> = targets
        .iter()
        .filter(|t| t.alive && sensor.pos.distance(t.pos) <= r)
        .map(|t| (sensor.pos.distance(t.pos), t.id))
        .collect();
    in_zone.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    in_zone.truncate(sensor.spec.capacity as usize);
    in_zone.into_iter().map(|(_, id)| id).collect()
}
