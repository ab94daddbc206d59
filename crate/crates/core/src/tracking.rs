//! Zonal strength, the handoff trigger, and per-target track bookkeeping.
//!
//! A sensor's zonal strength toward a target falls linearly from 1 at the
//! sensor position to 0 at the primary-zone boundary. Ownership of a track
//! passes from sensor to sensor ("pass the parcel") when the owner's
//! strength has been strictly falling over the trend window while a
//! neighbour's has been strictly rising and has overtaken it. Ownership is
//! released outright when the owner's strength decays to zero.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{Rect, Vec2};
use crate::network::{observed_targets, NeighborGraph, Sensor};
use crate::targets::Target;

/// Default trend window length, in steps.
pub const DEFAULT_STRENGTH_WINDOW: usize = 3;

/// Linear zonal strength of `sensor` toward `target`: 1 when co-located,
/// 0 at the primary-zone boundary and beyond.
pub fn zonal_strength(sensor: &Sensor, target: &Target) -> f64 {
    strength_at(sensor, target.pos)
}

pub fn strength_at(sensor: &Sensor, pos: Vec2) -> f64 {
    let d = sensor.pos.distance(pos);
    (1.0 - d / sensor.spec.primary_radius).max(0.0)
}

/// Ring of the last `W` strength samples for one sensor-target pair.
#[derive(Debug, Clone, PartialEq)]
pub struct StrengthWindow {
    capacity: usize,
    samples: Vec<f64>,
}

impl StrengthWindow {
    pub fn new(capacity: usize) -> Self {
        StrengthWindow {
            capacity: capacity.max(2),
            samples: Vec::new(),
        }
    }

    /// Builds a window preloaded with `samples` (test and protocol checks).
    pub fn from_samples(capacity: usize, samples: &[f64]) -> Self {
        let mut w = StrengthWindow::new(capacity);
        for &s in samples {
            w.push(s);
        }
        w
    }

    pub fn push(&mut self, strength: f64) {
        debug_assert!((0.0..=1.0).contains(&strength));
        if self.samples.len() == self.capacity {
            self.samples.remove(0);
        }
        self.samples.push(strength);
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn latest(&self) -> Option<f64> {
        self.samples.last().copied()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    fn strictly_decreasing(&self) -> bool {
        self.samples.windows(2).all(|p| p[1] < p[0])
    }

    fn strictly_increasing(&self) -> bool {
        self.samples.windows(2).all(|p| p[1] > p[0])
    }
}

/// The handoff trigger: the current owner's strength must be strictly
/// falling over its window, the candidate's strictly rising, the candidate
/// must have overtaken the owner, and the candidate must have capacity.
///
/// Errors with [`Error::WindowNotReady`] when either window holds fewer
/// than two samples; callers skip the check for that step.
pub fn should_handoff(
    current: &StrengthWindow,
    candidate: &StrengthWindow,
    candidate_has_capacity: bool,
) -> Result<bool> {
    let shortest = current.len().min(candidate.len());
    if shortest < 2 {
        return Err(Error::WindowNotReady(shortest));
    }
    Ok(current.strictly_decreasing()
        && candidate.strictly_increasing()
        && candidate.latest() > current.latest()
        && candidate_has_capacity)
}

/// A handoff entry: at `step`, ownership moved `from` -> `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Handoff {
    pub step: u64,
    pub from: u32,
    pub to: u32,
}

/// Lifecycle log entry for the event stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub step: u64,
    pub kind: EventKind,
    pub target: u64,
    pub from_sensor: Option<u32>,
    pub to_sensor: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Spawn,
    Claim,
    Handoff,
    Release,
    Exit,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Spawn => "SPAWN",
            EventKind::Claim => "CLAIM",
            EventKind::Handoff => "HANDOFF",
            EventKind::Release => "RELEASE",
            EventKind::Exit => "EXIT",
        }
    }
}

/// Per-target bookkeeping across its life in the field.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackRecord {
    pub target_id: u64,
    pub owner: Option<u32>,
    /// The current owner's recent strength samples.
    pub strength_history: Vec<f64>,
    pub handoffs: Vec<Handoff>,
    /// Steps (in field) during which the target had an owner.
    pub observed_steps: u64,
    pub total_in_field_steps: u64,
    /// Same pair of counters restricted to the Case 3 front strip.
    pub front_steps: u64,
    pub front_observed_steps: u64,
    pub exited: bool,
}

impl TrackRecord {
    fn new(target_id: u64) -> Self {
        TrackRecord {
            target_id,
            owner: None,
            strength_history: Vec::new(),
            handoffs: Vec::new(),
            observed_steps: 0,
            total_in_field_steps: 0,
            front_steps: 0,
            front_observed_steps: 0,
            exited: false,
        }
    }

    /// Fraction of in-field steps with an owner; 1.0 for a target that never
    /// entered the field.
    pub fn continuity(&self) -> f64 {
        if self.total_in_field_steps == 0 {
            1.0
        } else {
            self.observed_steps as f64 / self.total_in_field_steps as f64
        }
    }

    pub fn front_continuity(&self) -> f64 {
        if self.front_steps == 0 {
            1.0
        } else {
            self.front_observed_steps as f64 / self.front_steps as f64
        }
    }
}

/// Immutable per-step view the tracker works from.
pub struct StepView<'a> {
    pub step: u64,
    pub sensors: &'a [Sensor],
    pub graph: &'a NeighborGraph,
    pub targets: &'a [Target],
    pub field: Rect,
    /// Depth of the front strip when the deployment has one (Case 3).
    pub front_depth: Option<f64>,
}

/// All track records plus the strength windows backing the trend test.
#[derive(Debug, Clone, Default)]
pub struct TrackTable {
    window_len: usize,
    records: BTreeMap<u64, TrackRecord>,
    windows: BTreeMap<(u64, u32), StrengthWindow>,
}

impl TrackTable {
    pub fn new(window_len: usize) -> Self {
        TrackTable {
            window_len: window_len.max(2),
            records: BTreeMap::new(),
            windows: BTreeMap::new(),
        }
    }

    pub fn records(&self) -> impl Iterator<Item = &TrackRecord> {
        self.records.values()
    }

    pub fn record(&self, target: u64) -> Option<&TrackRecord> {
        self.records.get(&target)
    }

    pub fn owner_of(&self, target: u64) -> Option<u32> {
        self.records.get(&target).and_then(|r| r.owner)
    }

    pub fn total_handoffs(&self) -> u64 {
        self.records.values().map(|r| r.handoffs.len() as u64).sum()
    }

    fn loads(&self) -> BTreeMap<u32, u32> {
        let mut loads = BTreeMap::new();
        for rec in self.records.values() {
            if let Some(owner) = rec.owner {
                *loads.entry(owner).or_insert(0) += 1;
            }
        }
        loads
    }

    /// One tracking phase, run after target motion each step.
    ///
    /// Sub-phases, in order: refresh strength windows, evaluate handoffs for
    /// owned targets, release owners whose strength reached zero (and close
    /// out exited targets), then let the strongest observing sensor with
    /// spare capacity claim each unowned target. Releases run before claims
    /// so a target dropped at a zone boundary is re-claimed in the same step
    /// when another sensor already covers it. All iteration is in ascending
    /// target id, then ascending sensor id.
    pub fn update_tracks(&mut self, view: &StepView<'_>) -> Vec<Event> {
        let mut events = Vec::new();
        let sensors: BTreeMap<u32, &Sensor> = view.sensors.iter().map(|s| (s.id, s)).collect();
        let targets: BTreeMap<u64, &Target> = view.targets.iter().map(|t| (t.id, t)).collect();
        let mut loads = self.loads();

        for t in targets.values().filter(|t| t.alive) {
            self.records
                .entry(t.id)
                .or_insert_with(|| TrackRecord::new(t.id));
        }

        self.refresh_windows(&sensors, &targets);
        self.run_handoffs(view, &sensors, &targets, &mut loads, &mut events);
        self.run_releases(view.step, &targets, &mut loads, &mut events);
        self.run_claims(view, &sensors, &targets, &mut loads, &mut events);
        self.advance_counters(view, &targets);

        events
    }

    fn refresh_windows(
        &mut self,
        sensors: &BTreeMap<u32, &Sensor>,
        targets: &BTreeMap<u64, &Target>,
    ) {
        // Push a sample for every in-zone pair. The owner's window also
        // takes the terminal zero sample so the release rule can see the
        // strength actually reach zero.
        for (&tid, t) in targets.iter() {
            if !t.alive {
                continue;
            }
            let owner = self.records.get(&tid).and_then(|r| r.owner);
            for (&sid, s) in sensors.iter() {
                if !s.observes() {
                    continue;
                }
                let strength = zonal_strength(s, t);
                if strength > 0.0 {
                    self.windows
                        .entry((tid, sid))
                        .or_insert_with(|| StrengthWindow::new(self.window_len))
                        .push(strength);
                } else if owner == Some(sid) {
                    self.windows
                        .entry((tid, sid))
                        .or_insert_with(|| StrengthWindow::new(self.window_len))
                        .push(0.0);
                } else {
                    self.windows.remove(&(tid, sid));
                }
            }
        }
        // Windows of dead targets are no longer needed.
        self.windows
            .retain(|(tid, _), _| targets.get(tid).is_some_and(|t| t.alive));
    }

    fn run_handoffs(
        &mut self,
        view: &StepView<'_>,
        sensors: &BTreeMap<u32, &Sensor>,
        targets: &BTreeMap<u64, &Target>,
        loads: &mut BTreeMap<u32, u32>,
        events: &mut Vec<Event>,
    ) {
        let ids: Vec<u64> = self.records.keys().copied().collect();
        for tid in ids {
            let Some(target) = targets.get(&tid) else {
                continue;
            };
            if !target.alive {
                continue;
            }
            let Some(owner) = self.records[&tid].owner else {
                continue;
            };
            let Some(owner_window) = self.windows.get(&(tid, owner)) else {
                continue;
            };

            let mut best: Option<(f64, u32)> = None;
            for cand in view.graph.neighbors(owner) {
                let Some(sensor) = sensors.get(&cand) else {
                    continue;
                };
                let Some(cand_window) = self.windows.get(&(tid, cand)) else {
                    continue;
                };
                let has_capacity =
                    loads.get(&cand).copied().unwrap_or(0) < sensor.spec.capacity;
                match should_handoff(owner_window, cand_window, has_capacity) {
                    Ok(true) => {
                        let latest = cand_window.latest().unwrap_or(0.0);
                        if best.is_none_or(|(s, _)| latest > s) {
                            best = Some((latest, cand));
                        }
                    }
                    Ok(false) => {}
                    Err(Error::WindowNotReady(_)) => {}
                    Err(_) => unreachable!(),
                }
            }

            if let Some((_, to)) = best {
                *loads.entry(owner).or_insert(1) -= 1;
                *loads.entry(to).or_insert(0) += 1;
                let rec = self.records.get_mut(&tid).unwrap();
                rec.owner = Some(to);
                rec.handoffs.push(Handoff {
                    step: view.step,
                    from: owner,
                    to,
                });
                events.push(Event {
                    step: view.step,
                    kind: EventKind::Handoff,
                    target: tid,
                    from_sensor: Some(owner),
                    to_sensor: Some(to),
                });
            }
        }
    }

    fn run_releases(
        &mut self,
        step: u64,
        targets: &BTreeMap<u64, &Target>,
        loads: &mut BTreeMap<u32, u32>,
        events: &mut Vec<Event>,
    ) {
        for (&tid, rec) in self.records.iter_mut() {
            let alive = targets.get(&tid).is_some_and(|t| t.alive);
            if !alive {
                if !rec.exited {
                    rec.exited = true;
                    if let Some(owner) = rec.owner.take() {
                        *loads.entry(owner).or_insert(1) -= 1;
                    }
                    rec.strength_history.clear();
                    events.push(Event {
                        step,
                        kind: EventKind::Exit,
                        target: tid,
                        from_sensor: None,
                        to_sensor: None,
                    });
                }
                continue;
            }
            if let Some(owner) = rec.owner {
                let gone = self
                    .windows
                    .get(&(tid, owner))
                    .and_then(|w| w.latest())
                    .is_none_or(|s| s <= 0.0);
                if gone {
                    rec.owner = None;
                    rec.strength_history.clear();
                    *loads.entry(owner).or_insert(1) -= 1;
                    self.windows.remove(&(tid, owner));
                    events.push(Event {
                        step,
                        kind: EventKind::Release,
                        target: tid,
                        from_sensor: Some(owner),
                        to_sensor: None,
                    });
                }
            }
        }
    }

    fn run_claims(
        &mut self,
        view: &StepView<'_>,
        sensors: &BTreeMap<u32, &Sensor>,
        targets: &BTreeMap<u64, &Target>,
        loads: &mut BTreeMap<u32, u32>,
        events: &mut Vec<Event>,
    ) {
        // Which sensors currently observe which targets, under the
        // observation capacity cut.
        let mut observers: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for (&sid, s) in sensors.iter() {
            if !s.observes() {
                continue;
            }
            for tid in observed_targets(s, view.targets) {
                observers.entry(tid).or_default().push(sid);
            }
        }

        let ids: Vec<u64> = self.records.keys().copied().collect();
        for tid in ids {
            let Some(target) = targets.get(&tid) else {
                continue;
            };
            if !target.alive || self.records[&tid].owner.is_some() {
                continue;
            }
            let Some(cands) = observers.get(&tid) else {
                continue;
            };
            let mut best: Option<(f64, u32)> = None;
            for &sid in cands {
                let sensor = sensors[&sid];
                if loads.get(&sid).copied().unwrap_or(0) >= sensor.spec.capacity {
                    continue;
                }
                let strength = zonal_strength(sensor, target);
                if strength <= 0.0 {
                    continue;
                }
                if best.is_none_or(|(s, _)| strength > s) {
                    best = Some((strength, sid));
                }
            }
            if let Some((_, sid)) = best {
                *loads.entry(sid).or_insert(0) += 1;
                let rec = self.records.get_mut(&tid).unwrap();
                rec.owner = Some(sid);
                events.push(Event {
                    step: view.step,
                    kind: EventKind::Claim,
                    target: tid,
                    from_sensor: None,
                    to_sensor: Some(sid),
                });
            }
        }
    }

    fn advance_counters(&mut self, view: &StepView<'_>, targets: &BTreeMap<u64, &Target>) {
        for (&tid, rec) in self.records.iter_mut() {
            let Some(target) = targets.get(&tid) else {
                continue;
            };
            if !target.alive || !view.field.contains(target.pos) {
                continue;
            }
            let owned = rec.owner.is_some();
            rec.total_in_field_steps += 1;
            if owned {
                rec.observed_steps += 1;
            }
            if let Some(front) = view.front_depth {
                if target.pos.x <= front {
                    rec.front_steps += 1;
                    if owned {
                        rec.front_observed_steps += 1;
                    }
                }
            }
            // Mirror the owner's window into the record.
            rec.strength_history = rec
                .owner
                .and_then(|owner| self.windows.get(&(tid, owner)))
                .map(|w| w.samples().to_vec())
                .unwrap_or_default();
        }
    }
}
