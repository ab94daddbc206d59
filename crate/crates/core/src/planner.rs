//! Fleet sizing and case classification.
//!
//! Given a field and a dual-zone sensor spec, the planner computes how many
//! sensors the fleet needs, the dimensionless K value (field area over
//! aggregate primary-zone area), and which of the four deployment cases
//! applies:
//!
//! * Case 1 — the fleet covers the whole field; track with handoffs.
//! * Case 2 — a surplus fleet; part of it can rest while Case 1 runs.
//! * Case 3 — the fleet covers only a front strip at the entry edge; the
//!   rest of the field is spanned by relay sensors that pass tracks along.
//! * Case 4 — too few sensors to connect the relays; tracking is refused.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{cover_rectangle, Rect};

/// K at or below this bound means half the fleet could rest and coverage
/// would still hold, i.e. Case 2.
const SURPLUS_K: f64 = 0.25;

/// K at or below this bound means the fleet can cover the whole field
/// (Case 1); above it the fleet must split front cover from relays.
const FULL_COVER_K: f64 = 0.5;

/// A dual-zone sensor model: targets are sensed inside the primary disk of
/// radius `r`; other sensors are sensed out to the secondary radius `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorSpec {
    pub primary_radius: f64,
    pub secondary_radius: f64,
    /// Maximum number of targets one sensor can track at once.
    pub capacity: u32,
}

impl SensorSpec {
    pub fn new(primary_radius: f64, secondary_radius: f64, capacity: u32) -> Result<Self> {
        if !(primary_radius > 0.0) || !primary_radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "primary radius must be positive, got {primary_radius}"
            )));
        }
        if !(secondary_radius > primary_radius) || !secondary_radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "secondary radius must exceed primary radius, got r={primary_radius}, R={secondary_radius}"
            )));
        }
        if capacity < 1 {
            return Err(Error::InvalidParameter("capacity must be >= 1".into()));
        }
        Ok(SensorSpec {
            primary_radius,
            secondary_radius,
            capacity,
        })
    }
}

/// The four-way fleet sufficiency taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    Case1,
    Case2,
    Case3,
    Case4,
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CaseLabel::Case1 => "Case1",
            CaseLabel::Case2 => "Case2",
            CaseLabel::Case3 => "Case3",
            CaseLabel::Case4 => "Case4",
        };
        f.write_str(s)
    }
}

/// A sized and classified deployment plan.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub field: Rect,
    pub spec: SensorSpec,
    /// Fleet size.
    pub n: u32,
    /// K value: `field.area / (n * pi * r^2)`.
    pub k: f64,
    pub case: CaseLabel,
    /// Depth of the fully covered front strip, `l / (2k)`. Case 3 only.
    pub front_depth: Option<f64>,
    /// Sensors beyond the minimal covering lattice. Case 2 only, else 0.
    pub surplus: u32,
}

/// Fleet size for a field area: `ceil(2A / (pi (R^2 - r^2)))`, rounded up to
/// the next even integer when the ceiling exceeds 1 and is odd.
///
/// The even rounding exists because Case 3 splits the fleet into two equal
/// halves; a lone sensor (the smallest fields) stays at 1.
pub fn required_sensor_count(field: Rect, spec: &SensorSpec) -> u32 {
    let r = spec.primary_radius;
    let big_r = spec.secondary_radius;
    let raw = 2.0 * field.area() / (PI * (big_r * big_r - r * r));
    let mut n = raw.ceil().max(1.0) as u32;
    if n > 1 && n % 2 == 1 {
        n += 1;
    }
    n
}

/// K value: field area over the fleet's aggregate primary-zone area.
pub fn k_value(area: f64, n: u32, r: f64) -> f64 {
    debug_assert!(n >= 1 && r > 0.0 && area > 0.0);
    area / (n as f64 * PI * r * r)
}

/// Classifies a fleet of `n` sensors for `field`.
///
/// Thresholds on K: at or below 0.25 the fleet is surplus (Case 2); at or
/// below 0.5 it can cover the whole field (Case 1). Above 0.5 the fleet
/// splits into front cover plus rear relays (Case 3) provided the relays
/// can stay mutually connected: with rear area `A(2K-1)/(2K)` spread over
/// `max(1, floor(n/2))` relays on a uniform grid, the grid pitch
/// `sqrt(A_rear/m)` must not exceed `2R` (secondary zones of grid
/// neighbours overlap). Otherwise the relays cannot talk and the plan is
/// Case 4.
pub fn classify(field: Rect, spec: &SensorSpec, n: u32) -> CaseLabel {
    let k = k_value(field.area(), n, spec.primary_radius);
    if k <= SURPLUS_K {
        return CaseLabel::Case2;
    }
    if k <= FULL_COVER_K {
        return CaseLabel::Case1;
    }
    let rear_area = field.area() * (2.0 * k - 1.0) / (2.0 * k);
    let relays = (n / 2).max(1) as f64;
    let pitch = (rear_area / relays).sqrt();
    if pitch <= 2.0 * spec.secondary_radius {
        CaseLabel::Case3
    } else {
        CaseLabel::Case4
    }
}

/// Sizes and classifies a fleet for `field`, using the required sensor
/// count. See [`plan_with_count`] for a caller-chosen fleet size.
pub fn optimal_plan(field: Rect, spec: &SensorSpec) -> Plan {
    plan_with_count(field, spec, required_sensor_count(field, spec))
}

/// Builds the plan for an explicit fleet size.
pub fn plan_with_count(field: Rect, spec: &SensorSpec, n: u32) -> Plan {
    let k = k_value(field.area(), n, spec.primary_radius);
    let case = classify(field, spec, n);
    let front_depth = match case {
        CaseLabel::Case3 => Some(field.l / (2.0 * k)),
        _ => None,
    };
    let surplus = match case {
        CaseLabel::Case2 => {
            let covering = cover_rectangle(field, spec.primary_radius)
                .map(|c| c.len() as u32)
                .unwrap_or(0);
            n.saturating_sub(covering)
        }
        _ => 0,
    };
    Plan {
        field,
        spec: *spec,
        n,
        k,
        case,
        front_depth,
        surplus,
    }
}

/// One row of an area or radius sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// The swept quantity: area for [`sweep_area`], primary radius for
    /// [`sweep_radius`].
    pub x: f64,
    pub n: u32,
    pub k: f64,
    pub case: CaseLabel,
}

/// Plans a square field of each given area with a fixed spec, one row per
/// area, in input order.
pub fn sweep_area(spec: &SensorSpec, areas: &[f64]) -> Result<Vec<SweepRow>> {
    if areas.is_empty() {
        return Err(Error::InvalidParameter("empty area sweep".into()));
    }
    areas
        .iter()
        .map(|&a| {
            let side = a.sqrt();
            let field = Rect::new(side, side)?;
            let plan = optimal_plan(field, spec);
            Ok(SweepRow {
                x: a,
                n: plan.n,
                k: plan.k,
                case: plan.case,
            })
        })
        .collect()
}

/// Plans a fixed square area for each given spec, one row per spec, keyed by
/// primary radius.
pub fn sweep_radius(area: f64, specs: &[SensorSpec]) -> Result<Vec<SweepRow>> {
    if specs.is_empty() {
        return Err(Error::InvalidParameter("empty radius sweep".into()));
    }
    let side = area.sqrt();
    let field = Rect::new(side, side)?;
    specs
        .iter()
        .map(|spec| {
            let plan = optimal_plan(field, spec);
            Ok(SweepRow {
                x: spec.primary_radius,
                n: plan.n,
                k: plan.k,
                case: plan.case,
            })
        })
        .collect()
}

/// The seventeen-row reference table: `(area, r, R, n, k, case)`.
///
/// `n` is exact; `k` is the two-decimal published value. Row order matters
/// and is preserved everywhere the table is rendered.
pub const REFERENCE_TABLE: [(f64, f64, f64, u32, f64, CaseLabel); 17] = [
    (4.0, 2.0, 4.0, 1, 0.32, CaseLabel::Case1),
    (10.0, 2.0, 4.0, 1, 0.8, CaseLabel::Case3),
    (20.0, 2.0, 4.0, 2, 0.8, CaseLabel::Case3),
    (40.0, 2.0, 4.0, 4, 0.8, CaseLabel::Case3),
    (50.0, 2.0, 4.0, 4, 0.99, CaseLabel::Case3),
    (80.0, 2.0, 4.0, 6, 1.06, CaseLabel::Case3),
    (90.0, 2.0, 4.0, 6, 1.19, CaseLabel::Case3),
    (160.0, 2.0, 4.0, 10, 1.27, CaseLabel::Case3),
    (210.0, 2.0, 4.0, 12, 1.39, CaseLabel::Case3),
    (250.0, 2.0, 4.0, 14, 1.42, CaseLabel::Case3),
    (1000.0, 1.0, 3.0, 80, 3.98, CaseLabel::Case3),
    (1000.0, 2.0, 4.0, 54, 1.47, CaseLabel::Case3),
    (1000.0, 3.0, 5.0, 40, 0.88, CaseLabel::Case3),
    (1000.0, 4.0, 6.0, 32, 0.62, CaseLabel::Case3),
    (1000.0, 5.0, 7.0, 28, 0.45, CaseLabel::Case1),
    (1000.0, 6.0, 8.0, 24, 0.37, CaseLabel::Case1),
    (1000.0, 7.0, 9.0, 20, 0.32, CaseLabel::Case1),
];
