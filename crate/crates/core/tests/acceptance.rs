//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible with `--nocapture`). Criteria 1 and 8 exercise the command-line
//! binary and live in the CLI crate's acceptance target.
//!
//! Criterion 7 is split: the structural clauses (ownership legality,
//! neighbour-only handoffs, full front continuity, golden byte identity)
//! pass, while the mean-continuity bound is asserted in its own test and
//! fails by construction — the deployment geometry cannot reach it. See the
//! README's "Known limits" note for the arithmetic.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use swarmtrack_core::engine::{
    run, write_events_csv, write_metrics_csv, SensorCount, SimConfig, WorldState,
};
use swarmtrack_core::geometry::{coverage_fraction, Rect, Vec2};
use swarmtrack_core::network::{deploy, SensorRole};
use swarmtrack_core::planner::{
    optimal_plan, sweep_area, sweep_radius, CaseLabel, SensorSpec,
};
use swarmtrack_core::targets::{flock_step, spawn_wave, FlockParams, Target};
use swarmtrack_core::tracking::{EventKind, TrackTable};

fn case1_config() -> SimConfig {
    let field = Rect::new(50.0, 20.0).unwrap();
    let spec = SensorSpec::new(5.0, 7.0, 5).unwrap();
    let mut config = SimConfig::new(field, spec, 20);
    config.seed = 42;
    config.spawn_schedule = vec![(0, 5), (400, 5), (800, 5), (1200, 5)];
    config
}

fn case3_config() -> SimConfig {
    let field = Rect::new(50.0, 20.0).unwrap();
    let spec = SensorSpec::new(2.0, 4.0, 5).unwrap();
    let mut config = SimConfig::new(field, spec, 20);
    config.seed = 6;
    config.spawn_schedule = vec![(0, 5), (400, 5), (800, 5), (1200, 5)];
    config
}

#[test]
fn acceptance_02_area_sweep_converges_to_limit() {
    let spec = SensorSpec::new(2.0, 4.0, 1).unwrap();
    let areas = [10.0, 100.0, 1e3, 1e4, 1e5, 1e6];
    let rows = sweep_area(&spec, &areas).unwrap();
    let limit = (16.0 - 4.0) / (2.0 * 4.0); // 1.5
    for pair in rows.windows(2) {
        assert!(
            pair[1].k >= pair[0].k,
            "k not monotone: {} then {}",
            pair[0].k,
            pair[1].k
        );
    }
    let last = rows.last().unwrap();
    let rel = (last.k - limit).abs() / limit;
    assert!(rel < 0.02, "k at 1e6 is {} ({rel:.4} off the limit)", last.k);
    println!(
        "acceptance 02: PASS - k climbs {:.4} -> {:.6}, within 2% of {limit}",
        rows[0].k, last.k
    );
}

#[test]
fn acceptance_03_radius_sweep_matches_table_block() {
    let specs: Vec<SensorSpec> = (1..=7)
        .map(|r| SensorSpec::new(r as f64, r as f64 + 2.0, 1).unwrap())
        .collect();
    let rows = sweep_radius(1000.0, &specs).unwrap();
    let expected_k = [3.98, 1.47, 0.88, 0.62, 0.45, 0.37, 0.32];
    let expected_case = [
        CaseLabel::Case3,
        CaseLabel::Case3,
        CaseLabel::Case3,
        CaseLabel::Case3,
        CaseLabel::Case1,
        CaseLabel::Case1,
        CaseLabel::Case1,
    ];
    for ((row, want_k), want_case) in rows.iter().zip(expected_k).zip(expected_case) {
        assert!(
            (row.k - want_k).abs() <= 0.005,
            "r={} k={} expected {want_k}",
            row.x,
            row.k
        );
        assert_eq!(row.case, want_case, "r={}", row.x);
    }
    for pair in rows.windows(2) {
        assert!(pair[1].k < pair[0].k, "k must strictly decrease");
    }
    // The case flips exactly where k crosses 0.5, between r=4 and r=5.
    assert!(rows[3].k > 0.5 && rows[4].k <= 0.5);
    println!("acceptance 03: PASS - k strictly decreasing, Case3->Case1 between r=4 and r=5");
}

#[test]
fn acceptance_04_sensor_count_linear_in_area() {
    let spec = SensorSpec::new(2.0, 4.0, 1).unwrap();
    let mut areas = vec![4.0, 10.0, 20.0, 40.0, 50.0, 80.0, 90.0, 160.0, 210.0, 250.0];
    areas.extend([1e3, 1e4, 1e5, 1e6]);
    let rows = sweep_area(&spec, &areas).unwrap();
    let slope = 2.0 / (std::f64::consts::PI * 12.0);
    let mut worst: f64 = 0.0;
    for row in &rows {
        let raw = slope * row.x;
        let diff = (row.n as f64 - raw).abs();
        worst = worst.max(diff);
        assert!(diff <= 2.0, "A={}: n={} raw={raw:.3}", row.x, row.n);
    }
    println!("acceptance 04: PASS - |n - 2A/(pi 12)| <= 2 everywhere (worst {worst:.3})");
}

#[test]
fn acceptance_05_randomized_full_cover_deployments() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let mut checked = 0u32;
    let mut case2 = 0u32;
    while checked < 50 {
        let r = rng.random_range(1.0..6.0);
        let ratio = rng.random_range(1.05..1.4);
        let l = r * rng.random_range(8.0..25.0);
        let b = r * rng.random_range(8.0..25.0);
        let field = Rect::new(l, b).unwrap();
        let spec = SensorSpec::new(r, r * ratio, 5).unwrap();
        let plan = optimal_plan(field, &spec);
        if !matches!(plan.case, CaseLabel::Case1 | CaseLabel::Case2) {
            continue;
        }
        if plan.case == CaseLabel::Case2 {
            case2 += 1;
        }
        let sensors = deploy(&plan).unwrap_or_else(|e| {
            panic!("deploy failed for l={l:.2} b={b:.2} r={r:.2}: {e}")
        });
        assert_eq!(sensors.len() as u32, plan.n);
        let centers: Vec<Vec2> = sensors
            .iter()
            .filter(|s| s.role == SensorRole::FrontCover)
            .map(|s| s.pos)
            .collect();
        let frac = coverage_fraction(&centers, r, field, 7 + checked as u64, 1_000_000).unwrap();
        assert!(
            frac >= 0.99,
            "coverage {frac} for l={l:.2} b={b:.2} r={r:.2} ratio={ratio:.2}"
        );
        checked += 1;
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "coverage checks took {elapsed:?}"
    );
    println!(
        "acceptance 05: PASS - 50 deployments ({case2} Case2) all cover >= 0.99 in {elapsed:?}"
    );
}

#[test]
fn acceptance_06_case1_tracking_theorem() {
    let (summary, world) = run(case1_config()).unwrap();
    assert_eq!(world.sensors.len(), 28);
    assert_eq!(world.plan.case, CaseLabel::Case1);
    for m in &world.metrics {
        if m.in_field > 0 {
            assert_eq!(
                m.coverage_ratio, 1.0,
                "unowned in-field target at step {}",
                m.step
            );
        }
    }
    assert_eq!(summary.exited, 20, "all targets must cross the field");
    for rec in world.tracks.records() {
        if rec.exited {
            assert_eq!(
                rec.continuity(),
                1.0,
                "target {} continuity {}",
                rec.target_id,
                rec.continuity()
            );
        }
    }
    println!(
        "acceptance 06: PASS - coverage 1.0 at all {} steps, {} exits all at continuity 1.0",
        world.metrics.len(),
        summary.exited
    );
}

/// Replays the event log from scratch, enforcing ownership legality at
/// every transition. This is the independent check that no target is ever
/// owned twice, that handoffs only travel between neighbour sensors, and
/// that no sensor exceeds its capacity.
fn replay_events(world: &WorldState) -> (u64, u32) {
    let capacity = world.config.spec.capacity;
    let mut owner: BTreeMap<u64, u32> = BTreeMap::new();
    let mut load: BTreeMap<u32, u32> = BTreeMap::new();
    let mut handoffs = 0u64;
    let mut max_load = 0u32;
    for e in &world.events {
        match e.kind {
            EventKind::Spawn => {
                assert!(!owner.contains_key(&e.target), "spawned target already owned");
            }
            EventKind::Claim => {
                let to = e.to_sensor.expect("claim without sensor");
                assert!(
                    owner.insert(e.target, to).is_none(),
                    "step {}: target {} claimed while owned",
                    e.step,
                    e.target
                );
                let l = load.entry(to).or_insert(0);
                *l += 1;
                assert!(*l <= capacity, "step {}: sensor {to} over capacity", e.step);
                max_load = max_load.max(*l);
            }
            EventKind::Handoff => {
                let from = e.from_sensor.unwrap();
                let to = e.to_sensor.unwrap();
                assert_eq!(
                    owner.get(&e.target),
                    Some(&from),
                    "step {}: handoff from non-owner",
                    e.step
                );
                assert!(
                    world.graph.are_neighbors(from, to),
                    "step {}: handoff {from}->{to} between non-neighbours",
                    e.step
                );
                owner.insert(e.target, to);
                *load.get_mut(&from).unwrap() -= 1;
                let l = load.entry(to).or_insert(0);
                *l += 1;
                assert!(*l <= capacity, "step {}: sensor {to} over capacity", e.step);
                max_load = max_load.max(*l);
                handoffs += 1;
            }
            EventKind::Release => {
                let from = e.from_sensor.unwrap();
                assert_eq!(
                    owner.remove(&e.target),
                    Some(from),
                    "step {}: release from non-owner",
                    e.step
                );
                *load.get_mut(&from).unwrap() -= 1;
            }
            EventKind::Exit => {
                if let Some(s) = owner.remove(&e.target) {
                    *load.get_mut(&s).unwrap() -= 1;
                }
            }
        }
    }
    (handoffs, max_load)
}

#[test]
fn acceptance_07_case3_handoff_suite() {
    let (summary, world) = run(case3_config()).unwrap();
    assert_eq!(world.sensors.len(), 54);
    assert_eq!(world.plan.case, CaseLabel::Case3);

    let (handoffs, max_load) = replay_events(&world);
    assert_eq!(handoffs, summary.total_handoffs);
    assert!(handoffs > 0, "reference run must hand tracks around");

    // Every exited target was owned through its whole front-strip passage.
    assert_eq!(summary.exited, 20);
    assert_eq!(
        summary.min_front_continuity, 1.0,
        "front continuity {}",
        summary.min_front_continuity
    );

    // Byte-identical against the committed golden metrics.
    let mut bytes = Vec::new();
    write_metrics_csv(&world, &mut bytes).unwrap();
    let golden = std::fs::read(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/data/case3_metrics.csv"
    ))
    .unwrap();
    assert_eq!(
        bytes, golden,
        "metrics drifted from the committed golden file"
    );

    println!(
        "acceptance 07: PASS - {handoffs} legal handoffs (peak load {max_load}/{}), front continuity 1.0, golden metrics byte-identical",
        world.config.spec.capacity
    );
}

#[test]
fn acceptance_07_case3_mean_continuity_bound() {
    // As specified this bound is unreachable for this fleet: covering the
    // 16.97-deep front strip takes 48 of the 54 sensors, and the 6 relays
    // left can shadow at most 6 * 2r = 24 of the 33 rear length units, so
    // even a target that threads every relay disk tops out near
    // (16.97 + 24) / 50 = 0.82. The assertion is kept as stated; the run's
    // actual value is recorded in the golden summary.
    let (summary, _world) = run(case3_config()).unwrap();
    assert!(
        summary.mean_continuity >= 0.9,
        "mean continuity {:.6} below the 0.9 bound (geometric ceiling ~0.82)",
        summary.mean_continuity
    );
    println!(
        "acceptance 07 (continuity bound): PASS - mean continuity {:.6}",
        summary.mean_continuity
    );
}

#[test]
fn acceptance_09_determinism_across_worker_counts() {
    let render = |world: &WorldState| {
        let mut m = Vec::new();
        let mut e = Vec::new();
        write_metrics_csv(world, &mut m).unwrap();
        write_events_csv(world, &mut e).unwrap();
        (m, e)
    };

    let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();

    let (m1, e1) = pool1.install(|| render(&run(case3_config()).unwrap().1));
    let (m4, e4) = pool4.install(|| render(&run(case3_config()).unwrap().1));
    assert_eq!(m1, m4, "metrics differ across worker counts");
    assert_eq!(e1, e4, "events differ across worker counts");

    let (m1b, e1b) = render(&run(case3_config()).unwrap().1);
    assert_eq!(m1, m1b);
    assert_eq!(e1, e1b);

    // The Monte Carlo estimator is the one parallel code path; pin it too.
    let field = Rect::new(50.0, 20.0).unwrap();
    let centers = vec![Vec2::new(10.0, 10.0), Vec2::new(30.0, 12.0)];
    let c1 = pool1.install(|| coverage_fraction(&centers, 5.0, field, 99, 1_000_000).unwrap());
    let c4 = pool4.install(|| coverage_fraction(&centers, 5.0, field, 99, 1_000_000).unwrap());
    assert_eq!(c1, c4);

    println!("acceptance 09: PASS - byte-identical streams on 1 and 4 worker threads");
}

#[test]
fn acceptance_10_boids_properties() {
    let params = FlockParams::default();

    // 10,000-step fuzz with fresh waves joining throughout.
    let field = Rect::new(50.0, 20.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xB01D5);
    let mut next_id = 0u64;
    let mut targets: Vec<Target> = Vec::new();
    for step in 0..10_000u64 {
        if step % 500 == 0 {
            targets.extend(spawn_wave(&mut rng, 3, field, &params, &mut next_id));
        }
        targets = flock_step(&targets, &params, field, 0.1);
        for t in targets.iter().filter(|t| t.alive) {
            assert!(
                t.vel.length() <= params.v_max + 1e-9,
                "step {step}: speed {}",
                t.vel.length()
            );
            assert!(
                t.pos.y >= 0.0 && t.pos.y <= field.b,
                "step {step}: y {}",
                t.pos.y
            );
        }
        targets.retain(|t| t.alive);
    }

    // A lone target's x is strictly increasing for 10,000 steps.
    let long_field = Rect::new(1e9, 20.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut next_id = 0u64;
    let mut lone = spawn_wave(&mut rng, 1, long_field, &params, &mut next_id);
    let mut last_x = lone[0].pos.x;
    for _ in 0..10_000 {
        lone = flock_step(&lone, &params, long_field, 0.1);
        assert!(lone[0].pos.x > last_x, "x must strictly increase");
        last_x = lone[0].pos.x;
    }

    // Symmetric ring under pure cohesion: the centroid stays put to 1e-12.
    let ring_params = FlockParams {
        neighbor_radius: 100.0,
        w_alignment: 0.0,
        w_separation: 0.0,
        w_drift: 0.0,
        ..params
    };
    let center = Vec2::new(25.0, 10.0);
    let ring: Vec<Target> = (0..12)
        .map(|i| {
            let a = 2.0 * std::f64::consts::PI * i as f64 / 12.0;
            Target {
                id: i as u64,
                pos: center + Vec2::new(4.0 * a.cos(), 4.0 * a.sin()),
                vel: Vec2::ZERO,
                alive: true,
            }
        })
        .collect();
    let stepped = flock_step(&ring, &ring_params, field, 0.1);
    let centroid = |ts: &[Target]| {
        ts.iter().fold(Vec2::ZERO, |acc, t| acc + t.pos) * (1.0 / ts.len() as f64)
    };
    let drift = centroid(&ring).distance(centroid(&stepped));
    assert!(drift <= 1e-12, "ring centroid drifted {drift}");

    println!("acceptance 10: PASS - speed/containment fuzz, monotone progress, ring fixpoint {drift:.1e}");
}

/// Not numbered in the criteria list, but ties the tracking suite to the
/// track-identity invariant: a record's handoff count equals its event
/// count and target ids never change owner records.
#[test]
fn track_identity_stable_across_handoffs() {
    let (_, world) = run(case3_config()).unwrap();
    let mut per_target: BTreeMap<u64, u64> = BTreeMap::new();
    for e in &world.events {
        if e.kind == EventKind::Handoff {
            *per_target.entry(e.target).or_insert(0) += 1;
        }
    }
    for rec in world.tracks.records() {
        let from_events = per_target.get(&rec.target_id).copied().unwrap_or(0);
        assert_eq!(rec.handoffs.len() as u64, from_events);
        for pair in rec.handoffs.windows(2) {
            assert!(pair[0].step < pair[1].step, "handoff steps must increase");
        }
    }
    let _ = TrackTable::new(3);
}
