//! The embedded reference table and its checker.
//!
//! `EXPECTED` holds the published evaluation table verbatim — zone areas to
//! the printed precision, sensor counts, two-decimal K values and case
//! labels. `table` recomputes every row from the planner and diffs the
//! result against the expectation, so the command doubles as a regression
//! oracle: matching output exits 0, any drift exits 1 with a diff.

use swarmtrack_core::geometry::{disk_area, Rect};
use swarmtrack_core::planner::{optimal_plan, SensorSpec};

pub const TABLE_HEADER: &str = "area,r,R,primary_area,secondary_area,n,k,case";

/// One expected row: area, r, R, primary zone area, secondary zone area,
/// n, k, case label.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedRow {
    pub area: f64,
    pub r: f64,
    pub big_r: f64,
    pub primary_area: f64,
    pub secondary_area: f64,
    pub n: u32,
    pub k: f64,
    pub case: String,
}

/// The published table, in row order.
pub fn expected_table() -> Vec<ExpectedRow> {
    const ROWS: [(f64, f64, f64, f64, f64, u32, f64, &str); 17] = [
        (4.0, 2.0, 4.0, 12.566, 50.265, 1, 0.32, "Case1"),
        (10.0, 2.0, 4.0, 12.566, 50.265, 1, 0.8, "Case3"),
        (20.0, 2.0, 4.0, 12.566, 50.265, 2, 0.8, "Case3"),
        (40.0, 2.0, 4.0, 12.566, 50.265, 4, 0.8, "Case3"),
        (50.0, 2.0, 4.0, 12.566, 50.265, 4, 0.99, "Case3"),
        (80.0, 2.0, 4.0, 12.566, 50.265, 6, 1.06, "Case3"),
        (90.0, 2.0, 4.0, 12.566, 50.265, 6, 1.19, "Case3"),
        (160.0, 2.0, 4.0, 12.566, 50.265, 10, 1.27, "Case3"),
        (210.0, 2.0, 4.0, 12.566, 50.265, 12, 1.39, "Case3"),
        (250.0, 2.0, 4.0, 12.566, 50.265, 14, 1.42, "Case3"),
        (1000.0, 1.0, 3.0, 3.142, 28.274, 80, 3.98, "Case3"),
        (1000.0, 2.0, 4.0, 12.566, 50.265, 54, 1.47, "Case3"),
        (1000.0, 3.0, 5.0, 28.274, 78.54, 40, 0.88, "Case3"),
        (1000.0, 4.0, 6.0, 50.265, 113.097, 32, 0.62, "Case3"),
        (1000.0, 5.0, 7.0, 78.54, 153.938, 28, 0.45, "Case1"),
        (1000.0, 6.0, 8.0, 113.097, 201.062, 24, 0.37, "Case1"),
        (1000.0, 7.0, 9.0, 153.938, 254.469, 20, 0.32, "Case1"),
    ];
    ROWS.iter()
        .map(|&(area, r, big_r, pa, sa, n, k, case)| ExpectedRow {
            area,
            r,
            big_r,
            primary_area: pa,
            secondary_area: sa,
            n,
            k,
            case: case.to_string(),
        })
        .collect()
}

/// A computed row in output form.
pub fn plan_row(field: Rect, r: f64, big_r: f64) -> Result<String, String> {
    let spec = SensorSpec::new(r, big_r, 1).map_err(|e| e.to_string())?;
    let plan = optimal_plan(field, &spec);
    let primary = disk_area(r).map_err(|e| e.to_string())?;
    let secondary = disk_area(big_r).map_err(|e| e.to_string())?;
    Ok(format!(
        "{},{},{},{:.3},{:.3},{},{:.2},{}",
        fmt_num(field.area()),
        fmt_num(r),
        fmt_num(big_r),
        primary,
        secondary,
        plan.n,
        plan.k,
        plan.case
    ))
}

/// Recomputes all rows and diffs them against `expected`. Returns the CSV
/// lines (header first) and the list of mismatch descriptions.
pub fn check_table(expected: &[ExpectedRow]) -> (Vec<String>, Vec<String>) {
    let mut lines = vec![TABLE_HEADER.to_string()];
    let mut mismatches = Vec::new();
    for row in expected {
        let side = row.area.sqrt();
        let field = Rect::new(side, side).expect("expected-table area must be positive");
        let spec = SensorSpec::new(row.r, row.big_r, 1).expect("expected-table radii must nest");
        let plan = optimal_plan(field, &spec);
        let primary = disk_area(row.r).unwrap();
        let secondary = disk_area(row.big_r).unwrap();
        lines.push(format!(
            "{},{},{},{:.3},{:.3},{},{:.2},{}",
            fmt_num(row.area),
            fmt_num(row.r),
            fmt_num(row.big_r),
            primary,
            secondary,
            plan.n,
            plan.k,
            plan.case
        ));

        let ctx = format!("row area={} r={}", fmt_num(row.area), fmt_num(row.r));
        if plan.n != row.n {
            mismatches.push(format!("{ctx}: n = {} expected {}", plan.n, row.n));
        }
        if (plan.k - row.k).abs() > 0.005 {
            mismatches.push(format!("{ctx}: k = {:.4} expected {} (+-0.005)", plan.k, row.k));
        }
        if (primary - row.primary_area).abs() > 0.001 {
            mismatches.push(format!(
                "{ctx}: primary area = {primary:.4} expected {} (+-0.001)",
                row.primary_area
            ));
        }
        if (secondary - row.secondary_area).abs() > 0.001 {
            mismatches.push(format!(
                "{ctx}: secondary area = {secondary:.4} expected {} (+-0.001)",
                row.secondary_area
            ));
        }
        if plan.case.to_string() != row.case {
            mismatches.push(format!("{ctx}: case = {} expected {}", plan.case, row.case));
        }
    }
    (lines, mismatches)
}

/// Parses an alternative expectation table (same CSV schema, header
/// optional).
pub fn parse_expected_csv(text: &str) -> Result<Vec<ExpectedRow>, String> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line == TABLE_HEADER {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(format!("line {}: expected 8 columns", lineno + 1));
        }
        let num = |i: usize| -> Result<f64, String> {
            fields[i]
                .trim()
                .parse()
                .map_err(|_| format!("line {}: bad number {:?}", lineno + 1, fields[i]))
        };
        rows.push(ExpectedRow {
            area: num(0)?,
            r: num(1)?,
            big_r: num(2)?,
            primary_area: num(3)?,
            secondary_area: num(4)?,
            n: num(5)? as u32,
            k: num(6)?,
            case: fields[7].trim().to_string(),
        });
    }
    if rows.is_empty() {
        return Err("expectation table holds no rows".into());
    }
    Ok(rows)
}

/// Integers print bare, everything else with Rust's shortest-roundtrip
/// float formatting.
pub fn fmt_num(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}
