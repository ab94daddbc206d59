//! Command-line front end: planning, table verification, sweeps and
//! simulation runs.
//!
//! Exit codes are a stable contract: 0 success, 1 table mismatch, 2 bad
//! usage or config, 3 infeasible plan (Case 4), 4 output I/O failure.

mod scenario;
mod svg;
mod table;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use swarmtrack_core::engine::{run, summary_line, write_events_csv, write_metrics_csv};
use swarmtrack_core::planner::{sweep_area, sweep_radius, SensorSpec, SweepRow};
use swarmtrack_core::Error as CoreError;

use table::fmt_num;

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_IO: u8 = 4;

/// Seed override honoured between the --seed flag and the scenario file.
const SEED_ENV: &str = "SWARMTRACK_SEED";

#[derive(Parser)]
#[command(
    name = "swarmtrack",
    version,
    about = "Coverage planner and tracking simulator for dual-zone sensor swarms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Size and classify a fleet for one field; prints a single CSV row
    Plan(PlanArgs),
    /// Print the reference evaluation table and verify it row by row
    Table(TableArgs),
    /// Sweep K and n across field areas or primary radii
    Sweep(SweepArgs),
    /// Run a scenario file; writes metrics.csv and events.csv
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct PlanArgs {
    /// Field area; the field is taken as a square
    #[arg(long, conflicts_with_all = ["length", "breadth"])]
    area: Option<f64>,
    /// Field length (travel axis); requires --breadth
    #[arg(long, requires = "breadth")]
    length: Option<f64>,
    /// Field breadth; requires --length
    #[arg(long, requires = "length")]
    breadth: Option<f64>,
    /// Primary zone radius
    #[arg(long = "r")]
    r: f64,
    /// Secondary zone radius
    #[arg(long = "R")]
    big_r: f64,
}

#[derive(Args)]
struct TableArgs {
    /// Verify against an alternative expectation CSV instead of the
    /// embedded table
    #[arg(long, hide = true)]
    expected: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SweepMode {
    Area,
    Radius,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum PlotColumn {
    K,
    N,
}

#[derive(Args)]
struct SweepArgs {
    /// What to sweep
    #[arg(value_enum)]
    mode: SweepMode,
    /// Primary radius (area mode)
    #[arg(long = "r")]
    r: Option<f64>,
    /// Secondary radius (area mode)
    #[arg(long = "R")]
    big_r: Option<f64>,
    /// Field area (radius mode)
    #[arg(long)]
    area: Option<f64>,
    /// Secondary radius excess over primary, R = r + ring (radius mode)
    #[arg(long, default_value_t = 2.0)]
    ring: f64,
    /// Explicit sweep values, comma separated
    #[arg(long, value_delimiter = ',')]
    values: Vec<f64>,
    /// Range start (with --to/--points; geometric spacing for areas,
    /// linear for radii)
    #[arg(long)]
    from: Option<f64>,
    /// Range end
    #[arg(long)]
    to: Option<f64>,
    /// Number of range points
    #[arg(long)]
    points: Option<usize>,
    /// Write the CSV here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render a line chart of the swept column
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Which column the chart plots
    #[arg(long, value_enum, default_value_t = PlotColumn::K)]
    plot: PlotColumn,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario file
    #[arg(long)]
    config: PathBuf,
    /// Output directory for metrics.csv and events.csv
    #[arg(long)]
    out: PathBuf,
    /// Seed override (beats the SWARMTRACK_SEED variable and the file)
    #[arg(long)]
    seed: Option<u64>,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(context: &str, e: std::io::Error) -> Self {
        CliError {
            code: EXIT_IO,
            message: format!("{context}: {e}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::Infeasible(_) => EXIT_INFEASIBLE,
            _ => EXIT_USAGE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Plan(args) => cmd_plan(args),
        Command::Table(args) => cmd_table(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Simulate(args) => cmd_simulate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn cmd_plan(args: PlanArgs) -> Result<(), CliError> {
    let field = match (args.area, args.length, args.breadth) {
        (Some(a), None, None) => {
            swarmtrack_core::geometry::Rect::new(a.sqrt(), a.sqrt()).map_err(CliError::from)?
        }
        (None, Some(l), Some(b)) => {
            swarmtrack_core::geometry::Rect::new(l, b).map_err(CliError::from)?
        }
        _ => {
            return Err(CliError::usage(
                "specify either --area or both --length and --breadth",
            ))
        }
    };
    println!(
        "{}",
        table::plan_row(field, args.r, args.big_r).map_err(CliError::usage)?
    );
    Ok(())
}

fn cmd_table(args: TableArgs) -> Result<(), CliError> {
    let expected = match &args.expected {
        None => table::expected_table(),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            table::parse_expected_csv(&text).map_err(CliError::usage)?
        }
    };
    let (lines, mismatches) = table::check_table(&expected);
    for line in &lines {
        println!("{line}");
    }
    if mismatches.is_empty() {
        Ok(())
    } else {
        for m in &mismatches {
            eprintln!("mismatch: {m}");
        }
        Err(CliError {
            code: EXIT_MISMATCH,
            message: format!("{} row(s) diverge from the expected table", mismatches.len()),
        })
    }
}

fn sweep_values(args: &SweepArgs) -> Result<Vec<f64>, CliError> {
    if !args.values.is_empty() {
        return Ok(args.values.clone());
    }
    match (args.from, args.to, args.points) {
        (Some(from), Some(to), Some(points)) => {
            if points < 2 || !(from > 0.0) || !(to > from) {
                return Err(CliError::usage(
                    "range needs 0 < from < to and at least 2 points",
                ));
            }
            let values = (0..points)
                .map(|i| {
                    let t = i as f64 / (points - 1) as f64;
                    match args.mode {
                        // Areas span orders of magnitude; sample them
                        // geometrically.
                        SweepMode::Area => from * (to / from).powf(t),
                        SweepMode::Radius => from + (to - from) * t,
                    }
                })
                .collect();
            Ok(values)
        }
        _ => Err(CliError::usage(
            "empty sweep: pass --values or all of --from/--to/--points",
        )),
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let values = sweep_values(&args)?;
    let rows: Vec<SweepRow> = match args.mode {
        SweepMode::Area => {
            let (Some(r), Some(big_r)) = (args.r, args.big_r) else {
                return Err(CliError::usage("area sweep needs --r and --R"));
            };
            let spec = SensorSpec::new(r, big_r, 1)?;
            sweep_area(&spec, &values)?
        }
        SweepMode::Radius => {
            let Some(area) = args.area else {
                return Err(CliError::usage("radius sweep needs --area"));
            };
            if !(args.ring > 0.0) {
                return Err(CliError::usage("--ring must be positive"));
            }
            let specs: Vec<SensorSpec> = values
                .iter()
                .map(|&r| SensorSpec::new(r, r + args.ring, 1))
                .collect::<Result<_, _>>()?;
            sweep_radius(area, &specs)?
        }
    };

    let mut csv = String::from("x,n,k,case\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{:.6},{}\n",
            fmt_num(row.x),
            row.n,
            row.k,
            row.case
        ));
    }
    match &args.out {
        Some(path) => fs::write(path, &csv)
            .map_err(|e| CliError::io(&format!("writing {}", path.display()), e))?,
        None => print!("{csv}"),
    }

    if let Some(path) = &args.svg {
        let (points, y_label): (Vec<(f64, f64)>, &str) = match args.plot {
            PlotColumn::K => (rows.iter().map(|r| (r.x, r.k)).collect(), "k"),
            PlotColumn::N => (rows.iter().map(|r| (r.x, r.n as f64)).collect(), "n"),
        };
        let x_label = match args.mode {
            SweepMode::Area => "area",
            SweepMode::Radius => "primary radius",
        };
        let title = format!("{y_label} vs {x_label}");
        let chart = svg::line_chart(&points, &title, x_label, y_label);
        fs::write(path, chart)
            .map_err(|e| CliError::io(&format!("writing {}", path.display()), e))?;
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.config).map_err(|e| {
        CliError::usage(format!("cannot read {}: {e}", args.config.display()))
    })?;
    let mut config = scenario::parse_scenario(&text).map_err(|e| CliError::usage(e.to_string()))?;

    // Seed precedence: flag > environment > file.
    if let Some(seed) = args.seed {
        config.seed = seed;
    } else if let Ok(env_seed) = std::env::var(SEED_ENV) {
        config.seed = env_seed
            .parse()
            .map_err(|_| CliError::usage(format!("{SEED_ENV} must be a 64-bit integer")))?;
    }

    // Run first: an infeasible plan must not leave output files behind.
    let (summary, world) = run(config)?;

    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::io(&format!("creating {}", args.out.display()), e))?;
    write_file(&args.out.join("metrics.csv"), |w| write_metrics_csv(&world, w))?;
    write_file(&args.out.join("events.csv"), |w| write_events_csv(&world, w))?;

    println!("{}", summary_line(&summary));
    Ok(())
}

fn write_file(
    path: &Path,
    writer: impl FnOnce(&mut std::io::BufWriter<fs::File>) -> std::io::Result<()>,
) -> Result<(), CliError> {
    let context = format!("writing {}", path.display());
    let file = fs::File::create(path).map_err(|e| CliError::io(&context, e))?;
    let mut buf = std::io::BufWriter::new(file);
    writer(&mut buf).map_err(|e| CliError::io(&context, e))?;
    use std::io::Write;
    buf.flush().map_err(|e| CliError::io(&context, e))
}
