//! Command-line driver for the data-gravity toolkit.
//!
//! One subcommand per operation: `gd` for the movement/compute ratio,
//! `advantage` and `sweep` for the colocation advantage factor,
//! `field` for sampling the gravity field over a grid, `place` for
//! kernel placement, `catalog` for the published measurement records,
//! and `balance` for the balanced separation distance.
//!
//! Energies cross this boundary in picojoules and distances in meters.
//! Exit codes: 0 success, 1 domain or I/O error, 2 usage error, 3
//! catalog claim-check failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use datagravity::advantage::{
    sweep, AdvantageInputs, SweepRange, SweepScale, SweepSpec,
};
use datagravity::catalog::{check_claims, builtin_measurements, Band, ClaimStatus};
use datagravity::energy::{disjunction_constant, TechProfile, PICOJOULE};
use datagravity::gravity::{sample_grid, FieldParams};
use datagravity::placement::{
    optimize_continuous, optimize_discrete, PlacementConfig, PlacementSolution, PlacementStatus,
};
use datagravity::scenario::Scenario;
use datagravity::{AxisBox, Vec3};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn domain(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<datagravity::Error> for Failure {
    fn from(err: datagravity::Error) -> Self {
        Failure::domain(err.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure::domain(err.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "datagravity",
    version,
    about = "Energy economics of separating computation from data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Movement/compute energy ratio for one access and one operation
    Gd(GdArgs),
    /// Colocation advantage factor and its lower bound at one point
    Advantage(AdvantageArgs),
    /// Advantage factor over a parameter grid, as plot-ready rows
    Sweep(SweepArgs),
    /// Sample the data-gravity field over a grid in a scenario
    Field(FieldArgs),
    /// Place the kernels of a scenario, continuously or into slots
    Place(PlaceArgs),
    /// Published measurement records and the claims derived from them
    Catalog(CatalogArgs),
    /// Distance at which one access costs as much as one operation
    Balance(BalanceArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum OutputFormat {
    Human,
    Csv,
    Json,
}

impl OutputFormat {
    fn name(self) -> &'static str {
        match self {
            OutputFormat::Human => "human",
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Args, Debug)]
struct IoArgs {
    /// Seed for any randomized stage; a fixed seed makes output byte-identical
    #[arg(long)]
    seed: Option<u64>,
    /// Write the primary output to this file instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format (each subcommand lists its supported set)
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Write a run record (resolved parameters, seed, tool version, output digest) as JSON
    #[arg(long)]
    record: Option<PathBuf>,
}

impl IoArgs {
    fn format_or(&self, default: OutputFormat, supported: &[OutputFormat]) -> Result<OutputFormat, Failure> {
        let format = self.format.unwrap_or(default);
        if supported.contains(&format) {
            Ok(format)
        } else {
            let names: Vec<&str> = supported.iter().map(|f| f.name()).collect();
            Err(Failure::usage(format!(
                "format `{}` is not supported here; use one of: {}",
                format.name(),
                names.join(", ")
            )))
        }
    }
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct GdArgs {
    /// Movement energy per access, picojoules
    #[arg(long = "e-move-pj")]
    e_move_pj: f64,
    /// Compute energy per operation, picojoules
    #[arg(long = "e-compute-pj")]
    e_compute_pj: f64,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct AdvantageArgs {
    /// Movement/compute energy ratio G_d (dimensionless, >= 1)
    #[arg(long)]
    gd: f64,
    /// Distance exponent beta, in (1, 3]
    #[arg(long)]
    beta: f64,
    /// Distance ratio r = d_min/d in (0, 1]; alternative to --d/--dmin
    #[arg(long)]
    r: Option<f64>,
    /// Traditional separation d, meters
    #[arg(long)]
    d: Option<f64>,
    /// Colocated separation d_min, meters
    #[arg(long)]
    dmin: Option<f64>,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct SweepArgs {
    /// G_d axis: single value `v` or range `min:max:count[:log|linear]` (default scale log)
    #[arg(long, value_parser = parse_range_spec, default_value = "1:10000:9")]
    gd: RangeSpecArg,
    /// beta axis: single value or range (default scale linear)
    #[arg(long, value_parser = parse_range_spec, default_value = "2")]
    beta: RangeSpecArg,
    /// r axis: single value or range (default scale log)
    #[arg(long, value_parser = parse_range_spec, default_value = "0.0001:0.99:25")]
    r: RangeSpecArg,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct FieldArgs {
    /// Scenario file providing the profile and the data objects
    #[arg(long)]
    scenario: PathBuf,
    /// Sampling region as six comma-separated meters: minx,miny,minz,maxx,maxy,maxz
    /// (defaults to the scenario's region)
    #[arg(long, value_parser = parse_region, allow_hyphen_values = true)]
    region: Option<RegionArg>,
    /// Grid resolution per axis: nx,ny,nz
    #[arg(long, value_parser = parse_resolution, default_value = "11,11,11")]
    resolution: Resolution,
    /// Field strength G_d (defaults to the profile's ratio at its reference distance)
    #[arg(long)]
    gd: Option<f64>,
    /// Distance exponent (defaults to the profile's beta)
    #[arg(long)]
    beta: Option<f64>,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args, Debug)]
struct PlaceArgs {
    /// Scenario file with objects, kernels, and a region
    #[arg(long)]
    scenario: PathBuf,
    /// continuous (anywhere in the region) or discrete (into slots);
    /// defaults to discrete when the scenario has slots
    #[arg(long, value_enum)]
    mode: Option<PlaceMode>,
    /// Record each kernel's descent path in the JSON output
    #[arg(long)]
    trace: bool,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum PlaceMode {
    Continuous,
    Discrete,
}

#[derive(Args, Debug)]
struct CatalogArgs {
    #[command(subcommand)]
    action: CatalogAction,
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    /// Table of the built-in measurement records
    List(IoArgs),
    /// Derive G_d from the records and compare against the published figures
    Check(IoArgs),
    /// Dump the records for external tools
    Export(IoArgs),
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct BalanceArgs {
    /// Scenario file whose profile to use (alternative to the explicit flags)
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Compute energy per operation, picojoules
    #[arg(long = "e-compute-pj")]
    e_compute_pj: Option<f64>,
    /// Movement coefficient alpha, joules per (bit * m^beta)
    #[arg(long)]
    alpha: Option<f64>,
    /// Distance exponent beta, in (1, 3]
    #[arg(long)]
    beta: Option<f64>,
    /// Bits moved per access (default 64)
    #[arg(long)]
    bits_per_access: Option<u32>,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Clone, Debug)]
struct RangeSpecArg {
    min: f64,
    max: f64,
    count: usize,
    scale: Option<SweepScale>,
}

impl RangeSpecArg {
    fn to_range(&self, default_scale: SweepScale) -> Result<SweepRange, datagravity::Error> {
        if self.count == 1 {
            SweepRange::single(self.min)
        } else {
            SweepRange::new(
                self.min,
                self.max,
                self.count,
                self.scale.unwrap_or(default_scale),
            )
        }
    }

    fn describe(&self) -> String {
        if self.count == 1 {
            format!("{}", self.min)
        } else {
            format!(
                "{}:{}:{}{}",
                self.min,
                self.max,
                self.count,
                match self.scale {
                    Some(SweepScale::Log) => ":log",
                    Some(SweepScale::Linear) => ":linear",
                    None => "",
                }
            )
        }
    }
}

fn parse_range_spec(s: &str) -> Result<RangeSpecArg, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let number = |p: &str| {
        p.parse::<f64>()
            .map_err(|_| format!("`{p}` is not a number"))
    };
    match parts.as_slice() {
        [v] => {
            let v = number(v)?;
            Ok(RangeSpecArg {
                min: v,
                max: v,
                count: 1,
                scale: None,
            })
        }
        [min, max, count] | [min, max, count, _] => {
            let scale = match parts.get(3) {
                None => None,
                Some(&"log") => Some(SweepScale::Log),
                Some(&"linear") => Some(SweepScale::Linear),
                Some(other) => return Err(format!("scale `{other}` is not log or linear")),
            };
            Ok(RangeSpecArg {
                min: number(min)?,
                max: number(max)?,
                count: count
                    .parse::<usize>()
                    .map_err(|_| format!("`{count}` is not a count"))?,
                scale,
            })
        }
        _ => Err("expected `value` or `min:max:count[:scale]`".to_string()),
    }
}

#[derive(Clone, Copy, Debug)]
struct RegionArg {
    min: [f64; 3],
    max: [f64; 3],
}

fn parse_region(s: &str) -> Result<RegionArg, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| "expected six comma-separated numbers".to_string())?;
    if parts.len() != 6 {
        return Err(format!("expected six numbers, got {}", parts.len()));
    }
    Ok(RegionArg {
        min: [parts[0], parts[1], parts[2]],
        max: [parts[3], parts[4], parts[5]],
    })
}

#[derive(Clone, Copy, Debug)]
struct Resolution([usize; 3]);

fn parse_resolution(s: &str) -> Result<Resolution, String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| "expected three comma-separated counts".to_string())?;
    if parts.len() != 3 {
        return Err(format!("expected three counts, got {}", parts.len()));
    }
    Ok(Resolution([parts[0], parts[1], parts[2]]))
}

/// Everything needed to finish a run: where the output goes and what
/// the run record should say.
struct Emission<'a> {
    subcommand: &'static str,
    parameters: BTreeMap<String, Value>,
    io: &'a IoArgs,
    content: String,
}

#[derive(Serialize)]
struct RunRecord {
    subcommand: String,
    parameters: BTreeMap<String, Value>,
    seed: Option<u64>,
    tool_version: String,
    output_sha256: String,
}

fn emit(e: Emission) -> Result<(), Failure> {
    let digest = Sha256::digest(e.content.as_bytes());
    let digest_hex: String = digest.iter().fold(String::new(), |mut acc, byte| {
        let _ = write!(acc, "{byte:02x}");
        acc
    });
    match &e.io.output {
        Some(path) => std::fs::write(path, &e.content)?,
        None => print!("{}", e.content),
    }
    if let Some(path) = &e.io.record {
        let record = RunRecord {
            subcommand: e.subcommand.to_string(),
            parameters: e.parameters,
            seed: e.io.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            output_sha256: digest_hex,
        };
        let mut text = serde_json::to_string_pretty(&record)
            .map_err(|err| Failure::domain(err.to_string()))?;
        text.push('\n');
        std::fs::write(path, text)?;
    }
    Ok(())
}

fn load_scenario(path: &PathBuf) -> Result<Scenario, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| Failure::domain(format!("{}: {err}", path.display())))?;
    Scenario::from_toml(&text)
        .map_err(|err| Failure::domain(format!("{}: {err}", path.display())))
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Gd(args) => run_gd(args),
        Command::Advantage(args) => run_advantage(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Field(args) => run_field(args),
        Command::Place(args) => run_place(args),
        Command::Catalog(args) => match args.action {
            CatalogAction::List(io) => run_catalog_list(io),
            CatalogAction::Check(io) => run_catalog_check(io),
            CatalogAction::Export(io) => run_catalog_export(io),
        },
        Command::Balance(args) => run_balance(args),
    }
}

fn run_gd(args: GdArgs) -> Result<ExitCode, Failure> {
    let format = args.io.format_or(
        OutputFormat::Human,
        &[OutputFormat::Human, OutputFormat::Csv, OutputFormat::Json],
    )?;
    let g_d = disjunction_constant(args.e_move_pj * PICOJOULE, args.e_compute_pj * PICOJOULE)?;
    let content = match format {
        OutputFormat::Human => format!("{g_d:.2}\n"),
        OutputFormat::Csv => format!("g_d\n{g_d}\n"),
        OutputFormat::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&json!({
                "e_move_pj": args.e_move_pj,
                "e_compute_pj": args.e_compute_pj,
                "g_d": g_d,
            }))
            .map_err(|err| Failure::domain(err.to_string()))?
        ),
    };
    let parameters = BTreeMap::from([
        ("e_move_pj".to_string(), json!(args.e_move_pj)),
        ("e_compute_pj".to_string(), json!(args.e_compute_pj)),
        ("format".to_string(), json!(format.name())),
    ]);
    emit(Emission {
        subcommand: "gd",
        parameters,
        io: &args.io,
        content,
    })?;
    Ok(ExitCode::SUCCESS)
}

fn run_advantage(args: AdvantageArgs) -> Result<ExitCode, Failure> {
    let format = args.io.format_or(
        OutputFormat::Human,
        &[OutputFormat::Human, OutputFormat::Csv, OutputFormat::Json],
    )?;
    let inputs = match (args.r, args.d, args.dmin) {
        (Some(r), None, None) => AdvantageInputs::from_ratio(args.gd, args.beta, r)?,
        (None, Some(d), Some(dmin)) => {
            AdvantageInputs::from_distances(args.gd, args.beta, d, dmin)?
        }
        _ => {
            return Err(Failure::usage(
                "give either --r, or both --d and --dmin",
            ))
        }
    };
    let report = inputs.report();
    let content = match format {
        OutputFormat::Human => format!(
            "g_d = {}\nbeta = {}\nr = {}\ngamma = {:.2}\nlower bound = {:.2}\ncolocation condition = {}\nbound satisfied = {}\n",
            report.g_d,
            report.beta,
            report.r,
            report.gamma,
            report.lower_bound,
            report.condition_holds,
            report.bound_satisfied,
        ),
        OutputFormat::Csv => format!(
            "g_d,beta,r,gamma,bound,condition\n{},{},{},{},{},{}\n",
            report.g_d, report.beta, report.r, report.gamma, report.lower_bound, report.condition_holds,
        ),
        OutputFormat::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&report).map_err(|err| Failure::domain(err.to_string()))?
        ),
    };
    let mut parameters = BTreeMap::from([
        ("gd".to_string(), json!(args.gd)),
        ("beta".to_string(), json!(args.beta)),
        ("format".to_string(), json!(format.name())),
    ]);
    if let Some(r) = args.r {
        parameters.insert("r".to_string(), json!(r));
    }
    if let Some(d) = args.d {
        parameters.insert("d_m".to_string(), json!(d));
    }
    if let Some(dmin) = args.dmin {
        parameters.insert("dmin_m".to_string(), json!(dmin));
    }
    emit(Emission {
        subcommand: "advantage",
        parameters,
        io: &args.io,
        content,
    })?;
    Ok(ExitCode::SUCCESS)
}

fn run_sweep(args: SweepArgs) -> Result<ExitCode, Failure> {
    let format = args
        .io
        .format_or(OutputFormat::Csv, &[OutputFormat::Csv, OutputFormat::Json])?;
    let spec = SweepSpec::new(
        args.gd.to_range(SweepScale::Log)?,
        args.beta.to_range(SweepScale::Linear)?,
        args.r.to_range(SweepScale::Log)?,
    )?;
    let rows = sweep(&spec);
    let content = match format {
        OutputFormat::Csv => {
            let mut out = String::from("g_d,beta,r,gamma,bound,condition\n");
            for row in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    row.g_d, row.beta, row.r, row.gamma, row.bound, row.condition
                );
            }
            out
        }
        OutputFormat::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&rows).map_err(|err| Failure::domain(err.to_string()))?
        ),
        OutputFormat::Human => unreachable!("rejected above"),
    };
    let parameters = BTreeMap::from([
        ("gd".to_string(), json!(args.gd.describe())),
        ("beta".to_string(), json!(args.beta.describe())),
        ("r".to_string(), json!(args.r.describe())),
        ("format".to_string(), json!(format.name())),
    ]);
    emit(Emission {
        subcommand: "sweep",
        parameters,
        io: &args.io,
        content,
    })?;
    Ok(ExitCode::SUCCESS)
}

fn run_field(args: FieldArgs) -> Result<ExitCode, Failure> {
    let format = args
        .io
        .format_or(OutputFormat::Csv, &[OutputFormat::Csv, OutputFormat::Json])?;
    let scenario = load_scenario(&args.scenario)?;
    let profile = scenario.profile();
    let region = match args.region {
        Some(r) => AxisBox::new(
            Vec3::new(r.min[0], r.min[1], r.min[2]),
            Vec3::new(r.max[0], r.max[1], r.max[2]),
        )?,
        None => *scenario.region().ok_or_else(|| {
            Failure::usage("the scenario has no [region]; pass --region explicitly")
        })?,
    };
    let g_d = match args.gd {
        Some(g) => g,
        None => profile.disjunction_at(profile.d_ref())?,
    };
    let beta = args.beta.unwrap_or_else(|| profile.beta());
    let params = FieldParams::new(g_d, beta)?;
    let samples = sample_grid(scenario.objects(), &region, args.resolution.0, &params)?;
    let content = match format {
        OutputFormat::Csv => {
            let mut out = String::from("x,y,z,gx,gy,gz,magnitude,singular\n");
            for s in &samples {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    s.point.x,
                    s.point.y,
                    s.point.z,
                    s.field.x,
                    s.field.y,
                    s.field.z,
                    s.magnitude,
                    u8::from(s.singular)
                );
            }
            out
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = samples
                .iter()
                .map(|s| {
                    json!({
                        "x": s.point.x,
                        "y": s.point.y,
                        "z": s.point.z,
                        "gx": s.field.x,
                        "gy": s.field.y,
                        "gz": s.field.z,
                        "magnitude": s.magnitude,
                        "singular": s.singular,
                    })
                })
                .collect();
            format!(
                "{}\n",
                serde_json::to_string_pretty(&rows)
                    .map_err(|err| Failure::domain(err.to_string()))?
            )
        }
        OutputFormat::Human => unreachable!("rejected above"),
    };
    let parameters = BTreeMap::from([
        ("scenario".to_string(), json!(args.scenario.display().to_string())),
        ("region_min_m".to_string(), json!(region.min().to_array())),
        ("region_max_m".to_string(), json!(region.max().to_array())),
        ("resolution".to_string(), json!(args.resolution.0)),
        ("gd".to_string(), json!(g_d)),
        ("beta".to_string(), json!(beta)),
        ("format".to_string(), json!(format.name())),
    ]);
    emit(Emission {
        subcommand: "field",
        parameters,
        io: &args.io,
        content,
    })?;
    Ok(ExitCode::SUCCESS)
}

fn describe_status(status: &PlacementStatus) -> (String, Option<Vec3>) {
    match status {
        PlacementStatus::Placed { position } => ("placed".to_string(), Some(*position)),
        PlacementStatus::Assigned { slot, position } => {
            (format!("slot {slot}"), Some(*position))
        }
        PlacementStatus::Unplaced => ("unplaced".to_string(), None),
    }
}

fn place_human(solution: &PlacementSolution, mode: PlaceMode) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<16} {:<12} {:>14} {:>14} {:>14} {:>16}",
        "kernel", "status", "x_m", "y_m", "z_m", "energy_pj"
    );
    for placement in &solution.placements {
        let (status, position) = describe_status(&placement.status);
        let (x, y, z) = match position {
            Some(p) => (
                format!("{:.6}", p.x),
                format!("{:.6}", p.y),
                format!("{:.6}", p.z),
            ),
            None => ("-".to_string(), "-".to_string(), "-".to_string()),
        };
        let _ = writeln!(
            out,
            "{:<16} {:<12} {:>14} {:>14} {:>14} {:>16.6}",
            placement.kernel,
            status,
            x,
            y,
            z,
            placement.energy / PICOJOULE
        );
    }
    let _ = writeln!(out, "mode = {}", match mode {
        PlaceMode::Continuous => "continuous",
        PlaceMode::Discrete => "discrete",
    });
    let _ = writeln!(out, "objective_pj = {}", solution.objective / PICOJOULE);
    let _ = writeln!(out, "iterations = {}", solution.iterations);
    let _ = writeln!(out, "converged = {}", solution.converged);
    if let Some(seed) = solution.seed {
        let _ = writeln!(out, "seed = {seed}");
    }
    out
}

fn place_json(solution: &PlacementSolution, mode: PlaceMode) -> Result<String, Failure> {
    let placements: Vec<Value> = solution
        .placements
        .iter()
        .map(|p| {
            let (status, slot) = match p.status {
                PlacementStatus::Placed { .. } => ("placed", None),
                PlacementStatus::Assigned { slot, .. } => ("assigned", Some(slot)),
                PlacementStatus::Unplaced => ("unplaced", None),
            };
            json!({
                "kernel": p.kernel,
                "status": status,
                "slot": slot,
                "position_m": p.status.position().map(|p| p.to_array()),
                "energy_pj": p.energy / PICOJOULE,
                "iterations": p.iterations,
            })
        })
        .collect();
    let traces: Option<Vec<Value>> = solution.trace.as_ref().map(|traces| {
        traces
            .iter()
            .map(|t| {
                json!({
                    "kernel": t.kernel,
                    "path_m": t.path.iter().map(|p| p.to_array()).collect::<Vec<_>>(),
                    "objective_pj": t
                        .objective
                        .iter()
                        .map(|e| e / PICOJOULE)
                        .collect::<Vec<_>>(),
                })
            })
            .collect()
    });
    let body = json!({
        "mode": match mode {
            PlaceMode::Continuous => "continuous",
            PlaceMode::Discrete => "discrete",
        },
        "objective_pj": solution.objective / PICOJOULE,
        "iterations": solution.iterations,
        "converged": solution.converged,
        "seed": solution.seed,
        "placements": placements,
        "trace": traces,
    });
    Ok(format!(
        "{}\n",
        serde_json::to_string_pretty(&body).map_err(|err| Failure::domain(err.to_string()))?
    ))
}

fn run_place(args: PlaceArgs) -> Result<ExitCode, Failure> {
    let format = args
        .io
        .format_or(OutputFormat::Human, &[OutputFormat::Human, OutputFormat::Json])?;
    let scenario = load_scenario(&args.scenario)?;
    let problem = scenario.placement_problem()?;
    let mode = args.mode.unwrap_or(if problem.slots().is_empty() {
        PlaceMode::Continuous
    } else {
        PlaceMode::Discrete
    });
    let mut config = PlacementConfig::default();
    config.seed = args.io.seed;
    config.record_trace = args.trace;
    let solution = match mode {
        PlaceMode::Continuous => optimize_continuous(&problem, &config)?,
        PlaceMode::Discrete => optimize_discrete(&problem, &config)?,
    };
    let content = match format {
        OutputFormat::Human => place_human(&solution, mode),
        OutputFormat::Json => place_json(&solution, mode)?,
        OutputFormat::Csv => unreachable!("rejected above"),
    };
    let parameters = BTreeMap::from([
        ("scenario".to_string(), json!(args.scenario.display().to_string())),
        (
            "mode".to_string(),
            json!(match mode {
                PlaceMode::Continuous => "continuous",
                PlaceMode::Discrete => "discrete",
            }),
        ),
        ("trace".to_string(), json!(args.trace)),
        ("format".to_string(), json!(format.name())),
    ]);
    emit(Emission {
        subcommand: "place",
        parameters,
        io: &args.io,
        content,
    })?;
    Ok(ExitCode::SUCCESS)
}

fn band_cell(band: Option<Band>) -> (String, String) {
    match band {
        Some(b) => (
            format!("{}", b.min() / PICOJOULE),
            format!("{}", b.max() / PICOJOULE),
        ),
        None => ("-".to_string(), "-".to_string()),
    }
}

fn run_catalog_list(io: IoArgs) -> Result<ExitCode, Failure> {
    let format = io.format_or(OutputFormat::Human, &[OutputFormat::Human, OutputFormat::Json])?;
    let records = builtin_measurements();
    let content = match format {
        OutputFormat::Human => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "{:<20} {:<12} {:>14} {:>14} {:>14} {:>14} {:>6}  {}",
                "label", "node", "e_move_min_pj", "e_move_max_pj", "e_comp_min_pj", "e_comp_max_pj", "width", "source"
            );
            for r in &records {
                let (move_min, move_max) = band_cell(r.e_move());
                let (comp_min, comp_max) = band_cell(r.e_compute());
                let width = r
                    .access_width()
                    .map_or("-".to_string(), |w| w.to_string());
                let label = if r.is_qualitative() {
                    format!("{} *", r.label())
                } else {
                    r.label().to_string()
                };
                let _ = writeln!(
                    out,
                    "{:<20} {:<12} {:>14} {:>14} {:>14} {:>14} {:>6}  {}",
                    label,
                    r.node(),
                    move_min,
                    move_max,
                    comp_min,
                    comp_max,
                    width,
                    r.source()
                );
            }
            let _ = writeln!(out, "* qualitative record, excluded from derived ratios");
            out
        }
        OutputFormat::Json => export_records_json(&records)?,
        OutputFormat::Csv => unreachable!("rejected above"),
    };
    let parameters = BTreeMap::from([("format".to_string(), json!(format.name()))]);
    emit(Emission {
        subcommand: "catalog list",
        parameters,
        io: &io,
        content,
    })?;
    Ok(ExitCode::SUCCESS)
}

fn band_text(band: &Band) -> String {
    if band.min() == band.max() {
        format!("{}", band.min())
    } else {
        format!("{}..{}", band.min(), band.max())
    }
}

fn run_catalog_check(io: IoArgs) -> Result<ExitCode, Failure> {
    let format = io.format_or(OutputFormat::Human, &[OutputFormat::Human, OutputFormat::Json])?;
    let report = check_claims();
    let content = match format {
        OutputFormat::Human => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "{:<24} {:<16} {:<24} {:>12} {:<6}",
                "claim", "expected", "derived", "rel_error", "status"
            );
            for c in &report.checks {
                let status = match c.status {
                    ClaimStatus::Pass => "pass",
                    ClaimStatus::Fail => "FAIL",
                    ClaimStatus::Informational => "info",
                };
                let _ = writeln!(
                    out,
                    "{:<24} {:<16} {:<24} {:>12.4e} {:<6}",
                    c.claim,
                    band_text(&c.expected),
                    band_text(&c.derived),
                    c.relative_error,
                    status
                );
            }
            let verdict = if report.all_pass() {
                "all claims pass"
            } else {
                "CLAIM CHECK FAILED"
            };
            let _ = writeln!(out, "{verdict}");
            out
        }
        OutputFormat::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&report)
                .map_err(|err| Failure::domain(err.to_string()))?
        ),
        OutputFormat::Csv => unreachable!("rejected above"),
    };
    let parameters = BTreeMap::from([("format".to_string(), json!(format.name()))]);
    emit(Emission {
        subcommand: "catalog check",
        parameters,
        io: &io,
        content,
    })?;
    if report.all_pass() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(3))
    }
}

fn csv_escape(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

fn export_records_json(
    records: &[datagravity::catalog::MeasurementRecord],
) -> Result<String, Failure> {
    let rows: Vec<Value> = records
        .iter()
        .map(|r| {
            json!({
                "label": r.label(),
                "source": r.source(),
                "node": r.node(),
                "e_move_min_pj": r.e_move().map(|b| b.min() / PICOJOULE),
                "e_move_max_pj": r.e_move().map(|b| b.max() / PICOJOULE),
                "e_compute_min_pj": r.e_compute().map(|b| b.min() / PICOJOULE),
                "e_compute_max_pj": r.e_compute().map(|b| b.max() / PICOJOULE),
                "access_width_bits": r.access_width(),
                "qualitative": r.is_qualitative(),
                "power_w": r.power_rate().map(|p| p.power),
                "rate_ops_per_s": r.power_rate().map(|p| p.rate),
                "notes": r.notes(),
            })
        })
        .collect();
    Ok(format!(
        "{}\n",
        serde_json::to_string_pretty(&rows).map_err(|err| Failure::domain(err.to_string()))?
    ))
}

fn run_catalog_export(io: IoArgs) -> Result<ExitCode, Failure> {
    let format = io.format_or(OutputFormat::Csv, &[OutputFormat::Csv, OutputFormat::Json])?;
    let records = builtin_measurements();
    let content = match format {
        OutputFormat::Csv => {
            let mut out = String::from(
                "label,source,node,e_move_min_pj,e_move_max_pj,e_compute_min_pj,e_compute_max_pj,access_width_bits,qualitative,power_w,rate_ops_per_s,notes\n",
            );
            for r in &records {
                let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x}"));
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{}",
                    csv_escape(r.label()),
                    csv_escape(r.source()),
                    csv_escape(r.node()),
                    opt(r.e_move().map(|b| b.min() / PICOJOULE)),
                    opt(r.e_move().map(|b| b.max() / PICOJOULE)),
                    opt(r.e_compute().map(|b| b.min() / PICOJOULE)),
                    opt(r.e_compute().map(|b| b.max() / PICOJOULE)),
                    r.access_width().map_or(String::new(), |w| w.to_string()),
                    r.is_qualitative(),
                    opt(r.power_rate().map(|p| p.power)),
                    opt(r.power_rate().map(|p| p.rate)),
                    csv_escape(r.notes()),
                );
            }
            out
        }
        OutputFormat::Json => export_records_json(&records)?,
        OutputFormat::Human => unreachable!("rejected above"),
    };
    let parameters = BTreeMap::from([("format".to_string(), json!(format.name()))]);
    emit(Emission {
        subcommand: "catalog export",
        parameters,
        io: &io,
        content,
    })?;
    Ok(ExitCode::SUCCESS)
}

fn run_balance(args: BalanceArgs) -> Result<ExitCode, Failure> {
    let format = args.io.format_or(
        OutputFormat::Human,
        &[OutputFormat::Human, OutputFormat::Csv, OutputFormat::Json],
    )?;
    let explicit = args.e_compute_pj.is_some()
        || args.alpha.is_some()
        || args.beta.is_some()
        || args.bits_per_access.is_some();
    if args.scenario.is_some() && explicit {
        return Err(Failure::usage(
            "--scenario and the explicit profile flags are mutually exclusive",
        ));
    }
    let profile = match (&args.scenario, args.e_compute_pj, args.alpha, args.beta) {
        (Some(path), None, None, None) => load_scenario(path)?.profile().clone(),
        (None, Some(e_compute_pj), Some(alpha), Some(beta)) => {
            let profile = TechProfile::new("cli", e_compute_pj * PICOJOULE, alpha, beta)?;
            match args.bits_per_access {
                Some(bits) => profile.with_bits_per_access(bits)?,
                None => profile,
            }
        }
        _ => {
            return Err(Failure::usage(
                "give either --scenario, or all of --e-compute-pj, --alpha, --beta",
            ))
        }
    };
    let d_star = profile.balanced_separation();
    let content = match format {
        OutputFormat::Human => format!("balanced separation = {d_star} m\n"),
        OutputFormat::Csv => format!("d_star_m\n{d_star}\n"),
        OutputFormat::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&json!({
                "label": profile.label(),
                "d_star_m": d_star,
            }))
            .map_err(|err| Failure::domain(err.to_string()))?
        ),
    };
    let mut parameters = BTreeMap::from([
        ("format".to_string(), json!(format.name())),
        ("e_compute_pj".to_string(), json!(profile.e_compute() / PICOJOULE)),
        ("alpha".to_string(), json!(profile.alpha())),
        ("beta".to_string(), json!(profile.beta())),
        ("bits_per_access".to_string(), json!(profile.bits_per_access())),
    ]);
    if let Some(path) = &args.scenario {
        parameters.insert("scenario".to_string(), json!(path.display().to_string()));
    }
    emit(Emission {
        subcommand: "balance",
        parameters,
        io: &args.io,
        content,
    })?;
    Ok(ExitCode::SUCCESS)
}
