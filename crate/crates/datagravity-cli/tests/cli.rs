//! End-to-end tests of the binary: output contracts, exit codes, and
//! byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_datagravity"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is UTF-8")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

const SCENARIO: &str = r#"version = 1
slots = [[0.5, 0.0, 0.0], [-0.5, 0.0, 0.0], [0.0, 0.9, 0.0]]

[profile]
label = "edge-node"
e_compute_pj = 1.31
alpha = 2.0e-7
beta = 2.0

[[objects]]
id = "weights"
position = [0.0, 0.25, 0.0]
entropy_per_access = 64.0
access_frequency = 1.0e6

[[objects]]
id = "frames"
position = [-0.4, -0.3, 0.1]
entropy_per_access = 32.0
access_frequency = 4.0e5

[[kernels]]
id = "matmul"
[kernels.traffic]
weights = 1.0e6
frames = 2.0e5

[[kernels]]
id = "decode"
[kernels.traffic]
frames = 8.0e5

[region]
min = [-1.0, -1.0, -1.0]
max = [1.0, 1.0, 1.0]
"#;

fn write_scenario(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).expect("scenario written");
    path
}

#[test]
fn gd_prints_the_rounded_ratio() {
    let output = run(&["gd", "--e-move-pj", "1300", "--e-compute-pj", "1.31"]);
    assert_eq!(exit_code(&output), 0);
    assert_eq!(stdout_of(&output), "992.37\n");
}

#[test]
fn gd_csv_and_json_carry_full_precision() {
    let output = run(&[
        "gd",
        "--e-move-pj",
        "1300",
        "--e-compute-pj",
        "1.31",
        "--format",
        "csv",
    ]);
    assert_eq!(exit_code(&output), 0);
    assert_eq!(stdout_of(&output), "g_d\n992.3664122137404\n");

    let output = run(&[
        "gd",
        "--e-move-pj",
        "1300",
        "--e-compute-pj",
        "1.31",
        "--format",
        "json",
    ]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    let g_d = parsed["g_d"].as_f64().unwrap();
    assert!((g_d - 992.3664122137404).abs() < 1e-9);
}

#[test]
fn advantage_reproduces_the_reference_report() {
    let output = run(&[
        "advantage",
        "--gd",
        "1000",
        "--d",
        "1e-2",
        "--dmin",
        "1e-6",
        "--beta",
        "2",
    ]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout_of(&output);
    assert!(text.contains("gamma = 1000.99"), "{text}");
    assert!(text.contains("lower bound = 31.62"), "{text}");
    assert!(text.contains("colocation condition = true"), "{text}");
}

#[test]
fn advantage_needs_a_ratio_or_both_distances() {
    let output = run(&["advantage", "--gd", "1000", "--beta", "2"]);
    assert_eq!(exit_code(&output), 2);
    assert!(stderr_of(&output).contains("--r"), "{}", stderr_of(&output));

    let output = run(&["advantage", "--gd", "1000", "--beta", "2", "--d", "0.1"]);
    assert_eq!(exit_code(&output), 2);
}

#[test]
fn domain_violations_exit_one() {
    let output = run(&["gd", "--e-move-pj", "-5", "--e-compute-pj", "1.31"]);
    assert_eq!(exit_code(&output), 1);
    assert!(!stderr_of(&output).is_empty());

    let output = run(&["advantage", "--gd", "0.5", "--beta", "2", "--r", "0.5"]);
    assert_eq!(exit_code(&output), 1);
}

#[test]
fn unknown_subcommands_exit_two() {
    let output = run(&["nosuch"]);
    assert_eq!(exit_code(&output), 2);
}

#[test]
fn unsupported_format_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "s.toml", SCENARIO);
    let output = run(&[
        "place",
        "--scenario",
        scenario.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(exit_code(&output), 2);
}

#[test]
fn sweep_emits_the_pinned_header_and_is_deterministic() {
    let args = [
        "sweep", "--gd", "1:1000:4", "--beta", "1.5:3:4", "--r", "1e-5:0.9:7",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(first.stdout, second.stdout, "sweep output is not deterministic");
    let text = stdout_of(&first);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("g_d,beta,r,gamma,bound,condition"));
    assert_eq!(text.lines().count(), 1 + 4 * 4 * 7);
    assert!(!text.contains('\r'));
    for line in text.lines().skip(1) {
        assert_eq!(line.split(',').count(), 6, "bad row: {line}");
    }
}

#[test]
fn sweep_json_has_one_entry_per_grid_point() {
    let output = run(&[
        "sweep", "--gd", "10:100:3", "--beta", "2", "--r", "1e-4:1e-2:5", "--format", "json",
    ]);
    assert_eq!(exit_code(&output), 0);
    let rows: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 3 * 1 * 5);
}

#[test]
fn field_emits_the_pinned_columns() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "s.toml", SCENARIO);
    let output = run(&[
        "field",
        "--scenario",
        scenario.to_str().unwrap(),
        "--resolution",
        "3,3,1",
    ]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout_of(&output);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,z,gx,gy,gz,magnitude,singular"));
    assert_eq!(text.lines().count(), 1 + 9);
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 8, "bad row: {line}");
        assert!(fields[7] == "0" || fields[7] == "1");
    }
}

#[test]
fn field_marks_singular_grid_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"version = 1

[profile]
label = "p"
e_compute_pj = 1.31
alpha = 2.0e-7
beta = 2.0

[[objects]]
id = "origin"
position = [0.0, 0.0, 0.0]
entropy_per_access = 8.0
access_frequency = 1.0e3
"#;
    let scenario = write_scenario(dir.path(), "singular.toml", text);
    let output = run(&[
        "field",
        "--scenario",
        scenario.to_str().unwrap(),
        "--region",
        "-1,-1,-1,1,1,1",
        "--resolution",
        "3,3,1",
    ]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout_of(&output);
    let singular_rows: Vec<&str> = text
        .lines()
        .skip(1)
        .filter(|line| line.ends_with(",1"))
        .collect();
    assert_eq!(singular_rows, vec!["0,0,0,0,0,0,0,1"]);
}

#[test]
fn field_without_any_region_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"version = 1

[profile]
label = "p"
e_compute_pj = 1.31
alpha = 2.0e-7
beta = 2.0

[[objects]]
id = "o"
position = [0.0, 0.0, 0.0]
entropy_per_access = 8.0
access_frequency = 1.0e3
"#;
    let scenario = write_scenario(dir.path(), "noregion.toml", text);
    let output = run(&["field", "--scenario", scenario.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 2);
    assert!(stderr_of(&output).contains("--region"));
}

#[test]
fn place_discrete_assigns_distinct_slots() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "s.toml", SCENARIO);
    let output = run(&[
        "place",
        "--scenario",
        scenario.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(exit_code(&output), 0);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(parsed["mode"], "discrete");
    assert_eq!(parsed["converged"], true);
    let placements = parsed["placements"].as_array().unwrap();
    assert_eq!(placements.len(), 2);
    let mut slots: Vec<i64> = placements
        .iter()
        .map(|p| {
            assert_eq!(p["status"], "assigned");
            p["slot"].as_i64().unwrap()
        })
        .collect();
    slots.sort_unstable();
    slots.dedup();
    assert_eq!(slots.len(), 2, "kernels shared a slot");
    assert!(parsed["objective_pj"].as_f64().unwrap() > 0.0);
}

#[test]
fn place_continuous_is_deterministic_under_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "s.toml", SCENARIO);
    let args = [
        "place",
        "--scenario",
        scenario.to_str().unwrap(),
        "--mode",
        "continuous",
        "--seed",
        "7",
        "--format",
        "json",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(first.stdout, second.stdout, "seeded run is not deterministic");
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&first)).unwrap();
    assert_eq!(parsed["seed"], 7);
    assert_eq!(parsed["mode"], "continuous");
}

#[test]
fn place_trace_records_descent_paths() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "s.toml", SCENARIO);
    let output = run(&[
        "place",
        "--scenario",
        scenario.to_str().unwrap(),
        "--mode",
        "continuous",
        "--trace",
        "--format",
        "json",
    ]);
    assert_eq!(exit_code(&output), 0);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    let traces = parsed["trace"].as_array().expect("trace present");
    assert_eq!(traces.len(), 2);
    for trace in traces {
        assert!(!trace["path_m"].as_array().unwrap().is_empty());
        assert_eq!(
            trace["path_m"].as_array().unwrap().len(),
            trace["objective_pj"].as_array().unwrap().len()
        );
    }
}

#[test]
fn catalog_check_passes_on_the_shipped_data() {
    let output = run(&["catalog", "check"]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout_of(&output);
    assert!(text.contains("all claims pass"), "{text}");
    assert!(text.contains("info"), "informational rows missing: {text}");
}

#[test]
fn catalog_list_names_the_records() {
    let output = run(&["catalog", "list"]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout_of(&output);
    assert!(text.contains("horowitz-cache"), "{text}");
    assert!(text.contains("upmem-pim"), "{text}");
    assert!(text.contains("human-brain *"), "{text}");
    assert!(text.contains("qualitative"), "{text}");
}

#[test]
fn catalog_export_csv_has_units_in_the_header() {
    let output = run(&["catalog", "export"]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout_of(&output);
    let header = text.lines().next().unwrap();
    assert!(header.contains("e_move_min_pj"), "{header}");
    assert!(header.contains("e_compute_max_pj"), "{header}");
    assert!(header.contains("access_width_bits"), "{header}");
    assert_eq!(text.lines().count(), 1 + 11);
}

#[test]
fn catalog_export_json_round_trips() {
    let output = run(&["catalog", "export", "--format", "json"]);
    assert_eq!(exit_code(&output), 0);
    let rows: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 11);
    let ddr = rows
        .iter()
        .find(|r| r["label"] == "ddr-access")
        .expect("ddr-access exported");
    assert_eq!(ddr["e_move_min_pj"].as_f64().unwrap(), 1300.0);
}

#[test]
fn balance_prints_the_closed_form_distance() {
    let output = run(&[
        "balance",
        "--e-compute-pj",
        "1.31",
        "--alpha",
        "2.03125e-7",
        "--beta",
        "2",
    ]);
    assert_eq!(exit_code(&output), 0);
    let text = stdout_of(&output);
    assert!(text.contains("0.00031744169664558997 m"), "{text}");
}

#[test]
fn run_record_digest_matches_the_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sweep.csv");
    let record_path = dir.path().join("sweep.run.json");
    let output = run(&[
        "sweep",
        "--gd",
        "1000",
        "--r",
        "1e-4:1e-2:3",
        "--output",
        out_path.to_str().unwrap(),
        "--record",
        record_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0);
    assert!(stdout_of(&output).is_empty());
    let written = std::fs::read(&out_path).unwrap();
    let digest = Sha256::digest(&written);
    let digest_hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&record_path).unwrap()).unwrap();
    assert_eq!(record["subcommand"], "sweep");
    assert_eq!(record["tool_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(record["output_sha256"], digest_hex.as_str());
    assert_eq!(record["parameters"]["gd"], "1000");
}

#[test]
fn scenario_diagnostics_name_the_file_and_line() {
    let output = run(&["place", "--scenario", "/definitely/missing.toml"]);
    assert_eq!(exit_code(&output), 1);
    assert!(stderr_of(&output).contains("missing.toml"));

    let dir = tempfile::tempdir().unwrap();
    let bad = write_scenario(
        dir.path(),
        "bad.toml",
        &format!("{SCENARIO}\nfrequency_hz = 4\n"),
    );
    let output = run(&["place", "--scenario", bad.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 1);
    let err = stderr_of(&output);
    assert!(err.contains("bad.toml"), "{err}");
    assert!(err.contains("line"), "{err}");
}
