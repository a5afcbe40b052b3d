//! End-to-end tests for the `torus-actions` binary: exit codes, output
//! formats, and determinism across repeated runs.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use torus_actions::{demo_pair, ActionSpec, NormalFormResult};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_torus-actions"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

fn stderr_text(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn write_action(dir: &Path, name: &str, action: &ActionSpec) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(action).unwrap()).unwrap();
    path
}

fn write_text(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn check_accepts_the_normal_form_pair() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_action(dir.path(), "pair.json", &demo_pair());
    let output = run(&["check", input.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr_text(&output));
    let report = stdout_json(&output);
    assert_eq!(report["spectral"]["status"], "exactly_verified");
    assert_eq!(report["spectral"]["closure_size"], 4);
    assert_eq!(report["fixed_lattice"]["rank"], 0);
    assert_eq!(report["hypotheses_hold"], true);
    assert_eq!(report["config"]["closure_cap"], 1000);
    assert_eq!(report["config"]["box"], 4);
}

#[test]
fn check_rejects_minus_identity() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_text(
        dir.path(),
        "neg.json",
        r#"{"p":1,"q":2,"generators":[[[-1,0],[0,-1]]]}"#,
    );
    let output = run(&["check", input.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let report = stdout_json(&output);
    assert_eq!(report["spectral"]["status"], "refuted");
    assert_eq!(report["spectral"]["witness"], serde_json::json!([1]));
    assert_eq!(report["hypotheses_hold"], false);
}

#[test]
fn check_reads_standard_input() {
    let mut child = bin()
        .args(["check", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(serde_json::to_string(&demo_pair()).unwrap().as_bytes())
        .unwrap();
    let output = child.wait_with_output().unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr_text(&output));
    assert_eq!(stdout_json(&output)["hypotheses_hold"], true);
}

#[test]
fn malformed_json_reports_the_position() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_text(dir.path(), "bad.json", "{ nope");
    let output = run(&["check", input.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_text(&output).contains("line 1"), "{}", stderr_text(&output));
}

#[test]
fn missing_file_is_an_input_error() {
    let output = run(&["check", "/nonexistent/action.json"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn normal_form_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_action(dir.path(), "pair.json", &demo_pair());
    let output = run(&["normal-form", input.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr_text(&output));
    let report = stdout_json(&output);
    assert_eq!(report["verification"]["ok"], true);
    let result: NormalFormResult = serde_json::from_value(report["result"].clone()).unwrap();
    assert_eq!(result.a.to_string(), "2");
    assert_eq!(result.b.to_string(), "1");
    assert_eq!(result.c.to_string(), "-3");
    assert_eq!(result.d.to_string(), "2");
}

#[test]
fn normal_form_rejects_rank_four() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_action(dir.path(), "rank4.json", &torus_actions::demo_infinite_image());
    let output = run(&["normal-form", input.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_text(&output).contains("Z^4"), "{}", stderr_text(&output));
}

#[test]
fn non_commuting_generators_are_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    // N(a=2, b=1) and M(c=0, d=1) violate the commutation constraint.
    let input = write_text(
        dir.path(),
        "noncomm.json",
        r#"{"p":2,"q":3,"generators":[
            [[1,2,1],[0,-1,0],[0,0,-1]],
            [[-1,0,0],[0,-1,1],[0,0,1]]]}"#,
    );
    let output = run(&["check", input.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_text(&output).contains("commute"), "{}", stderr_text(&output));
}

#[test]
fn nontrivial_fixed_lattice_fails_the_hypotheses() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_text(
        dir.path(),
        "shear.json",
        r#"{"p":1,"q":3,"generators":[[[1,1,0],[0,1,0],[0,0,1]]]}"#,
    );
    let check = run(&["check", input.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(1));
    assert_eq!(stdout_json(&check)["fixed_lattice"]["rank"], 2);
    let normalize = run(&["normal-form", input.to_str().unwrap()]);
    assert_eq!(normalize.status.code(), Some(1));
}

#[test]
fn construct_emits_verified_lifts() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_action(dir.path(), "pair.json", &demo_pair());
    let output = run(&["construct", input.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr_text(&output));
    let report = stdout_json(&output);
    assert_eq!(report["lifts"].as_array().unwrap().len(), 2);
    let display = report["display"].as_array().unwrap();
    assert!(display[0].as_str().unwrap().contains("cos(2πz)"));
    let identities = report["action_laws"]["identities"].as_array().unwrap();
    assert_eq!(identities.len(), 2);
    assert!(identities.iter().all(|i| i["holds"] == true));
    let defects = report["action_laws"]["pair_defects"].as_array().unwrap();
    assert_eq!(defects[0]["defect"]["kind"], "constant");
    assert_eq!(defects[0]["defect"]["offset"], serde_json::json!([0, 0, 1]));
}

#[test]
fn verify_free_certifies_and_scans_clear() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_action(dir.path(), "pair.json", &demo_pair());
    let output = run(&["verify-free", input.to_str().unwrap(), "--box", "2"]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr_text(&output));
    let report = stdout_json(&output);
    assert_eq!(report["symbolic"]["elements_checked"], 25);
    assert_eq!(report["symbolic"]["eliminated"], 24);
    assert_eq!(report["symbolic"]["identity_elements"], 1);
    assert_eq!(report["certificate"]["subgroup_index"], 4);
    assert_eq!(report["certificate"]["quotient_exponent"], 2);
    assert_eq!(report["config"]["alpha_source"], "default");
    let entries = report["scan"]["entries"].as_object().unwrap();
    assert_eq!(entries.len(), 24);
    assert!(entries.values().all(|e| e["flagged"] == false));
}

#[test]
fn verify_free_with_seed_echoes_the_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_action(dir.path(), "pair.json", &demo_pair());
    let output = run(&["verify-free", input.to_str().unwrap(), "--box", "1", "--seed", "42"]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr_text(&output));
    let report = stdout_json(&output);
    assert_eq!(report["config"]["seed"], 42);
    assert_eq!(report["config"]["alpha_source"], "seed");
    assert_eq!(report["config"]["alpha"].as_array().unwrap().len(), 2);
}

#[test]
fn amplitude_count_mismatch_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_action(dir.path(), "pair.json", &demo_pair());
    let output = run(&["verify-free", input.to_str().unwrap(), "--alpha", "1.0"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_text(&output).contains("expected 2 amplitudes"));
}

#[test]
fn alpha_and_seed_conflict() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_action(dir.path(), "pair.json", &demo_pair());
    let output = run(&[
        "verify-free",
        input.to_str().unwrap(),
        "--alpha",
        "1.0,2.0",
        "--seed",
        "7",
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn orbit_csv_traces_the_half_twist() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_action(dir.path(), "pair.json", &demo_pair());
    let output = run(&["orbit", input.to_str().unwrap(), "--word", "2,2"]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr_text(&output));
    let text = String::from_utf8(output.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,x,y,z");
    assert_eq!(lines.len(), 4);
    let z_values: Vec<f64> = lines[1..]
        .iter()
        .map(|line| line.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(z_values[0], 0.0);
    assert_eq!(z_values[1], 0.5);
    assert_eq!(z_values[2], 0.0);
}

#[test]
fn orbit_json_lists_the_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_action(dir.path(), "pair.json", &demo_pair());
    let output = run(&[
        "orbit",
        input.to_str().unwrap(),
        "--word",
        "1,-1",
        "--start",
        "0.1,0.2,0.3",
        "--format",
        "json",
    ]);
    assert_eq!(output.status.code(), Some(0), "{}", stderr_text(&output));
    let report = stdout_json(&output);
    assert_eq!(report["config"]["word"], serde_json::json!([1, -1]));
    let trajectory = report["trajectory"].as_array().unwrap();
    assert_eq!(trajectory.len(), 3);
    let first = trajectory[0].as_array().unwrap();
    let last = trajectory[2].as_array().unwrap();
    for (a, b) in first.iter().zip(last) {
        assert!((a.as_f64().unwrap() - b.as_f64().unwrap()).abs() < 1e-12);
    }
}

#[test]
fn orbit_rejects_out_of_range_letters() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_action(dir.path(), "pair.json", &demo_pair());
    let output = run(&["orbit", input.to_str().unwrap(), "--word", "9"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_text(&output).contains("out of range"));
}

#[test]
fn orbit_rejects_unparsable_words_and_starts() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_action(dir.path(), "pair.json", &demo_pair());
    let word = run(&["orbit", input.to_str().unwrap(), "--word", "1,x"]);
    assert_eq!(word.status.code(), Some(2));
    assert!(stderr_text(&word).contains("invalid word entry"));
    let start = run(&["orbit", input.to_str().unwrap(), "--word", "1", "--start", "0,0"]);
    assert_eq!(start.status.code(), Some(2));
    assert!(stderr_text(&start).contains("3 coordinates"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_action(dir.path(), "pair.json", &demo_pair());
    let path = input.to_str().unwrap();
    for args in [
        vec!["normal-form", path],
        vec!["construct", path],
        vec!["verify-free", path, "--box", "1", "--seed", "5"],
        vec!["orbit", path, "--word", "1,2,-1"],
    ] {
        let first = run(&args);
        let second = run(&args);
        assert_eq!(first.status.code(), Some(0), "{}", stderr_text(&first));
        assert_eq!(first.stdout, second.stdout, "args: {args:?}");
    }
}

#[test]
fn demo_runs_clean_in_both_formats() {
    let text = run(&["demo"]);
    assert_eq!(text.status.code(), Some(0), "{}", stderr_text(&text));
    let rendered = String::from_utf8(text.stdout).unwrap();
    assert!(rendered.contains("lifted analytic family"));
    assert!(rendered.contains("disguised"));

    let json = run(&["demo", "--format", "json"]);
    assert_eq!(json.status.code(), Some(0), "{}", stderr_text(&json));
    let report = stdout_json(&json);
    assert_eq!(report["lifted_family"]["action_laws_hold"], true);
    assert_eq!(report["lifted_family"]["scan_clear"], true);
    assert_eq!(report["infinite_image"]["spectral"]["status"], "verified_on_box");
    assert_eq!(report["disguised_pair"]["result"]["a"], 6);
}
