use std::process::Command;

use vortexwave::cli_io::{preset, resume, run_simulation, ScenarioConfig, EXIT_CONFIG, EXIT_HALT, EXIT_IO, EXIT_OK};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vortexwave"))
}

#[test]
fn unknown_selector_and_bad_config_exit_with_config_code() {
    let st = bin().args(["verify", "nonsense"]).status().unwrap();
    assert_eq!(st.code(), Some(EXIT_CONFIG));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"schema\": \"vortexwave-config/1\", \"grid\": 3}").unwrap();
    let st = bin().args(["simulate", "--config"]).arg(&path).status().unwrap();
    assert_eq!(st.code(), Some(EXIT_CONFIG));
    let st = bin().args(["simulate", "--preset", "no-such-preset"]).status().unwrap();
    assert_eq!(st.code(), Some(EXIT_CONFIG));
    let st = bin().args(["simulate", "--bogus-flag"]).status().unwrap();
    assert_eq!(st.code(), Some(EXIT_CONFIG));
}

#[test]
fn taylor_failure_halts_with_runtime_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["simulate", "--preset", "taylor-fail", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_HALT));
    let status: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("status.json")).unwrap()).unwrap();
    assert_eq!(status["status"], "taylor_sign_failed");
}

#[test]
fn unwritable_output_exits_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let st = bin()
        .args(["simulate", "--preset", "rest", "--until", "0.1", "--out"])
        .arg(blocker.join("sub"))
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(EXIT_IO));
}

#[test]
fn sweep_writes_csv_and_reports_bracket() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pair.csv");
    let out = bin().args(["sweep-taylor", "--preset", "pair", "--out"]).arg(&csv).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("# schema: vortexwave-taylor-sweep/1"));
    assert_eq!(text.lines().count(), 102);
    assert!(String::from_utf8_lossy(&out.stdout).contains("between"));
}

#[test]
fn config_round_trips_through_json() {
    for name in ["rest", "linear-wave", "pair-longtime", "pair-short", "single-vortex", "taylor-fail"] {
        let c = preset(name).unwrap();
        let back = ScenarioConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
    }
}

#[test]
fn resume_reproduces_an_uninterrupted_run_bit_for_bit() {
    let mut c = preset("pair-short").unwrap();
    c.grid.n = 64;
    let straight = run_simulation(&c, None, Some(0.1)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let first = run_simulation(&c, Some(dir.path()), Some(0.05)).unwrap();
    assert_eq!(first.exit_code(), EXIT_OK);
    let resumed = resume(&dir.path().join("checkpoint.json"), Some(dir.path()), Some(0.1)).unwrap();
    let (a, b) = (straight.final_state.unwrap(), resumed.final_state.unwrap());
    assert_eq!(a.step_index, b.step_index);
    assert_eq!(a.t.to_bits(), b.t.to_bits());
    assert!(a.zeta.iter().zip(&b.zeta).all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
    assert!(a.u.iter().zip(&b.u).all(|(x, y)| x == y));
    assert_eq!(a.vortices.positions, b.vortices.positions);
    let csv = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| l.starts_with("# schema")).count(), 1);
}

#[test]
fn tampered_checkpoint_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let c = preset("rest").unwrap();
    run_simulation(&c, Some(dir.path()), Some(0.1)).unwrap();
    let path = dir.path().join("checkpoint.json");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["config"]["scenario"] = serde_json::Value::from("edited");
    std::fs::write(&path, v.to_string()).unwrap();
    let err = resume(&path, None, Some(0.2)).unwrap_err();
    assert_eq!(err.exit_code(), EXIT_CONFIG);
}
