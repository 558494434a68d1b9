use assert_cmd::Command;
use serde_json::Value;

fn zastava() -> Command {
    let mut c = Command::cargo_bin("zastava").unwrap();
    c.env_remove("ZASTAVA_JOBS");
    c
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let out = zastava().args(args).output().unwrap();
    let code = out.status.code().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, v)
}

#[test]
fn walls_off() {
    let (code, v) = run_json(&["walls", "--n", "2", "--zeta", "1,-2", "--mode", "affine"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["verdict"], "off walls");
    let (_, v) = run_json(&["walls", "--zeta", "-1,1"]);
    assert_eq!(v["result"]["verdict"], "on walls");
}

#[test]
fn poisson_suite_exit_zero() {
    let (code, v) = run_json(&["verify", "poisson", "--n", "3", "--d", "0,1,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["ok"], true);
    assert!(v["result"]["entries"].as_array().unwrap().len() > 10);
}

#[test]
fn character_matches_closed_form() {
    let (code, v) = run_json(&["character", "--n", "2", "--d", "0,1", "--trunc", "6"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["closed_form_matches"], true);
    assert_eq!(v["result"]["constant_term"], 1);
}

#[test]
fn failing_suite_exits_one() {
    // the printed affine SL(2) relation fails under both readings
    let (code, v) = run_json(&["verify", "examples"]);
    assert_eq!(code, 1);
    assert_eq!(v["ok"], false);
}

#[test]
fn bad_input_exits_two() {
    let out = zastava().args(["verify", "poisson", "--n", "3", "--d", "0,1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = zastava().args(["verify", "quantum", "--d", "1,1,1,1,1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("size limit"));
    let out = zastava().args(["walls", "--mode", "sideways", "--zeta", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn singular_example_commands() {
    let (code, v) = run_json(&["moment", "--example"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["cokernel_dim"], 1);
    let (_, v) = run_json(&["stability", "--example", "--zeta", "0,-1,2"]);
    assert_eq!(v["result"]["stable"], false);
    assert_eq!(v["result"]["costable"], false);
    assert_eq!(v["result"]["zeta_stability"], "stable");
    let (code, v) = run_json(&["collapse", "--sample", "--d", "2,1,1", "--seed", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["moment_preserved"], true);
}

#[test]
fn rep_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (_, sample) = run_json(&["moment", "--sample", "--d", "1,1", "--seed", "9"]);
    assert_eq!(sample["result"]["vanishes"], true);
    let rep = serde_json::json!({
        "n": 3, "d": [0, 1, 1], "field": "Q", "variant": "cyclic",
        "A": [[], [["1"]], [["1"]]],
        "B": [[[]], [["0"]], []],
        "p": [[], ["1"], ["0"]],
        "q": [[], ["0"], ["1"]]
    });
    let path = dir.path().join("rep.json");
    std::fs::write(&path, rep.to_string()).unwrap();
    let (code, v) = run_json(&["moment", "--rep", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["result"]["cokernel_dim"], 1);
}

#[test]
fn config_file_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"n": 2, "d": [0, 2], "trunc": 3}"#).unwrap();
    let (code, v) = run_json(&["character", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["config"]["d"], serde_json::json!([0, 2]));
    assert_eq!(v["result"]["by_degree"].as_array().unwrap().len(), 4);
    let (_, v) = run_json(&["character", "--config", path.to_str().unwrap(), "--trunc", "5"]);
    assert_eq!(v["result"]["by_degree"].as_array().unwrap().len(), 6);
}

#[test]
fn text_is_a_projection() {
    let out = zastava().args(["strata", "--d", "0,2", "--format", "text"]).output().unwrap();
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("result.count: 4"));
}

#[test]
fn identical_output_across_jobs() {
    let cmds: Vec<Vec<&str>> = vec![
        vec!["verify", "poisson", "--d", "0,1,1"],
        vec!["verify", "quantum", "--d", "0,1", "--max-index", "2"],
        vec!["verify", "yangian", "--d", "0,1", "--trunc", "3"],
        vec!["verify", "jacobi", "--d", "1,1"],
        vec!["verify", "etale", "--d", "0,2", "--points", "3"],
        vec!["character", "--d", "0,1", "--trunc", "4", "--pbw"],
        vec!["stability", "--example", "--zeta", "0,-1,2"],
        vec!["walls", "--zeta", "1,-2,1"],
        vec!["strata", "--d", "1,1"],
        vec!["dimbound", "--d", "2,2,1"],
        vec!["moment", "--sample", "--d", "1,2", "--seed", "3"],
        vec!["collapse", "--example"],
        vec!["spectral-pair", "--d", "2"],
    ];
    for c in cmds {
        let one = zastava().args(&c).args(["--jobs", "1"]).output().unwrap();
        let four = zastava().args(&c).env("ZASTAVA_JOBS", "4").output().unwrap();
        assert_eq!(one.status.code(), four.status.code(), "{c:?}");
        assert!(!one.stdout.is_empty(), "{c:?}");
        assert_eq!(one.stdout, four.stdout, "{c:?}");
    }
}
