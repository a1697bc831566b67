use std::process::{Command, Output};

use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dmod-deform"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn run_reports_every_section() {
    let out = cli(&[
        "run",
        "--a",
        "1",
        "--b",
        "1",
        "--order",
        "3",
        "--check-bound",
        "4",
    ]);
    let v = json(&out);
    assert_eq!(v["params"]["delta"], "31/1");
    assert_eq!(v["params"]["regime"], "a_nonzero");
    assert_eq!(v["ext1"]["dims"], serde_json::json!([4, 2, 5, 5, 5]));
    assert_eq!(v["cohomology"]["hh_dims"], serde_json::json!([1, 2, 1]));
    assert_eq!(
        v["cup"]["coefficients"]["t1*t2"],
        serde_json::json!(["1/1"])
    );
    assert_eq!(v["hull"]["relations"], serde_json::json!(["t1*t2 - t2*t1"]));
    assert_eq!(v["hull"]["order_verified"], 3);
    assert_eq!(v["family"]["exponential_order"], 3);
    assert!(v.get("timings").is_none());
}

#[test]
fn reports_are_byte_stable() {
    let args = [
        "hull",
        "--a",
        "-1/2",
        "--b",
        "3",
        "--order",
        "3",
        "--check-bound",
        "4",
    ];
    let first = cli(&args);
    let second = cli(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn order_two_has_no_relations() {
    let v = json(&cli(&[
        "hull",
        "--a",
        "0",
        "--b",
        "1",
        "--order",
        "2",
        "--check-bound",
        "4",
    ]));
    assert_eq!(v["hull"]["relations"], serde_json::json!([]));
    assert_eq!(v["params"]["regime"], "a_zero");
}

#[test]
fn check_deformation_contrasts_free_and_commutative() {
    let v = json(&cli(&[
        "check-deformation",
        "--a",
        "0",
        "--b",
        "1",
        "--order",
        "3",
        "--check-bound",
        "4",
    ]));
    assert_eq!(v["checks"]["tangent"]["ok"], true);
    assert_eq!(v["checks"]["commutator"]["ok"], true);
    assert_eq!(v["checks"]["free"]["ok"], false);
    let defect = &v["checks"]["free"]["violations"][0]["defect"];
    let words: Vec<&String> = defect.as_object().unwrap().keys().collect();
    assert_eq!(words, ["t1*t2", "t2*t1"]);
}

#[test]
fn text_format() {
    let out = cli(&["cup", "--a", "1", "--b", "1", "--format", "text"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("cup.coefficients.t1*t2 = [1/1]\n"));
    assert!(text.contains("cup.coefficients.t2*t1 = [-1/1]\n"));
    assert!(text.contains("params.delta = 31/1\n"));
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["ext", "--a", "0", "--b", "0"]).status.code(), Some(2));
    assert_eq!(
        cli(&["ext", "--a", "-3", "--b", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        cli(&["ext", "--a", "1", "--b", "1", "--degree-cap", "10"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        cli(&["ext", "--a", "1/0", "--b", "1"]).status.code(),
        Some(1)
    );
    assert_eq!(cli(&["ext", "--a", "1"]).status.code(), Some(1));
    assert_eq!(
        cli(&["frobnicate", "--a", "1", "--b", "1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        cli(&["run", "--a", "1", "--b", "1", "--order", "0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
}

#[test]
fn corpus_entries_keep_order() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curves.txt");
    std::fs::write(&path, "# a b N\n0 1 2\n1 x 2\n1 1 2\n").unwrap();
    let v = json(&cli(&["cohomology", "--corpus", path.to_str().unwrap()]));
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 3);
    assert_eq!(entries[0]["report"]["params"]["regime"], "a_zero");
    assert_eq!(entries[1]["error"]["code"], "usage");
    assert_eq!(
        entries[2]["report"]["cohomology"]["hh_dims"],
        serde_json::json!([1, 2, 1])
    );

    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "").unwrap();
    let v = json(&cli(&["run", "--corpus", empty.to_str().unwrap()]));
    assert_eq!(v["entries"], serde_json::json!([]));

    let missing = cli(&["run", "--corpus", dir.path().join("nope").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(1));
}
