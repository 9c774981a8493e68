//! End-to-end runs of the compiled binary.

use std::process::{Command, Output};

fn dtc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtcoords"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

#[test]
fn act_applies_a_twist() {
    let out = dtc(&[
        "act",
        "--surface",
        "once-punctured-torus",
        "--coords",
        r#"[{"curve":0,"m":"3","t":"1"}]"#,
        "--word",
        "T+0",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        stdout(&out),
        "{\"scope\":\"MF0\",\"entries\":[{\"curve\":0,\"m\":\"3\",\"t\":\"4\"}]}\n"
    );
}

#[test]
fn act_with_an_empty_word_echoes_canonical_coordinates() {
    let out = dtc(&[
        "act",
        "--surface",
        "one-holed-torus",
        "--coords",
        r#"{"scope":"MF","entries":[{"curve":0,"m":"2","t":"-3"},{"curve":1,"m":"0","t":"-4"}]}"#,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    // the measure-zero boundary entry flips to its canonical representative
    assert_eq!(
        stdout(&out),
        "{\"scope\":\"MF\",\"entries\":[{\"curve\":0,\"m\":\"2\",\"t\":\"-3\"},{\"curve\":1,\"m\":\"0\",\"t\":\"4\"}]}\n"
    );
}

#[test]
fn count_matches_the_torus_gcd() {
    for (m, t, expect) in [(2i64, 0i64, 2u64), (6, 4, 2), (5, 3, 1), (0, 7, 7)] {
        let coords = format!(r#"[{{"curve":0,"m":"{m}","t":"{t}"}}]"#);
        let out = dtc(&[
            "count",
            "--surface",
            "once-punctured-torus",
            "--coords",
            &coords,
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        assert_eq!(stdout(&out), format!("{{\"components\":{expect}}}\n"));
    }
}

#[test]
fn count_infers_full_scope_from_a_five_entry_array() {
    // an arc between two boundary curves plus the interior loop it threads
    let out = dtc(&[
        "count",
        "--surface",
        "four-holed-sphere",
        "--coords",
        r#"[{"curve":0,"m":"2","t":"0"},{"curve":1,"m":"1","t":"0"},{"curve":2,"m":"1","t":"0"},{"curve":3,"m":"0","t":"0"},{"curve":4,"m":"0","t":"0"}]"#,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "{\"components\":1}\n");
}

#[test]
fn dilatation_reports_known_growth_rates() {
    let cases = [
        (
            "once-punctured-torus",
            "T+0 M1@0 T-0 M1@0",
            (3.0 + 5.0f64.sqrt()) / 2.0,
        ),
        (
            "four-holed-sphere",
            "T+0 M2@0 T-0 M2@0",
            3.0 + 2.0 * 2.0f64.sqrt(),
        ),
    ];
    for (surface, word, expect) in cases {
        let out = dtc(&["dilatation", "--surface", surface, "--word", word]);
        assert!(out.status.success(), "{}", stderr(&out));
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        let lambda = v["lambda"].as_f64().unwrap();
        assert!(
            (lambda - expect).abs() < 1e-6,
            "{surface}: {lambda} vs {expect}"
        );
        assert_eq!(v["converged"], serde_json::Value::Bool(true));
    }
}

#[test]
fn dilatation_rejects_a_word_that_changes_the_chart() {
    // a single second move leaves the boundary curves attached differently
    let out = dtc(&[
        "dilatation",
        "--surface",
        "four-holed-sphere",
        "--word",
        "M2@0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stderr(&out)).unwrap();
    assert_eq!(v["error"]["kind"], "dilatation");
}

#[test]
fn scan_output_is_deterministic_and_led_by_the_golden_word() {
    let args = [
        "scan",
        "--surface",
        "four-holed-sphere",
        "--max-len",
        "3",
        "--seed",
        "5",
    ];
    let a = dtc(&args);
    let b = dtc(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let first = stdout(&a).lines().next().unwrap().to_string();
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["word"], "T+0 M2@0 T-0 M2@0");
    let expect = 3.0 + 2.0 * 2.0f64.sqrt();
    assert!((v["lambda"].as_f64().unwrap() - expect).abs() < 1e-6);
}

#[test]
fn scan_requires_a_preset() {
    let inline = r#"{"genus":1,"boundary":0,"punctures":1,"pants":1,"interior":[[{"pants":0,"slot":0},{"pants":0,"slot":1}]],"punctures_at":[{"pants":0,"slot":2}]}"#;
    let out = dtc(&["scan", "--surface", inline]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stderr(&out)).unwrap();
    assert_eq!(v["error"]["kind"], "usage");
}

#[test]
fn verify_relations_passes_on_the_presets() {
    let out = dtc(&[
        "verify-relations",
        "--surface",
        "once-punctured-torus",
        "--suite",
        "braid",
        "--seed",
        "7",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["passed"], serde_json::Value::Bool(true));
    assert_eq!(v["suites"][0]["suite"], "braid");
    assert_eq!(v["suites"][0]["failures"], 0);

    let out = dtc(&[
        "verify-relations",
        "--surface",
        "four-holed-sphere",
        "--samples",
        "6",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["passed"], serde_json::Value::Bool(true));
    assert_eq!(v["suites"].as_array().unwrap().len(), 4);
}

#[test]
fn unknown_suites_are_rejected() {
    let out = dtc(&[
        "verify-relations",
        "--surface",
        "once-punctured-torus",
        "--suite",
        "telepathy",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stderr(&out)).unwrap();
    assert_eq!(v["error"]["kind"], "parse");
}

#[test]
fn presets_lists_the_builtin_surfaces() {
    let out = dtc(&["presets"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let names: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "once-punctured-torus",
            "one-holed-torus",
            "four-holed-sphere",
            "genus-two-closed"
        ]
    );
}

#[test]
fn surfaces_and_coordinates_load_from_files_and_out_writes_one() {
    let dir = tempfile::tempdir().unwrap();
    let surface_path = dir.path().join("surface.json");
    let coords_path = dir.path().join("coords.json");
    let out_path = dir.path().join("result.json");

    // the once-punctured torus, written out by hand
    std::fs::write(
        &surface_path,
        r#"{"genus":1,"boundary":0,"punctures":1,"pants":1,"interior":[[{"pants":0,"slot":0},{"pants":0,"slot":1}]],"punctures_at":[{"pants":0,"slot":2}]}"#,
    )
    .unwrap();
    std::fs::write(&coords_path, r#"[{"curve":0,"m":"6","t":"4"}]"#).unwrap();

    let direct = dtc(&[
        "count",
        "--surface",
        surface_path.to_str().unwrap(),
        "--coords",
        coords_path.to_str().unwrap(),
    ]);
    assert!(direct.status.success(), "{}", stderr(&direct));
    assert_eq!(stdout(&direct), "{\"components\":2}\n");

    let filed = dtc(&[
        "count",
        "--surface",
        surface_path.to_str().unwrap(),
        "--coords",
        coords_path.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(filed.status.success(), "{}", stderr(&filed));
    assert!(stdout(&filed).is_empty());
    assert_eq!(std::fs::read(&out_path).unwrap(), direct.stdout);
}

#[test]
fn bad_inputs_exit_with_structured_errors() {
    // a rational that does not parse
    let out = dtc(&[
        "count",
        "--surface",
        "once-punctured-torus",
        "--coords",
        r#"[{"curve":0,"m":"x","t":"0"}]"#,
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stderr(&out)).unwrap();
    assert_eq!(v["error"]["kind"], "coords");

    // a surface that is neither a preset nor a readable file
    let out = dtc(&["presets"]);
    assert!(out.status.success());
    let out = dtc(&[
        "count",
        "--surface",
        "no-such-surface",
        "--coords",
        r#"[{"curve":0,"m":"1","t":"0"}]"#,
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stderr(&out)).unwrap();
    assert_eq!(v["error"]["kind"], "usage");

    // a word referencing a curve the surface does not have
    let out = dtc(&[
        "act",
        "--surface",
        "once-punctured-torus",
        "--coords",
        r#"[{"curve":0,"m":"1","t":"0"}]"#,
        "--word",
        "T+9",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stderr(&out)).unwrap();
    assert_eq!(v["error"]["kind"], "parse");
    assert!(v["error"]["message"]
        .as_str()
        .unwrap()
        .contains("unknown curve 9"));

    // an entry array whose length matches no scope
    let out = dtc(&[
        "count",
        "--surface",
        "four-holed-sphere",
        "--coords",
        r#"[{"curve":0,"m":"2","t":"0"},{"curve":1,"m":"1","t":"0"}]"#,
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stderr(&out)).unwrap();
    assert_eq!(v["error"]["kind"], "usage");
}
