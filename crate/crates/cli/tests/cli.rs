use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heisenberg-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn chain_preset_reaches_z10() {
    let out = lab(&["chain", "--preset", "triangle-2-5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["d"], 10);
    assert_eq!(v["passed"], true);
    assert_eq!(
        v["result"]["report"]["c_squared"],
        serde_json::json!({"num": 1, "den": 2})
    );
}

#[test]
fn violated_hypothesis_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"command": "transfer", "group": [10],
            "lattice": {"kind": "finite", "generators": [{"x": [1], "omega": [0]}, {"x": [0], "omega": [2]}]},
            "subgroup": [[2]]}"#,
    )
    .unwrap();
    let out = lab(&["transfer", "sample", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["hypothesis"], "(i)");
    assert_eq!(v["hypothesis_name"], "lattice_in_strip");
    assert!(!out.stderr.is_empty());
}

#[test]
fn transfer_presets_succeed_in_both_modes() {
    for mode in ["sample", "periodize"] {
        let out = lab(&["transfer", mode, "--preset", "finite-separable"]);
        assert_eq!(out.status.code(), Some(0), "{mode}");
        assert!(
            json(&out)["result"]["report"]["wr_residual_after"]
                .as_f64()
                .unwrap()
                < 1e-9
        );
    }
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["finite-verify", "--preset", "finite-separable"][..],
        &[
            "approx",
            "sweep",
            "--preset",
            "triangle-2-5",
            "--d",
            "16,32",
            "--no-timing",
        ][..],
        &["nc-mul", "--preset", "finite-separable"][..],
    ] {
        let a = lab(args);
        let b = lab(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn floats_round_trip_through_json() {
    let out = lab(&["finite-verify", "--preset", "finite-separable"]);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let v = json(&out);
    let a = v["result"]["frame"]["A_opt"].as_f64().unwrap();
    assert!(text.contains(&format!("{a:.16e}")));
    let reparsed: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(
        reparsed["result"]["frame"]["A_opt"]
            .as_f64()
            .unwrap()
            .to_bits(),
        a.to_bits()
    );
}

#[test]
fn sweep_csv_has_header_and_rows() {
    let out = lab(&[
        "approx",
        "sweep",
        "--preset",
        "triangle-2-5",
        "--d",
        "16,64",
        "--no-timing",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "d,distance_upper,proxy_opnorm,neumann_iters,wall_ms,distance_tail,proxy_dim,error"
    );
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("16,"));
}

#[test]
fn csv_for_a_nested_report_is_rejected() {
    let out = lab(&[
        "--format",
        "csv",
        "finite-verify",
        "--preset",
        "finite-separable",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn rational_step_far_from_theta_exits_3() {
    let out = lab(&[
        "approx",
        "rational-step",
        "--preset",
        "irrational-theta",
        "--theta-tilde",
        "1/10",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(json(&out)["result"][0]["error"]
        .as_str()
        .unwrap()
        .contains("too far"));
    assert_eq!(json(&out)["result"][0]["exit_code"], 3);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(lab(&["--frobnicate"]).status.code(), Some(1));
    assert_eq!(lab(&["chain", "--preset", "nope"]).status.code(), Some(1));
    assert_eq!(lab(&["chain"]).status.code(), Some(1));
    assert_eq!(lab(&["reproduce", "--only", "12"]).status.code(), Some(1));
    assert_eq!(lab(&["--help"]).status.code(), Some(0));
}

#[test]
fn unknown_config_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("typo.json");
    std::fs::write(&path, r#"{"group": [10], "lattise": {}}"#).unwrap();
    let out = lab(&["finite-verify", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("norms.json");
    let out = lab(&[
        "norms",
        "--preset",
        "finite-separable",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "norms");
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_heisenberg-lab"))
        .args(["norms", "--preset", "finite-separable"])
        .env("HEISENBERG_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
