//! End-to-end checks of the installed-style binary: exit codes, JSON
//! round-trips through files, and byte-for-byte determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const POLE: &str = r#"{"rank":1,"lead":-1,"coeffs":[[[[1.0,0.0]]]]}"#;
const TWO_PI_CUBED: f64 = 62.012_553_360_599_63;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loopform"))
        .args(args)
        .output()
        .expect("binary must spawn")
}

fn tmp(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout must be JSON")
}

#[test]
fn coeffs_sphere_is_null_and_byte_deterministic() {
    let args = ["coeffs", "--kernel", "sphere", "--nmax", "4", "--mmax", "4"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout, "repeated runs must agree");

    let v = json(&first);
    for row in v["a"].as_array().unwrap() {
        for entry in row.as_array().unwrap() {
            assert!(entry[0].as_f64().unwrap().abs() <= 1e-12);
            assert!(entry[1].as_f64().unwrap().abs() <= 1e-12);
        }
    }

    let out_path = tmp("sphere.json");
    let with_out = run(&[
        "coeffs",
        "--kernel",
        "sphere",
        "--nmax",
        "4",
        "--mmax",
        "4",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(with_out.status.success());
    assert_eq!(fs::read(&out_path).unwrap(), first.stdout);
}

#[test]
fn pair_routes_agree_on_the_torus_pole() {
    let f = tmp("pole.json");
    fs::write(&f, POLE).unwrap();
    let f = f.to_str().unwrap();

    let series = json(&run(&[
        "pair", "--kernel", "torus", "--tau", "0,1", "--f1", f, "--f2", f,
    ]));
    assert_eq!(series["method"], "series");
    let sv = series["value"].as_f64().unwrap();
    assert!(
        (sv - TWO_PI_CUBED).abs() / TWO_PI_CUBED < 1e-6,
        "series {sv}"
    );

    let quad = json(&run(&[
        "pair",
        "--kernel",
        "torus",
        "--tau",
        "0,1",
        "--f1",
        f,
        "--f2",
        f,
        "--method",
        "quadrature",
    ]));
    assert_eq!(quad["method"], "quadrature");
    let qv = quad["value"].as_f64().unwrap();
    assert!(
        (qv - sv).abs() / sv.abs() < 1e-8,
        "routes differ: {sv} vs {qv}"
    );
}

#[test]
fn quadrature_bytes_do_not_depend_on_thread_count() {
    let f = tmp("pole-threads.json");
    fs::write(&f, POLE).unwrap();
    let args = [
        "pair",
        "--kernel",
        "torus",
        "--tau",
        "0,1",
        "--f1",
        f.to_str().unwrap(),
        "--f2",
        f.to_str().unwrap(),
        "--method",
        "quadrature",
    ];
    let single = Command::new(env!("CARGO_BIN_EXE_loopform"))
        .args(args)
        .env("LOOPFORM_THREADS", "1")
        .output()
        .unwrap();
    let several = Command::new(env!("CARGO_BIN_EXE_loopform"))
        .args(args)
        .env("LOOPFORM_THREADS", "3")
        .output()
        .unwrap();
    assert!(single.status.success() && several.status.success());
    assert_eq!(single.stdout, several.stdout);
}

#[test]
fn reduce_reports_the_constant_torus_field() {
    let f = tmp("pole-reduce.json");
    fs::write(&f, POLE).unwrap();

    let v = json(&run(&[
        "reduce",
        "--kernel",
        "torus",
        "--tau",
        "0,1",
        "--f1",
        f.to_str().unwrap(),
        "--target",
        "0.5,0.5",
        "--target",
        "-0.52,0.46",
    ]));
    let values = v["values"].as_array().unwrap();
    assert_eq!(values.len(), 2);
    let pi_sq = std::f64::consts::PI.powi(2);
    for val in values {
        let entry = &val[0][0];
        assert!(entry[0].as_f64().unwrap().abs() < 1e-9);
        assert!((entry[1].as_f64().unwrap() + pi_sq).abs() < 1e-9);
    }
}

#[test]
fn verify_moments_suite_prints_pass_lines() {
    let out = run(&["verify", "moments"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS moments/orthogonality"), "got: {text}");
    assert!(text.contains("1 of 1 checks passed"), "got: {text}");
}

#[test]
fn verify_torus_suite_accepts_a_modulus() {
    let out = run(&["verify", "torus-const", "--tau", "0.3,1.2"]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("3 of 3 checks passed"), "got: {text}");
}

#[test]
fn pair_method_both_reports_the_deviation() {
    let f = tmp("pole-both.json");
    fs::write(&f, POLE).unwrap();
    let out = run(&[
        "pair",
        "--kernel",
        "torus",
        "--tau",
        "0,1",
        "--f1",
        f.to_str().unwrap(),
        "--f2",
        f.to_str().unwrap(),
        "--method",
        "both",
    ]);
    let v = json(&out);
    let s = v["series"]["value"].as_f64().unwrap();
    let q = v["quadrature"]["value"].as_f64().unwrap();
    let dev = v["relative_deviation"].as_f64().unwrap();
    assert!((s - TWO_PI_CUBED).abs() < 1e-9, "series {s}");
    assert!((q - TWO_PI_CUBED).abs() < 1e-9, "quadrature {q}");
    assert!(dev < 1e-10, "deviation {dev}");
}

#[test]
fn coeffs_prints_a_decay_summary() {
    let out = run(&["coeffs", "--kernel", "sphere", "--nmax", "2", "--mmax", "2"]);
    assert!(out.status.success());
    let note = String::from_utf8(out.stderr).unwrap();
    assert!(
        note.contains("decay: all window entries are zero"),
        "got: {note}"
    );

    let out = run(&[
        "coeffs", "--kernel", "torus", "--nmax", "2", "--mmax", "2", "--tol", "1e-8",
    ]);
    assert!(out.status.success());
    let note = String::from_utf8(out.stderr).unwrap();
    assert!(note.contains("decay: peak |a|"), "got: {note}");
}

#[test]
fn reduce_with_second_bump_reports_agreement() {
    let f = tmp("pole-bump2.json");
    fs::write(&f, POLE).unwrap();
    let out = run(&[
        "reduce",
        "--kernel",
        "torus",
        "--tau",
        "0,1",
        "--f1",
        f.to_str().unwrap(),
        "--target",
        "0.5,0.5",
        "--bump",
        "0.12,0.35",
        "--bump2",
        "0.2,0.42",
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let note = String::from_utf8(out.stderr).unwrap();
    assert!(note.contains("bump agreement"), "got: {note}");
}

#[test]
fn bad_inputs_exit_two() {
    let good = tmp("pole-errors.json");
    fs::write(&good, POLE).unwrap();
    let good = good.to_str().unwrap();
    let malformed = tmp("broken.json");
    fs::write(&malformed, "{oops").unwrap();
    let rank2 = tmp("rank2.json");
    fs::write(
        &rank2,
        r#"{"rank":2,"lead":0,"coeffs":[[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]]}"#,
    )
    .unwrap();

    let cases: Vec<Vec<&str>> = vec![
        vec!["coeffs", "--kernel", "nosuch"],
        vec!["coeffs", "--kernel", "torus", "--tau", "0,-1"],
        vec!["coeffs", "--kernel", "synthetic"],
        vec!["coeffs", "--kernel", "synthetic", "--table", "missing.json"],
        vec!["pair", "--f1", good, "--f2", good, "--method", "nosuch"],
        vec!["pair", "--f1", malformed.to_str().unwrap(), "--f2", good],
        vec!["pair", "--f1", good, "--f2", rank2.to_str().unwrap()],
        vec!["pair", "--f1", good], // clap: missing --f2
        vec!["reduce", "--f1", good, "--target", "0.2,0.2"], // target on the annulus
        vec!["verify", "nosuch"],
    ];
    for case in &cases {
        let out = run(case);
        assert_eq!(
            out.status.code(),
            Some(2),
            "case {case:?}: stderr {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty(), "case {case:?} must explain itself");
    }
}

#[test]
fn numeric_overflow_exits_one() {
    let huge = tmp("huge.json");
    fs::write(
        &huge,
        r#"{"nmin":0,"mmin":0,"a":[[[1.0e308,0.0]]],"rho_z":0.5,"rho_t":0.5,"samples":4}"#,
    )
    .unwrap();
    let f = tmp("pole-overflow.json");
    fs::write(&f, POLE).unwrap();

    let out = run(&[
        "pair",
        "--kernel",
        "synthetic",
        "--table",
        huge.to_str().unwrap(),
        "--f1",
        f.to_str().unwrap(),
        "--f2",
        f.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}
