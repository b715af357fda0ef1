//! End-to-end tests of the xtax binary: verbs, exit codes, file round-trips,
//! and byte-stability of the JSON envelopes.

use std::path::Path;
use std::process::{Command, Output};

fn xtax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xtax")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn rho_prints_reduced_quarters() {
    let out = xtax(&["rho", "G3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "3/4\n");
    assert_eq!(stdout(&xtax(&["rho", "J6"])), "3/2\n");
    assert_eq!(stdout(&xtax(&["rho", "H4(1)"])), "1\n");
}

#[test]
fn census_cross_checks_ranks() {
    let out = xtax(&["census", "J1 + J3 + G2 + H2(-1)"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("n = 8"));
    assert!(text.contains("j1 = 1  j_odd = 1"));
    assert!(text.contains("formula = 3, computed = 3"));
}

#[test]
fn decide_exit_codes_partition_the_verdicts() {
    // Consistent -> 0.
    assert_eq!(code(&xtax(&["decide", "J3", "--m", "1"])), 0);
    assert_eq!(code(&xtax(&["decide", "J1*5", "--m", "0"])), 0);
    // Inconsistent -> 1, citing the Gamma_2 bound.
    let out = xtax(&["decide", "G2*4", "--m", "3"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("Gamma_2-only bound"));
    // Unknown -> 2.
    assert_eq!(code(&xtax(&["decide", "G2 + H4(2)", "--m", "1"])), 2);
    // Input error -> 3, including usage errors from the argument parser.
    assert_eq!(code(&xtax(&["decide", "Q9", "--m", "1"])), 3);
    assert_eq!(code(&xtax(&["decide", "J3"])), 3);
    assert_eq!(code(&xtax(&["decide", "J3", "--m", "1", "--rank-b", "2"])), 3);
    assert_eq!(code(&xtax(&["frobnicate"])), 3);
    assert_eq!(code(&xtax(&["--help"])), 0);
}

#[test]
fn rank_b_must_be_even() {
    let out = xtax(&["decide", "J3", "--rank-b", "3"]);
    assert_eq!(code(&out), 3);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("even"));
    // Even rank is sugar for m = rank/2.
    assert_eq!(code(&xtax(&["decide", "J3", "--rank-b", "2"])), 0);
}

#[test]
fn solve_verify_round_trip() {
    let dir = tempdir();
    let x_path = dir.join("x.json");
    let cert_path = dir.join("cert.json");
    let out = xtax(&[
        "solve",
        "J5 + G4 + H6(2)",
        "--m",
        "3",
        "--out",
        x_path.to_str().unwrap(),
        "--cert",
        cert_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(x_path.exists() && cert_path.exists());

    // The solution verifies against H_2(-1)^3.
    let b_path = dir.join("b.json");
    let b = xtax_core::CfcSpec::h2_power(3).materialize();
    std::fs::write(&b_path, b.to_json()).unwrap();
    let out = xtax(&[
        "verify",
        "J5 + G4 + H6(2)",
        "--x",
        x_path.to_str().unwrap(),
        "--b",
        b_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "verified: true\n");

    // A perturbed solution is rejected with exit 1: for the J3 witness,
    // bumping the (0,0) entry by one shifts the product's (0,1) entry.
    let x3_path = dir.join("x3.json");
    let out = xtax(&["solve", "J3", "--m", "1", "--out", x3_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let mut x = xtax_core::DenseMatrix::from_json(&std::fs::read_to_string(&x3_path).unwrap()).unwrap();
    x.set(0, 0, x.get(0, 0) + &xtax_core::GaussianRational::one());
    let bad_path = dir.join("bad.json");
    std::fs::write(&bad_path, x.to_json()).unwrap();
    let b1_path = dir.join("h2.json");
    std::fs::write(&b1_path, xtax_core::CfcSpec::h2_power(1).materialize().to_json()).unwrap();
    let out = xtax(&[
        "verify",
        "J3",
        "--x",
        bad_path.to_str().unwrap(),
        "--b",
        b1_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out), "verified: false\n");
}

#[test]
fn solve_b_round_trip() {
    let dir = tempdir();
    let b_path = dir.join("b.json");
    let b = xtax_core::DenseMatrix::from_str_rows(&[
        &["0", "2", "0"],
        &["-2", "0", "1"],
        &["0", "-1", "0"],
    ])
    .unwrap();
    std::fs::write(&b_path, b.to_json()).unwrap();
    let x_path = dir.join("x.json");
    let out = xtax(&[
        "solve-b",
        "J3",
        "--b",
        b_path.to_str().unwrap(),
        "--out",
        x_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let out = xtax(&[
        "verify",
        "J3",
        "--x",
        x_path.to_str().unwrap(),
        "--b",
        b_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    // Rank 2 exceeds 2*floor(rho(J2)) = 0: inconsistent, exit 1.
    let out = xtax(&["solve-b", "J2", "--b", b_path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);

    // Non-skew B is an input error.
    let sym_path = dir.join("sym.json");
    std::fs::write(&sym_path, xtax_core::DenseMatrix::identity(2).to_json()).unwrap();
    assert_eq!(code(&xtax(&["solve-b", "J3", "--b", sym_path.to_str().unwrap()])), 3);
}

#[test]
fn max_rank_values_and_unknown() {
    assert_eq!(stdout(&xtax(&["max-rank", "G2*4"])), "4\n");
    assert_eq!(code(&xtax(&["max-rank", "G2*4"])), 0);
    let out = xtax(&["max-rank", "J3 + G1*4"]);
    assert_eq!(code(&out), 2);
    assert_eq!(stdout(&out), "unknown (upper bound 4)\n");
    assert_eq!(stdout(&xtax(&["max-rank", ""])), "0\n");
}

#[test]
fn json_output_is_byte_stable() {
    for args in [
        vec!["rho", "G3", "--json"],
        vec!["census", "J3 + H6(2)", "--json"],
        vec!["decide", "G2*4", "--m", "3", "--json"],
        vec!["solve", "J5 + G4 + H6(2)", "--m", "3", "--json"],
        vec!["max-rank", "G2 + H4(2)", "--json"],
    ] {
        let a = xtax(&args);
        let b = xtax(&args);
        assert_eq!(stdout(&a), stdout(&b), "unstable output for {args:?}");
        assert_eq!(code(&a), code(&b));
        let parsed: serde_json::Value = serde_json::from_str(stdout(&a).trim()).unwrap();
        assert!(parsed.get("command").is_some());
    }
}

#[test]
fn solve_json_envelope_carries_certificate() {
    let out = xtax(&["solve", "J3", "--m", "1", "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["certificate"]["source"], "J3");
    assert_eq!(v["certificate"]["target"], "H2(-1)");
    assert_eq!(v["certificate"]["steps"][0]["paper_ref"], "Lemma 5.1(iv)");
    let sol = &v["solution"];
    assert_eq!(sol["rows"], 3);
    assert_eq!(sol["cols"], 2);
}

fn tempdir() -> std::path::PathBuf {
    let base = std::env::temp_dir().join(format!("xtax-cli-test-{}", std::process::id()));
    if !Path::new(&base).exists() {
        std::fs::create_dir_all(&base).unwrap();
    }
    base
}
