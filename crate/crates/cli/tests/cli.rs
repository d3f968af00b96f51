//! End-to-end behaviour of the `nmlg` binary: golden outputs, exit codes,
//! seeding and thread-count independence.

use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use std::io::Write;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nmlg"));
    cmd.env_remove("NMLG_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("UTF-8 output")
}

/// Compares stdout with `tests/golden/<name>`; `UPDATE_GOLDEN=1` rewrites it.
/// Runs inside the golden directory so recorded input paths stay relative.
fn golden(name: &str, args: &[&str]) {
    let o = bin().args(args).current_dir(golden_dir()).output().expect("binary runs");
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    let path = golden_dir().join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &o.stdout).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(stdout(&o), want, "golden mismatch for {name}");
}

fn sequence_path() -> String {
    golden_dir().join("sequence.txt").display().to_string()
}

#[test]
fn golden_atten() {
    golden("atten_fixed_variance_n2.json", &["atten", "--n", "2", "--alpha", "1", "--sigma-min", "1", "--sigma-max", "1"]);
    golden("atten_two_parameter_n2.json", &["atten", "--n", "2", "--alpha", "1", "--sigma-min", "0.5", "--sigma-max", "2"]);
    golden("atten_approx_n100.json", &["atten", "--n", "100", "--sigma-min", "0.5", "--sigma-max", "2", "--method", "approx"]);
    golden(
        "atten_quadrature_n1.json",
        &["atten", "--n", "1", "--sigma-max", "2.718281828459045", "--method", "quadrature", "--rel-tol", "1e-10"],
    );
    golden(
        "atten_mc_n4.json",
        &["atten", "--n", "4", "--sigma-min", "0.5", "--sigma-max", "2", "--method", "mc", "--samples", "20000", "--seed", "5"],
    );
    golden("atten_human.txt", &["atten", "--n", "3", "--alpha", "2", "--sigma-min", "0.5", "--sigma-max", "2", "--format", "human"]);
    golden("atten_overflow.json", &["atten", "--n", "4", "--alpha", "1e300", "--sigma-min", "1e-300", "--sigma-max", "1"]);
}

#[test]
fn golden_scan() {
    golden("scan_singleton.csv", &["scan", "--alpha", "0", "--n-min", "1", "--n-max", "64", "--format", "csv"]);
    golden(
        "scan_two_parameter_log2.csv",
        &["scan", "--sigma-min", "0.5", "--sigma-max", "2", "--n-min", "1", "--n-max", "65536", "--scale", "log2", "--format", "csv"],
    );
    golden("scan_fixed_variance.json", &["scan", "--n-min", "1", "--n-max", "4"]);
}

#[test]
fn golden_sequence_commands() {
    golden("mle.json", &["mle", "--alpha", "2", "--sigma-min", "0.1", "--sigma-max", "5", "sequence.txt"]);
    golden(
        "logq.json",
        &["logq", "--alpha", "2", "--sigma-min", "0.1", "--sigma-max", "5", "--mu", "0", "--sigma", "1", "sequence.txt"],
    );
}

#[test]
fn golden_envelope_and_in() {
    golden("envelope.csv", &["envelope", "--sigma-min", "0.5", "--sigma-max", "2", "--points", "9", "--format", "csv"]);
    golden("in_n10.json", &["in", "--n", "10"]);
    golden("in_n10_mc.human", &["in", "--n", "10", "--samples", "20000", "--seed", "3", "--format", "human"]);
    golden("verify_atten1d.csv", &["verify", "--only", "atten1d", "--format", "csv"]);
}

#[test]
fn scan_csv_header_is_fixed() {
    let o = run(&["scan", "--n-max", "3", "--format", "csv"]);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("n,exact,approx,t1,t2,t3,i_n,exact_over_n,exact_over_sqrt_n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn json_output_follows_schema() {
    let o = run(&["atten", "--n", "5", "--sigma-min", "0.5", "--sigma-max", "2", "--method", "mc", "--samples", "10000"]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let result = &doc["result"];
    assert!(result["attenuation"].is_number());
    assert!(result["log_attenuation"].is_number());
    assert_eq!(result["method"], "monte_carlo");
    assert!(result["std_error"].is_number());
    for r in ["r1", "r2", "r3"] {
        assert!(result["regions"][r].is_number());
    }
    assert!(doc["checks"].is_null());
    assert_eq!(doc["config"]["command"], "atten");
    assert_eq!(doc["config"]["seed"], 0);

    let o = run(&["atten", "--n", "4", "--alpha", "1e300", "--sigma-min", "1e-300"]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["result"]["attenuation"], "inf");
    assert!(doc["result"]["log_attenuation"].is_number());
}

#[test]
fn structured_numbers_round_trip() {
    let o = run(&["atten", "--n", "7", "--alpha", "0.3", "--sigma-min", "0.7", "--sigma-max", "3.1"]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let printed = doc["result"]["attenuation"].as_f64().unwrap();
    let class = nmlg_core::GaussianClass::new(0.3, 0.7, 3.1).unwrap();
    let exact = nmlg_core::atten_exact(7, &class).unwrap().value;
    assert_eq!(printed.to_bits(), exact.to_bits());
}

#[test]
fn invalid_parameters_exit_2_without_stdout() {
    let cases: &[&[&str]] = &[
        &["atten", "--n", "2", "--alpha", "-1"],
        &["atten", "--n", "2", "--sigma-min", "2", "--sigma-max", "1"],
        &["atten", "--n", "0"],
        &["atten", "--n", "1", "--method", "approx"],
        &["atten", "--n", "3", "--method", "quadrature"],
        &["atten", "--n", "1", "--method", "quadrature", "--rel-tol", "1e-13"],
        &["atten", "--n", "1", "--method", "mc"],
        &["atten", "--n", "3", "--method", "mc", "--samples", "100"],
        &["atten", "--n", "2", "--method", "simpson"],
        &["atten"],
        &["frobnicate"],
        &["scan", "--n-min", "5", "--n-max", "2"],
        &["scan", "--n-min", "5", "--n-max", "7", "--scale", "log2"],
        &["envelope", "--points", "1"],
        &["envelope", "--from", "2", "--to", "1"],
        &["in", "--n", "0"],
        &["in", "--n", "1", "--samples", "20000"],
        &["verify", "--only", "in", "--n", "1"],
        &["verify", "--samples", "5"],
        &["mle", "/nonexistent/sequence.txt"],
        &["logq", "--mu", "0"],
        &["atten", "--n", "2", "--threads", "0"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty(), "{args:?} wrote to stdout");
        assert!(!o.stderr.is_empty(), "{args:?} gave no diagnostic");
    }
}

#[test]
fn regret_outside_class_exits_2() {
    let o = run(&["logq", "--sigma-min", "0.5", "--sigma-max", "2", "--mu", "0", "--sigma", "3", &sequence_path()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn bad_sequences_exit_2() {
    for text in ["1\n2\nthree\n", "# nothing\n", "1\nnan\n"] {
        let mut child = bin()
            .args(["mle", "-"])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .unwrap();
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
        let o = child.wait_with_output().unwrap();
        assert_eq!(o.status.code(), Some(2), "{text:?}");
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn quadrature_failure_exits_3_without_stdout() {
    let o = run(&[
        "atten", "--n", "1", "--alpha", "1e8", "--sigma-min", "1e-8", "--sigma-max", "1e8", "--method", "quadrature",
        "--rel-tol", "2e-12",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
}

#[test]
fn failed_checks_exit_3_with_report() {
    let o = run(&["verify", "--only", "growth"]);
    assert_eq!(o.status.code(), Some(3));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let failed: Vec<&str> = doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["two_parameter"]);
    assert_eq!(doc["result"]["failed"], 1);
}

#[test]
fn stdin_matches_file_input() {
    let seq = sequence_path();
    let from_file = run(&["mle", "--alpha", "2", &seq]);
    let mut child = bin()
        .args(["mle", "--alpha", "2"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&std::fs::read(&seq).unwrap()).unwrap();
    let o = child.wait_with_output().unwrap();
    let a: serde_json::Value = serde_json::from_slice(&from_file.stdout).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(a["result"], b["result"]);
    assert_eq!(b["config"]["input"], "-");
}

#[test]
fn seed_flag_env_and_determinism() {
    let args = ["atten", "--n", "6", "--sigma-min", "0.5", "--sigma-max", "2", "--method", "mc", "--samples", "30000"];
    let with_flag = run(&[&args[..], &["--seed", "42"]].concat());
    let with_env = bin().args(args).env("NMLG_SEED", "42").output().unwrap();
    let again = bin().args(args).env("NMLG_SEED", "42").output().unwrap();
    let other = bin().args(args).env("NMLG_SEED", "43").output().unwrap();
    assert_eq!(with_flag.stdout, with_env.stdout);
    assert_eq!(with_env.stdout, again.stdout);
    assert_ne!(with_env.stdout, other.stdout);
    let bad = bin().args(args).env("NMLG_SEED", "not-a-number").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_output() {
    let base = ["atten", "--n", "9", "--sigma-min", "0.5", "--sigma-max", "2", "--method", "mc", "--samples", "50000"];
    let one = run(&[&base[..], &["--threads", "1"]].concat());
    let four = run(&[&base[..], &["--threads", "4"]].concat());
    let default = run(&base);
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, default.stdout);

    let verify = ["verify", "--only", "in,mc", "--n", "200", "--samples", "20000"];
    let one = run(&[&verify[..], &["--threads", "1"]].concat());
    let three = run(&[&verify[..], &["--threads", "3"]].concat());
    assert_eq!(one.stdout, three.stdout);
}

#[test]
fn human_mode_uses_six_digits() {
    let o = run(&["atten", "--n", "2", "--format", "human"]);
    let text = stdout(&o);
    assert!(text.contains("attenuation      1.56419\n"), "{text}");
}

#[test]
fn help_exits_0() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verify"));
}
