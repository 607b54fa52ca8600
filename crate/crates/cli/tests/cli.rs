use std::path::PathBuf;
use std::process::{Command, Output};

fn gal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gal")).args(args).env_remove("GAL_THREADS").output().expect("spawn gal")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_lines(o: &Output) -> Vec<String> {
    stdout(o).lines().skip(2).map(str::to_string).collect()
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn cf_sqrt2_quotients() {
    let o = gal(&["cf", "--theta", "sqrt:2", "--terms", "4"]);
    assert!(o.status.success());
    let a: Vec<String> = data_lines(&o).iter().map(|l| l.split(',').nth(1).unwrap().to_string()).collect();
    assert_eq!(a, ["1", "2", "2", "2"]);
}

#[test]
fn cf_json_has_manifest_then_rows() {
    let o = gal(&["cf", "--theta", "sqrt:2", "--terms", "4", "--json"]);
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("{\"manifest\""));
    assert!(lines[4].contains("\"q_re\":12"));
}

#[test]
fn sieve_annulus_of_ten() {
    let o = gal(&["sieve", "--x", "10", "--annulus"]);
    assert!(o.status.success());
    let row = &data_lines(&o)[0];
    assert_eq!(row.split(',').nth(1), Some("4"));
}

#[test]
fn header_is_a_single_comment_line() {
    let o = gal(&["sieve", "--x", "1e3"]);
    let out = stdout(&o);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("# gal "));
    assert!(lines.all(|l| !l.starts_with('#')));
}

#[test]
fn exit_codes() {
    let o = gal(&["sieve", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(gal(&["nonsense"]).status.code(), Some(1));
    assert_eq!(gal(&["cf", "--theta", "sqrt:", "--terms", "3"]).status.code(), Some(1));
    assert_eq!(gal(&["equidist", "--delta", "0.7"]).status.code(), Some(1));
    let o = gal(&["sigma-count", "--theta", "sqrt:2", "--z", "1e9", "--d1", "0.1", "--d2", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(gal(&["--help"]).status.code(), Some(0));
}

#[test]
fn help_documents_theta_grammar() {
    let o = gal(&["--help"]);
    assert!(stdout(&o).contains("'sqrt:' UINT"));
}

#[test]
fn config_file_with_flag_precedence() {
    let path = tmp("exp.conf");
    std::fs::write(&path, "# desk run\ntheta = sqrt:2 + i*sqrt:3\nx = 5000\ndelta = 0.2\n").unwrap();
    let o = gal(&["equidist", "--config", path.to_str().unwrap(), "--delta", "0.5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.lines().next().unwrap().contains("x=5000 delta=0.5"));
    // δ = 1/2 makes the ratio exactly one
    assert!(data_lines(&o)[0].ends_with(",1.00000000000000e0"));
    std::fs::write(&path, "speed = 3\n").unwrap();
    assert_eq!(gal(&["equidist", "--config", path.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn out_file_matches_stdout_and_runs_repeat() {
    let args = ["sweep", "--theta", "e + i*pi", "--xs", "2000,8000", "--deltas", "0.05,0.1,0.2", "--seed", "4"];
    let a = gal(&args);
    let b = gal(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(data_lines(&a).len(), 6);
    let path = tmp("sweep.csv");
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    assert!(gal(&with_out).status.success());
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
}

#[test]
fn thread_count_does_not_change_integer_output() {
    let args = ["equidist", "--x", "20000", "--delta", "0.1"];
    let one = Command::new(env!("CARGO_BIN_EXE_gal")).args(args).env("GAL_THREADS", "1").output().unwrap();
    let two = gal(&[&args[..], &["--threads", "2"]].concat());
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn bounds_report_kinds() {
    for kind in ["linear", "counting", "gtheta"] {
        let o = gal(&["bounds-report", "--kind", kind, "--theta", "sqrt:2 + i*sqrt:3", "--convergents", "4", "--z-max", "2e4"]);
        assert!(o.status.success(), "{kind}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!data_lines(&o).is_empty());
    }
    let o = gal(&["bounds-report", "--kind", "cs", "--theta", "e + i*pi", "--x", "64", "--coeffs", "ones"]);
    assert!(o.status.success());
    let fitted: f64 = data_lines(&o)[0].split(',').nth(3).unwrap().parse().unwrap();
    assert!(fitted <= 1.0 + 1e-9);
}

#[test]
fn type_checks_vanish_at_half() {
    let o = gal(&["type-checks", "--x", "5000", "--delta", "0.5", "--seed", "9"]);
    assert!(o.status.success());
    for l in data_lines(&o) {
        assert_eq!(l.split(',').nth(1), Some("0.00000000000000e0"));
    }
}

#[test]
fn corollary_rows_are_sorted_and_verified() {
    let o = gal(&["corollary", "--theta", "sqrt:2 + i*sqrt:3", "--gamma", "0.25", "--x-max", "20000"]);
    assert!(o.status.success());
    let rows = data_lines(&o);
    assert!(!rows.is_empty());
    let norms: Vec<u64> = rows.iter().map(|r| r.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!(norms.windows(2).all(|w| w[0] <= w[1]));
    assert!(rows.iter().all(|r| r.ends_with(",true")));
}
