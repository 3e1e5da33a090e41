use std::path::Path;
use std::process::{Command, Output};

fn mmot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmot"))
        .args(args)
        .env_remove("MMOT_SEED")
        .env_remove("MMOT_JOBS")
        .env_remove("MMOT_FORMAT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes()).records().map(Result::unwrap).collect()
}

#[test]
fn radial_v1_matches_closed_form() {
    let o = mmot(&["radial", "--potential", "v1", "--lambda", "5.196152"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("lambda,mass,r_lambda,c_lambda,M_infty,M_infty_closed_form,rel_err\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 1);
    let rel: f64 = rows[0][6].parse().unwrap();
    assert!(rel < 1e-6, "rel_err {rel}");
}

#[test]
fn radial_json_carries_constants() {
    let o = mmot(&["--format", "json", "radial", "--potential", "v2", "--lambda", "0:4:3"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 3);
    assert!(doc["constants"]["alpha"].as_f64().unwrap() > 0.0);
}

#[test]
fn selftest_is_deterministic_across_worker_counts() {
    let run = |jobs: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_mmot")).arg("selftest").env("MMOT_JOBS", jobs).env("MMOT_SEED", "7").output().unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        stdout(&o)
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    assert_eq!(one, run("1"));
    assert!(one.starts_with("selftest seed=7"));
    assert!(one.lines().last().unwrap().contains("12/12"));
}

#[test]
fn relax_two_dirac() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "rho.json", r#"{"dim": 1, "points": [[0], [1]], "masses": [0.5, 0.5]}"#);
    let o = mmot(&["relax", "--measure", &m, "--cost", "two-level:3,1,2", "--N", "2:4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 3);
    // Two particles split over two sites at distance 1 < cutoff: the pair always pays 3.
    let v2: f64 = rows[0][1].parse().unwrap();
    assert!((v2 - 3.0).abs() < 1e-12, "{v2}");
}

#[test]
fn exact_and_relaxed_agree_on_a_cheap_probability() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "rho.json", r#"{"dim": 1, "points": [[0], [4]], "masses": [0.5, 0.5]}"#);
    let exact = csv_rows(&stdout(&mmot(&["mmot", "--measure", &m, "--cost", "exponential:1", "--N", "2"])));
    let relaxed = csv_rows(&stdout(&mmot(&["relax", "--measure", &m, "--cost", "exponential:1", "--N", "2"])));
    let (a, b): (f64, f64) = (exact[0][1].parse().unwrap(), relaxed[0][1].parse().unwrap());
    assert!(b <= a + 1e-12);
    assert!((a - (-4f64).exp()).abs() < 1e-12);
}

#[test]
fn malformed_json_reports_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "bad.json", "{\n  \"dim\": 1,\n  \"points\": [[0]],\n  \"masses\": [0.5,]\n}\n");
    let o = mmot(&["relax", "--measure", &m, "--cost", "coulomb", "--N", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains(&format!("{m}:4:")), "{}", stderr(&o));
}

#[test]
fn exit_codes() {
    assert_eq!(mmot(&["--help"]).status.code(), Some(0));
    assert_eq!(mmot(&["radial", "--help"]).status.code(), Some(0));
    assert_eq!(mmot(&["--version"]).status.code(), Some(0));
    assert_eq!(mmot(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(mmot(&["radial", "--potential", "v9", "--lambda", "1"]).status.code(), Some(1));
    assert_eq!(mmot(&["radial", "--potential", "v1", "--lambda", "1:x"]).status.code(), Some(1));
    assert_eq!(mmot(&["--jobs", "0", "selftest"]).status.code(), Some(1));
    assert_eq!(mmot(&["relax", "--measure", "/nonexistent.json", "--cost", "coulomb", "--N", "2"]).status.code(), Some(1));
    let w2 = mmot(&["packing", "w2", "--kappa", "2", "--N", "4"]);
    assert!(w2.status.success(), "infeasible rows are reported as empty cells");
    assert!(stdout(&w2).lines().nth(1).unwrap().contains(",,"));
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "rho.json", r#"{"dim": 1, "points": [[0], [1]], "masses": [0.5, 0.5]}"#);
    assert_eq!(mmot(&["sweep", "--measure", &m, "--cost", "coulomb", "--N", "2", "--theta", "1"]).status.code(), Some(2));
}

#[test]
fn require_certified_flags_heuristic_results() {
    let dir = tempfile::tempdir().unwrap();
    // Non-positive-definite 2x2 kernel from a two-level cost: the quadratic program is solved but cannot be certified.
    let pot = write(dir.path(), "v.json", r#"{"grid": {"dim": 1, "nodes": [[0], [1]]}, "values": [1, 1]}"#);
    let args = ["energy", "--potential", &pot, "--cost", "two-level:0,1,0.5", "--lambda", "1"];
    let plain = mmot(&args);
    assert!(plain.status.success(), "{}", stderr(&plain));
    assert!(stdout(&plain).contains("false"));
    let mut strict = vec!["--require-certified"];
    strict.extend(args);
    let o = mmot(&strict);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), stdout(&plain));
}

#[test]
fn dual_small_grid_is_certified() {
    let dir = tempfile::tempdir().unwrap();
    let pot = write(dir.path(), "v.json", r#"{"grid": {"dim": 1, "nodes": [[0], [1], [2]]}, "values": [1, 0.5, 1]}"#);
    let o = mmot(&["--require-certified", "dual", "--potential", &pot, "--cost", "coulomb", "--N", "2:4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    let vals: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(vals.iter().all(|&v| v > 0.0 && v <= 1.0));
    assert!(rows.iter().all(|r| &r[3] == "true"));
}

#[test]
fn packing_counts_and_out_file() {
    let o = mmot(&["packing", "count", "--box", "0,1", "--box", "2,2.5", "--eps", "0.5"]);
    assert_eq!(stdout(&o), "eps,lower,upper\n0.5,5,5\n");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let o = mmot(&["packing", "gamma", "--dim", "1", "--k", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());
    assert_eq!(std::fs::read_to_string(out).unwrap().lines().nth(1).unwrap().split(',').take(3).collect::<Vec<_>>(), ["3", "4", "4"]);
}

#[test]
fn format_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_mmot"))
        .args(["packing", "gamma", "--dim", "1", "--k", "2"])
        .env("MMOT_FORMAT", "json")
        .output()
        .unwrap();
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["rows"][0]["lower"], 3);
}
