use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn thermwit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thermwit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn summary(text: &str, key: &str) -> String {
    let prefix = format!("## {key} = ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no summary key {key} in\n{text}"))
        .to_string()
}

fn summary_f64(text: &str, key: &str) -> f64 {
    summary(text, key).parse().unwrap()
}

struct Row {
    t: f64,
    p: f64,
    threshold: f64,
    satisfied: bool,
    fields: usize,
}

fn rows(text: &str) -> Vec<Row> {
    text.lines()
        .skip(2)
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            Row {
                t: f[0].parse().unwrap(),
                p: f[2].parse().unwrap(),
                threshold: f[3].parse().unwrap(),
                satisfied: f[4].parse().unwrap(),
                fields: f.len(),
            }
        })
        .collect()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn dimer_zero_field_transition() {
    let o = thermwit(&["dimer", "--B", "0", "--J", "1", "--grid", "0.5:8:60:lin"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# thermwit-csv v1\nT,Z,p,threshold,satisfied,bound_kind\n"));
    let t = summary_f64(&text, "T_trans");
    assert!((t - 4.0 / 3f64.ln()).abs() < 1e-8);
    assert!((t - 3.64096).abs() < 1e-5);
    let rows = rows(&text);
    assert_eq!(rows.len(), 60);
    for r in &rows {
        assert_eq!(r.fields, 6);
        assert_eq!(r.satisfied, r.p > r.threshold);
        assert_eq!(r.satisfied, r.t < t);
    }
}

#[test]
fn dimer_strong_field_is_not_detected() {
    let o = thermwit(&["dimer", "--B", "5", "--J", "1", "--oracles", "--grid", "0.2:6:30:lin"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(summary(&text, "T_trans"), "NotDetected");
    assert_eq!(summary(&text, "ground"), "|00>");
    assert!(rows(&text).iter().all(|r| !r.satisfied && r.fields == 8));
    // the exact oracle still sees entanglement at low temperature
    let concurrence: f64 = text.lines().nth(3).unwrap().split(',').nth(6).unwrap().parse().unwrap();
    assert!(concurrence > 0.0);
}

#[test]
fn dimer_witness_is_conservative_at_unit_field() {
    let text = stdout(&thermwit(&["dimer", "--B", "1", "--J", "1", "--oracles", "--grid", "1:5:5:lin"]));
    assert_eq!(summary(&text, "witness_below_concurrence"), "true");
    assert!(summary_f64(&text, "T_trans") < summary_f64(&text, "T_concurrence") - 1e-3);
}

#[test]
fn dimer_matrix_check_and_kb_scaling() {
    let a = stdout(&thermwit(&["dimer", "--B", "0.7", "--matrix-check"]));
    assert!(summary(&a, "matrix_check").starts_with("pass"));
    let b = stdout(&thermwit(&["dimer", "--B", "0.7", "--kB", "2"]));
    let ta = summary_f64(&a, "T_trans");
    let tb = summary_f64(&b, "T_trans");
    assert!((ta / tb - 2.0).abs() < 1e-9);
    assert_eq!(summary(&a, "kT_trans"), summary(&b, "kT_trans"));
}

#[test]
fn output_is_deterministic_and_out_matches_stdout() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sweep.csv");
    let args = ["dimer", "--B", "0.3", "--oracles", "--grid", "0.1:10:40:log"];
    let a = stdout(&thermwit(&args));
    let b = stdout(&thermwit(&args));
    assert_eq!(a, b);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", out.to_str().unwrap()]);
    let o = thermwit(&with_out);
    assert!(o.status.success() && o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), a);
}

#[test]
fn toy_closed_forms() {
    let text = stdout(&thermwit(&["toy", "--alpha", "0", "--D", "4", "--eR", "1", "--delta", "1"]));
    let t0 = summary_f64(&text, "T0");
    assert!((t0 - 1.0 / 3f64.ln()).abs() < 1e-12);
    assert!((summary_f64(&text, "T_trans") - t0).abs() < 1e-8);
    assert_eq!(summary(&text, "bound_kind"), "lower_bound");

    let text = stdout(&thermwit(&["toy", "--alpha", "0.5", "--n", "16", "--D", "1000", "--grid", "1:2:2:lin"]));
    assert!((summary_f64(&text, "T_alpha") - 2f64.sqrt()).abs() < 1e-12);
    assert!(text.lines().nth(1).unwrap().ends_with(",Z_gamma,gamma_rel_err"));

    let text = stdout(&thermwit(&["toy", "--alpha", "1", "--n", "16", "--D", "100000", "--grid", "1:2:2:lin"]));
    let one_plus_r = summary_f64(&text, "one_plus_R");
    assert!((one_plus_r - 5.09215229).abs() < 1e-6);
    assert!((summary_f64(&text, "T1_lowT") - one_plus_r).abs() < 1e-9);
    assert!((summary_f64(&text, "T_alpha") - 4.0).abs() < 1e-12);
    let exact = summary_f64(&text, "T1_exact");
    assert!((exact - 1.0 / (one_plus_r / (one_plus_r - 1.0)).ln()).abs() < 1e-9);
}

#[test]
fn toy_argument_errors() {
    assert_eq!(thermwit(&["toy", "--D", "4"]).status.code(), Some(2));
    assert_eq!(thermwit(&["toy", "--eR", "1", "--n", "4"]).status.code(), Some(2));
    assert_eq!(thermwit(&["toy", "--n", "5"]).status.code(), Some(2));
    assert_eq!(thermwit(&["toy", "--eR", "1", "--alpha", "2"]).status.code(), Some(2));
}

#[test]
fn dicke_summary_with_oracles() {
    let text = stdout(&thermwit(&["dicke", "--n", "6", "--oracles", "--grid", "0.1:1:3:lin"]));
    assert_eq!(summary(&text, "bound_kind"), "exact");
    assert!((summary_f64(&text, "one_plus_R") - 3.2).abs() < 1e-12);
    assert!((summary_f64(&text, "als_overlap_sq") - 0.3125).abs() < 1e-9);
    assert!((summary_f64(&text, "one_plus_R_halfcut") - 3.2).abs() < 1e-9);
    assert_eq!(summary(&text, "D"), "64");
}

#[test]
fn graph_chain_thresholds() {
    let dir = TempDir::new().unwrap();
    let edges = write(&dir, "chain.txt", "# 1D chain\n8\n0 1\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n");
    let o = thermwit(&["graph", "--edges", &edges, "--B", "1", "--matrix-check"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!((summary_f64(&text, "T_trans_closed") - 2.2691853).abs() < 1e-6);
    assert!((summary_f64(&text, "T_trans") - 2.2691853).abs() < 1e-6);
    assert!((summary_f64(&text, "P_trans") - (1.0 - 0.5f64.sqrt())).abs() < 1e-12);
    assert!(summary(&text, "matrix_check").starts_with("pass"));
    assert!(text.lines().nth(1).unwrap().ends_with(",flip_probability"));
}

#[test]
fn graph_small_cases_pass_matrix_check() {
    let dir = TempDir::new().unwrap();
    for (name, body) in [("edge.txt", "2\n0 1\n"), ("star.txt", "5\n0 1\n0 2\n0 3\n0 4\n")] {
        let edges = write(&dir, name, body);
        let o = thermwit(&["graph", "--edges", &edges, "--matrix-check", "--eR-per-site", "0.3"]);
        assert!(o.status.success());
        assert_eq!(summary(&stdout(&o), "eR_per_site"), "0.3");
    }
}

#[test]
fn graph_partition_function_never_overflows() {
    let dir = TempDir::new().unwrap();
    let edges = write(&dir, "ring.txt", "12\n0 1\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n7 8\n8 9\n9 10\n10 11\n11 0\n");
    let text = stdout(&thermwit(&["graph", "--edges", &edges, "--grid", "0.001:0.01:3:log"]));
    for line in text.lines().skip(2).filter(|l| !l.starts_with('#')) {
        let z = line.split(',').nth(1).unwrap();
        assert!(!z.contains("inf") && !z.contains("nan"), "{z}");
    }
    let first = text.lines().nth(2).unwrap().split(',').nth(1).unwrap().to_string();
    // ln Z = nB/kT = 12000
    let exponent: f64 = first.split_once('e').unwrap().1.parse().unwrap();
    assert_eq!(exponent, (12_000.0 / std::f64::consts::LN_10).floor());
}

#[test]
fn graph_errors() {
    let dir = TempDir::new().unwrap();
    assert_eq!(thermwit(&["graph", "--edges", "/nonexistent/x.txt"]).status.code(), Some(2));
    let bad = write(&dir, "bad.txt", "3\n0 1 2\n");
    assert_eq!(thermwit(&["graph", "--edges", &bad]).status.code(), Some(2));
    let loop_edge = write(&dir, "loop.txt", "3\n1 1\n");
    assert_eq!(thermwit(&["graph", "--edges", &loop_edge]).status.code(), Some(2));
    let big = write(&dir, "big.txt", "13\n0 1\n");
    assert_eq!(thermwit(&["graph", "--edges", &big, "--matrix-check"]).status.code(), Some(2));
    assert_eq!(thermwit(&["graph"]).status.code(), Some(2));
}

#[test]
fn numeric_and_config_exit_codes() {
    assert_eq!(thermwit(&["dimer", "--B", "4", "--J", "1"]).status.code(), Some(3));
    assert_eq!(thermwit(&["dimer", "--grid", "1:0.5:3:lin"]).status.code(), Some(2));
    assert_eq!(thermwit(&["dimer", "--kB", "-1"]).status.code(), Some(2));
    assert_eq!(thermwit(&["dimer", "--J", "0", "--B", "0"]).status.code(), Some(3));
    assert_eq!(thermwit(&["bogus"]).status.code(), Some(2));
}

#[test]
fn verify_passes_and_is_reproducible() {
    let a = thermwit(&["verify", "--seed", "11"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(stdout(&a), stdout(&thermwit(&["verify", "--seed", "11"])));
    assert!(stdout(&a).lines().all(|l| !l.starts_with("FAIL")));
}

#[test]
fn verify_flags_injected_fault() {
    let o = thermwit(&["verify", "--dicke-scale", "1.02"]);
    assert_eq!(o.status.code(), Some(1));
    let fails: Vec<String> = stdout(&o)
        .lines()
        .filter(|l| l.starts_with("FAIL"))
        .map(String::from)
        .collect();
    assert_eq!(fails.len(), 1);
    assert!(fails[0].contains("dicke_bound_chain"));
}

#[test]
fn config_file_values_and_flag_precedence() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "run.toml", "[run]\ngrid = \"1:3:3:lin\"\n\n[dimer]\nB = 1.0\nJ = 1.0\n");
    let from_file = stdout(&thermwit(&["dimer", "--config", &cfg]));
    assert_eq!(summary(&from_file, "B"), "1");
    assert_eq!(rows(&from_file).len(), 3);
    let flagged = stdout(&thermwit(&["dimer", "--config", &cfg, "--B", "0", "--grid", "1:3:5:lin"]));
    assert_eq!(summary(&flagged, "B"), "0");
    assert_eq!(summary(&flagged, "J"), "1");
    assert_eq!(rows(&flagged).len(), 5);

    let bad = write(&dir, "bad.toml", "[dimer]\nfield = 1.0\n");
    assert_eq!(thermwit(&["dimer", "--config", &bad]).status.code(), Some(2));
    let missing = dir.path().join("none.toml");
    assert_eq!(
        thermwit(&["dimer", "--config", missing.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

fn round_trip(dir: &TempDir, args: &[&str]) {
    let mut first_args = args.to_vec();
    first_args.push("--print-config");
    let first = stdout(&thermwit(&first_args));
    let path = write(dir, "effective.toml", &first);
    let second = stdout(&thermwit(&[args[0], "--config", &path, "--print-config"]));
    assert_eq!(first, second);
    let third_path = write(dir, "again.toml", &second);
    assert_eq!(second, stdout(&thermwit(&[args[0], "--config", &third_path, "--print-config"])));
}

#[test]
fn config_round_trip_is_idempotent() {
    let dir = TempDir::new().unwrap();
    round_trip(&dir, &["dimer", "--B", "0.25", "--kB", "1.5", "--oracles", "--grid", "0.1:4:9:log"]);
    round_trip(&dir, &["toy", "--alpha", "0.5", "--n", "16", "--D", "1000"]);
    round_trip(&dir, &["dicke", "--n", "10", "--k", "3", "--seed", "4"]);
    let edges = write(&dir, "e.txt", "2\n0 1\n");
    round_trip(&dir, &["graph", "--edges", &edges, "--eR-per-site", "0.4"]);
    assert!(Path::new(&edges).exists());
}
