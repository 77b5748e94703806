use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pivotsweep::experiments::circular_angle_error_deg;
use pivotsweep_cli::files::{parse_csv, Manifest, ResultFile};
use serde_json::Value;
use tempfile::TempDir;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pivotsweep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read_result(p: &Path) -> ResultFile {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn sine_pair_registers_to_the_manifest_angle() {
    let d = TempDir::new().unwrap();
    let (x, y, m, r) = (path(&d, "x.csv"), path(&d, "y.csv"), path(&d, "m.json"), path(&d, "r.json"));
    // seed 1 lands on the generated rotation rather than its half-turn twin
    ok(&cli(&[
        "gen", "pair", "--kind", "sine", "--seed", "1", "--out-x", s(&x), "--out-y", s(&y),
        "--manifest", s(&m),
    ]));
    ok(&cli(&["register", "--cloud-x", s(&x), "--cloud-y", s(&y), "--delta", "0.01", "--out", s(&r)]));
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(&m).unwrap()).unwrap();
    let result = read_result(&r);
    let err = circular_angle_error_deg(result.theta, manifest.expected_theta.unwrap());
    assert!(err < 1.0, "angle error {err}");
    assert_eq!(manifest.correspondences.len(), 200);
}

#[test]
fn same_file_matches_every_point() {
    let d = TempDir::new().unwrap();
    let (x, r) = (path(&d, "x.json"), path(&d, "r.json"));
    ok(&cli(&["gen", "disk", "--n", "40", "--seed", "3", "--out", s(&x)]));
    ok(&cli(&["register", "--cloud-x", s(&x), "--cloud-y", s(&x), "--delta", "1e-6", "--out", s(&r)]));
    let result = read_result(&r);
    assert_eq!(result.k_total, 40);
    assert_eq!(result.pairs.len(), 40);
    assert!(circular_angle_error_deg(result.theta, 0.0) < 1e-6);
    assert!(result.delta_ok && result.injective);
}

#[test]
fn duplicate_rows_are_rejected_with_line_number() {
    let d = TempDir::new().unwrap();
    let x = path(&d, "x.csv");
    fs::write(&x, "x,y\n0,0\n1,0\n0,1\n1,0\n").unwrap();
    let out = cli(&["register", "--cloud-x", s(&x), "--cloud-y", s(&x), "--delta", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate point at line 5"));
}

#[test]
fn bad_flags_and_missing_files_exit_1() {
    assert_eq!(cli(&["register", "--delta", "0.1"]).status.code(), Some(1));
    let out = cli(&["register", "--cloud-x", "/nonexistent.csv", "--cloud-y", "/nonexistent.csv", "--delta", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = cli(&["gen", "sine", "--n", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
}

#[test]
fn strict_delta_exits_2_and_lax_delta_warns() {
    let d = TempDir::new().unwrap();
    let (x, y) = (path(&d, "tri.csv"), path(&d, "seg.csv"));
    let l = 2.0 * 3f64.sqrt();
    fs::write(&x, format!("x,y\n0,0\n{l:e},0\n{:e},{:e}\n", l / 2.0, 3.0)).unwrap();
    fs::write(&y, format!("x,y\n0,0\n{l:e},0\n")).unwrap();
    let out = cli(&["register", "--cloud-x", s(&x), "--cloud-y", s(&y), "--delta", "2", "--strict-delta"]);
    assert_eq!(out.status.code(), Some(2));

    let out = cli(&["register", "--cloud-x", s(&x), "--cloud-y", s(&y), "--delta", "2"]);
    ok(&out);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["energy"], 0);
    assert_eq!(v["delta_ok"], false);
    assert_eq!(v["injective"], false);
}

#[test]
fn generation_is_byte_identical_per_seed() {
    let d = TempDir::new().unwrap();
    let run = |tag: &str, seed: &str| {
        let (x, y, m) = (path(&d, &format!("x{tag}.csv")), path(&d, &format!("y{tag}.csv")), path(&d, &format!("m{tag}.json")));
        ok(&cli(&["gen", "pair", "--kind", "ellipse", "--seed", seed, "--out-x", s(&x), "--out-y", s(&y), "--manifest", s(&m)]));
        (fs::read(x).unwrap(), fs::read(y).unwrap(), fs::read(m).unwrap())
    };
    let a = run("a", "7");
    assert_eq!(a, run("b", "7"));
    assert_ne!(a.1, run("c", "8").1);
    // default construction: 200 curve points against 118 survivors plus 50 outliers
    assert_eq!(parse_csv(std::str::from_utf8(&a.0).unwrap()).unwrap().len(), 200);
    assert_eq!(parse_csv(std::str::from_utf8(&a.1).unwrap()).unwrap().len(), 168);
}

#[test]
fn gen_sine_writes_n_rows() {
    let out = cli(&["gen", "sine", "--n", "200"]);
    ok(&out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 201);
    assert_eq!(text.lines().next(), Some("x,y"));
}

#[test]
fn csv_and_json_round_trip_through_the_cli() {
    let d = TempDir::new().unwrap();
    let (a, b) = (path(&d, "a.csv"), path(&d, "a.json"));
    ok(&cli(&["gen", "ellipse", "--n", "50", "--outliers", "5", "--seed", "2", "--out", s(&a)]));
    ok(&cli(&["gen", "ellipse", "--n", "50", "--outliers", "5", "--seed", "2", "--out", s(&b)]));
    let from_csv = pivotsweep_cli::files::read_cloud(&a).unwrap();
    let from_json = pivotsweep_cli::files::read_cloud(&b).unwrap();
    assert_eq!(from_csv.points(), from_json.points());
    assert_eq!(pivotsweep_cli::files::to_csv(&from_csv), fs::read_to_string(&a).unwrap());
}

#[test]
fn overlay_svg_has_one_marker_per_point() {
    let d = TempDir::new().unwrap();
    let (x, y, svg) = (path(&d, "x.csv"), path(&d, "y.csv"), path(&d, "o.svg"));
    ok(&cli(&["gen", "pair", "--kind", "disk", "--n", "30", "--k", "12", "--seed", "4", "--out-x", s(&x), "--out-y", s(&y)]));
    ok(&cli(&["register", "--cloud-x", s(&x), "--cloud-y", s(&y), "--delta", "0.01", "--svg", s(&svg)]));
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<?xml") && text.trim_end().ends_with("</svg>"));
    assert_eq!(text.matches("<circle").count(), 30 + 12);
    assert!(text.matches(r#"class="matched""#).count() >= 2);
    assert_eq!(text.matches(r#"class="legend""#).count(), 3);
}

#[test]
fn thread_count_only_changes_runtime() {
    let d = TempDir::new().unwrap();
    let (x, y) = (path(&d, "x.csv"), path(&d, "y.csv"));
    ok(&cli(&["gen", "pair", "--kind", "disk", "--n", "40", "--seed", "5", "--out-x", s(&x), "--out-y", s(&y)]));
    let results: Vec<Value> = ["1", "2", "8"]
        .iter()
        .map(|t| {
            let r = path(&d, &format!("r{t}.json"));
            ok(&cli(&[
                "register", "--cloud-x", s(&x), "--cloud-y", s(&y), "--delta", "0.02", "--all-solutions",
                "--threads", t, "--out", s(&r),
            ]));
            let mut v: Value = serde_json::from_str(&fs::read_to_string(&r).unwrap()).unwrap();
            v.as_object_mut().unwrap().remove("runtime_ms");
            v
        })
        .collect();
    assert_eq!(results[0], results[1]);
    assert_eq!(results[0], results[2]);

    let bench = |t: &str| {
        let out = cli(&["bench", "subset", "--pool", "40", "--cloud-size", "20", "--k", "5,20", "--trials", "2", "--threads", t]);
        ok(&out);
        out.stdout
    };
    assert_eq!(bench("1"), bench("3"));
}

#[test]
fn bench_subset_writes_report_and_chart() {
    let d = TempDir::new().unwrap();
    let (r, p) = (path(&d, "r.json"), path(&d, "p.svg"));
    ok(&cli(&[
        "bench", "subset", "--pool", "60", "--cloud-size", "30", "--k", "3,10,30", "--trials", "3",
        "--seed", "1", "--out", s(&r), "--plot", s(&p),
    ]));
    let v: Value = serde_json::from_str(&fs::read_to_string(&r).unwrap()).unwrap();
    assert_eq!(v["success_rate"].as_array().unwrap().len(), 3);
    assert_eq!(v["success_rate"][2], 1.0);
    assert_eq!(fs::read_to_string(&p).unwrap().matches("<circle").count(), 3);
}

#[test]
fn bench_classify_scaled_run() {
    let d = TempDir::new().unwrap();
    let (r, p) = (path(&d, "r.json"), path(&d, "p.svg"));
    ok(&cli(&[
        "bench", "classify", "--clouds", "5", "--cloud-size", "40", "--subset-min", "20",
        "--subset-max", "40", "--trials", "10", "--out", s(&r), "--plot", s(&p),
    ]));
    let v: Value = serde_json::from_str(&fs::read_to_string(&r).unwrap()).unwrap();
    assert_eq!(v["accuracy"], 1.0);
    assert_eq!(v["records"].as_array().unwrap().len(), 10);
    assert_eq!(fs::read_to_string(&p).unwrap().matches(r#"class="bar""#).count(), 10);
}

#[test]
fn zero_trials_give_valid_empty_reports() {
    for kind in ["classify", "subset"] {
        let out = cli(&["bench", kind, "--trials", "0"]);
        ok(&out);
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert!(v["records"].as_array().unwrap().is_empty(), "{kind}");
    }
}

#[test]
#[ignore = "full-size subset sweep, several minutes"]
fn bench_subset_defaults_reach_full_rate() {
    let out = cli(&["bench", "subset"]);
    ok(&out);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let ks = v["k_values"].as_array().unwrap();
    for (k, rate) in ks.iter().zip(v["success_rate"].as_array().unwrap()) {
        if k.as_u64().unwrap() >= 80 {
            assert_eq!(rate.as_f64(), Some(1.0), "k = {k}");
        }
    }
}
