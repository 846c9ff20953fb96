use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_diffract"));
    c.env_remove("DIFFRACT_OUT_DIR");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().arg("--out-dir").arg(dir).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read(dir: &Path, file: &str) -> String {
    std::fs::read_to_string(dir.join(file)).unwrap_or_else(|e| panic!("{file}: {e}"))
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn json(dir: &Path, file: &str) -> serde_json::Value {
    serde_json::from_str(&read(dir, file)).unwrap()
}

fn path(dir: &Path, file: &str) -> String {
    dir.join(file).display().to_string()
}

#[test]
fn thue_morse_word_of_order_two() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["generate", "tm", "--n", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        read(dir.path(), "tm.csv"),
        "position,weight_re,weight_im\n0,1.0,0.0\n1,-1.0,0.0\n2,-1.0,0.0\n3,1.0,0.0\n"
    );
    let m = json(dir.path(), "tm.manifest.json");
    assert_eq!(m["schema_version"], 1);
    assert_eq!(m["command"], "generate tm");
    assert_eq!(m["details"]["point_count"], 4);
    assert_eq!(m["details"]["volume"], 4.0);
}

#[test]
fn fibonacci_patch_positions_are_exact() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(dir.path(), &["generate", "fibonacci", "--range", "0", "5"])), 0);
    let r = rows(&read(dir.path(), "fibonacci.csv"));
    let ab: Vec<(&str, &str)> = r.iter().map(|row| (row[3].as_str(), row[4].as_str())).collect();
    // 0, τ, 1+τ, 1+2τ.
    assert_eq!(ab, vec![("0", "0"), ("0", "1"), ("1", "1"), ("1", "2")]);
}

#[test]
fn bernoulli_with_certain_plus_sign() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["generate", "bernoulli", "--p", "1", "--n", "4", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    let r = rows(&read(dir.path(), "bernoulli.csv"));
    assert_eq!(r.len(), 4);
    assert!(r.iter().all(|row| row[1] == "1.0"));
    assert_eq!(json(dir.path(), "bernoulli.manifest.json")["seeds"], serde_json::json!([7]));
}

#[test]
fn invalid_parameters_exit_with_usage_status() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["generate", "bernoulli", "--p", "2", "--n", "4", "--seed", "7"][..],
        &["generate", "tm"],
        &["generate", "tm", "--n", "40"],
        &["generate", "fibonacci", "--range", "5", "0"],
        &["generate", "crystal", "--radius", "3", "--basis", "1,0;0,0"],
        &["analytic", "fibonacci", "--kmin", "3", "--kmax", "1"],
        &["analytic", "tm-distribution", "--N", "0"],
        &["estimate", "periodogram", "--comb", "missing.csv"],
        &["frobnicate"],
    ] {
        let o = run(dir.path(), args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn fibonacci_spectrum_peaks_at_origin() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["analytic", "fibonacci", "--kmax", "20", "--threshold-frac", "0.001"]);
    assert_eq!(code(&o), 0);
    let r = rows(&read(dir.path(), "fibonacci-spectrum.csv"));
    let parsed: Vec<(f64, f64)> = r.iter().map(|x| (x[0].parse().unwrap(), x[1].parse().unwrap())).collect();
    let max = parsed.iter().copied().fold((0.0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    assert_eq!(max.0, 0.0);
    assert!((max.1 - 0.5236).abs() < 5e-5);
    assert!(parsed.iter().all(|&(k, i)| (0.0..=20.0).contains(&k) && i >= 0.001 * max.1));
}

#[test]
fn rudin_shapiro_density_is_one() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(dir.path(), &["analytic", "rs"])), 0);
    let r = rows(&read(dir.path(), "rs-spectrum.csv"));
    assert_eq!(r.len(), 101);
    assert!(r.iter().all(|row| row[1] == "1.0"));
}

#[test]
fn thue_morse_distribution_is_normalized() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(dir.path(), &["analytic", "tm-distribution", "--N", "16"])), 0);
    let f: Vec<f64> = rows(&read(dir.path(), "tm-distribution.csv"))
        .iter()
        .map(|r| r[1].parse().unwrap())
        .collect();
    assert!(f.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(f[0], 0.0);
    assert!((f.last().unwrap() - 1.0).abs() <= 1e-3);
    let m = json(dir.path(), "tm-distribution.manifest.json");
    assert!(m["details"]["max_discrepancy"].as_f64().unwrap() <= 1e-3);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn comparing_a_file_with_itself() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["analytic", "random-fibonacci", "--kmin", "0.1", "--cells", "50"])), 0);
    let f = path(d, "random-fibonacci-spectrum.csv");
    let o = run(d, &["compare", "--estimate", &f, "--reference", &f, "--tolerance", "0"]);
    assert_eq!(code(&o), 0);
    let report = json(d, "compare.json");
    assert_eq!(report["value"], 0.0);
    assert_eq!(report["pass"], true);
    assert_eq!(report["tolerance"], 0.0);
}

#[test]
fn malformed_or_missing_input_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    std::fs::write(d.join("bad.csv"), "k,value\n1,abc\n").unwrap();
    std::fs::write(d.join("wide.csv"), "k,value,x\n1,2,3\n").unwrap();
    std::fs::write(d.join("unsorted.csv"), "k,value\n1,1\n0,1\n").unwrap();
    assert_eq!(code(&run(d, &["analytic", "rs"])), 0);
    let good = path(d, "rs-spectrum.csv");
    for bad in ["bad.csv", "wide.csv", "unsorted.csv", "nothing-here.csv"] {
        let o = run(d, &["compare", "--estimate", &path(d, bad), "--reference", &good]);
        assert_eq!(code(&o), 2, "{bad}");
    }
}

#[test]
fn violated_tolerance_exits_with_one() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    std::fs::write(d.join("est.csv"), "k,value\n0.25,1.1\n0.5,1.0\n").unwrap();
    assert_eq!(code(&run(d, &["analytic", "rs", "--points", "5"])), 0);
    let args = ["compare", "--estimate", &path(d, "est.csv"), "--reference", &path(d, "rs-spectrum.csv")];
    let o = run(d, &[&args[..], &["--tolerance", "0.01"]].concat());
    assert_eq!(code(&o), 1);
    let report = json(d, "compare.json");
    assert_eq!(report["pass"], false);
    assert!((report["value"].as_f64().unwrap() - 0.05).abs() < 1e-12);
    let o = run(d, &[&args[..], &["--metric", "maxrel", "--tolerance", "0.11"]].concat());
    assert_eq!(code(&o), 0);
    let report = json(d, "compare.json");
    assert!((report["value"].as_f64().unwrap() - 0.1).abs() < 1e-12);
}

#[test]
fn fibonacci_patch_matches_analytic_peaks() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["generate", "fibonacci", "--range", "-10000", "10000"])), 0);
    assert_eq!(code(&run(d, &["analytic", "fibonacci", "--threshold-frac", "0.01"])), 0);
    let o = run(
        d,
        &[
            "estimate", "periodogram", "--comb", &path(d, "fibonacci.csv"), "--mode", "bragg",
            "--at-file", &path(d, "fibonacci-spectrum.csv"),
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m = json(d, "fibonacci-periodogram.manifest.json");
    assert_eq!(m["details"]["volume"], 20000.0);
    assert_eq!(m["details"]["normalization"], "volume_squared");
    let o = run(
        d,
        &[
            "compare", "--estimate", &path(d, "fibonacci-periodogram.csv"),
            "--reference", &path(d, "fibonacci-spectrum.csv"),
            "--metric", "maxrel", "--tolerance", "0.02",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn bernoulli_ensemble_is_flat() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["--name", "flat", "analytic", "rs", "--points", "2"])), 0);
    let o = run(
        d,
        &[
            "estimate", "ensemble", "bernoulli", "--len", "4096", "--realizations", "20",
            "--seed", "3", "--cells", "8", "--oversample", "64",
        ],
    );
    assert_eq!(code(&o), 0);
    let o = run(
        d,
        &[
            "compare", "--estimate", &path(d, "bernoulli-ensemble.csv"),
            "--reference", &path(d, "flat.csv"), "--tolerance", "0.05",
        ],
    );
    assert_eq!(code(&o), 0);
}

#[test]
fn manifest_records_digests_and_replays() {
    let dir = TempDir::new().unwrap();
    let again = TempDir::new().unwrap();
    let d = dir.path();
    let o = run(d, &["generate", "random-fibonacci", "--count", "300", "--seed", "99"]);
    assert_eq!(code(&o), 0);
    let m = json(d, "random-fibonacci.manifest.json");
    assert_eq!(m["seeds"], serde_json::json!([99]));
    assert_eq!(m["argv"], serde_json::json!(["generate", "random-fibonacci", "--count", "300", "--seed", "99"]));
    let digest = m["outputs"][0]["sha256"].as_str().unwrap().to_string();
    assert_eq!(digest.len(), 64);

    let manifest = path(d, "random-fibonacci.manifest.json");
    let o = run(again.path(), &["replay", &manifest]);
    assert_eq!(code(&o), 0);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["reproduced"], true);
    assert_eq!(read(d, "random-fibonacci.csv"), read(again.path(), "random-fibonacci.csv"));

    // A tampered output no longer matches its digest.
    std::fs::write(d.join("random-fibonacci.csv"), "position,weight_re,weight_im\n").unwrap();
    let mut tampered = m.clone();
    tampered["outputs"][0]["sha256"] = serde_json::json!("0".repeat(64));
    std::fs::write(d.join("tampered.json"), tampered.to_string()).unwrap();
    let o = run(again.path(), &["replay", &path(d, "tampered.json")]);
    assert_eq!(code(&o), 1);
}

#[test]
fn output_directory_from_environment() {
    let dir = TempDir::new().unwrap();
    let o = bin()
        .env("DIFFRACT_OUT_DIR", dir.path())
        .args(["generate", "rs", "--range", "-3", "4"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let r = rows(&read(dir.path(), "rs.csv"));
    assert_eq!(r.len(), 8);
    assert_eq!(r[0][0], "-3");
}

#[test]
fn thread_count_does_not_change_results() {
    let one = TempDir::new().unwrap();
    let many = TempDir::new().unwrap();
    let args = [
        "estimate", "ensemble", "rs-bernoulli", "--p", "0.25", "--len", "2048",
        "--realizations", "8", "--seed", "5", "--cells", "16", "--oversample", "8",
    ];
    assert_eq!(code(&run(one.path(), &[&["--threads", "1"][..], &args].concat())), 0);
    assert_eq!(code(&run(many.path(), &[&["--threads", "3"][..], &args].concat())), 0);
    assert_eq!(
        read(one.path(), "rs-bernoulli-ensemble.csv"),
        read(many.path(), "rs-bernoulli-ensemble.csv")
    );
}
