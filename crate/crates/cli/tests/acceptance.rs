//! End-to-end acceptance runs. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails. Randomized runs go through the binary so
//! that their manifests can be replayed.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use diffract_core::analytic::{
    crystal_diffraction, fibonacci_intensity, model_set_spectrum, tm_distribution_with,
    tm_exponential_sum, tm_riesz_partial, two_atom_intensity, Peak, SpectralMeasure,
    TmDistributionConfig,
};
use diffract_core::estimation::{
    compare, periodogram, scaling_exponent, Metric, Normalization, Region,
};
use diffract_core::generators::{
    gen_fibonacci_model_set, gen_rudin_shapiro, gen_thue_morse, CpsSpec, CrystalSpec, MotifSite,
};
use diffract_core::numeric::{SQRT5, TAU};
use diffract_core::seeding::{rng_from_seed, uniform};
use diffract_core::{GoldenInt, Grid, WeightedComb};
use num_complex::Complex64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn diffract(out_dir: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_diffract"))
        .arg("--out-dir")
        .arg(out_dir)
        .args(args)
        .output()
        .expect("binary runs");
    if !out.status.success() {
        eprintln!("diffract {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr));
    }
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

fn report_value(dir: &Path, name: &str) -> f64 {
    let text = std::fs::read_to_string(dir.join(format!("{name}.json"))).expect("report");
    let v: serde_json::Value = serde_json::from_str(&text).expect("report json");
    v["value"].as_f64().expect("metric value")
}

fn fibonacci_patch() -> WeightedComb {
    gen_fibonacci_model_set(&CpsSpec::fibonacci(), (-1e4, 1e4)).unwrap()
}

fn density_of_fibonacci() -> Outcome {
    let comb = fibonacci_patch();
    let expected = (TAU + 2.0) / 5.0;
    let rel = (comb.density() - expected).abs() / expected;
    outcome(
        rel <= 1e-3,
        format!("density {:.7} vs {expected:.7}, rel {rel:.2e}", comb.density()),
    )
}

fn fibonacci_bragg() -> Outcome {
    let central = fibonacci_intensity(GoldenInt::ZERO).unwrap();
    let spectrum = model_set_spectrum(&CpsSpec::fibonacci(), 20.0, 1e-3 * central).unwrap();
    let mut peaks: Vec<Peak> = spectrum.pp.into_iter().filter(|p| p.k[0] >= 0.0).collect();
    peaks.sort_by(|a, b| b.intensity.total_cmp(&a.intensity));
    peaks.truncate(20);
    peaks.sort_by(|a, b| a.k[0].total_cmp(&b.k[0]));
    let grid = Grid::points(peaks.iter().map(|p| p.k[0]).collect()).unwrap();
    let est = periodogram(&fibonacci_patch(), &grid, Normalization::VolumeSquared).unwrap();
    let reference = SpectralMeasure::pure_point(peaks);
    let maxrel = compare(&est, &reference, &Region::new(0.0, 20.0), Metric::MaxRel).unwrap();
    let at0 = est.values[0];
    let rel0 = (at0 - 0.5236).abs() / 0.5236;
    outcome(
        maxrel <= 0.02 && rel0 <= 0.01,
        format!("maxrel {maxrel:.2e} over 20 peaks, I(0) = {at0:.6}"),
    )
}

fn extinctions() -> Outcome {
    let mut exact = true;
    for l in 1..=50i64 {
        let x = GoldenInt::new(2 * l, l);
        let k = x.embed() / SQRT5;
        exact &= (k - l as f64 * TAU).abs() <= 1e-12 * k;
        exact &= fibonacci_intensity(x).unwrap() == 0.0;
    }
    let grid = Grid::points(vec![TAU]).unwrap();
    let emp = periodogram(&fibonacci_patch(), &grid, Normalization::VolumeSquared).unwrap().values[0];
    outcome(
        exact && emp <= 1e-3,
        format!("I(ℓτ) = 0 exactly for ℓ ≤ 50: {exact}; empirical at τ {emp:.2e}"),
    )
}

fn tau_scaling() -> Outcome {
    let i: Vec<f64> = (0..=7)
        .map(|n| fibonacci_intensity(GoldenInt::tau_pow(n).unwrap()).unwrap())
        .collect();
    let central = fibonacci_intensity(GoldenInt::ZERO).unwrap();
    let increasing = i[1..].windows(2).all(|w| w[1] > w[0]);
    let rel = (i[7] - central).abs() / central;
    let k5 = GoldenInt::tau_pow(5).unwrap().embed() / SQRT5;
    outcome(
        increasing && rel <= 0.01 && (k5 - 4.96).abs() < 0.01,
        format!("increasing for i ≥ 1: {increasing}; |I₇ − I(0)|/I(0) = {rel:.2e}; k₅ = {k5:.4}"),
    )
}

fn tm_identity() -> Outcome {
    let mut rng = rng_from_seed(5);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let k = 10.0 * uniform(&mut rng) - 5.0;
        for n in 0..=16 {
            let g = tm_exponential_sum(k, n).unwrap();
            let lhs = g.norm_sqr() / f64::from(1u32 << n);
            worst = worst.max((lhs - tm_riesz_partial(k, n)).abs());
        }
    }
    outcome(worst <= 1e-10, format!("max |Δ| {worst:.2e} over 1000 k, n ≤ 16"))
}

fn tm_distribution() -> Outcome {
    let config = TmDistributionConfig::default();
    match tm_distribution_with(&config, (1 << 14) + 1) {
        Ok(d) => {
            let f = &d.trapezoid;
            let last = *f.values.last().unwrap();
            let half = f.eval(0.5).unwrap();
            let pass = d.max_discrepancy <= 1e-3
                && f.values[0] == 0.0
                && (last - 1.0).abs() <= 1e-3
                && (half - 0.5).abs() <= 1e-3
                && f.is_strictly_increasing();
            outcome(
                pass,
                format!(
                    "discrepancy {:.2e}, F(1) = {last:.6}, F(½) = {half:.6}, strictly increasing: {}",
                    d.max_discrepancy,
                    f.is_strictly_increasing()
                ),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn local_scaling() -> Outcome {
    let tm: Vec<_> = (8..=16).map(|n| gen_thue_morse(n).unwrap()).collect();
    let rs: Vec<_> = (8..=16).map(|n| gen_rudin_shapiro((0, (1 << n) - 1)).unwrap()).collect();
    let fib: Vec<_> = (8..=16)
        .map(|n| gen_fibonacci_model_set(&CpsSpec::fibonacci(), (0.0, f64::from(1u32 << n))).unwrap())
        .collect();
    let e_tm = scaling_exponent(&tm, 1.0 / 3.0).unwrap();
    let e_rs = scaling_exponent(&rs, std::f64::consts::FRAC_1_SQRT_2).unwrap();
    let e_fib = scaling_exponent(&fib, TAU / SQRT5).unwrap();
    let pass = (e_tm - 3f64.log2()).abs() <= 0.05 && (e_rs - 1.0).abs() <= 0.15 && (e_fib - 2.0).abs() <= 0.1;
    outcome(
        pass,
        format!("TM at 1/3: {e_tm:.4}; RS at 1/√2: {e_rs:.4}; Fibonacci at τ/√5: {e_fib:.4}"),
    )
}

// Sub-points at dyadic rationals alias the dyadic-lag correlations of the
// Rudin–Shapiro windows into every cell; an odd oversample avoids that.
const ENSEMBLES: [(&str, &str, &str); 3] = [
    ("rs", "rs", "0.5"),
    ("bernoulli", "bernoulli", "0.5"),
    ("omega", "rs-bernoulli", "0.25"),
];

fn homometry(dir: &Path) -> Outcome {
    let (code, _) = diffract(dir, &["--name", "flat", "analytic", "rs", "--points", "2"]);
    let mut ok = code == 0;
    let mut lines = Vec::new();
    for (name, system, p) in ENSEMBLES {
        let (code, _) = diffract(
            dir,
            &[
                "--name", name, "estimate", "ensemble", system, "--p", p, "--len", "16384",
                "--realizations", "100", "--seed", "2024", "--kmin", "0", "--kmax", "1",
                "--cells", "32", "--oversample", "127",
            ],
        );
        ok &= code == 0;
        let est = format!("{}/{name}.csv", dir.display());
        let flat = format!("{}/flat.csv", dir.display());
        let cname = format!("{name}-vs-flat");
        let (code, _) = diffract(
            dir,
            &["--name", &cname, "compare", "--estimate", &est, "--reference", &flat, "--tolerance", "0.02"],
        );
        ok &= code == 0;
        lines.push(format!("{name} {:.2e}", report_value(dir, &cname)));
    }
    for i in 0..3 {
        for j in i + 1..3 {
            let (a, b) = (ENSEMBLES[i].0, ENSEMBLES[j].0);
            let cname = format!("{a}-vs-{b}");
            let (code, _) = diffract(
                dir,
                &[
                    "--name", &cname, "compare",
                    "--estimate", &format!("{}/{a}.csv", dir.display()),
                    "--reference", &format!("{}/{b}.csv", dir.display()),
                    "--tolerance", "0.03",
                ],
            );
            ok &= code == 0;
            lines.push(format!("{a}/{b} {:.2e}", report_value(dir, &cname)));
        }
    }
    outcome(ok, format!("L1 rel: {}", lines.join(", ")))
}

fn random_tiling(dir: &Path) -> Outcome {
    let grid = ["--kmin", "0.1", "--kmax", "20", "--cells", "100", "--oversample", "40"];
    let mut args = vec!["--name", "h", "analytic", "random-fibonacci"];
    args.extend(grid);
    let (c1, _) = diffract(dir, &args);
    let mut args = vec![
        "--name", "tiling", "estimate", "ensemble", "random-fibonacci", "--len", "10000",
        "--realizations", "100", "--seed", "7",
    ];
    args.extend(grid);
    let (c2, _) = diffract(dir, &args);
    let (c3, _) = diffract(
        dir,
        &[
            "--name", "tiling-vs-h", "compare",
            "--estimate", &format!("{}/tiling.csv", dir.display()),
            "--reference", &format!("{}/h.csv", dir.display()),
            "--tolerance", "0.05",
        ],
    );
    let (c4, _) = diffract(
        dir,
        &[
            "--name", "tiling-bragg", "estimate", "ensemble", "random-fibonacci", "--len", "10000",
            "--realizations", "100", "--seed", "7", "--mode", "bragg", "--at", "0",
        ],
    );
    let l1 = report_value(dir, "tiling-vs-h");
    let table = std::fs::read_to_string(dir.join("tiling-bragg.csv")).unwrap();
    let at0: f64 = table.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    let expected = (TAU + 1.0) / 5.0;
    let rel0 = (at0 - expected).abs() / expected;
    outcome(
        [c1, c2, c3, c4] == [0; 4] && l1 <= 0.05 && rel0 <= 0.02,
        format!("L1 rel {l1:.2e} on [0.1, 20]; Bragg at 0 {at0:.5} (rel {rel0:.1e})"),
    )
}

fn crystal_oracle() -> Outcome {
    let alpha = Complex64::new(0.6, -0.45);
    let (a, b) = (0.3, 0.7);
    let spec = CrystalSpec::cubic(
        2,
        vec![
            MotifSite {
                frac: vec![0.0, 0.0],
                weight: Complex64::new(1.0, 0.0),
            },
            MotifSite {
                frac: vec![a, b],
                weight: alpha,
            },
        ],
    )
    .unwrap();
    let s = crystal_diffraction(&spec, 10.0).unwrap();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for h1 in -10i32..=10 {
        for h2 in -10i32..=10 {
            if h1 * h1 + h2 * h2 > 100 {
                continue;
            }
            count += 1;
            let (k1, k2) = (f64::from(h1), f64::from(h2));
            let expected = two_atom_intensity(k1, k2, alpha, a, b);
            let got = s
                .pp
                .iter()
                .find(|p| p.k[0] == k1 && p.k[1] == k2)
                .map_or(0.0, |p| p.intensity);
            worst = worst.max((got - expected).abs());
        }
    }
    outcome(
        worst <= 1e-12 && s.pp.len() == count,
        format!("{count} dual points, {} peaks, max |Δ| {worst:.2e}", s.pp.len()),
    )
}

fn determinism(dir: &Path, replay_dir: &Path) -> Outcome {
    let (c1, _) = diffract(dir, &["generate", "random-fibonacci", "--count", "5000", "--seed", "11"]);
    let (c2, _) = diffract(dir, &["generate", "rs-bernoulli", "--n", "5000", "--p", "0.25", "--seed", "12"]);
    let mut ok = c1 == 0 && c2 == 0;
    let mut manifests: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.to_string_lossy().ends_with(".manifest.json"))
        .filter(|p| {
            let text = std::fs::read_to_string(p).unwrap();
            let m: serde_json::Value = serde_json::from_str(&text).unwrap();
            !m["seeds"].as_array().unwrap().is_empty()
        })
        .collect();
    manifests.sort();
    for m in &manifests {
        let (code, stdout) = diffract(replay_dir, &["replay", m.to_str().unwrap()]);
        let reproduced = serde_json::from_str::<serde_json::Value>(&stdout)
            .map(|v| v["reproduced"] == true)
            .unwrap_or(false);
        ok &= code == 0 && reproduced;
    }
    outcome(
        ok && manifests.len() >= 6,
        format!("{} randomized manifests replayed bit-exactly: {ok}", manifests.len()),
    )
}

fn main() {
    let work = tempfile::tempdir().unwrap();
    let replay = tempfile::tempdir().unwrap();
    let dir = work.path();
    let criteria: Vec<(u32, &str, Box<dyn Fn() -> Outcome>)> = vec![
        (1, "Fibonacci density", Box::new(density_of_fibonacci)),
        (2, "Fibonacci Bragg intensities", Box::new(fibonacci_bragg)),
        (3, "extinctions", Box::new(extinctions)),
        (4, "τ-scaling series", Box::new(tau_scaling)),
        (5, "Thue–Morse exact identity", Box::new(tm_identity)),
        (6, "Thue–Morse distribution function", Box::new(tm_distribution)),
        (7, "local scaling exponents", Box::new(local_scaling)),
        (8, "flatness and homometry", Box::new(|| homometry(dir))),
        (9, "random Fibonacci tiling", Box::new(|| random_tiling(dir))),
        (10, "crystal oracle", Box::new(crystal_oracle)),
        (11, "determinism from manifests", Box::new(|| determinism(dir, replay.path()))),
    ];
    let mut failed = 0;
    for (n, title, run) in criteria {
        let start = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {n:>2} {}  {title}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
