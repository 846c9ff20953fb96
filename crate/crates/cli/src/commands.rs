use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use num_complex::Complex64;
use serde_json::json;

use diffract_core::analytic::{
    crystal_diffraction, fibonacci_intensity, model_set_spectrum,
    tm_distribution_with, tm_riesz_partial, AcDensity, DistributionFn, Peak, SpectralMeasure,
    TmDistributionConfig,
};
use diffract_core::estimation::{
    self, ensemble_periodogram, periodogram, DiffractionEstimate, EnsembleSpec, Metric,
    Normalization, Region,
};
use diffract_core::generators::{
    gen_bernoulli, gen_crystal_patch, gen_fibonacci_model_set, gen_random_fibonacci_tiling,
    gen_rs_bernoulli, gen_rudin_shapiro, gen_thue_morse, CpsSpec, CrystalSpec, MotifSite,
    RandomSpec,
};
use diffract_core::io::{
    read_comb_csv, read_table, write_comb_csv, write_density_csv, write_distribution_csv,
    write_estimate_csv, write_peaks_csv, Table,
};
use diffract_core::numeric::TAU;
use diffract_core::{Error, GoldenInt, Grid, Patch, WeightedComb};

use crate::args::{
    AnalyticCmd, CompareArgs, CrystalArgs, EnsembleSystem, EstimateCmd, GenerateCmd, GridArgs,
    MetricArg, Mode,
};
use crate::manifest::RunManifest;
use crate::{usage, Outcome, RunContext};

fn create(ctx: &RunContext, file: &str) -> Result<BufWriter<File>> {
    let path = ctx.path(file);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| usage(format!("cannot open {}: {e}", path.display())))
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("{what}: not a number: {t:?}")))
        })
        .collect()
}

fn parse_crystal(c: &CrystalArgs) -> Result<CrystalSpec> {
    let rows = c
        .basis
        .split(';')
        .map(|r| parse_list(r, "basis"))
        .collect::<Result<Vec<_>>>()?;
    let motif = c
        .sites
        .iter()
        .map(|s| {
            let (frac, w) = s
                .split_once('=')
                .ok_or_else(|| usage(format!("site {s:?}: expected COORDS=WEIGHT")))?;
            let w = parse_list(w, "site weight")?;
            let weight = match w[..] {
                [re] => Complex64::new(re, 0.0),
                [re, im] => Complex64::new(re, im),
                _ => return Err(usage(format!("site {s:?}: weight is RE or RE,IM"))),
            };
            Ok(MotifSite {
                frac: parse_list(frac, "site")?,
                weight,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CrystalSpec::new(rows, motif)?)
}

fn check_range(kmin: f64, kmax: f64) -> Result<()> {
    if !(kmin < kmax) || !kmin.is_finite() || !kmax.is_finite() {
        return Err(usage(format!("need finite kmin < kmax, got {kmin} and {kmax}")));
    }
    Ok(())
}

fn write_comb(ctx: &RunContext, name: String, comb: &WeightedComb) -> Result<String> {
    let file = format!("{name}.csv");
    write_comb_csv(create(ctx, &file)?, comb)?;
    Ok(file)
}

fn comb_details(spec: serde_json::Value, comb: &WeightedComb) -> serde_json::Value {
    json!({
        "spec": spec,
        "patch": comb.patch(),
        "volume": comb.volume(),
        "point_count": comb.len(),
    })
}

pub fn generate(ctx: &RunContext, cmd: GenerateCmd) -> Result<Outcome> {
    let (system, seeds, spec, comb) = match cmd {
        GenerateCmd::Crystal { crystal, radius } => {
            let spec = parse_crystal(&crystal)?;
            let comb = gen_crystal_patch(&spec, radius)?;
            ("crystal", vec![], serde_json::to_value(&spec)?, comb)
        }
        GenerateCmd::Fibonacci { range } => {
            let cps = CpsSpec::fibonacci();
            let comb = gen_fibonacci_model_set(&cps, (range[0], range[1]))?;
            ("fibonacci", vec![], serde_json::to_value(&cps)?, comb)
        }
        GenerateCmd::Tm { n } => ("tm", vec![], json!({ "n": n }), gen_thue_morse(n)?),
        GenerateCmd::Rs { range } => {
            let comb = gen_rudin_shapiro((range[0], range[1]))?;
            ("rs", vec![], json!({ "range": range }), comb)
        }
        GenerateCmd::Bernoulli { p, n, seed } => {
            let spec = RandomSpec::new(seed, p)?;
            let comb = gen_bernoulli(&spec, index_range(n)?)?;
            ("bernoulli", vec![seed], serde_json::to_value(spec)?, comb)
        }
        GenerateCmd::RsBernoulli { p, n, seed } => {
            let spec = RandomSpec::new(seed, p)?;
            let comb = gen_rs_bernoulli(&spec, index_range(n)?)?;
            ("rs-bernoulli", vec![seed], serde_json::to_value(spec)?, comb)
        }
        GenerateCmd::RandomFibonacci { p, count, seed } => {
            let spec = RandomSpec::new(seed, p.unwrap_or(1.0 / TAU))?;
            let comb = gen_random_fibonacci_tiling(&spec, count)?;
            ("random-fibonacci", vec![seed], serde_json::to_value(spec)?, comb)
        }
    };
    let file = write_comb(ctx, ctx.name_or(system), &comb)?;
    Ok(Outcome {
        command: format!("generate {system}"),
        files: vec![file],
        seeds,
        details: comb_details(spec, &comb),
        violation: None,
    })
}

fn index_range(n: u64) -> Result<(i64, i64)> {
    if n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let hi = i64::try_from(n - 1).map_err(|_| usage("--n is too large"))?;
    Ok((0, hi))
}

fn analytic_outcome(system: &str, files: Vec<String>, details: serde_json::Value) -> Outcome {
    Outcome {
        command: format!("analytic {system}"),
        files,
        seeds: vec![],
        details,
        violation: None,
    }
}

pub fn analytic(ctx: &RunContext, cmd: AnalyticCmd) -> Result<Outcome> {
    match cmd {
        AnalyticCmd::Fibonacci {
            kmin,
            kmax,
            threshold_frac,
        } => {
            check_range(kmin, kmax)?;
            if !(threshold_frac >= 0.0) {
                return Err(usage("--threshold-frac must be non-negative"));
            }
            let central = fibonacci_intensity(GoldenInt::ZERO)?;
            let threshold = threshold_frac * central;
            let reach = kmin.abs().max(kmax.abs());
            let spectrum = model_set_spectrum(&CpsSpec::fibonacci(), reach, threshold)?;
            let peaks: Vec<Peak> = spectrum
                .pp
                .into_iter()
                .filter(|p| p.k[0] >= kmin && p.k[0] <= kmax)
                .collect();
            let file = format!("{}.csv", ctx.name_or("fibonacci-spectrum"));
            write_peaks_csv(create(ctx, &file)?, &peaks)?;
            Ok(analytic_outcome(
                "fibonacci",
                vec![file],
                json!({
                    "formula": "fibonacci model set, dens² sinc²(π vol k⋆)",
                    "central_intensity": central,
                    "threshold": threshold,
                    "peak_count": peaks.len(),
                }),
            ))
        }
        AnalyticCmd::Crystal { crystal, kmax } => {
            let spec = parse_crystal(&crystal)?;
            let spectrum = crystal_diffraction(&spec, kmax)?;
            let file = format!("{}.csv", ctx.name_or("crystal-spectrum"));
            write_peaks_csv(create(ctx, &file)?, &spectrum.pp)?;
            Ok(analytic_outcome(
                "crystal",
                vec![file],
                json!({
                    "formula": "lattice crystal, dens² |Σ w e^(-2πi h·f)|² on the dual lattice",
                    "spec": spec,
                    "peak_count": spectrum.pp.len(),
                }),
            ))
        }
        AnalyticCmd::TmRiesz {
            depth,
            kmin,
            kmax,
            points,
        } => {
            check_range(kmin, kmax)?;
            let grid = Grid::linspace(kmin, kmax, points)?;
            if depth == 0 || depth > diffract_core::analytic::MAX_RIESZ_DEPTH {
                return Err(usage(format!(
                    "--N must be in 1..={}",
                    diffract_core::analytic::MAX_RIESZ_DEPTH
                )));
            }
            let values: Vec<f64> = grid.centers().iter().map(|&k| tm_riesz_partial(k, depth)).collect();
            let file = format!("{}.csv", ctx.name_or("tm-riesz"));
            write_density_csv(create(ctx, &file)?, grid.centers(), &values)?;
            Ok(analytic_outcome(
                "tm-riesz",
                vec![file],
                json!({ "formula": "partial Riesz product Π 2 sin²(π 2ⁿ k)", "depth": depth }),
            ))
        }
        AnalyticCmd::TmDistribution {
            depth,
            gridsize,
            fourier_terms,
            word_exponent,
            tolerance,
        } => {
            let config = TmDistributionConfig {
                depth,
                fourier_terms,
                word_exponent,
                tolerance,
            };
            let name = ctx.name_or("tm-distribution");
            let files = vec![format!("{name}.csv"), format!("{name}-fourier.csv")];
            let write = |t: &DistributionFn, f: &DistributionFn| -> Result<()> {
                write_distribution_csv(create(ctx, &files[0])?, t)?;
                write_distribution_csv(create(ctx, &files[1])?, f)?;
                Ok(())
            };
            let dist = match tm_distribution_with(&config, gridsize) {
                Ok(d) => d,
                Err(Error::DistributionMismatch {
                    max_discrepancy,
                    tolerance,
                    trapezoid,
                    fourier,
                }) => {
                    write(&trapezoid, &fourier)?;
                    anyhow::bail!(
                        "constructions disagree by {max_discrepancy:e} > {tolerance:e}; both curves written"
                    );
                }
                Err(e) => return Err(e.into()),
            };
            write(&dist.trapezoid, &dist.fourier)?;
            Ok(analytic_outcome(
                "tm-distribution",
                files,
                json!({
                    "formula": "F(k) = mass of [0, k] under the Thue–Morse diffraction",
                    "config": config,
                    "max_discrepancy": dist.max_discrepancy,
                    "trapezoid": dist.trapezoid.method,
                    "fourier": dist.fourier.method,
                }),
            ))
        }
        AnalyticCmd::Rs { kmin, kmax, points } => {
            check_range(kmin, kmax)?;
            let grid = Grid::linspace(kmin, kmax, points)?;
            let ac = AcDensity::Constant { value: 1.0 };
            let values = ac.sample(&grid)?;
            let file = format!("{}.csv", ctx.name_or("rs-spectrum"));
            write_density_csv(create(ctx, &file)?, grid.centers(), &values)?;
            Ok(analytic_outcome(
                "rs",
                vec![file],
                json!({ "formula": "Lebesgue measure, density 1" }),
            ))
        }
        AnalyticCmd::RandomFibonacci {
            kmin,
            kmax,
            cells,
            oversample,
        } => {
            check_range(kmin, kmax)?;
            let grid = Grid::cells(kmin, kmax, cells, oversample)?;
            let values = AcDensity::RandomFibonacci.sample(&grid)?;
            let file = format!("{}.csv", ctx.name_or("random-fibonacci-spectrum"));
            write_density_csv(create(ctx, &file)?, grid.centers(), &values)?;
            let c = (TAU + 2.0) / 5.0;
            Ok(analytic_outcome(
                "random-fibonacci",
                vec![file],
                json!({
                    "formula": "h(k), cell means; plus a central peak",
                    "central_peak": { "k": 0.0, "intensity": c * c },
                    "cells": cells,
                    "oversample": oversample,
                }),
            ))
        }
    }
}

fn cell_grid(g: &GridArgs) -> Result<Grid> {
    if let Some(list) = &g.at {
        return Ok(Grid::points(parse_list(list, "--at")?)?);
    }
    check_range(g.kmin, g.kmax)?;
    Ok(Grid::cells(g.kmin, g.kmax, g.cells, g.oversample)?)
}

fn normalization(mode: Mode) -> Normalization {
    match mode {
        Mode::Ac => Normalization::Volume,
        Mode::Bragg => Normalization::VolumeSquared,
    }
}

/// `x.csv` → `x.manifest.json`.
fn sibling_manifest(path: &Path) -> PathBuf {
    path.with_extension("manifest.json")
}

fn read_patch(comb: &Path) -> Result<Patch> {
    let mpath = sibling_manifest(comb);
    let manifest = RunManifest::read(&mpath)
        .map_err(|e| usage(format!("comb manifest {}: {e:#}", mpath.display())))?;
    let patch = manifest
        .details
        .get("patch")
        .ok_or_else(|| usage(format!("{} records no patch", mpath.display())))?;
    serde_json::from_value(patch.clone())
        .map_err(|e| usage(format!("{}: bad patch: {e}", mpath.display())))
}

fn estimate_details(e: &DiffractionEstimate, extra: serde_json::Value) -> serde_json::Value {
    json!({
        "normalization": e.normalization,
        "volume": e.volume,
        "realizations": e.realizations,
        "master_seed": e.master_seed,
        "cell_width": e.grid.cell_width(),
        "oversample": e.grid.oversample(),
        "input": extra,
    })
}

pub fn estimate(ctx: &RunContext, cmd: EstimateCmd) -> Result<Outcome> {
    match cmd {
        EstimateCmd::Periodogram {
            comb,
            mode,
            at_file,
            grid,
        } => {
            let patch = read_patch(&comb)?;
            let parsed = read_comb_csv(open(&comb)?, patch)
                .with_context(|| format!("reading {}", comb.display()))?;
            let grid = match at_file {
                Some(path) => {
                    let t = read_input_table(&path)?;
                    Grid::points(t.rows.iter().map(|r| r.0).collect())?
                }
                None => cell_grid(&grid)?,
            };
            let est = periodogram(&parsed, &grid, normalization(mode))?;
            let stem = comb
                .file_stem()
                .map_or("comb".into(), |s| s.to_string_lossy().into_owned());
            let file = format!("{}.csv", ctx.name_or(&format!("{stem}-periodogram")));
            write_estimate_csv(create(ctx, &file)?, &est)?;
            Ok(Outcome {
                command: "estimate periodogram".into(),
                files: vec![file],
                seeds: vec![],
                details: estimate_details(
                    &est,
                    json!({ "comb": comb, "point_count": parsed.len() }),
                ),
                violation: None,
            })
        }
        EstimateCmd::Ensemble {
            system,
            p,
            len,
            realizations,
            seed,
            mode,
            grid,
        } => {
            let spec = match system {
                EnsembleSystem::Bernoulli => EnsembleSpec::Bernoulli {
                    p: p.unwrap_or(0.5),
                    len,
                },
                EnsembleSystem::Rs => EnsembleSpec::RudinShapiro { len },
                EnsembleSystem::RsBernoulli => EnsembleSpec::RsBernoulli {
                    p: p.unwrap_or(0.5),
                    len,
                },
                EnsembleSystem::RandomFibonacci => EnsembleSpec::RandomFibonacci {
                    p: p.unwrap_or(1.0 / TAU),
                    count: len,
                },
            };
            let grid = cell_grid(&grid)?;
            let est = ensemble_periodogram(&spec, seed, &grid, realizations, normalization(mode))?;
            let label = serde_json::to_value(system)?;
            let label = label.as_str().unwrap_or("ensemble");
            let file = format!("{}.csv", ctx.name_or(&format!("{label}-ensemble")));
            write_estimate_csv(create(ctx, &file)?, &est)?;
            Ok(Outcome {
                command: format!("estimate ensemble {label}"),
                files: vec![file],
                seeds: vec![seed],
                details: estimate_details(&est, serde_json::to_value(&spec)?),
                violation: None,
            })
        }
    }
}

fn read_input_table(path: &Path) -> Result<Table> {
    read_table(open(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

pub fn compare(ctx: &RunContext, args: CompareArgs) -> Result<Outcome> {
    let est_table = read_input_table(&args.estimate)?;
    let ref_table = read_input_table(&args.reference)?;
    let ks: Vec<f64> = est_table.rows.iter().map(|r| r.0).collect();
    let grid = Grid::points(ks)
        .map_err(|e| usage(format!("{}: {e}", args.estimate.display())))?;
    let (normalization, reference) = match ref_table.columns[1].as_str() {
        "intensity" => (
            Normalization::VolumeSquared,
            SpectralMeasure::pure_point(
                ref_table.rows.iter().map(|&(k, i)| Peak::new_1d(k, i)).collect(),
            ),
        ),
        "density" | "value" => {
            let k: Vec<f64> = ref_table.rows.iter().map(|r| r.0).collect();
            Grid::points(k.clone())
                .map_err(|e| usage(format!("{}: {e}", args.reference.display())))?;
            (
                Normalization::Volume,
                SpectralMeasure {
                    ac: Some(AcDensity::Sampled {
                        k,
                        values: ref_table.rows.iter().map(|r| r.1).collect(),
                    }),
                    ..Default::default()
                },
            )
        }
        other => {
            return Err(usage(format!(
                "{}: unsupported reference column {other:?}",
                args.reference.display()
            )))
        }
    };
    let estimate = DiffractionEstimate {
        grid,
        values: est_table.rows.iter().map(|r| r.1).collect(),
        normalization,
        volume: f64::NAN,
        realizations: 1,
        master_seed: None,
    };
    let mut region = Region::new(args.kmin, args.kmax);
    for ex in &args.exclude {
        let (lo, hi) = ex
            .split_once(':')
            .ok_or_else(|| usage(format!("--exclude {ex:?}: expected LO:HI")))?;
        let lo = parse_list(lo, "--exclude")?[0];
        let hi = parse_list(hi, "--exclude")?[0];
        region = region.excluding(lo, hi);
    }
    let metric = match args.metric {
        MetricArg::L1rel => Metric::L1Rel,
        MetricArg::Maxrel => Metric::MaxRel,
    };
    let value = estimation::compare(&estimate, &reference, &region, metric)?;
    let pass = args.tolerance.is_none_or(|t| value <= t);
    let report = json!({
        "schema_version": crate::manifest::SCHEMA_VERSION,
        "estimate": args.estimate,
        "reference": args.reference,
        "mode": normalization,
        "metric": args.metric,
        "value": value,
        "tolerance": args.tolerance,
        "pass": pass,
        "region": region,
    });
    let file = format!("{}.json", ctx.name_or("compare"));
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    std::fs::write(ctx.path(&file), text)?;
    println!("{}", serde_json::to_string(&report)?);
    let violation = (!pass).then(|| {
        format!(
            "{:?} = {value:e} exceeds {:e}",
            args.metric,
            args.tolerance.unwrap_or(f64::NAN)
        )
    });
    Ok(Outcome {
        command: "compare".into(),
        files: vec![file],
        seeds: vec![],
        details: report,
        violation,
    })
}
