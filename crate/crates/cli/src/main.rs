//! `diffract`: generate point sets, evaluate their diffraction spectra,
//! estimate periodograms and compare the two.
//!
//! Every command writes its data files plus `{name}.manifest.json` into the
//! output directory. Exit status: 0 ok, 1 runtime failure or violated
//! tolerance, 2 usage error or malformed input.

mod args;
mod commands;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use args::{Cli, Command};
use manifest::{now_unix, sha256_file, OutputDigest, RunManifest, SCHEMA_VERSION};

/// Invalid parameters or unreadable input; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use diffract_core::Error as E;
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::InvalidParameter { .. }
                | E::DimensionMismatch { .. }
                | E::SingularBasis(_)
                | E::MaxDistExceedsPatch { .. }
                | E::TooFewSizes { .. }
                | E::EmptyOverlap
                | E::Parse(_)
                | E::Csv(_) => 2,
                _ => 1,
            };
        }
    }
    1
}

/// What a command produced.
pub struct Outcome {
    pub command: String,
    pub files: Vec<String>,
    pub seeds: Vec<u64>,
    pub details: serde_json::Value,
    /// Set when a declared tolerance was exceeded.
    pub violation: Option<String>,
}

pub struct RunContext {
    pub out_dir: PathBuf,
    pub name: Option<String>,
}

impl RunContext {
    pub fn name_or(&self, default: &str) -> String {
        self.name.clone().unwrap_or_else(|| default.to_string())
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.out_dir.join(file)
    }
}

/// Drops the flags that do not influence results.
fn reproducible_argv(raw: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = raw.iter();
    while let Some(a) = it.next() {
        if a == "--out-dir" || a == "--threads" {
            it.next();
        } else if !(a.starts_with("--out-dir=") || a.starts_with("--threads=")) {
            out.push(a.clone());
        }
    }
    out
}

fn absolute(p: &Path) -> Result<PathBuf> {
    if p.is_absolute() {
        Ok(p.to_path_buf())
    } else {
        Ok(std::env::current_dir()?.join(p))
    }
}

fn execute(cli: Cli, argv: Vec<String>) -> Result<Option<String>> {
    let out_dir = absolute(&cli.out_dir)?;
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let ctx = RunContext {
        out_dir,
        name: cli.name.clone(),
    };
    if let Command::Replay(r) = &cli.command {
        return replay(&ctx, &r.manifest).map(|_| None);
    }
    let params = serde_json::to_value(&cli.command)?;
    let outcome = match cli.command {
        Command::Generate(cmd) => commands::generate(&ctx, cmd)?,
        Command::Analytic(cmd) => commands::analytic(&ctx, cmd)?,
        Command::Estimate(cmd) => commands::estimate(&ctx, cmd)?,
        Command::Compare(cmd) => commands::compare(&ctx, cmd)?,
        Command::Replay(_) => unreachable!(),
    };
    let outputs = outcome
        .files
        .iter()
        .map(|f| {
            Ok(OutputDigest {
                file: f.clone(),
                sha256: sha256_file(&ctx.path(f))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        tool: "diffract".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: outcome.command.clone(),
        argv,
        cwd: std::env::current_dir()?.display().to_string(),
        params,
        seeds: outcome.seeds,
        details: outcome.details,
        created_unix: now_unix(),
        outputs,
    };
    let stem = outcome.files[0]
        .rsplit_once('.')
        .map_or(outcome.files[0].as_str(), |(s, _)| s);
    manifest.write(&ctx.path(&format!("{stem}.manifest.json")))?;
    Ok(outcome.violation)
}

/// Re-runs a manifest into the current output directory and checks every
/// recorded digest.
fn replay(ctx: &RunContext, path: &Path) -> Result<()> {
    let manifest = RunManifest::read(path).map_err(|e| usage(format!("{e:#}")))?;
    let mut full = vec!["diffract".to_string()];
    full.extend(manifest.argv.iter().cloned());
    let mut cli = Cli::try_parse_from(&full).map_err(|e| usage(format!("manifest arguments: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(usage("a replay cannot be replayed"));
    }
    cli.out_dir = ctx.out_dir.clone();
    let cwd = PathBuf::from(&manifest.cwd);
    if cwd.is_dir() {
        std::env::set_current_dir(&cwd)?;
    }
    // A violated tolerance is part of the recorded result, not a failure here.
    execute(cli, manifest.argv.clone())?;
    let mut all = true;
    let mut rows = Vec::new();
    for out in &manifest.outputs {
        let actual = sha256_file(&ctx.path(&out.file)).ok();
        let same = actual.as_deref() == Some(out.sha256.as_str());
        all &= same;
        rows.push(serde_json::json!({
            "file": out.file,
            "expected": out.sha256,
            "actual": actual,
            "identical": same,
        }));
    }
    let report = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "manifest": path.display().to_string(),
        "reproduced": all,
        "outputs": rows,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    anyhow::ensure!(all, "outputs differ from the manifest");
    Ok(())
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match execute(cli, reproducible_argv(&raw)) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(violation)) => {
            eprintln!("tolerance violated: {violation}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
