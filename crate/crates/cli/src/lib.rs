//! Batch driver: discovers `.sol` files, analyzes each one, and writes
//! the HTML and CSV reports.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use txconflict::engine::{analyze, AnalysisResult, ConflictKind, EngineOptions};
use txconflict::frontend::parse;
use txconflict::report::{aggregate, report_file_name, write_csv, write_html};
use walkdir::WalkDir;

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_CONFLICTS: u8 = 2;
pub const EXIT_ALL_SKIPPED: u8 = 3;

pub const SKIPPED_FILE: &str = "skipped.csv";
pub const SKIPPED_HEADER: [&str; 3] = ["path", "kind", "detail"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Format {
    Html,
    Csv,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Files or directories; directories are searched recursively.
    pub inputs: Vec<PathBuf>,
    pub out_dir: PathBuf,
    pub formats: BTreeSet<Format>,
    pub conservative_external: bool,
    pub fail_on_conflicts: bool,
    pub jobs: usize,
    /// When false, every analysis time is reported as 0 so that repeated
    /// runs produce identical files.
    pub timing: bool,
}

impl RunConfig {
    pub fn new(inputs: Vec<PathBuf>, out_dir: PathBuf) -> Self {
        RunConfig {
            inputs,
            out_dir,
            formats: [Format::Html, Format::Csv].into_iter().collect(),
            conservative_external: false,
            fail_on_conflicts: false,
            jobs: 1,
            timing: true,
        }
    }
}

/// A file that could not be analyzed and why.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skipped {
    pub path: String,
    pub kind: String,
    pub detail: String,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: u8,
    pub discovered: usize,
    pub skipped: Vec<Skipped>,
    pub results: Vec<AnalysisResult>,
    pub written: Vec<PathBuf>,
    pub summary: String,
}

/// `.sol` files under `inputs` in discovery order: inputs as given,
/// directory contents sorted by name. Symlinks are not followed.
pub fn discover(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut seen = HashSet::new();
    let mut files = Vec::new();
    for input in inputs {
        let meta = fs::symlink_metadata(input)
            .with_context(|| format!("input not found: {}", input.display()))?;
        if meta.is_dir() {
            for entry in WalkDir::new(input).follow_links(false).sort_by_file_name() {
                let entry = entry.with_context(|| format!("cannot read {}", input.display()))?;
                let is_sol = entry.path().extension().is_some_and(|e| e == "sol");
                if entry.file_type().is_file() && is_sol && seen.insert(entry.path().to_path_buf()) {
                    files.push(entry.into_path());
                }
            }
        } else if meta.is_file() || fs::metadata(input).is_ok_and(|m| m.is_file()) {
            if seen.insert(input.clone()) {
                files.push(input.clone());
            }
        } else {
            bail!("not a file or directory: {}", input.display());
        }
    }
    Ok(files)
}

enum FileOutcome {
    Analyzed(Vec<AnalysisResult>),
    Skipped(Skipped),
}

fn analyze_file(path: &Path, options: &EngineOptions, timing: bool) -> FileOutcome {
    let display = path.display().to_string();
    let skipped = |kind: &str, detail: String| {
        FileOutcome::Skipped(Skipped {
            path: display.clone(),
            kind: kind.to_string(),
            detail,
        })
    };
    let start = Instant::now();
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) => return skipped("IoError", e.to_string()),
    };
    let source = match String::from_utf8(bytes) {
        Ok(s) => s,
        Err(e) => return skipped("EncodingError", format!("invalid UTF-8: {e}")),
    };
    let unit = match parse(&source, &display) {
        Ok(u) => u,
        Err(e) => return skipped(e.kind(), e.to_string()),
    };
    let mut results = match analyze(std::slice::from_ref(&unit), options) {
        Ok(r) => r,
        Err(e) => return skipped("AnalysisError", e.to_string()),
    };
    let ms = if timing { start.elapsed().as_millis() as u64 } else { 0 };
    for r in &mut results {
        r.analysis_ms = ms;
    }
    FileOutcome::Analyzed(results)
}

fn write_skipped(path: &Path, skipped: &[Skipped]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_path(path)?;
    w.write_record(SKIPPED_HEADER)?;
    for s in skipped {
        w.write_record([&s.path, &s.kind, &s.detail])?;
    }
    w.flush()?;
    Ok(())
}

fn write_outputs(config: &RunConfig, results: &[AnalysisResult], skipped: &[Skipped], written: &mut Vec<PathBuf>) -> Result<()> {
    let out = &config.out_dir;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    if config.formats.contains(&Format::Html) {
        let mut seen: HashMap<&str, usize> = HashMap::new();
        for r in results {
            let n = seen.entry(r.contract.name.as_str()).or_insert(0);
            *n += 1;
            written.push(write_html(r, out, &report_file_name(&r.contract.name, *n))?);
        }
    }
    if config.formats.contains(&Format::Csv) {
        written.extend(write_csv(results, out)?);
    }
    let skipped_path = out.join(SKIPPED_FILE);
    written.push(skipped_path.clone());
    write_skipped(&skipped_path, skipped).with_context(|| format!("cannot write {}", skipped_path.display()))
}

/// Runs the whole pipeline. Operational failures are returned as errors
/// after removing any files this run had written.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    if config.formats.is_empty() {
        bail!("at least one output format is required");
    }
    if config.jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let started = Instant::now();
    let files = discover(&config.inputs)?;
    if files.is_empty() {
        bail!("no .sol files found in the given inputs");
    }

    let options = EngineOptions {
        conservative_external: config.conservative_external,
        ..EngineOptions::default()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .context("cannot start worker pool")?;
    let outcomes: Vec<FileOutcome> = pool.install(|| {
        files
            .par_iter()
            .map(|f| analyze_file(f, &options, config.timing))
            .collect()
    });

    let mut results = Vec::new();
    let mut skipped = Vec::new();
    for outcome in outcomes {
        match outcome {
            FileOutcome::Analyzed(r) => results.extend(r),
            FileOutcome::Skipped(s) => {
                log::warn!("skipping {}: {}", s.path, s.detail);
                skipped.push(s);
            }
        }
    }

    let mut written = Vec::new();
    if let Err(e) = write_outputs(config, &results, &skipped, &mut written) {
        for p in &written {
            let _ = fs::remove_file(p);
        }
        return Err(e);
    }

    let stats = aggregate(&results);
    let kinds: BTreeMap<ConflictKind, usize> = stats.counts_by_kind.clone();
    let elapsed = if config.timing { started.elapsed().as_millis() } else { 0 };
    let summary = format!(
        "{} files ({} skipped), {} contracts, {} conflicts (RWC {}, WWC {}, FCC {}) in {} ms",
        files.len(),
        skipped.len(),
        stats.total_contracts,
        stats.total_conflicts,
        kinds[&ConflictKind::Rwc],
        kinds[&ConflictKind::Wwc],
        kinds[&ConflictKind::Fcc],
        elapsed
    );
    let exit_code = if skipped.len() == files.len() {
        EXIT_ALL_SKIPPED
    } else if config.fail_on_conflicts && stats.total_conflicts > 0 {
        EXIT_CONFLICTS
    } else {
        EXIT_OK
    };
    Ok(RunOutcome {
        exit_code,
        discovered: files.len(),
        skipped,
        results,
        written,
        summary,
    })
}
