use std::fs;
use std::path::{Path, PathBuf};

use super::stats::{aggregate, AggregateStats, PERCENT_BUCKET};
use super::ReportError;
use crate::engine::{AnalysisResult, ConflictKind};

pub const CONFLICTS_FILE: &str = "conflicts.csv";
pub const CONTRACTS_FILE: &str = "contracts.csv";
pub const SUMMARY_FILE: &str = "summary.csv";

pub const CONFLICTS_HEADER: [&str; 6] = [
    "contract",
    "function_a",
    "function_b",
    "kind",
    "severity",
    "variables",
];
pub const CONTRACTS_HEADER: [&str; 6] = [
    "name",
    "functions",
    "state_vars",
    "conflicts",
    "conflict_percentage",
    "analysis_ms",
];
pub const SUMMARY_HEADER: [&str; 2] = ["metric", "value"];

/// Separator between variable names inside one CSV cell.
pub const VARIABLE_SEPARATOR: &str = ";";

fn fixed2(x: f64) -> String {
    format!("{x:.2}")
}

/// Results in canonical order: by contract name, then source path.
fn sorted(results: &[AnalysisResult]) -> Vec<&AnalysisResult> {
    let mut v: Vec<_> = results.iter().collect();
    v.sort_by(|a, b| (&a.contract.name, &a.path).cmp(&(&b.contract.name, &b.path)));
    v
}

pub fn conflict_rows(results: &[AnalysisResult]) -> Vec<[String; 6]> {
    let mut rows = Vec::new();
    for r in sorted(results) {
        for c in &r.conflicts {
            let vars: Vec<&str> = c.variables.iter().map(|v| v.as_str()).collect();
            rows.push([
                r.contract.name.clone(),
                c.first.to_string(),
                c.second.to_string(),
                c.kind.to_string(),
                c.severity.to_string(),
                vars.join(VARIABLE_SEPARATOR),
            ]);
        }
    }
    rows
}

pub fn contract_rows(results: &[AnalysisResult]) -> Vec<[String; 6]> {
    sorted(results)
        .into_iter()
        .map(|r| {
            [
                r.contract.name.clone(),
                r.contract.functions.len().to_string(),
                r.contract.state_variables.len().to_string(),
                r.conflicts.len().to_string(),
                fixed2(100.0 * r.conflict_percentage),
                r.analysis_ms.to_string(),
            ]
        })
        .collect()
}

pub fn summary_rows(stats: &AggregateStats) -> Vec<[String; 2]> {
    let mut rows: Vec<[String; 2]> = Vec::new();
    let mut push = |k: &str, v: String| rows.push([k.to_string(), v]);
    push("total_contracts", stats.total_contracts.to_string());
    push("total_conflicts", stats.total_conflicts.to_string());
    for kind in ConflictKind::ALL {
        let name = kind.as_str().to_ascii_lowercase();
        push(&format!("{name}_count"), stats.counts_by_kind[&kind].to_string());
    }
    for kind in ConflictKind::ALL {
        let name = kind.as_str().to_ascii_lowercase();
        let value = stats
            .percent_by_kind
            .as_ref()
            .map(|p| fixed2(p[&kind]))
            .unwrap_or_default();
        push(&format!("{name}_percent"), value);
    }
    push(
        "contracts_with_conflicts",
        stats.contracts_with_conflicts.to_string(),
    );
    push(
        "contracts_with_conflicts_fraction",
        format!("{:.4}", stats.contracts_with_conflicts_fraction),
    );
    push(
        "mean_conflicts_per_contract",
        fixed2(stats.mean_conflicts_per_contract),
    );
    push(
        "max_conflicts_per_contract",
        stats.max_conflicts_per_contract.to_string(),
    );
    push(
        "mean_conflict_percentage",
        fixed2(100.0 * stats.mean_conflict_percentage()),
    );
    for (i, n) in stats.percentage_histogram.iter().enumerate() {
        let lo = i * PERCENT_BUCKET;
        push(
            &format!("conflict_percentage_{lo}_{}", lo + PERCENT_BUCKET),
            n.to_string(),
        );
    }
    push("mean_analysis_ms", fixed2(stats.mean_analysis_ms()));
    push("max_analysis_ms", stats.max_analysis_ms().to_string());
    push("total_analysis_ms", stats.total_analysis_ms().to_string());
    rows
}

fn write_table<const N: usize>(
    path: &Path,
    header: [&str; N],
    rows: &[[String; N]],
) -> Result<(), ReportError> {
    let wrap = |source| ReportError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = ::csv::WriterBuilder::new()
        .terminator(::csv::Terminator::CRLF)
        .from_path(path)
        .map_err(wrap)?;
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(row).map_err(wrap)?;
    }
    w.flush().map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `conflicts.csv`, `contracts.csv` and `summary.csv` into
/// `out_dir`. On failure, files created by this call are removed.
pub fn write_csv(results: &[AnalysisResult], out_dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    let paths = [
        out_dir.join(CONFLICTS_FILE),
        out_dir.join(CONTRACTS_FILE),
        out_dir.join(SUMMARY_FILE),
    ];
    let outcome = write_table(&paths[0], CONFLICTS_HEADER, &conflict_rows(results))
        .and_then(|_| write_table(&paths[1], CONTRACTS_HEADER, &contract_rows(results)))
        .and_then(|_| write_table(&paths[2], SUMMARY_HEADER, &summary_rows(&aggregate(results))));
    match outcome {
        Ok(()) => Ok(paths.to_vec()),
        Err(e) => {
            for p in &paths {
                let _ = fs::remove_file(p);
            }
            Err(e)
        }
    }
}
