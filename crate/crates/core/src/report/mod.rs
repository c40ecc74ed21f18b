//! HTML and CSV report generation.

mod csv;
mod html;
mod stats;

use std::path::PathBuf;

use thiserror::Error;

pub use self::csv::{
    conflict_rows, contract_rows, summary_rows, write_csv, CONFLICTS_FILE, CONFLICTS_HEADER,
    CONTRACTS_FILE, CONTRACTS_HEADER, SUMMARY_FILE, SUMMARY_HEADER, VARIABLE_SEPARATOR,
};
pub use html::{escape, render_html, report_file_name, write_html, NO_PAIRS};
pub use stats::{aggregate, AggregateStats, PERCENT_BUCKET};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    Csv {
        path: PathBuf,
        source: ::csv::Error,
    },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{analyze, EngineOptions};
    use crate::frontend::parse;

    fn results(src: &str) -> Vec<crate::engine::AnalysisResult> {
        analyze(&[parse(src, "t.sol").unwrap()], &EngineOptions::default()).unwrap()
    }

    #[test]
    fn aggregate_arithmetic() {
        let mut rs = results(
            "contract A { uint x; function a() public { x = 1; } function b() public { x = 2; } } \
             contract B { uint x; uint y; function a() public { x = 1; y = 1; } function b() public { x = 2; } \
             function c() public view returns (uint) { return x + y; } }",
        );
        assert_eq!(rs[0].conflicts.len(), 1);
        assert_eq!(rs[1].conflicts.len(), 3);
        rs[0].analysis_ms = 4;
        rs[1].analysis_ms = 8;
        let s = aggregate(&rs);
        assert_eq!(s.total_contracts, 2);
        assert_eq!(s.total_conflicts, 4);
        assert_eq!(s.mean_conflicts_per_contract, 2.0);
        assert_eq!(s.max_conflicts_per_contract, 3);
        assert_eq!(s.contracts_with_conflicts_fraction, 1.0);
        let p = s.percent_by_kind.clone().unwrap();
        assert_eq!(p.values().sum::<f64>(), 100.0);
        assert_eq!(s.mean_analysis_ms(), 6.0);
    }

    #[test]
    fn empty_aggregate() {
        let s = aggregate(&[]);
        assert_eq!(s.total_conflicts, 0);
        assert_eq!(s.contracts_with_conflicts_fraction, 0.0);
        assert!(s.percent_by_kind.is_none());
        let rows = summary_rows(&s);
        let rwc = rows.iter().find(|r| r[0] == "rwc_percent").unwrap();
        assert_eq!(rwc[1], "");
    }

    #[test]
    fn html_escapes_and_degenerates() {
        let rs = results("contract C { function f() public {} }");
        let page = render_html(&rs[0]);
        assert!(page.contains(NO_PAIRS));
        assert!(page.starts_with("<!DOCTYPE html>"));
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }

    #[test]
    fn file_names() {
        assert_eq!(report_file_name("Token", 1), "report_Token.html");
        assert_eq!(report_file_name("Token", 3), "report_Token_3.html");
    }

    #[test]
    fn write_failure_leaves_nothing() {
        let dir = std::env::temp_dir().join("txconflict-no-such-dir/nested");
        assert!(write_csv(&[], &dir).is_err());
        assert!(!dir.join(CONFLICTS_FILE).exists());
    }
}
