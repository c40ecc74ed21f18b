use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use proptest::prelude::*;
use txconflict::engine::{analyze, AnalysisResult, EngineOptions};
use txconflict::frontend::parse;
use txconflict::report::{
    aggregate, render_html, write_csv, CONFLICTS_FILE, CONFLICTS_HEADER, CONTRACTS_FILE, SUMMARY_FILE,
    VARIABLE_SEPARATOR,
};
use txconflict_testkit::gen::generate;
use txconflict_testkit::GenConfig;

fn fixture_results(name: &str) -> Vec<AnalysisResult> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let src = fs::read_to_string(dir.join(name)).unwrap();
    analyze(&[parse(&src, name).unwrap()], &EngineOptions::default()).unwrap()
}

/// Compares against a checked-in golden file; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, actual).unwrap();
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
    assert_eq!(actual, expected, "{name} differs from golden");
}

fn read_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn example_report() {
    let results = fixture_results("example.sol");
    let page = render_html(&results[0]);
    for needle in [
        "<td>State variables</td><td>2</td>",
        "<td>Functions</td><td>2</td>",
        "<td>Conflicts</td><td>0</td>",
        "<td>Conflict percentage</td><td>0.00%</td>",
        "No conflicts detected.",
    ] {
        assert!(page.contains(needle), "{needle}");
    }
    golden("report_Example.html", &page);
}

#[test]
fn erc20_report_and_csv() {
    let results = fixture_results("erc20.sol");
    let page = render_html(&results[0]);
    assert_eq!(page.matches("<td class=\"hit\">X</td>").count(), 6);
    let dir = tempfile::tempdir().unwrap();
    write_csv(&results, dir.path()).unwrap();
    let conflicts = fs::read_to_string(dir.path().join(CONFLICTS_FILE)).unwrap();
    golden("erc20_conflicts.csv", &conflicts);
    let rows = read_rows(&dir.path().join(CONFLICTS_FILE));
    let pairs: BTreeSet<_> = rows.iter().map(|r| (r[1].clone(), r[2].clone())).collect();
    assert_eq!(pairs.len(), 3);
    golden("report_Token.html", &page);
}

#[test]
fn empty_results_write_headers_only() {
    let dir = tempfile::tempdir().unwrap();
    let files = write_csv(&[], dir.path()).unwrap();
    assert_eq!(files.len(), 3);
    let header = fs::read_to_string(dir.path().join(CONFLICTS_FILE)).unwrap();
    assert_eq!(header, format!("{}\r\n", CONFLICTS_HEADER.join(",")));
    assert_eq!(read_rows(&dir.path().join(CONTRACTS_FILE)).len(), 0);
    let summary = read_rows(&dir.path().join(SUMMARY_FILE));
    assert!(summary.iter().any(|r| r[0] == "total_contracts" && r[1] == "0"));
}

#[test]
fn kind_split_arithmetic() {
    let mut results = fixture_results("governance.sol");
    let r = &mut results[0];
    r.conflicts.retain(|c| c.kind != txconflict::engine::ConflictKind::Fcc);
    let stats = aggregate(&results);
    let p = stats.percent_by_kind.unwrap();
    assert!((p.values().sum::<f64>() - 100.0).abs() < 1e-9);
}

fn write_all(results: &[AnalysisResult], dir: &Path) -> Vec<(String, String)> {
    write_csv(results, dir).unwrap();
    let mut out: Vec<(String, String)> = [CONFLICTS_FILE, CONTRACTS_FILE, SUMMARY_FILE]
        .iter()
        .map(|f| (f.to_string(), fs::read_to_string(dir.join(f)).unwrap()))
        .collect();
    for r in results {
        out.push((r.contract.name.clone(), render_html(r)));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn outputs_are_byte_deterministic(seed in any::<u64>()) {
        let src = generate(seed, &GenConfig::default(), "G").render();
        let a = analyze(&[parse(&src, "g.sol").unwrap()], &EngineOptions::default()).unwrap();
        let b = analyze(&[parse(&src, "g.sol").unwrap()], &EngineOptions::default()).unwrap();
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        prop_assert_eq!(write_all(&a, d1.path()), write_all(&b, d2.path()));
    }

    #[test]
    fn matrix_matches_conflict_list(seed in any::<u64>()) {
        let src = generate(seed, &GenConfig::default(), "G").render();
        let r = &analyze(&[parse(&src, "g.sol").unwrap()], &EngineOptions::default()).unwrap()[0];
        let m = &r.matrix;
        let pairs: BTreeSet<_> = r.conflicts.iter().map(|c| c.pair()).collect();
        let mut cells = 0;
        for i in 0..m.len() {
            prop_assert!(!m.get(i, i));
            for j in 0..m.len() {
                prop_assert_eq!(m.get(i, j), m.get(j, i));
                if i < j && m.get(i, j) {
                    cells += 1;
                    let (a, b) = (&m.functions[i], &m.functions[j]);
                    prop_assert!(pairs.contains(&(a, b)));
                }
            }
        }
        prop_assert_eq!(cells, pairs.len());
        let page = render_html(r);
        prop_assert_eq!(page.matches("<td class=\"hit\">X</td>").count(), 2 * pairs.len());
    }

    #[test]
    fn conflicts_csv_round_trips(seeds in proptest::collection::vec(any::<u64>(), 1..4)) {
        let mut results = Vec::new();
        for (i, seed) in seeds.iter().enumerate() {
            let src = generate(*seed, &GenConfig::default(), &format!("G{i}")).render();
            results.extend(analyze(&[parse(&src, "g.sol").unwrap()], &EngineOptions::default()).unwrap());
        }
        let dir = tempfile::tempdir().unwrap();
        write_csv(&results, dir.path()).unwrap();
        let mut want: Vec<Vec<String>> = results
            .iter()
            .flat_map(|r| r.conflicts.iter().map(move |c| vec![
                r.contract.name.clone(),
                c.first.to_string(),
                c.second.to_string(),
                c.kind.to_string(),
                c.severity.to_string(),
                c.variables.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(VARIABLE_SEPARATOR),
            ]))
            .collect();
        want.sort();
        let mut got = read_rows(&dir.path().join(CONFLICTS_FILE));
        got.sort();
        prop_assert_eq!(got, want);

        let summary = read_rows(&dir.path().join(SUMMARY_FILE));
        let total: usize = summary.iter().find(|r| r[0] == "total_conflicts").unwrap()[1].parse().unwrap();
        if total > 0 {
            let sum: f64 = summary
                .iter()
                .filter(|r| r[0].ends_with("_percent"))
                .map(|r| r[1].parse::<f64>().unwrap())
                .sum();
            prop_assert!((sum - 100.0).abs() <= 0.1, "{}", sum);
        }
    }
}
