use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::ReportError;
use crate::engine::{AnalysisResult, ConflictKind};

pub const NO_PAIRS: &str = "no transactional function pairs";

const STYLE: &str = "body{font-family:sans-serif;margin:2em;color:#222}\
table{border-collapse:collapse;margin:0.5em 0 1.5em}\
th,td{border:1px solid #bbb;padding:4px 8px;text-align:left}\
th{background:#eee}\
td.hit{background:#e57373}\
td.diag{background:#ddd}";

/// Escapes text for element content and double-quoted attributes.
pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

struct Html(String);

impl Html {
    fn line(&mut self, s: &str) {
        self.0.push_str(s);
        self.0.push('\n');
    }

    fn table(&mut self, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) {
        self.line("<table>");
        let th: String = header
            .iter()
            .map(|h| format!("<th>{}</th>", escape(h)))
            .collect();
        self.line(&format!("<tr>{th}</tr>"));
        for row in rows {
            let td: String = row.iter().map(|c| format!("<td>{}</td>", escape(c))).collect();
            self.line(&format!("<tr>{td}</tr>"));
        }
        self.line("</table>");
    }
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

fn percent(ratio: f64) -> String {
    format!("{:.2}%", 100.0 * ratio)
}

/// Renders the standalone report page for one contract.
pub fn render_html(r: &AnalysisResult) -> String {
    let c = &r.contract;
    let name = escape(&c.name);
    let mut h = Html(String::new());
    h.line("<!DOCTYPE html>");
    h.line("<html lang=\"en\">");
    h.line("<head>");
    h.line("<meta charset=\"utf-8\">");
    h.line(&format!("<title>Conflict report: {name}</title>"));
    h.line(&format!("<style>{STYLE}</style>"));
    h.line("</head>");
    h.line("<body>");
    h.line(&format!("<h1>Conflict report: {name}</h1>"));

    h.line("<h2>Contract</h2>");
    h.table(
        &["Property", "Value"],
        [
            ("Name", c.name.clone()),
            ("Path", r.path.clone()),
            ("State variables", c.state_variables.len().to_string()),
            ("Functions", c.functions.len().to_string()),
            ("Transactional functions", r.transactional.len().to_string()),
            ("Events", c.events.len().to_string()),
            ("Conflicts", r.conflicts.len().to_string()),
            ("Conflict percentage", percent(r.conflict_percentage)),
            ("Analysis time (ms)", r.analysis_ms.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| vec![k.to_string(), v]),
    );

    h.line("<h2>State variables</h2>");
    if c.state_variables.is_empty() {
        h.line("<p>No state variables.</p>");
    } else {
        h.table(
            &["Name", "Type", "Visibility", "Constant", "Immutable"],
            c.state_variables.iter().map(|v| {
                vec![
                    v.name.clone(),
                    v.type_name.to_string(),
                    v.visibility.to_string(),
                    yes_no(v.is_constant),
                    yes_no(v.is_immutable),
                ]
            }),
        );
    }

    h.line("<h2>Functions</h2>");
    if c.functions.is_empty() {
        h.line("<p>No functions.</p>");
    } else {
        h.table(
            &["Function", "Visibility", "Mutability", "Transactional"],
            r.function_keys.iter().zip(&c.functions).map(|(k, f)| {
                vec![
                    k.local().to_string(),
                    f.visibility.to_string(),
                    f.mutability.to_string(),
                    yes_no(r.is_transactional(k)),
                ]
            }),
        );
    }

    h.line("<h2>Conflicts</h2>");
    if r.conflicts.is_empty() {
        h.line("<p>No conflicts detected.</p>");
    } else {
        h.table(
            &["Function A", "Function B", "Variables", "Kind", "Severity", "Description"],
            r.conflicts.iter().map(|x| {
                let vars: Vec<&str> = x.variables.iter().map(|v| v.as_str()).collect();
                vec![
                    x.first.to_string(),
                    x.second.to_string(),
                    vars.join(", "),
                    x.kind.to_string(),
                    x.severity.to_string(),
                    x.description.clone(),
                ]
            }),
        );
    }

    h.line("<h2>Conflict matrix</h2>");
    let m = &r.matrix;
    if m.len() < 2 {
        h.line(&format!("<p>{NO_PAIRS}</p>"));
    } else {
        h.line("<table>");
        let mut head = String::from("<tr><th></th>");
        for (i, _) in m.functions.iter().enumerate() {
            let _ = write!(head, "<th>{}</th>", i + 1);
        }
        head.push_str("</tr>");
        h.line(&head);
        for (i, k) in m.functions.iter().enumerate() {
            let mut row = format!("<tr><th>{} {}</th>", i + 1, escape(k.as_str()));
            for j in 0..m.len() {
                row.push_str(if i == j {
                    "<td class=\"diag\"></td>"
                } else if m.get(i, j) {
                    "<td class=\"hit\">X</td>"
                } else {
                    "<td></td>"
                });
            }
            row.push_str("</tr>");
            h.line(&row);
        }
        h.line("</table>");
    }

    h.line("<h2>Statistics</h2>");
    let total = r.conflicts.len();
    h.table(
        &["Kind", "Count", "Share"],
        ConflictKind::ALL.iter().map(|k| {
            let n = r.counts_by_kind.get(k).copied().unwrap_or(0);
            let share = if total == 0 {
                String::new()
            } else {
                percent(n as f64 / total as f64)
            };
            vec![k.to_string(), n.to_string(), share]
        }),
    );
    h.line(&format!(
        "<p>Conflicting pairs: {} of {} matrix pairs.</p>",
        m.conflicting_pairs(),
        m.len() * m.len().saturating_sub(1) / 2
    ));
    h.line("</body>");
    h.line("</html>");
    h.0
}

/// Writes the report for `r` as `out_dir/file_name`.
pub fn write_html(r: &AnalysisResult, out_dir: &Path, file_name: &str) -> Result<PathBuf, ReportError> {
    let path = out_dir.join(file_name);
    fs::write(&path, render_html(r)).map_err(|source| ReportError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// `report_<contract>.html`, with `_<n>` appended for the n-th report of
/// the same contract name (n ≥ 2).
pub fn report_file_name(contract: &str, occurrence: usize) -> String {
    if occurrence <= 1 {
        format!("report_{contract}.html")
    } else {
        format!("report_{contract}_{occurrence}.html")
    }
}
