//! Line-oriented reports: a `key=value` block, then titled tables.

use std::fmt::Display;

use densefactor::element::format_set;
use densefactor::verify::VerificationReport;
use densefactor::Element;

/// Witness lines printed per failed check.
const SHOWN_WITNESSES: usize = 4;

#[derive(Debug, Clone, Default)]
pub struct Report {
    fields: Vec<(String, String)>,
    tables: Vec<(String, Vec<String>)>,
}

impl Report {
    pub fn field(&mut self, key: &str, value: impl Display) {
        self.fields.push((key.to_string(), value.to_string()));
    }

    pub fn table(&mut self, title: &str) -> &mut Vec<String> {
        self.tables.push((title.to_string(), Vec::new()));
        &mut self.tables.last_mut().unwrap().1
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn fields(&self) -> &[(String, String)] {
        &self.fields
    }

    pub fn tables(&self) -> &[(String, Vec<String>)] {
        &self.tables
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.fields {
            out.push_str(&format!("{k}={v}\n"));
        }
        for (title, rows) in &self.tables {
            out.push_str(&format!("\n## {title}\n"));
            for row in rows {
                out.push_str(row);
                out.push('\n');
            }
        }
        out
    }
}

/// Named oracle outcomes in the order they were run.
#[derive(Debug, Clone, Default)]
pub struct Checks {
    rows: Vec<(String, bool, String)>,
}

impl Checks {
    pub fn oracle(&mut self, name: &str, report: &VerificationReport) {
        let s = &report.stats;
        let mut detail = format!(
            "|A|={} |B|={} products={} checked={}",
            s.a_len, s.b_len, s.products, s.checked
        );
        if !report.passed() {
            detail.push_str(&format!(" violations={}", report.violations));
            for w in report.witnesses.iter().take(SHOWN_WITNESSES) {
                detail.push_str(&format!("\n    {w}"));
            }
        }
        self.rows.push((name.to_string(), report.passed(), detail));
    }

    pub fn flag(&mut self, name: &str, ok: bool, detail: impl Display) {
        self.rows.push((name.to_string(), ok, detail.to_string()));
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|(_, ok, _)| *ok)
    }

    pub fn count(&self) -> usize {
        self.rows.len()
    }

    pub fn write(&self, report: &mut Report) {
        let width = self.rows.iter().map(|(n, _, _)| n.len()).max().unwrap_or(0);
        let rows = report.table("verification");
        for (name, ok, detail) in &self.rows {
            let verdict = if *ok { "pass" } else { "fail" };
            rows.push(format!("{name:<width$}  {verdict}  {detail}"));
        }
    }
}

pub fn set_line<'a>(label: &str, set: impl IntoIterator<Item = &'a Element>) -> String {
    format!("{label} = {}", format_set(set))
}
