//! Report and CSV assembly: fixed column orders, floats with 17 significant
//! digits, no timestamps.

use std::fmt::Write;

/// A float serialized with 17 significant digits.
pub fn g17(v: f64) -> String {
    format!("{v:.16e}")
}

/// A simple CSV table with a fixed header.
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            text: format!("{}\n", header.join(",")),
            columns: header.len(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns, "CSV row width mismatch");
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// One inequality check: `lhs <= rhs + slack`, reported with its margin so
/// a reader can see how close the comparison came.
pub struct Check {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.lhs <= self.rhs + self.slack
    }

    pub fn line(&self) -> String {
        let margin = self.rhs + self.slack - self.lhs;
        format!(
            "{}: lhs={} rhs={} slack={} margin={} {}\n",
            self.label,
            g17(self.lhs),
            g17(self.rhs),
            g17(self.slack),
            g17(margin),
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// Appends a check line to the report, returning 1 if it failed.
pub fn record(report: &mut String, check: Check) -> usize {
    let failed = !check.passed();
    report.push_str(&check.line());
    usize::from(failed)
}
