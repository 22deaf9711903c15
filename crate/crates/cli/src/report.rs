//! Plain structured-text reports: one key=value per line, LF endings,
//! deterministic field order. Identical runs produce identical bytes.

use std::fmt::Display;

#[derive(Debug, Default)]
pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Report { lines: Vec::new() }
    }

    pub fn push(&mut self, key: &str, value: impl Display) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

/// Fixed-precision float rendering so reports are byte-stable.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.9}")
}
