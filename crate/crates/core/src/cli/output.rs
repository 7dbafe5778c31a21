//! Deterministic text output: 17 significant digits, LF line endings.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

/// Float with 17 significant digits, enough to round-trip an f64.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a CSV file. Cells are pre-formatted.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    std::fs::write(path, s)
}

/// Key-value report written as `report.txt` and `report.kv`.
#[derive(Debug, Clone)]
pub struct Report {
    command: String,
    seed: u64,
    entries: Vec<(String, String)>,
    notes: Vec<String>,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Self { command: command.to_string(), seed, entries: Vec::new(), notes: Vec::new() }
    }

    pub fn num(&mut self, key: &str, v: f64) -> &mut Self {
        self.entries.push((key.to_string(), fmt17(v)));
        self
    }

    pub fn int(&mut self, key: &str, v: usize) -> &mut Self {
        self.entries.push((key.to_string(), v.to_string()));
        self
    }

    pub fn flag(&mut self, key: &str, v: bool) -> &mut Self {
        self.entries.push((key.to_string(), v.to_string()));
        self
    }

    pub fn text(&mut self, key: &str, v: &str) -> &mut Self {
        self.entries.push((key.to_string(), v.to_string()));
        self
    }

    /// Free-text line shown in `report.txt` only.
    pub fn note(&mut self, line: impl Into<String>) -> &mut Self {
        self.notes.push(line.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn txt(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "phiface {}", self.command);
        let _ = writeln!(s, "seed: {}", self.seed);
        s.push('\n');
        let width = self.entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k:width$}  {v}");
        }
        if !self.notes.is_empty() {
            s.push('\n');
            for n in &self.notes {
                let _ = writeln!(s, "{n}");
            }
        }
        s
    }

    pub fn kv(&self) -> String {
        let mut s = format!("command={}\nseed={}\n", self.command, self.seed);
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        std::fs::write(dir.join("report.txt"), self.txt())?;
        std::fs::write(dir.join("report.kv"), self.kv())
    }
}
