//! Task outcomes and their serialization: a human-readable `.txt`, a
//! machine-readable `.json` and one `.csv` per table, all deterministic.

use polytrunc_core::rational::{fmt_rat, Rat};
use serde_json::{json, Map, Value};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// One CSV cell. Exact and numeric values go in distinct columns.
#[derive(Clone, Debug)]
pub enum Cell {
    Float(f64),
    Exact(Rat),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

/// Floats in exponent notation (shortest round-trip digits).
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:e}")
    }
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Float(v) => fmt_float(*v),
            Cell::Exact(r) => fmt_rat(r),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Cell {
        Cell::Float(v)
    }
}

impl From<Rat> for Cell {
    fn from(v: Rat) -> Cell {
        Cell::Exact(v)
    }
}

impl From<Option<Rat>> for Cell {
    fn from(v: Option<Rat>) -> Cell {
        v.map_or(Cell::Empty, Cell::Exact)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Cell {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Cell {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Cell {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Cell {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Cell {
        Cell::Text(v)
    }
}

/// A named table written as `<task>-<name>.csv`.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Table {
        Table { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_header(name: &str, header: Vec<String>) -> Table {
        Table { name: name.into(), header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory csv");
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render)).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
    }

    /// Aligned plain-text rendering for the human report.
    pub fn to_text(&self) -> String {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::render).collect()).collect();
        let widths: Vec<usize> = (0..self.header.len())
            .map(|j| cells.iter().map(|r| r[j].chars().count()).chain([self.header[j].chars().count()]).max().unwrap_or(0))
            .collect();
        let line = |r: &[String]| {
            let parts: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            parts.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&self.header);
        for r in &cells {
            out += &line(r);
        }
        out
    }
}

/// A float as JSON (non-finite values as strings).
pub fn jnum(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(fmt_float(v))
    }
}

/// Everything a task produced.
#[derive(Clone, Debug, Default)]
pub struct TaskOutcome {
    pub name: String,
    pub kind: String,
    pub passed: bool,
    /// `(error kind, message)` when the task failed with an error.
    pub error: Option<(String, String)>,
    pub summary: Vec<String>,
    pub results: Map<String, Value>,
    pub tables: Vec<Table>,
}

/// Tables at most this long are repeated in the text report.
const INLINE_ROWS: usize = 60;

impl TaskOutcome {
    pub fn new(name: &str, kind: &str) -> TaskOutcome {
        TaskOutcome { name: name.into(), kind: kind.into(), passed: true, ..Default::default() }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }

    pub fn set(&mut self, key: &str, v: Value) {
        self.results.insert(key.into(), v);
    }

    /// Record a check; the task fails if any check fails.
    pub fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        self.summary.push(format!("{} {what}", if ok { "ok  " } else { "FAIL" }));
        self.passed &= ok;
    }

    pub fn fail_with(&mut self, kind: &str, message: String) {
        self.passed = false;
        self.summary.push(format!("error {kind}: {message}"));
        self.error = Some((kind.into(), message));
    }

    fn stem(&self, index: usize) -> String {
        format!("{:02}-{}", index + 1, self.name)
    }

    fn table_file(&self, index: usize, t: &Table) -> String {
        format!("{}-{}.csv", self.stem(index), t.name)
    }

    pub fn to_json(&self, index: usize) -> Value {
        json!({
            "task": self.name,
            "kind": self.kind,
            "status": if self.passed { "pass" } else { "fail" },
            "error": self.error.as_ref().map(|(k, m)| json!({"kind": k, "message": m})),
            "results": Value::Object(self.results.clone()),
            "tables": self.tables.iter().map(|t| self.table_file(index, t)).collect::<Vec<_>>(),
        })
    }

    pub fn to_text(&self, index: usize) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "task {} ({}): {}", self.name, self.kind, if self.passed { "PASS" } else { "FAIL" });
        for l in &self.summary {
            let _ = writeln!(s, "  {l}");
        }
        for t in &self.tables {
            let _ = writeln!(s, "\ntable {} ({} rows) -> {}", t.name, t.rows.len(), self.table_file(index, t));
            if t.rows.len() <= INLINE_ROWS {
                for l in t.to_text().lines() {
                    let _ = writeln!(s, "  {l}");
                }
            }
        }
        s
    }

    /// Write the report, JSON and CSV files; returns the paths written.
    pub fn write(&self, dir: &Path, index: usize) -> io::Result<Vec<PathBuf>> {
        let mut out = Vec::new();
        let stem = self.stem(index);
        let p = dir.join(format!("{stem}.txt"));
        fs::write(&p, self.to_text(index))?;
        out.push(p);
        let p = dir.join(format!("{stem}.json"));
        fs::write(&p, serde_json::to_string_pretty(&self.to_json(index)).expect("json") + "\n")?;
        out.push(p);
        for t in &self.tables {
            let p = dir.join(self.table_file(index, t));
            fs::write(&p, t.to_csv())?;
            out.push(p);
        }
        Ok(out)
    }
}

/// Scenario-level summary (`summary.json`, `summary.txt`).
pub fn write_summary(dir: &Path, scenario: &str, seed: u64, outcomes: &[TaskOutcome]) -> io::Result<()> {
    let all = outcomes.iter().all(|o| o.passed);
    let tasks: Vec<Value> = outcomes
        .iter()
        .map(|o| json!({"task": o.name, "kind": o.kind, "status": if o.passed { "pass" } else { "fail" }}))
        .collect();
    let v = json!({"scenario": scenario, "seed": seed, "status": if all { "pass" } else { "fail" }, "tasks": tasks});
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&v).expect("json") + "\n")?;
    let mut s = format!("scenario {scenario} (seed {seed}): {}\n", if all { "PASS" } else { "FAIL" });
    for (i, o) in outcomes.iter().enumerate() {
        let _ = writeln!(s, "  {:02} {:<7} {} ({})", i + 1, if o.passed { "PASS" } else { "FAIL" }, o.name, o.kind);
        if let Some((k, m)) = &o.error {
            let _ = writeln!(s, "       {k}: {m}");
        }
    }
    fs::write(dir.join("summary.txt"), s)
}
