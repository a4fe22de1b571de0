//! Scan results files (CSV or JSON lines), one record per `(level, weight)`.
//!
//! Re-running a scan against an existing file skips the cells already
//! recorded; `force` rewrites the file without the cells about to be rerun.

use std::collections::HashSet;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::decision::{Verdict, VerdictSink, WeierstrassVerdict};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordFormat {
    Csv,
    Jsonl,
}

impl RecordFormat {
    /// `.csv` is CSV; anything else is JSON lines.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => RecordFormat::Csv,
            _ => RecordFormat::Jsonl,
        }
    }
}

impl FromStr for RecordFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(RecordFormat::Csv),
            "jsonl" => Ok(RecordFormat::Jsonl),
            _ => Err(Error::InvalidArgument(format!(
                "unknown record format {s:?}"
            ))),
        }
    }
}

pub const CSV_HEADER: [&str; 11] = [
    "level",
    "weight",
    "genus",
    "t",
    "pivots",
    "verdict",
    "methods",
    "agreement",
    "precision",
    "status",
    "detail",
];

/// Flat form of a verdict or a failure. `pivots` is comma-joined and
/// `methods` is `+`-joined so that both formats carry the same columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub level: u64,
    pub weight: u32,
    pub genus: Option<usize>,
    pub t: Option<usize>,
    pub pivots: String,
    pub verdict: String,
    pub methods: String,
    pub agreement: Option<bool>,
    pub precision: Option<usize>,
    /// `ok` or `error`.
    pub status: String,
    pub detail: String,
}

impl ScanRecord {
    pub fn from_verdict(v: &WeierstrassVerdict) -> Self {
        let detail = match v.verdict {
            Verdict::NotApplicable(reason) => reason.to_string(),
            _ => String::new(),
        };
        ScanRecord {
            level: v.level,
            weight: v.weight,
            genus: v.genus,
            t: v.t,
            pivots: join(&v.pivots, ","),
            verdict: v.verdict.to_string(),
            methods: join(&v.methods_run, "+"),
            agreement: Some(v.agreement),
            precision: v.precision_used,
            status: "ok".into(),
            detail,
        }
    }

    pub fn failure(level: u64, weight: u32, error: &Error) -> Self {
        ScanRecord {
            level,
            weight,
            genus: None,
            t: None,
            pivots: String::new(),
            verdict: "Error".into(),
            methods: String::new(),
            agreement: None,
            precision: None,
            status: "error".into(),
            detail: error.to_string(),
        }
    }

    pub fn pivot_list(&self) -> Result<Vec<usize>> {
        if self.pivots.is_empty() {
            return Ok(Vec::new());
        }
        self.pivots
            .split(',')
            .map(|p| {
                p.trim()
                    .parse()
                    .map_err(|_| Error::Records(format!("bad pivot list {:?}", self.pivots)))
            })
            .collect()
    }

    pub fn cell(&self) -> (u64, u32) {
        (self.level, self.weight)
    }
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

pub fn read_records(path: &Path, format: RecordFormat) -> Result<Vec<ScanRecord>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    match format {
        RecordFormat::Csv => {
            let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
            reader
                .deserialize()
                .map(|r| r.map_err(|e| csv_error(path, e)))
                .collect()
        }
        RecordFormat::Jsonl => {
            let file = File::open(path).map_err(|e| Error::io(path, e))?;
            let mut out = Vec::new();
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(|e| Error::io(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                out.push(
                    serde_json::from_str(&line).map_err(|e| {
                        Error::Records(format!("{}:{}: {e}", path.display(), i + 1))
                    })?,
                );
            }
            Ok(out)
        }
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::Records(format!("{}: {e}", path.display()))
}

/// Appends records to a results file; safe to share across threads.
pub struct ResultsFile {
    path: PathBuf,
    format: RecordFormat,
    lock: Mutex<()>,
}

impl ResultsFile {
    pub fn new(path: impl Into<PathBuf>, format: RecordFormat) -> Self {
        ResultsFile {
            path: path.into(),
            format,
            lock: Mutex::new(()),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Cells that already have a record.
    pub fn recorded_cells(&self) -> Result<HashSet<(u64, u32)>> {
        Ok(read_records(&self.path, self.format)?
            .iter()
            .map(ScanRecord::cell)
            .collect())
    }

    /// Rewrites the file keeping only records whose cell is not in `drop`.
    pub fn remove_cells(&self, drop: &HashSet<(u64, u32)>) -> Result<()> {
        let _guard = self.lock.lock().expect("results lock poisoned");
        let keep: Vec<ScanRecord> = read_records(&self.path, self.format)?
            .into_iter()
            .filter(|r| !drop.contains(&r.cell()))
            .collect();
        let tmp = self.path.with_extension("tmp");
        if tmp.exists() {
            fs::remove_file(&tmp).map_err(|e| Error::io(&tmp, e))?;
        }
        for r in &keep {
            self.append_to(&tmp, r)?;
        }
        if keep.is_empty() {
            if self.path.exists() {
                fs::remove_file(&self.path).map_err(|e| Error::io(&self.path, e))?;
            }
            return Ok(());
        }
        fs::rename(&tmp, &self.path).map_err(|e| Error::io(&self.path, e))
    }

    fn append_to(&self, path: &Path, record: &ScanRecord) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let fresh = !path.exists() || fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        match self.format {
            RecordFormat::Csv => {
                let mut w = csv::WriterBuilder::new()
                    .has_headers(fresh)
                    .from_writer(&mut file);
                w.serialize(record).map_err(|e| csv_error(path, e))?;
                w.flush().map_err(|e| Error::io(path, e))?;
            }
            RecordFormat::Jsonl => {
                let line = serde_json::to_string(record)
                    .map_err(|e| Error::Records(format!("serializing record: {e}")))?;
                writeln!(file, "{line}").map_err(|e| Error::io(path, e))?;
            }
        }
        Ok(())
    }
}

impl VerdictSink for ResultsFile {
    fn record(&self, record: &ScanRecord) -> Result<()> {
        let _guard = self.lock.lock().expect("results lock poisoned");
        self.append_to(&self.path, record)
    }
}
