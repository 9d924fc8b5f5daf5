use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::OutputFormat;

/// Per-replicate results with a fixed, named column set.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<ResultRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub replicate: u64,
    pub values: Vec<f64>,
}

impl ResultTable {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self { columns: columns.iter().map(|c| c.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, replicate: u64, values: Vec<f64>) {
        assert_eq!(values.len(), self.columns.len(), "row width does not match columns");
        self.rows.push(ResultRow { replicate, values });
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values[idx]).collect())
    }
}

/// Aggregate statistics of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub n: usize,
    pub p: f64,
    pub z0: f64,
    pub lambda: f64,
    pub replicates: usize,
    pub master_seed: u64,
    pub metrics: BTreeMap<String, f64>,
}

impl Summary {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }
}

fn fmt_value(v: f64) -> String {
    format!("{v}")
}

/// Writes the table as CSV (header plus one line per row).
pub fn write_csv<W: Write>(table: &ResultTable, out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["replicate".to_string()];
    header.extend(table.columns.iter().cloned());
    w.write_record(&header)?;
    for row in &table.rows {
        let mut rec = vec![row.replicate.to_string()];
        rec.extend(row.values.iter().map(|&v| fmt_value(v)));
        w.write_record(&rec)?;
    }
    w.flush()
}

/// Writes the table as JSON lines, one object per row.
pub fn write_jsonl<W: Write>(table: &ResultTable, mut out: W) -> io::Result<()> {
    for row in &table.rows {
        let mut obj = serde_json::Map::new();
        obj.insert("replicate".into(), row.replicate.into());
        for (c, &v) in table.columns.iter().zip(&row.values) {
            obj.insert(c.clone(), serde_json::Number::from_f64(v).map_or(serde_json::Value::Null, Into::into));
        }
        serde_json::to_writer(&mut out, &obj)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Writes `<stem>.<csv|jsonl>` and `<stem>_summary.json` into `dir`.
pub fn emit(
    table: &ResultTable,
    summary: &Summary,
    format: OutputFormat,
    dir: &Path,
    stem: &str,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let ext = match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Jsonl => "jsonl",
    };
    let rows_path = dir.join(format!("{stem}.{ext}"));
    let file = io::BufWriter::new(fs::File::create(&rows_path)?);
    match format {
        OutputFormat::Csv => write_csv(table, file)?,
        OutputFormat::Jsonl => write_jsonl(table, file)?,
    }
    let summary_path = dir.join(format!("{stem}_summary.json"));
    let mut text = serde_json::to_string_pretty(summary).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(&summary_path, text)?;
    Ok(vec![rows_path, summary_path])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: usize) -> ResultTable {
        let mut t = ResultTable::new(&["a", "b"]);
        for i in 0..rows {
            t.push(i as u64, vec![i as f64 * 0.5, -1.25]);
        }
        t
    }

    #[test]
    fn empty_table_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&table(0), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "replicate,a,b\n");
    }

    #[test]
    fn three_rows_four_lines() {
        let mut buf = Vec::new();
        write_csv(&table(3), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().nth(2).unwrap(), "1,0.5,-1.25");
    }

    #[test]
    fn jsonl_rows() {
        let mut buf = Vec::new();
        write_jsonl(&table(2), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let v: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
        assert_eq!(v["replicate"], 1);
        assert_eq!(v["a"], 0.5);
    }

    #[test]
    fn emit_is_byte_stable() {
        let dir = tempfile::tempdir().unwrap();
        let summary = Summary {
            experiment: "broadcast".into(),
            n: 3,
            p: 1.0,
            z0: 1.0,
            lambda: 1.0,
            replicates: 3,
            master_seed: 1,
            metrics: [("x".to_string(), 0.1)].into_iter().collect(),
        };
        let a = emit(&table(3), &summary, OutputFormat::Csv, &dir.path().join("a"), "t").unwrap();
        let b = emit(&table(3), &summary, OutputFormat::Csv, &dir.path().join("b"), "t").unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
        }
    }
}
