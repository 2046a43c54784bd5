//! Per-run artifacts: record CSV, `key=value` summary sidecar, trajectory CSV.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use streamdrift_core::eval::{EvalRecord, RunSummary, TrajectoryPoint};

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 7] = [
    "t",
    "correct",
    "window_acc",
    "tracking_err",
    "predict_ns",
    "update_ns",
    "model_size",
];

/// Summary plus free-form run metadata (seed, stream parameters, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryFile {
    pub summary: RunSummary,
    pub meta: Vec<(String, String)>,
}

impl SummaryFile {
    pub fn lines(&self) -> Vec<(String, String)> {
        let s = &self.summary;
        let mut out: Vec<(String, String)> = vec![
            ("learner".into(), s.learner.clone()),
            ("stream".into(), s.stream.clone()),
            ("instances".into(), s.instances.to_string()),
            ("evaluated".into(), s.evaluated.to_string()),
            ("correct".into(), s.correct.to_string()),
            ("overall_accuracy".into(), s.overall_accuracy.to_string()),
            ("predict_ns".into(), s.predict_ns.to_string()),
            ("update_ns".into(), s.update_ns.to_string()),
            ("total_ns".into(), s.total_ns.to_string()),
            ("wall_ns".into(), s.wall_ns.to_string()),
            ("final_model_size".into(), s.final_model_size.to_string()),
        ];
        out.extend(self.meta.iter().cloned());
        out
    }
}

/// `run.csv` -> `run.summary`
pub fn summary_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("summary")
}

fn csv_error(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_records<W: Write>(records: &[EvalRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.t.to_string(),
            u8::from(r.correct).to_string(),
            r.window_accuracy.to_string(),
            r.tracking_error.map(|v| v.to_string()).unwrap_or_default(),
            r.predict_ns.to_string(),
            r.update_ns.to_string(),
            r.model_size.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the record CSV and its summary sidecar.
pub fn emit_csv(records: &[EvalRecord], summary: &SummaryFile, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_records(records, std::io::BufWriter::new(file)).map_err(csv_error(path))?;
    write_summary(summary, &summary_path(path))
}

pub fn write_summary(summary: &SummaryFile, path: &Path) -> Result<()> {
    let mut text = String::new();
    for (k, v) in summary.lines() {
        text.push_str(&k);
        text.push('=');
        text.push_str(&v);
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_summary(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::malformed(path, i as u64 + 1, "expected key=value"))?;
        map.insert(k.to_string(), v.to_string());
    }
    Ok(map)
}

pub fn read_records(path: &Path) -> Result<Vec<EvalRecord>> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_error(path))?;
    let header = reader.headers().map_err(csv_error(path))?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::malformed(path, 1, "unexpected header"));
    }
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(csv_error(path))?;
        let line = row.position().map_or(0, |p| p.line());
        let bad = |col: &str| Error::malformed(path, line, format!("bad `{col}` value"));
        let field = |i: usize| row.get(i).unwrap_or("");
        out.push(EvalRecord {
            t: field(0).parse().map_err(|_| bad("t"))?,
            correct: match field(1) {
                "1" => true,
                "0" => false,
                _ => return Err(bad("correct")),
            },
            window_accuracy: field(2).parse().map_err(|_| bad("window_acc"))?,
            tracking_error: match field(3) {
                "" => None,
                v => Some(v.parse().map_err(|_| bad("tracking_err"))?),
            },
            predict_ns: field(4).parse().map_err(|_| bad("predict_ns"))?,
            update_ns: field(5).parse().map_err(|_| bad("update_ns"))?,
            model_size: field(6).parse().map_err(|_| bad("model_size"))?,
        });
    }
    Ok(out)
}

/// `t,theta_0..,estimate_0..` with one row per captured step.
pub fn emit_trajectory(points: &[TrajectoryPoint], path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let d = points.first().map_or(0, |p| p.theta.len());
    let mut header = vec![String::from("t")];
    header.extend((0..d).map(|i| format!("theta_{i}")));
    header.extend((0..d).map(|i| format!("estimate_{i}")));
    let result: csv::Result<()> = (|| {
        w.write_record(&header)?;
        for p in points {
            let mut row = vec![p.t.to_string()];
            row.extend(p.theta.iter().map(f64::to_string));
            row.extend(p.estimate.iter().map(f64::to_string));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    })();
    result.map_err(csv_error(path))
}
