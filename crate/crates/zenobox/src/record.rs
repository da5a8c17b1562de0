//! Result records and their CSV form.
//!
//! Columns are `experiment, point, param.<name>…, value.<name>…, flags,
//! config_hash, seed, code_version`. Floats are written with 17 significant
//! digits so every value survives a round trip exactly.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

const PARAM_PREFIX: &str = "param.";
const VALUE_PREFIX: &str = "value.";
const LEADING: [&str; 2] = ["experiment", "point"];
const TRAILING: [&str; 4] = ["flags", "config_hash", "seed", "code_version"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    /// sha256 of the canonical config text.
    pub config_hash: String,
    pub seed: u64,
    pub code_version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub experiment: String,
    /// Position in sweep order.
    pub point: usize,
    pub params: Vec<(String, f64)>,
    pub values: Vec<(String, f64)>,
    /// Space-separated status words, e.g. `single-regime`; empty when clean.
    pub flags: String,
    pub provenance: Provenance,
}

impl ResultRecord {
    pub fn new(experiment: &str, point: usize, provenance: &Provenance) -> Self {
        Self {
            experiment: experiment.to_string(),
            point,
            params: Vec::new(),
            values: Vec::new(),
            flags: String::new(),
            provenance: provenance.clone(),
        }
    }

    pub fn param(mut self, name: &str, v: f64) -> Self {
        self.params.push((name.to_string(), v));
        self
    }

    pub fn value(mut self, name: &str, v: f64) -> Self {
        self.values.push((name.to_string(), v));
        self
    }

    pub fn flag(mut self, flag: &str) -> Self {
        if !self.flags.is_empty() {
            self.flags.push(' ');
        }
        self.flags.push_str(flag);
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.params
            .iter()
            .chain(&self.values)
            .find(|(k, _)| k == name)
            .map(|(_, v)| *v)
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.split(' ').any(|f| f == flag)
    }

    fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = LEADING.iter().map(|s| s.to_string()).collect();
        h.extend(
            self.params
                .iter()
                .map(|(k, _)| format!("{PARAM_PREFIX}{k}")),
        );
        h.extend(
            self.values
                .iter()
                .map(|(k, _)| format!("{VALUE_PREFIX}{k}")),
        );
        h.extend(TRAILING.iter().map(|s| s.to_string()));
        h
    }

    fn row(&self) -> Vec<String> {
        let mut r = vec![self.experiment.clone(), self.point.to_string()];
        r.extend(self.params.iter().map(|(_, v)| format_float(*v)));
        r.extend(self.values.iter().map(|(_, v)| format_float(*v)));
        r.push(self.flags.clone());
        r.push(self.provenance.config_hash.clone());
        r.push(self.provenance.seed.to_string());
        r.push(self.provenance.code_version.clone());
        r
    }
}

/// 17 significant digits in scientific notation; `NaN`, `inf`, `-inf` for
/// non-finite values.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// One sample of a curve for plotting, e.g. a structure function.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    pub curve: String,
    pub x: f64,
    pub y: f64,
}

/// Serializes records to CSV text. All records must share one column set.
pub fn records_to_csv(records: &[ResultRecord]) -> Result<Vec<u8>> {
    let header = match records.first() {
        Some(r) => r.header(),
        None => {
            let mut h: Vec<String> = LEADING.iter().map(|s| s.to_string()).collect();
            h.extend(TRAILING.iter().map(|s| s.to_string()));
            h
        }
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    let to_fmt = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(&header).map_err(to_fmt)?;
    for r in records {
        if r.header() != header {
            return Err(Error::Format(format!(
                "record {} of {} has a different column set",
                r.point, r.experiment
            )));
        }
        w.write_record(r.row()).map_err(to_fmt)?;
    }
    w.into_inner().map_err(|e| Error::Format(e.to_string()))
}

pub fn emit_csv(records: &[ResultRecord], path: &Path) -> Result<()> {
    let bytes = records_to_csv(records)?;
    write_bytes(path, &bytes)
}

pub fn series_to_csv(points: &[SeriesPoint]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    let to_fmt = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(["curve", "x", "y"]).map_err(to_fmt)?;
    for p in points {
        w.write_record([p.curve.clone(), format_float(p.x), format_float(p.y)])
            .map_err(to_fmt)?;
    }
    w.into_inner().map_err(|e| Error::Format(e.to_string()))
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

/// Parses CSV text written by [`records_to_csv`].
pub fn parse_records(text: &[u8]) -> Result<Vec<ResultRecord>> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text);
    let header: Vec<String> = rd
        .headers()
        .map_err(|e| Error::Format(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let n = header.len();
    if n < LEADING.len() + TRAILING.len()
        || header[..2] != LEADING
        || header[n - TRAILING.len()..] != TRAILING
    {
        return Err(Error::Format("unexpected header".into()));
    }
    let middle = &header[2..n - TRAILING.len()];
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(|e| Error::Format(e.to_string()))?;
        let field = |i: usize| row.get(i).unwrap_or_default();
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Format(format!("bad number {s:?}")))
        };
        let mut rec = ResultRecord {
            experiment: field(0).to_string(),
            point: field(1)
                .parse()
                .map_err(|_| Error::Format(format!("bad point index {:?}", field(1))))?,
            params: Vec::new(),
            values: Vec::new(),
            flags: field(n - 4).to_string(),
            provenance: Provenance {
                config_hash: field(n - 3).to_string(),
                seed: field(n - 2)
                    .parse()
                    .map_err(|_| Error::Format(format!("bad seed {:?}", field(n - 2))))?,
                code_version: field(n - 1).to_string(),
            },
        };
        for (i, name) in middle.iter().enumerate() {
            let v = num(field(i + 2))?;
            if let Some(k) = name.strip_prefix(PARAM_PREFIX) {
                rec.params.push((k.to_string(), v));
            } else if let Some(k) = name.strip_prefix(VALUE_PREFIX) {
                rec.values.push((k.to_string(), v));
            } else {
                return Err(Error::Format(format!("unknown column {name:?}")));
            }
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn read_records(path: &Path) -> Result<Vec<ResultRecord>> {
    let text = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_records(&text).map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}
