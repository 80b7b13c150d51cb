//! Trace files: a header plus one row per iterate, as JSON or CSV.
//!
//! Both formats round-trip bit for bit. JSON writes finite numbers in
//! shortest round-trip form, absent quantities as `null` and non-finite
//! values as the strings `"NaN"`, `"inf"`, `"-inf"`. CSV carries the header
//! as a `#` comment line holding the same JSON, then a column line, then rows;
//! absent quantities are empty fields.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::harness::experiment::ExperimentConfig;
use crate::trace::{IterRecord, SolveStatus, SolveTrace};

pub const COLUMNS: [&str; 9] = [
    "k",
    "res_norm",
    "rel_res",
    "q",
    "alpha",
    "curvature",
    "gamma",
    "u_kk",
    "zeta",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub config: Option<ExperimentConfig>,
    pub matrix: String,
    pub n: usize,
    pub method: String,
    #[serde(with = "opt_num")]
    pub kappa: Option<f64>,
    pub status: Option<SolveStatus>,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceFile {
    pub header: TraceHeader,
    pub rows: Vec<IterRecord<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceFormat {
    Json,
    Csv,
}

impl TraceFormat {
    /// From a file extension; anything but `.csv` is JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => TraceFormat::Csv,
            _ => TraceFormat::Json,
        }
    }
}

impl std::str::FromStr for TraceFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(TraceFormat::Json),
            "csv" => Ok(TraceFormat::Csv),
            _ => Err(Error::InvalidArgument(format!(
                "unknown trace format '{s}'"
            ))),
        }
    }
}

mod num {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&format!("{v:?}"))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

mod opt_num {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "num")] f64);

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        v.map(Wrap).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<f64>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

#[derive(Serialize, Deserialize)]
struct Row {
    k: usize,
    #[serde(with = "num")]
    res_norm: f64,
    #[serde(with = "num")]
    rel_res: f64,
    #[serde(with = "num")]
    q: f64,
    #[serde(with = "opt_num")]
    alpha: Option<f64>,
    #[serde(with = "opt_num")]
    curvature: Option<f64>,
    #[serde(with = "opt_num")]
    gamma: Option<f64>,
    #[serde(with = "opt_num")]
    u_kk: Option<f64>,
    #[serde(with = "opt_num")]
    zeta: Option<f64>,
}

impl From<&IterRecord<f64>> for Row {
    fn from(r: &IterRecord<f64>) -> Self {
        Row {
            k: r.k,
            res_norm: r.res_norm,
            rel_res: r.rel_res,
            q: r.q,
            alpha: r.alpha,
            curvature: r.curvature,
            gamma: r.gamma,
            u_kk: r.u_kk,
            zeta: r.zeta,
        }
    }
}

impl From<Row> for IterRecord<f64> {
    fn from(r: Row) -> Self {
        IterRecord {
            k: r.k,
            res_norm: r.res_norm,
            rel_res: r.rel_res,
            q: r.q,
            alpha: r.alpha,
            curvature: r.curvature,
            gamma: r.gamma,
            u_kk: r.u_kk,
            zeta: r.zeta,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonFile {
    header: TraceHeader,
    rows: Vec<Row>,
}

fn fmt_num(v: f64) -> String {
    format!("{v:?}")
}

fn parse_num(s: &str, line: usize) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad number '{s}'"),
    })
}

impl TraceFile {
    pub fn from_trace(header: TraceHeader, trace: &SolveTrace<f64>) -> Self {
        TraceFile {
            header: TraceHeader {
                status: trace.status(),
                iterations: trace.iterations(),
                ..header
            },
            rows: trace.records().to_vec(),
        }
    }

    /// Iterations recorded (rows minus the initial row).
    pub fn iterations(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    pub fn write_json(&self, w: impl Write) -> Result<()> {
        let file = JsonFile {
            header: self.header.clone(),
            rows: self.rows.iter().map(Row::from).collect(),
        };
        serde_json::to_writer_pretty(w, &file)?;
        Ok(())
    }

    pub fn read_json(r: impl Read) -> Result<Self> {
        let file: JsonFile = serde_json::from_reader(r)?;
        Ok(TraceFile {
            header: file.header,
            rows: file.rows.into_iter().map(IterRecord::from).collect(),
        })
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "# {}", serde_json::to_string(&self.header)?)?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(COLUMNS)?;
        let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
        for r in &self.rows {
            out.write_record([
                r.k.to_string(),
                fmt_num(r.res_norm),
                fmt_num(r.rel_res),
                fmt_num(r.q),
                opt(r.alpha),
                opt(r.curvature),
                opt(r.gamma),
                opt(r.u_kk),
                opt(r.zeta),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv(r: impl Read) -> Result<Self> {
        let mut text = String::new();
        BufReader::new(r).read_to_string(&mut text)?;
        let mut header = None;
        for line in text.as_bytes().lines() {
            let line = line?;
            match line.strip_prefix('#') {
                Some(rest) => {
                    header = Some(serde_json::from_str::<TraceHeader>(rest.trim())?);
                    break;
                }
                None if line.trim().is_empty() => continue,
                None => break,
            }
        }
        let header = header.ok_or_else(|| Error::Parse {
            line: 1,
            message: "missing '#' header line".into(),
        })?;
        let mut rd = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let cols = rd.headers()?.clone();
        if cols.iter().ne(COLUMNS) {
            return Err(Error::Parse {
                line: 2,
                message: format!("unexpected columns {cols:?}"),
            });
        }
        let mut rows = Vec::new();
        for (i, rec) in rd.records().enumerate() {
            let rec = rec?;
            let line = i + 3;
            let f = |j: usize| parse_num(&rec[j], line);
            let opt = |j: usize| {
                if rec[j].is_empty() {
                    Ok(None)
                } else {
                    f(j).map(Some)
                }
            };
            rows.push(IterRecord {
                k: rec[0].parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("bad index '{}'", &rec[0]),
                })?,
                res_norm: f(1)?,
                rel_res: f(2)?,
                q: f(3)?,
                alpha: opt(4)?,
                curvature: opt(5)?,
                gamma: opt(6)?,
                u_kk: opt(7)?,
                zeta: opt(8)?,
            });
        }
        Ok(TraceFile { header, rows })
    }

    pub fn write(&self, path: impl AsRef<Path>, format: TraceFormat) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        match format {
            TraceFormat::Json => self.write_json(&mut w)?,
            TraceFormat::Csv => self.write_csv(&mut w)?,
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a trace file, choosing the format from the extension.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path)?;
        match TraceFormat::from_path(path) {
            TraceFormat::Json => Self::read_json(f),
            TraceFormat::Csv => Self::read_csv(f),
        }
    }
}

/// Writes `trace` with `header` to `path`.
pub fn export_trace(
    header: TraceHeader,
    trace: &SolveTrace<f64>,
    format: TraceFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    TraceFile::from_trace(header, trace).write(path, format)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> TraceHeader {
        TraceHeader {
            config: None,
            matrix: "test".into(),
            n: 3,
            method: "cg".into(),
            kappa: Some(1.0 / 3.0),
            status: Some(SolveStatus::Converged),
            iterations: 2,
        }
    }

    fn rows() -> Vec<IterRecord<f64>> {
        let mut r = vec![IterRecord {
            k: 0,
            res_norm: 0.1 + 0.2,
            rel_res: 1.0,
            q: -1e-300,
            alpha: None,
            curvature: None,
            gamma: None,
            u_kk: None,
            zeta: None,
        }];
        r.push(IterRecord {
            k: 1,
            res_norm: f64::MIN_POSITIVE,
            rel_res: f64::NAN,
            q: f64::NEG_INFINITY,
            alpha: Some(std::f64::consts::PI),
            curvature: Some(f64::MAX),
            gamma: Some(5e-324),
            u_kk: Some(-0.0),
            zeta: Some(f64::INFINITY),
        });
        r
    }

    fn same(a: &TraceFile, b: &TraceFile) {
        assert_eq!(a.header, b.header);
        assert_eq!(a.rows.len(), b.rows.len());
        let bits = |r: &IterRecord<f64>| {
            [
                Some(r.res_norm),
                Some(r.rel_res),
                Some(r.q),
                r.alpha,
                r.curvature,
                r.gamma,
                r.u_kk,
                r.zeta,
            ]
            .map(|v| v.map(f64::to_bits))
        };
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.k, y.k);
            assert_eq!(bits(x), bits(y));
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let t = TraceFile {
            header: header(),
            rows: rows(),
        };
        let mut buf = Vec::new();
        t.write_json(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("\"alpha\": null"));
        same(&t, &TraceFile::read_json(buf.as_slice()).unwrap());
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let t = TraceFile {
            header: header(),
            rows: rows(),
        };
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 2 + t.rows.len());
        assert!(text.starts_with("# {"));
        same(&t, &TraceFile::read_csv(buf.as_slice()).unwrap());
    }

    #[test]
    fn empty_trace_is_header_only() {
        let t = TraceFile {
            header: header(),
            rows: vec![],
        };
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap().lines().count(), 2);
        assert!(TraceFile::read_csv(buf.as_slice()).unwrap().rows.is_empty());
        let mut buf = Vec::new();
        t.write_json(&mut buf).unwrap();
        assert!(TraceFile::read_json(buf.as_slice())
            .unwrap()
            .rows
            .is_empty());
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(
            TraceFormat::from_path(Path::new("a/b.CSV")),
            TraceFormat::Csv
        );
        assert_eq!(
            TraceFormat::from_path(Path::new("a/b.json")),
            TraceFormat::Json
        );
    }
}
