//! Per-step trajectory records and their JSONL / CSV serialization.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::IndicatorColor;
use crate::error::{Error, Result};

/// One agent step. Field order here is the documented column / key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    /// Episode index within the run.
    pub episode: u64,
    /// Step index within the episode, starting at 1 for the first action.
    pub step: u64,
    /// Domain time after the step, seconds.
    pub time: f64,
    /// The state the reward was computed from (sensor path unless the
    /// oracle flag is on).
    pub theta: f64,
    pub alpha: f64,
    pub theta_dot: f64,
    pub alpha_dot: f64,
    pub observation: Vec<f64>,
    pub voltage_commanded: f64,
    pub voltage_actuated: f64,
    pub reward: f64,
    pub indicator: IndicatorColor,
    pub done: bool,
}

pub const CSV_HEADER: [&str; 13] = [
    "episode",
    "step",
    "time",
    "theta",
    "alpha",
    "theta_dot",
    "alpha_dot",
    "observation",
    "voltage_commanded",
    "voltage_actuated",
    "reward",
    "indicator",
    "done",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryFormat {
    Jsonl,
    Csv,
}

impl FromStr for TrajectoryFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(TrajectoryFormat::Jsonl),
            "csv" => Ok(TrajectoryFormat::Csv),
            _ => Err(Error::Usage(format!("unknown format `{s}`; valid formats: jsonl, csv"))),
        }
    }
}

impl TrajectoryFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            TrajectoryFormat::Jsonl => "jsonl",
            TrajectoryFormat::Csv => "csv",
        }
    }
}

/// Destination for trajectory records.
pub trait RecordSink: Send {
    fn push(&mut self, record: &TrajectoryRecord) -> Result<()>;

    fn flush(&mut self) -> Result<()> {
        Ok(())
    }
}

impl RecordSink for Vec<TrajectoryRecord> {
    fn push(&mut self, record: &TrajectoryRecord) -> Result<()> {
        Vec::push(self, record.clone());
        Ok(())
    }
}

fn csv_fields(r: &TrajectoryRecord) -> [String; 13] {
    let obs = r
        .observation
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(";");
    [
        r.episode.to_string(),
        r.step.to_string(),
        r.time.to_string(),
        r.theta.to_string(),
        r.alpha.to_string(),
        r.theta_dot.to_string(),
        r.alpha_dot.to_string(),
        obs,
        r.voltage_commanded.to_string(),
        r.voltage_actuated.to_string(),
        r.reward.to_string(),
        r.indicator.as_str().to_string(),
        r.done.to_string(),
    ]
}

enum Encoder {
    Jsonl(BufWriter<File>),
    Csv(Box<csv::Writer<File>>),
}

/// Buffered file writer; rows reach the disk on [`RecordSink::flush`] or drop.
pub struct TrajectoryWriter {
    path: PathBuf,
    encoder: Encoder,
}

impl TrajectoryWriter {
    /// Creates (truncates) `path`. CSV files get their header immediately.
    pub fn create(path: &Path, format: TrajectoryFormat) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let encoder = match format {
            TrajectoryFormat::Jsonl => Encoder::Jsonl(BufWriter::new(file)),
            TrajectoryFormat::Csv => {
                let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
                w.write_record(CSV_HEADER).map_err(|e| csv_error(path, e))?;
                Encoder::Csv(Box::new(w))
            }
        };
        Ok(Self {
            path: path.to_path_buf(),
            encoder,
        })
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    }
}

impl RecordSink for TrajectoryWriter {
    fn push(&mut self, record: &TrajectoryRecord) -> Result<()> {
        match &mut self.encoder {
            Encoder::Jsonl(w) => {
                serde_json::to_writer(&mut *w, record).map_err(|e| Error::Parse {
                    path: self.path.clone(),
                    message: e.to_string(),
                })?;
                w.write_all(b"\n").map_err(|e| Error::io(&self.path, e))
            }
            Encoder::Csv(w) => w.write_record(csv_fields(record)).map_err(|e| csv_error(&self.path, e)),
        }
    }

    fn flush(&mut self) -> Result<()> {
        match &mut self.encoder {
            Encoder::Jsonl(w) => w.flush().map_err(|e| Error::io(&self.path, e)),
            Encoder::Csv(w) => w.flush().map_err(|e| Error::io(&self.path, e)),
        }
    }
}

/// Writes `records` to `path` in one go.
pub fn export_trajectory(records: &[TrajectoryRecord], path: &Path, format: TrajectoryFormat) -> Result<()> {
    let mut w = TrajectoryWriter::create(path, format)?;
    for r in records {
        w.push(r)?;
    }
    w.flush()
}

/// Reads a file written by [`export_trajectory`] or [`TrajectoryWriter`].
pub fn read_trajectory(path: &Path, format: TrajectoryFormat) -> Result<Vec<TrajectoryRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    match format {
        TrajectoryFormat::Jsonl => {
            let mut out = Vec::new();
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(|e| Error::io(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec = serde_json::from_str(&line).map_err(|e| Error::Parse {
                    path: path.to_path_buf(),
                    message: format!("line {}: {e}", i + 1),
                })?;
                out.push(rec);
            }
            Ok(out)
        }
        TrajectoryFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
            let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
            if header.iter().ne(CSV_HEADER.iter().copied()) {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    message: format!("unexpected header {header:?}"),
                });
            }
            let mut out = Vec::new();
            for (i, row) in reader.records().enumerate() {
                let row = row.map_err(|e| csv_error(path, e))?;
                out.push(parse_csv_row(&row).map_err(|message| Error::Parse {
                    path: path.to_path_buf(),
                    message: format!("row {}: {message}", i + 1),
                })?);
            }
            Ok(out)
        }
    }
}

fn parse_csv_row(row: &csv::StringRecord) -> std::result::Result<TrajectoryRecord, String> {
    fn num<V: FromStr>(row: &csv::StringRecord, i: usize) -> std::result::Result<V, String> {
        let field = row.get(i).ok_or_else(|| format!("missing column `{}`", CSV_HEADER[i]))?;
        field
            .parse()
            .map_err(|_| format!("bad `{}` value `{field}`", CSV_HEADER[i]))
    }
    let observation = match row.get(7) {
        Some("") => Vec::new(),
        Some(s) => s
            .split(';')
            .map(|v| v.parse::<f64>().map_err(|_| format!("bad observation entry `{v}`")))
            .collect::<std::result::Result<_, _>>()?,
        None => return Err("missing column `observation`".into()),
    };
    let indicator = row
        .get(11)
        .and_then(IndicatorColor::parse)
        .ok_or_else(|| "bad `indicator` value".to_string())?;
    Ok(TrajectoryRecord {
        episode: num(row, 0)?,
        step: num(row, 1)?,
        time: num(row, 2)?,
        theta: num(row, 3)?,
        alpha: num(row, 4)?,
        theta_dot: num(row, 5)?,
        alpha_dot: num(row, 6)?,
        observation,
        voltage_commanded: num(row, 8)?,
        voltage_actuated: num(row, 9)?,
        reward: num(row, 10)?,
        indicator,
        done: num(row, 12)?,
    })
}
