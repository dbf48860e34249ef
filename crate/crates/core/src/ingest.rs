//! CSV time series to [`Forecast`] windows.
//!
//! Expected columns: `timestamp, load_kw, buy_price` and optionally
//! `sell_price, wind_speed_ms, irradiance_wm2, pv_kw`. Timestamps are naive
//! local ISO-8601. Every other column must be numeric.
//!
//! Coarse data is expanded by zero-order hold: an interval takes the value of
//! the last row at or before its start time.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDateTime};

use crate::dispatch::{Forecast, ForecastInterval};
use crate::model::{self, MicrogridConfig};

pub const TIMESTAMP: &str = "timestamp";
pub const LOAD: &str = "load_kw";
pub const BUY_PRICE: &str = "buy_price";
pub const SELL_PRICE: &str = "sell_price";
pub const WIND_SPEED: &str = "wind_speed_ms";
pub const IRRADIANCE: &str = "irradiance_wm2";
pub const PV_KW: &str = "pv_kw";

/// Sell price as a fraction of the buy price when no sell column exists.
pub const DEFAULT_SELL_RATIO: f64 = 0.8;

const TIMESTAMP_FORMATS: [&str; 4] = ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"];

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("row {row}: timestamp {value:?} is not ISO-8601")]
    BadTimestamp { row: usize, value: String },
    #[error("row {row}: step {found} differs from the first step {expected} (timestamps must be strictly increasing and uniform)")]
    NonUniformStep { row: usize, expected: Duration, found: Duration },
    #[error("row {row}, column {column:?}: {value:?} is not a number")]
    Parse { row: usize, column: String, value: String },
    #[error("row {row}, column {column:?}: non-finite value {value}")]
    NonFiniteValue { row: usize, column: String, value: f64 },
    #[error("no data rows")]
    Empty,
    #[error("{column:?} has no data for {at}")]
    WindowOutOfRange { column: String, at: NaiveDateTime },
    #[error("PV data present but the fleet has no PV systems")]
    NoPvSystems,
}

/// A validated, uniformly spaced table of named real columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    pub timestamps: Vec<NaiveDateTime>,
    pub columns: BTreeMap<String, Vec<f64>>,
}

fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    TIMESTAMP_FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
}

impl SeriesTable {
    /// Row spacing; `None` for a single-row table.
    pub fn step(&self) -> Option<Duration> {
        match self.timestamps.as_slice() {
            [a, b, ..] => Some(*b - *a),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.get(name).map(Vec::as_slice)
    }

    pub fn start(&self) -> NaiveDateTime {
        self.timestamps[0]
    }

    /// Exclusive end of the covered time span.
    pub fn end(&self) -> NaiveDateTime {
        let last = *self.timestamps.last().expect("validated table is non-empty");
        last + self.step().unwrap_or(Duration::zero())
    }

    /// Zero-order-hold sample of `column` at `at`.
    pub fn sample(&self, column: &str, at: NaiveDateTime) -> Result<f64, IngestError> {
        let values = self
            .column(column)
            .ok_or_else(|| IngestError::MissingColumn(column.to_string()))?;
        let covered = at >= self.start() && (at < self.end() || (self.len() == 1 && at == self.start()));
        if !covered {
            return Err(IngestError::WindowOutOfRange {
                column: column.to_string(),
                at,
            });
        }
        let row = self.timestamps.partition_point(|t| *t <= at) - 1;
        Ok(values[row])
    }

    /// Parses CSV with a header row; `required` names must be present.
    pub fn from_reader<R: Read>(reader: R, required: &[&str]) -> Result<Self, IngestError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let find = |name: &str| headers.iter().position(|h| h == name);
        let ts_col = find(TIMESTAMP).ok_or_else(|| IngestError::MissingColumn(TIMESTAMP.into()))?;
        for name in required {
            if find(name).is_none() {
                return Err(IngestError::MissingColumn((*name).to_string()));
            }
        }
        let value_cols: Vec<(usize, String)> = headers
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != ts_col)
            .map(|(i, h)| (i, h.to_string()))
            .collect();

        let mut timestamps = Vec::new();
        let mut columns: BTreeMap<String, Vec<f64>> =
            value_cols.iter().map(|(_, h)| (h.clone(), Vec::new())).collect();
        let mut expected: Option<Duration> = None;
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            // Row numbers count the header as row 1.
            let row = i + 2;
            let raw = record.get(ts_col).unwrap_or("");
            let t = parse_timestamp(raw).ok_or_else(|| IngestError::BadTimestamp {
                row,
                value: raw.to_string(),
            })?;
            if let Some(&prev) = timestamps.last() {
                let found = t - prev;
                let expected = *expected.get_or_insert(found);
                if found <= Duration::zero() || found != expected {
                    return Err(IngestError::NonUniformStep { row, expected, found });
                }
            }
            timestamps.push(t);
            for (c, name) in &value_cols {
                let raw = record.get(*c).unwrap_or("");
                let v: f64 = raw.parse().map_err(|_| IngestError::Parse {
                    row,
                    column: name.clone(),
                    value: raw.to_string(),
                })?;
                if !v.is_finite() {
                    return Err(IngestError::NonFiniteValue {
                        row,
                        column: name.clone(),
                        value: v,
                    });
                }
                columns.get_mut(name).expect("column registered").push(v);
            }
        }
        if timestamps.is_empty() {
            return Err(IngestError::Empty);
        }
        Ok(SeriesTable { timestamps, columns })
    }
}

pub fn load_series(path: &Path, required: &[&str]) -> Result<SeriesTable, IngestError> {
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    SeriesTable::from_reader(std::io::BufReader::new(file), required)
}

/// Number of whole `dt_hours` intervals the table covers from its start.
pub fn intervals_available(table: &SeriesTable, dt_hours: f64) -> usize {
    let span = (table.end() - table.start()).num_seconds() as f64;
    (span / (dt_hours * 3600.0) + 1e-9).floor() as usize
}

fn dt_duration(dt_hours: f64) -> Duration {
    Duration::milliseconds((dt_hours * 3_600_000.0).round() as i64)
}

fn sample_any(tables: &[SeriesTable], column: &str, at: NaiveDateTime) -> Option<Result<f64, IngestError>> {
    tables
        .iter()
        .find(|t| t.column(column).is_some())
        .map(|t| t.sample(column, at))
}

fn require(tables: &[SeriesTable], column: &str, at: NaiveDateTime) -> Result<f64, IngestError> {
    sample_any(tables, column, at).unwrap_or_else(|| Err(IngestError::MissingColumn(column.to_string())))
}

/// Builds `n_intervals` forecast intervals of `dt_hours` starting at `start`.
///
/// A column is read from the first table that has it. Wind availability is
/// the same wind speed pushed through each turbine's power curve; a direct
/// `pv_kw` column is split across PV systems by installation count and
/// takes precedence over irradiance.
pub fn to_forecast(
    config: &MicrogridConfig,
    tables: &[SeriesTable],
    start: NaiveDateTime,
    n_intervals: usize,
    dt_hours: f64,
    sell_ratio: f64,
) -> crate::Result<Forecast> {
    if !(dt_hours > 0.0 && dt_hours.is_finite()) {
        return Err(crate::Error::Config("dt_hours must be positive".into()));
    }
    if !(0.0..=1.0).contains(&sell_ratio) {
        return Err(crate::Error::Config("sell_ratio must lie in [0, 1]".into()));
    }
    let has = |c: &str| tables.iter().any(|t| t.column(c).is_some());
    if config.pv.is_empty() && (has(PV_KW) || has(IRRADIANCE)) {
        return Err(IngestError::NoPvSystems.into());
    }
    let installations: f64 = config.pv.iter().map(|p| f64::from(p.installations)).sum();
    let dt = dt_duration(dt_hours);

    let mut intervals = Vec::with_capacity(n_intervals);
    for k in 0..n_intervals {
        let at = start + dt * (k as i32);
        let demand_kw = require(tables, LOAD, at)?;
        let buy_price = require(tables, BUY_PRICE, at)?;
        let sell_price = match sample_any(tables, SELL_PRICE, at) {
            Some(v) => v?,
            None => sell_ratio * buy_price,
        };
        let wt_available_kw = if config.wind.is_empty() {
            Vec::new()
        } else {
            let v = require(tables, WIND_SPEED, at)?;
            config.wind.iter().map(|w| model::wt_power(w, v)).collect()
        };
        let pv_kw = if config.pv.is_empty() {
            Vec::new()
        } else if let Some(total) = sample_any(tables, PV_KW, at) {
            let total = total?;
            config
                .pv
                .iter()
                .map(|p| total * f64::from(p.installations) / installations)
                .collect()
        } else {
            let irradiance = sample_any(tables, IRRADIANCE, at)
                .unwrap_or_else(|| Err(IngestError::MissingColumn(format!("{PV_KW} or {IRRADIANCE}"))))?;
            config
                .pv
                .iter()
                .map(|p| model::pv_power(&p.spec, irradiance) * f64::from(p.installations))
                .collect()
        };
        intervals.push(ForecastInterval {
            start: Some(at),
            demand_kw,
            buy_price,
            sell_price,
            wt_available_kw,
            pv_kw,
        });
    }
    let forecast = Forecast { intervals };
    forecast.validate(config)?;
    Ok(forecast)
}
