//! Scenario configuration file.
//!
//! A single JSON document:
//!
//! ```json
//! {
//!   "series": ["day.csv"],
//!   "microgrid": { "tie_line": { "p_max_kw": 1500 }, "diesel": [...], ... },
//!   "initial_state": { "bess_energy_kwh": [250], "dg_previous_output_kw": [0], "dg_previous_on": [false] },
//!   "alphas": [ { "dg": 0, "bess": 0, "wt": 0 }, { "dg": 0.05, "bess": 0.01, "wt": 0.05 } ],
//!   "start": "2024-07-01T00:00:00",
//!   "intervals": 96,
//!   "sell_ratio": 0.8,
//!   "output_dir": "out",
//!   "targets": null
//! }
//! ```
//!
//! Relative paths are resolved against the directory of the config file.
//! Only `series`, `microgrid` and `initial_state` are required.

use std::path::{Path, PathBuf};

use chrono::NaiveDateTime;
use serde::Deserialize;

use mgflex::dispatch::{Forecast, SystemState};
use mgflex::flexband::TargetProfile;
use mgflex::ingest::{self, SeriesTable};
use mgflex::model::{AlphaParams, MicrogridConfig};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub series: Vec<PathBuf>,
    pub microgrid: MicrogridConfig,
    pub initial_state: SystemState,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<AlphaParams>,
    #[serde(default)]
    pub start: Option<NaiveDateTime>,
    #[serde(default)]
    pub intervals: Option<usize>,
    #[serde(default = "default_sell_ratio")]
    pub sell_ratio: f64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Step-A targets for `flexband`; solved from the forecast when absent.
    #[serde(default)]
    pub targets: Option<TargetProfile>,
}

fn default_alphas() -> Vec<AlphaParams> {
    vec![AlphaParams::zero()]
}

fn default_sell_ratio() -> f64 {
    ingest::DEFAULT_SELL_RATIO
}

/// A config with its series loaded and command-line overrides applied.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub base_dir: PathBuf,
    pub tables: Vec<SeriesTable>,
    pub start: NaiveDateTime,
    /// Whole intervals covered by every table from `start`.
    pub available: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub horizon: Option<usize>,
    pub dt_hours: Option<f64>,
    pub alpha: Option<AlphaParams>,
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl Scenario {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let mut config: ScenarioConfig = read_json(path)?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        if let Some(h) = overrides.horizon {
            config.microgrid.horizon.n_intervals = h;
        }
        if let Some(dt) = overrides.dt_hours {
            config.microgrid.horizon.dt_hours = dt;
        }
        if let Some(a) = &overrides.alpha {
            config.alphas = vec![a.clone()];
        }
        config.microgrid.validate()?;
        config.initial_state.validate(&config.microgrid)?;
        for a in &config.alphas {
            a.validate(&config.microgrid)?;
        }
        if config.alphas.is_empty() {
            return Err(CliError::Config("alphas must not be empty".into()));
        }
        if config.series.is_empty() {
            return Err(CliError::Config("series must list at least one CSV file".into()));
        }

        let tables = config
            .series
            .iter()
            .map(|p| ingest::load_series(&base_dir.join(p), &[]))
            .collect::<Result<Vec<_>, _>>()
            .map_err(mgflex::Error::from)?;
        let start = config.start.unwrap_or_else(|| tables[0].start());
        let dt = config.microgrid.horizon.dt_hours;
        let end = tables.iter().map(SeriesTable::end).min().expect("at least one table");
        let span = (end - start).num_seconds().max(0) as f64;
        let available = (span / (dt * 3600.0) + 1e-9).floor() as usize;
        Ok(Scenario {
            config,
            base_dir,
            tables,
            start,
            available,
        })
    }

    pub fn microgrid(&self) -> &MicrogridConfig {
        &self.config.microgrid
    }

    pub fn horizon(&self) -> usize {
        self.config.microgrid.horizon.n_intervals
    }

    pub fn dt_hours(&self) -> f64 {
        self.config.microgrid.horizon.dt_hours
    }

    /// Intervals to simulate.
    pub fn run_length(&self) -> Result<usize, CliError> {
        let n = self.config.intervals.unwrap_or(self.available);
        if n == 0 || n > self.available {
            return Err(CliError::Config(format!(
                "{n} intervals requested but the series cover {} from {}",
                self.available, self.start
            )));
        }
        Ok(n)
    }

    /// The first `n` intervals plus as much look-ahead as the data allows.
    pub fn forecast(&self, n: usize) -> Result<Forecast, CliError> {
        let len = (n + self.horizon() - 1).min(self.available);
        Ok(ingest::to_forecast(
            self.microgrid(),
            &self.tables,
            self.start,
            len,
            self.dt_hours(),
            self.config.sell_ratio,
        )?)
    }

    pub fn output_dir(&self, flag: Option<&Path>) -> PathBuf {
        match (flag, &self.config.output_dir) {
            (Some(p), _) => p.to_path_buf(),
            (None, Some(p)) => self.base_dir.join(p),
            (None, None) => self.base_dir.join("out"),
        }
    }
}
