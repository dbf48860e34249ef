//! CSV writers for `run` and `report`.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use mgflex::dispatch::ForecastInterval;
use mgflex::flexband::{self, DataPackage};
use mgflex::model::{IntervalDecision, MicrogridConfig};

use crate::CliError;

/// One row per interval; range columns are suffixed with the release-set index.
pub struct WideCsv {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl WideCsv {
    pub fn create(path: &Path, config: &MicrogridConfig, n_alphas: usize) -> Result<Self, CliError> {
        let mut header: Vec<String> = [
            "interval",
            "timestamp",
            "demand_kw",
            "buy_price",
            "sell_price",
            "target_kw",
            "cost_target",
            "interval_cost",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        for a in 0..n_alphas {
            for c in ["lower_kw", "upper_kw", "cost_lower", "cost_upper"] {
                header.push(format!("{c}_{a}"));
            }
        }
        for i in 0..config.diesel.len() {
            header.push(format!("dg{i}_kw"));
            header.push(format!("dg{i}_on"));
        }
        for k in 0..config.bess.len() {
            header.push(format!("bess{k}_net_kw"));
            header.push(format!("bess{k}_soc"));
        }
        for j in 0..config.wind.len() {
            header.push(format!("wt{j}_kw"));
        }
        header.extend(["pv_kw", "buy_kw", "sell_kw"].map(String::from));

        let err = |e: csv::Error| CliError::Config(format!("{}: {e}", path.display()));
        let mut writer = csv::Writer::from_path(path).map_err(err)?;
        writer.write_record(&header).map_err(err)?;
        Ok(WideCsv {
            path: path.to_path_buf(),
            writer,
        })
    }

    pub fn row(
        &mut self,
        k: usize,
        interval: &ForecastInterval,
        committed: &IntervalDecision,
        interval_cost: f64,
        packages: &[DataPackage],
    ) -> Result<(), CliError> {
        let mut rec = vec![
            k.to_string(),
            interval.start.map(|t| t.to_string()).unwrap_or_default(),
            interval.demand_kw.to_string(),
            interval.buy_price.to_string(),
            interval.sell_price.to_string(),
            committed.trade.net_kw().to_string(),
            packages.first().map(|p| p.range.cost_target.to_string()).unwrap_or_default(),
            interval_cost.to_string(),
        ];
        for p in packages {
            let r = &p.range;
            rec.extend([r.lower_kw, r.upper_kw, r.cost_lower, r.cost_upper].map(|v| v.to_string()));
        }
        for d in &committed.dg {
            rec.push(d.output_kw.to_string());
            rec.push(u8::from(d.on).to_string());
        }
        for b in &committed.bess {
            rec.push(b.net_kw().to_string());
            rec.push(b.soc.to_string());
        }
        rec.extend(committed.wt_kw.iter().map(f64::to_string));
        rec.push(committed.pv_kw.iter().sum::<f64>().to_string());
        rec.push(committed.trade.buy_kw.to_string());
        rec.push(committed.trade.sell_kw.to_string());
        self.writer
            .write_record(&rec)
            .map_err(|e| CliError::Config(format!("{}: {e}", self.path.display())))
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.writer
            .flush()
            .map_err(|e| CliError::Config(format!("{}: {e}", self.path.display())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub test: String,
    pub power_range_size: f64,
    pub cost_range_size: f64,
    pub range_efficiency: Option<f64>,
}

/// `test` is the package's position within its interval, prefixed with the
/// interval index when the file spans more than one interval.
pub fn report_rows(packages: &[DataPackage]) -> Vec<ReportRow> {
    let multi = packages.windows(2).any(|w| w[0].interval != w[1].interval);
    let mut rows = Vec::with_capacity(packages.len());
    let mut pos = 0usize;
    for (i, p) in packages.iter().enumerate() {
        if i > 0 && packages[i - 1].interval != p.interval {
            pos = 0;
        }
        let test = if multi {
            format!("{}.{pos}", p.interval)
        } else {
            pos.to_string()
        };
        rows.push(ReportRow {
            test,
            power_range_size: p.range.power_span(),
            cost_range_size: p.range.cost_span(),
            range_efficiency: flexband::range_efficiency(&p.range),
        });
        pos += 1;
    }
    rows
}

pub fn write_report<W: Write>(out: W, rows: &[ReportRow]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["test", "power_range_size", "cost_range_size", "range_efficiency"])?;
    for r in rows {
        w.write_record([
            r.test.clone(),
            format!("{:.6}", r.power_range_size),
            format!("{:.6}", r.cost_range_size),
            r.range_efficiency.map(|e| format!("{e:.6}")).unwrap_or_default(),
        ])?;
    }
    w.flush()
}
