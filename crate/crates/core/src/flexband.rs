//! Acceptable trading-power range around the economic-dispatch targets.
//!
//! For one interval the dispatch MILP is rebuilt, every commitment and mode
//! bit is fixed at its target value, and each adjustable device is released
//! into a band around its target:
//!
//! * diesel: `|p - target| <= alpha_g * p_max`
//! * battery: `|(discharge - charge) - net_target| <= alpha_s * e_max`, read
//!   as kW (the band does not scale with the interval length)
//! * wind: `max(0, target - alpha_wt * rated) <= p <= target`
//!
//! Only the buy/sell bits stay free. The trade `buy - sell` is then maximized
//! and minimized; among trade-optimal points the cheapest one is reported.

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::dispatch::{build_ed, DispatchSolution, EdIndex, Forecast, ForecastInterval, SystemState};
use crate::lp::{Constraint, LpProblem, Relation};
use crate::milp::{self, MilpOptions, MilpProblem, MilpStatus};
use crate::model::{
    self, AlphaParams, BessDecision, DgDecision, IntervalDecision, MicrogridConfig, TradeDecision,
};
use crate::par;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DgTarget {
    pub target_kw: f64,
    pub on: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BessTarget {
    /// Positive when discharging.
    pub net_kw: f64,
    pub charging: bool,
    pub discharging: bool,
}

/// First-interval dispatch targets of every adjustable device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetProfile {
    pub dg: Vec<DgTarget>,
    pub bess: Vec<BessTarget>,
    pub wt_kw: Vec<f64>,
    /// `buy - sell`.
    pub trade_kw: f64,
}

impl TargetProfile {
    pub fn from_decision(d: &IntervalDecision) -> Self {
        TargetProfile {
            dg: d
                .dg
                .iter()
                .map(|g| DgTarget {
                    target_kw: g.output_kw,
                    on: g.on,
                })
                .collect(),
            bess: d
                .bess
                .iter()
                .map(|b| BessTarget {
                    net_kw: b.net_kw(),
                    charging: b.charging,
                    discharging: b.discharging,
                })
                .collect(),
            wt_kw: d.wt_kw.clone(),
            trade_kw: d.trade.net_kw(),
        }
    }

    pub fn validate(&self, config: &MicrogridConfig) -> Result<()> {
        if self.dg.len() != config.diesel.len()
            || self.bess.len() != config.bess.len()
            || self.wt_kw.len() != config.wind.len()
        {
            return Err(Error::Dimension("targets do not match the device fleet".into()));
        }
        if self.bess.iter().any(|b| b.charging && b.discharging) {
            return Err(Error::InvalidInput("battery target both charging and discharging".into()));
        }
        Ok(())
    }

    /// The target point as a full decision record, with the battery energy
    /// stepped from `state` and the smallest SOC slacks that satisfy the band.
    pub fn to_decision(
        &self,
        config: &MicrogridConfig,
        state: &SystemState,
        interval: &ForecastInterval,
    ) -> Result<IntervalDecision> {
        self.validate(config)?;
        let dt = config.horizon.dt_hours;
        let dg = self
            .dg
            .iter()
            .zip(&state.dg_previous_on)
            .map(|(t, &was_on)| DgDecision {
                output_kw: if t.on { t.target_kw } else { 0.0 },
                on: t.on,
                started: t.on && !was_on,
            })
            .collect();
        let bess = self
            .bess
            .iter()
            .zip(&config.bess)
            .zip(&state.bess_energy_kwh)
            .map(|((t, spec), &e0)| {
                let charge_kw = if t.charging { (-t.net_kw).max(0.0) } else { 0.0 };
                let discharge_kw = if t.discharging { t.net_kw.max(0.0) } else { 0.0 };
                let (energy_kwh, soc) = model::bess_step(spec, e0, charge_kw, discharge_kw, dt)?;
                let (oc_slack, od_slack) = model::soc_slacks(spec, soc);
                Ok(BessDecision {
                    charge_kw,
                    discharge_kw,
                    charging: t.charging,
                    discharging: t.discharging,
                    energy_kwh,
                    soc,
                    oc_slack,
                    od_slack,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntervalDecision {
            dg,
            bess,
            wt_kw: self.wt_kw.clone(),
            pv_kw: interval.pv_kw.clone(),
            trade: TradeDecision {
                buy_kw: self.trade_kw.max(0.0),
                sell_kw: (-self.trade_kw).max(0.0),
                buying: self.trade_kw > 0.0,
                selling: self.trade_kw < 0.0,
            },
        })
    }
}

/// Bound changes and extra rows that release a single-interval dispatch
/// problem around the targets.
#[derive(Debug, Clone, PartialEq)]
pub struct ReleaseConstraints {
    /// `(column, lo, hi)`, intersected with the existing bounds.
    pub bounds: Vec<(usize, f64, f64)>,
    pub rows: Vec<Constraint>,
}

impl ReleaseConstraints {
    pub fn apply(&self, problem: &mut LpProblem) {
        for &(j, lo, hi) in &self.bounds {
            let b = &mut problem.bounds[j];
            *b = (b.0.max(lo), b.1.min(hi));
        }
        problem.constraints.extend(self.rows.iter().cloned());
    }
}

pub fn build_release_constraints(
    config: &MicrogridConfig,
    state: &SystemState,
    index: &EdIndex,
    targets: &TargetProfile,
    alpha: &AlphaParams,
) -> Result<ReleaseConstraints> {
    alpha.validate(config)?;
    targets.validate(config)?;
    let iv = index
        .intervals
        .first()
        .ok_or_else(|| Error::Dimension("release constraints need one interval".into()))?;
    let bit = |b: bool| f64::from(u8::from(b));
    let mut bounds = Vec::new();
    let mut rows = Vec::new();

    for (i, ((vars, t), spec)) in iv.dg.iter().zip(&targets.dg).zip(&config.diesel).enumerate() {
        let band = alpha.dg.for_device(i) * spec.p_max_kw;
        bounds.push((vars.on, bit(t.on), bit(t.on)));
        let started = bit(t.on && !state.dg_previous_on[i]);
        bounds.push((vars.started, started, started));
        bounds.push((vars.output, t.target_kw - band, t.target_kw + band));
    }
    for (k, ((vars, t), spec)) in iv.bess.iter().zip(&targets.bess).zip(&config.bess).enumerate() {
        let band = alpha.bess.for_device(k) * spec.e_max_kwh;
        bounds.push((vars.charging, bit(t.charging), bit(t.charging)));
        bounds.push((vars.discharging, bit(t.discharging), bit(t.discharging)));
        let net = vec![(vars.discharge, 1.0), (vars.charge, -1.0)];
        rows.push(Constraint {
            terms: net.clone(),
            relation: Relation::Le,
            rhs: t.net_kw + band,
        });
        rows.push(Constraint {
            terms: net,
            relation: Relation::Ge,
            rhs: t.net_kw - band,
        });
    }
    for (j, ((&col, &t), spec)) in iv.wt.iter().zip(&targets.wt_kw).zip(&config.wind).enumerate() {
        let band = alpha.wt.for_device(j) * spec.rated_kw;
        bounds.push((col, (t - band).max(0.0), t));
    }
    Ok(ReleaseConstraints { bounds, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundSolution {
    pub trade_kw: f64,
    pub cost: f64,
    pub decision: IntervalDecision,
}

fn solve_fixed(problem: &MilpProblem, options: &MilpOptions, what: &str) -> Result<Vec<f64>> {
    let s = milp::solve_milp(problem, options)?;
    match s.status {
        MilpStatus::Optimal => Ok(s.x),
        MilpStatus::Infeasible => Err(Error::Internal(format!(
            "{what} is infeasible although the target point should satisfy it"
        ))),
        MilpStatus::NodeLimit => Err(Error::SolverLimit(format!("{what} hit the node limit"))),
    }
}

/// Extreme signed trade reachable inside the release bands, and the
/// single-interval cost of the cheapest point that attains it.
#[allow(clippy::too_many_arguments)]
pub fn solve_bound(
    direction: Direction,
    config: &MicrogridConfig,
    state: &SystemState,
    interval: &ForecastInterval,
    targets: &TargetProfile,
    alpha: &AlphaParams,
    options: &MilpOptions,
) -> Result<BoundSolution> {
    let forecast = Forecast {
        intervals: vec![interval.clone()],
    };
    let (mut problem, index) = build_ed(config, state, &forecast)?;
    build_release_constraints(config, state, &index, targets, alpha)?.apply(&mut problem.base);
    if problem.base.bounds.iter().any(|(lo, hi)| lo > hi) {
        return Err(Error::InvalidInput(
            "targets lie outside the device limits".into(),
        ));
    }

    let tr = index.intervals[0].trade;
    let sign = match direction {
        Direction::Max => -1.0,
        Direction::Min => 1.0,
    };
    let n = problem.base.n_vars();
    let cost = std::mem::replace(&mut problem.base.objective, vec![0.0; n]);
    problem.base.objective[tr.buy] = sign;
    problem.base.objective[tr.sell] = -sign;
    let x = solve_fixed(&problem, options, "trade bound")?;
    let best = x[tr.buy] - x[tr.sell];

    // Second stage: cheapest point among those at the extreme trade.
    let slack = 1e-9 * (1.0 + best.abs());
    let (relation, rhs) = match direction {
        Direction::Max => (Relation::Ge, best - slack),
        Direction::Min => (Relation::Le, best + slack),
    };
    problem.base.objective = cost;
    problem
        .base
        .add_constraint(vec![(tr.buy, 1.0), (tr.sell, -1.0)], relation, rhs);
    let x = solve_fixed(&problem, options, "cost at trade bound")?;

    let decision = crate::dispatch::extract_decisions(config, state, &forecast, &index, &x)
        .pop()
        .expect("one interval");
    let cost = model::interval_cost(
        config,
        &decision,
        interval.buy_price,
        interval.sell_price,
        config.horizon.dt_hours,
    )
    .total();
    Ok(BoundSolution {
        trade_kw: best,
        cost,
        decision,
    })
}

/// Single-interval cost of the target point itself.
pub fn cost_target(
    config: &MicrogridConfig,
    state: &SystemState,
    interval: &ForecastInterval,
    targets: &TargetProfile,
) -> Result<f64> {
    let d = targets.to_decision(config, state, interval)?;
    Ok(model::interval_cost(config, &d, interval.buy_price, interval.sell_price, config.horizon.dt_hours).total())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradingRange {
    pub lower_kw: f64,
    pub upper_kw: f64,
    pub cost_target: f64,
    pub cost_lower: f64,
    pub cost_upper: f64,
    pub alpha: AlphaParams,
}

impl TradingRange {
    pub fn power_span(&self) -> f64 {
        self.upper_kw - self.lower_kw
    }

    pub fn cost_span(&self) -> f64 {
        (self.cost_upper - self.cost_lower).abs()
    }
}

/// Power span per unit of cost span; `None` when either span vanishes.
pub fn range_efficiency(range: &TradingRange) -> Option<f64> {
    efficiency_from_sizes(range.power_span(), range.cost_span())
}

pub fn efficiency_from_sizes(power_span: f64, cost_span: f64) -> Option<f64> {
    const EPS: f64 = 1e-9;
    (power_span.abs() > EPS && cost_span.abs() > EPS).then(|| power_span.abs() / cost_span.abs())
}

/// The record sent to the grid operator for one interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataPackage {
    pub interval: usize,
    pub interval_start: Option<NaiveDateTime>,
    pub dt_hours: f64,
    pub target_kw: f64,
    #[serde(flatten)]
    pub range: TradingRange,
    pub devices: TargetProfile,
}

/// Both trade bounds around `targets`.
///
/// The target point is feasible for both bound problems, so a bound on the
/// wrong side of the target, or within round-off of it, is set to it.
#[allow(clippy::too_many_arguments)]
pub fn trading_range(
    config: &MicrogridConfig,
    state: &SystemState,
    interval: &ForecastInterval,
    targets: &TargetProfile,
    alpha: &AlphaParams,
    options: &MilpOptions,
) -> Result<TradingRange> {
    let (lo, hi) = par::join(
        options.exec,
        || solve_bound(Direction::Min, config, state, interval, targets, alpha, options),
        || solve_bound(Direction::Max, config, state, interval, targets, alpha, options),
    );
    let (lo, hi) = (lo?, hi?);
    let cost_target = cost_target(config, state, interval, targets)?;
    let t = targets.trade_kw;
    let snap = |b: f64| if (b - t).abs() <= 1e-9 * (1.0 + t.abs()) { t } else { b };
    Ok(TradingRange {
        lower_kw: snap(lo.trade_kw.min(t)),
        upper_kw: snap(hi.trade_kw.max(t)),
        cost_target,
        cost_lower: lo.cost,
        cost_upper: hi.cost,
        alpha: alpha.clone(),
    })
}

#[allow(clippy::too_many_arguments)]
pub fn package_for_targets(
    config: &MicrogridConfig,
    state: &SystemState,
    interval_index: usize,
    interval: &ForecastInterval,
    targets: &TargetProfile,
    alpha: &AlphaParams,
    options: &MilpOptions,
) -> Result<DataPackage> {
    let range = trading_range(config, state, interval, targets, alpha, options)?;
    Ok(DataPackage {
        interval: interval_index,
        interval_start: interval.start,
        dt_hours: config.horizon.dt_hours,
        target_kw: targets.trade_kw,
        range,
        devices: targets.clone(),
    })
}

/// Data package for the first interval of a solved dispatch.
pub fn make_data_package(
    config: &MicrogridConfig,
    state: &SystemState,
    interval_index: usize,
    interval: &ForecastInterval,
    dispatch: &DispatchSolution,
    alpha: &AlphaParams,
    options: &MilpOptions,
) -> Result<DataPackage> {
    package_for_targets(config, state, interval_index, interval, &dispatch.targets(), alpha, options)
}

/// One package per release setting, sharing the same targets.
pub fn sweep(
    config: &MicrogridConfig,
    state: &SystemState,
    interval_index: usize,
    interval: &ForecastInterval,
    targets: &TargetProfile,
    alphas: &[AlphaParams],
    options: &MilpOptions,
) -> Result<Vec<DataPackage>> {
    par::map(options.exec, alphas, |a| {
        package_for_targets(config, state, interval_index, interval, targets, a, options)
    })
    .into_iter()
    .collect()
}
