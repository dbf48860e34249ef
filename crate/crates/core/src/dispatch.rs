//! Multi-interval economic dispatch and the rolling-horizon loop.
//!
//! [`build_ed`] writes the whole horizon as one MILP; [`mpc_step`] solves it
//! and commits only the first interval.
//!
//! Energy convention: `energy[t]` is the battery energy at the *end* of
//! interval `t`, so `energy[t] = energy[t-1] + dt * (eta_c * charge[t] -
//! discharge[t] / eta_d)` with `energy[-1]` taken from the [`SystemState`].
//! The SOC soft band uses one pair of slack variables per battery for the
//! whole horizon, and its penalty is charged in every interval.

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::flexband::TargetProfile;
use crate::lp::Relation;
use crate::milp::{self, MilpOptions, MilpProblem, MilpStatus};
use crate::model::{
    self, BessDecision, DgDecision, IntervalCost, IntervalDecision, MicrogridConfig, TradeDecision,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    pub bess_energy_kwh: Vec<f64>,
    pub dg_previous_output_kw: Vec<f64>,
    pub dg_previous_on: Vec<bool>,
}

impl SystemState {
    /// Batteries at `soc`, generators off.
    pub fn at_soc(config: &MicrogridConfig, soc: f64) -> Self {
        SystemState {
            bess_energy_kwh: config.bess.iter().map(|b| b.e_max_kwh * soc).collect(),
            dg_previous_output_kw: vec![0.0; config.diesel.len()],
            dg_previous_on: vec![false; config.diesel.len()],
        }
    }

    pub fn validate(&self, config: &MicrogridConfig) -> Result<()> {
        if self.bess_energy_kwh.len() != config.bess.len()
            || self.dg_previous_output_kw.len() != config.diesel.len()
            || self.dg_previous_on.len() != config.diesel.len()
        {
            return Err(Error::Dimension("system state does not match the device fleet".into()));
        }
        for (e, spec) in self.bess_energy_kwh.iter().zip(&config.bess) {
            if !(*e >= 0.0 && *e <= spec.e_max_kwh) {
                return Err(Error::InvalidInput(format!(
                    "battery {:?} energy {e} outside [0, {}]",
                    spec.name, spec.e_max_kwh
                )));
            }
        }
        for ((p, on), spec) in self
            .dg_previous_output_kw
            .iter()
            .zip(&self.dg_previous_on)
            .zip(&config.diesel)
        {
            let ok = if *on { *p >= 0.0 && *p <= spec.p_max_kw } else { *p == 0.0 };
            if !ok {
                return Err(Error::InvalidInput(format!(
                    "generator {:?} previous output {p} inconsistent with on={on}",
                    spec.name
                )));
            }
        }
        Ok(())
    }
}

/// Exogenous inputs for one dispatch interval.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ForecastInterval {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<NaiveDateTime>,
    pub demand_kw: f64,
    pub buy_price: f64,
    pub sell_price: f64,
    /// Schedulable maximum of each wind turbine.
    pub wt_available_kw: Vec<f64>,
    /// Fixed output of each PV system.
    pub pv_kw: Vec<f64>,
}

impl ForecastInterval {
    pub fn pv_total_kw(&self) -> f64 {
        self.pv_kw.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Forecast {
    pub intervals: Vec<ForecastInterval>,
}

impl Forecast {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Up to `n` intervals starting at `start`; shorter near the end.
    pub fn window(&self, start: usize, n: usize) -> Forecast {
        let end = (start + n).min(self.intervals.len());
        Forecast {
            intervals: self.intervals[start.min(end)..end].to_vec(),
        }
    }

    pub fn validate(&self, config: &MicrogridConfig) -> Result<()> {
        for (t, f) in self.intervals.iter().enumerate() {
            if f.wt_available_kw.len() != config.wind.len() || f.pv_kw.len() != config.pv.len() {
                return Err(Error::Dimension(format!(
                    "forecast interval {t} has {} wind and {} PV entries for {} turbines and {} PV systems",
                    f.wt_available_kw.len(),
                    f.pv_kw.len(),
                    config.wind.len(),
                    config.pv.len()
                )));
            }
            let values = [f.demand_kw, f.buy_price, f.sell_price]
                .into_iter()
                .chain(f.wt_available_kw.iter().copied())
                .chain(f.pv_kw.iter().copied());
            for v in values {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::InvalidInput(format!(
                        "forecast interval {t} has a negative or non-finite value ({v})"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DgVars {
    pub output: usize,
    pub on: usize,
    pub started: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BessVars {
    pub charge: usize,
    pub discharge: usize,
    pub charging: usize,
    pub discharging: usize,
    pub energy: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TradeVars {
    pub buy: usize,
    pub sell: usize,
    pub buying: usize,
    pub selling: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalVars {
    pub dg: Vec<DgVars>,
    pub bess: Vec<BessVars>,
    pub wt: Vec<usize>,
    pub trade: TradeVars,
    pub balance_row: usize,
    pub reserve_row: usize,
}

/// Where each decision symbol lives in the MILP column space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdIndex {
    pub intervals: Vec<IntervalVars>,
    /// `(oc_slack, od_slack)` per battery, shared by all intervals.
    pub bess_slack: Vec<(usize, usize)>,
}

/// Writes the economic-dispatch MILP for the horizon covered by `forecast`.
pub fn build_ed(
    config: &MicrogridConfig,
    state: &SystemState,
    forecast: &Forecast,
) -> Result<(MilpProblem, EdIndex)> {
    config.validate()?;
    state.validate(config)?;
    forecast.validate(config)?;
    if forecast.is_empty() {
        return Err(Error::Dimension("forecast window is empty".into()));
    }
    let dt = config.horizon.dt_hours;
    let n_t = forecast.len() as f64;
    let grid_max = config.tie_line.p_max_kw;
    let mut p = crate::lp::LpProblem::new();
    let mut binaries = Vec::new();

    let bess_slack: Vec<(usize, usize)> = config
        .bess
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let oc = p.add_var(format!("oc_slack{k}"), 0.0, 1.0 - b.soc_high, b.soc_penalty_cost * n_t);
            let od = p.add_var(format!("od_slack{k}"), 0.0, b.soc_low, b.soc_penalty_cost * n_t);
            (oc, od)
        })
        .collect();

    let mut intervals: Vec<IntervalVars> = Vec::with_capacity(forecast.len());
    for (t, f) in forecast.intervals.iter().enumerate() {
        let mut dg = Vec::with_capacity(config.diesel.len());
        for (i, spec) in config.diesel.iter().enumerate() {
            let output = p.add_var(
                format!("p_dg{i}[{t}]"),
                0.0,
                spec.p_max_kw,
                spec.energy_cost_per_kwh * dt,
            );
            let on = p.add_var(format!("u_dg{i}[{t}]"), 0.0, 1.0, spec.no_load_cost * dt);
            let started = p.add_var(format!("v_dg{i}[{t}]"), 0.0, 1.0, spec.startup_cost);
            binaries.push(on);
            p.add_constraint(vec![(output, 1.0), (on, -spec.p_min_kw)], Relation::Ge, 0.0);
            p.add_constraint(vec![(output, 1.0), (on, -spec.p_max_kw)], Relation::Le, 0.0);

            let ramp = dt * spec.ramp_kw_per_h;
            match t {
                0 => {
                    let prev = state.dg_previous_output_kw[i];
                    p.add_constraint(vec![(output, 1.0)], Relation::Le, prev + ramp);
                    p.add_constraint(vec![(output, 1.0)], Relation::Ge, prev - ramp);
                    let prev_on = f64::from(u8::from(state.dg_previous_on[i]));
                    p.add_constraint(vec![(started, 1.0), (on, -1.0)], Relation::Ge, -prev_on);
                }
                _ => {
                    let prev = intervals[t - 1].dg[i];
                    p.add_constraint(vec![(output, 1.0), (prev.output, -1.0)], Relation::Le, ramp);
                    p.add_constraint(vec![(prev.output, 1.0), (output, -1.0)], Relation::Le, ramp);
                    p.add_constraint(
                        vec![(started, 1.0), (on, -1.0), (prev.on, 1.0)],
                        Relation::Ge,
                        0.0,
                    );
                }
            }
            dg.push(DgVars { output, on, started });
        }

        let mut bess = Vec::with_capacity(config.bess.len());
        for (k, spec) in config.bess.iter().enumerate() {
            let charge = p.add_var(
                format!("p_chg{k}[{t}]"),
                0.0,
                spec.p_max_kw,
                spec.eta_charge * spec.power_cost_per_kwh * dt,
            );
            let discharge = p.add_var(
                format!("p_dis{k}[{t}]"),
                0.0,
                spec.p_max_kw,
                spec.power_cost_per_kwh * dt / spec.eta_discharge,
            );
            let charging = p.add_var(format!("u_chg{k}[{t}]"), 0.0, 1.0, 0.0);
            let discharging = p.add_var(format!("u_dis{k}[{t}]"), 0.0, 1.0, 0.0);
            let energy = p.add_var(format!("e{k}[{t}]"), spec.e_min_kwh, spec.e_max_kwh, 0.0);
            binaries.extend([charging, discharging]);

            p.add_constraint(vec![(charge, 1.0), (charging, -spec.p_min_kw)], Relation::Ge, 0.0);
            p.add_constraint(vec![(charge, 1.0), (charging, -spec.p_max_kw)], Relation::Le, 0.0);
            p.add_constraint(vec![(discharge, 1.0), (discharging, -spec.p_min_kw)], Relation::Ge, 0.0);
            p.add_constraint(vec![(discharge, 1.0), (discharging, -spec.p_max_kw)], Relation::Le, 0.0);
            p.add_constraint(vec![(charging, 1.0), (discharging, 1.0)], Relation::Le, 1.0);

            let mut balance = vec![
                (energy, 1.0),
                (charge, -dt * spec.eta_charge),
                (discharge, dt / spec.eta_discharge),
            ];
            let rhs = if t == 0 {
                state.bess_energy_kwh[k]
            } else {
                balance.push((intervals[t - 1].bess[k].energy, -1.0));
                0.0
            };
            p.add_constraint(balance, Relation::Eq, rhs);

            let (oc, od) = bess_slack[k];
            let cap = spec.e_max_kwh;
            p.add_constraint(vec![(energy, 1.0), (od, cap)], Relation::Ge, spec.soc_low * cap);
            p.add_constraint(vec![(energy, 1.0), (oc, -cap)], Relation::Le, spec.soc_high * cap);
            bess.push(BessVars {
                charge,
                discharge,
                charging,
                discharging,
                energy,
            });
        }

        let wt: Vec<usize> = f
            .wt_available_kw
            .iter()
            .enumerate()
            .map(|(j, &avail)| p.add_var(format!("p_wt{j}[{t}]"), 0.0, avail, 0.0))
            .collect();

        let buy = p.add_var(format!("p_buy[{t}]"), 0.0, grid_max, f.buy_price * dt);
        let sell = p.add_var(format!("p_sell[{t}]"), 0.0, grid_max, -f.sell_price * dt);
        let buying = p.add_var(format!("u_buy[{t}]"), 0.0, 1.0, 0.0);
        let selling = p.add_var(format!("u_sell[{t}]"), 0.0, 1.0, 0.0);
        binaries.extend([buying, selling]);
        p.add_constraint(vec![(buying, 1.0), (selling, 1.0)], Relation::Le, 1.0);
        p.add_constraint(vec![(buy, 1.0), (buying, -grid_max)], Relation::Le, 0.0);
        p.add_constraint(vec![(sell, 1.0), (selling, -grid_max)], Relation::Le, 0.0);

        // buy + sum(dg) + sum(wt) + sum(dis) - sell - sum(chg) = load - pv
        let mut terms = vec![(buy, 1.0), (sell, -1.0)];
        terms.extend(dg.iter().map(|d| (d.output, 1.0)));
        terms.extend(wt.iter().map(|&w| (w, 1.0)));
        terms.extend(bess.iter().flat_map(|b| [(b.discharge, 1.0), (b.charge, -1.0)]));
        let balance_row = p.add_constraint(terms, Relation::Eq, f.demand_kw - f.pv_total_kw());

        // grid_max - buy + sell + sum(p_max - dg) >= r * load
        let mut terms = vec![(buy, -1.0), (sell, 1.0)];
        terms.extend(dg.iter().map(|d| (d.output, -1.0)));
        let headroom: f64 = config.diesel.iter().map(|d| d.p_max_kw).sum();
        let reserve_row = p.add_constraint(
            terms,
            Relation::Ge,
            config.reserve.reserve_fraction * f.demand_kw - grid_max - headroom,
        );

        intervals.push(IntervalVars {
            dg,
            bess,
            wt,
            trade: TradeVars {
                buy,
                sell,
                buying,
                selling,
            },
            balance_row,
            reserve_row,
        });
    }

    Ok((
        MilpProblem {
            base: p,
            binary_vars: binaries,
        },
        EdIndex { intervals, bess_slack },
    ))
}

fn bit(x: f64) -> bool {
    x > 0.5
}

/// Reads the decision records back out of a MILP point.
///
/// `started` is derived from consecutive commitment bits, since the startup
/// indicator is only bounded from below in the model.
pub fn extract_decisions(
    config: &MicrogridConfig,
    state: &SystemState,
    forecast: &Forecast,
    index: &EdIndex,
    x: &[f64],
) -> Vec<IntervalDecision> {
    let mut prev_on = state.dg_previous_on.clone();
    index
        .intervals
        .iter()
        .zip(&forecast.intervals)
        .map(|(iv, f)| {
            let dg = iv
                .dg
                .iter()
                .zip(prev_on.iter_mut())
                .map(|(d, was_on)| {
                    let on = bit(x[d.on]);
                    let started = on && !*was_on;
                    *was_on = on;
                    DgDecision {
                        output_kw: if on { x[d.output] } else { 0.0 },
                        on,
                        started,
                    }
                })
                .collect();
            let bess = iv
                .bess
                .iter()
                .zip(&config.bess)
                .zip(&index.bess_slack)
                .map(|((b, spec), &(oc, od))| {
                    let charging = bit(x[b.charging]);
                    let discharging = bit(x[b.discharging]);
                    BessDecision {
                        charge_kw: if charging { x[b.charge] } else { 0.0 },
                        discharge_kw: if discharging { x[b.discharge] } else { 0.0 },
                        charging,
                        discharging,
                        energy_kwh: x[b.energy],
                        soc: x[b.energy] / spec.e_max_kwh,
                        oc_slack: x[oc],
                        od_slack: x[od],
                    }
                })
                .collect();
            let buying = bit(x[iv.trade.buying]);
            let selling = bit(x[iv.trade.selling]);
            IntervalDecision {
                dg,
                bess,
                wt_kw: iv.wt.iter().map(|&w| x[w]).collect(),
                pv_kw: f.pv_kw.clone(),
                trade: TradeDecision {
                    buy_kw: if buying { x[iv.trade.buy] } else { 0.0 },
                    sell_kw: if selling { x[iv.trade.sell] } else { 0.0 },
                    buying,
                    selling,
                },
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispatchSolution {
    pub intervals: Vec<IntervalDecision>,
    pub costs: Vec<IntervalCost>,
    /// Sum of `costs`, re-evaluated from the decision records.
    pub total_cost: f64,
    /// Objective reported by the solver.
    pub objective_value: f64,
    pub nodes_explored: usize,
}

impl DispatchSolution {
    /// Step-A targets of the first interval.
    pub fn targets(&self) -> TargetProfile {
        TargetProfile::from_decision(&self.intervals[0])
    }
}

pub fn solve_ed(
    config: &MicrogridConfig,
    state: &SystemState,
    forecast: &Forecast,
    options: &MilpOptions,
) -> Result<DispatchSolution> {
    let (problem, index) = build_ed(config, state, forecast)?;
    let sol = milp::solve_milp(&problem, options)?;
    match sol.status {
        MilpStatus::Optimal => {}
        MilpStatus::Infeasible => {
            return Err(Error::Infeasible(
                "economic dispatch has no feasible commitment (demand, ramp or tie-line limits)".into(),
            ))
        }
        MilpStatus::NodeLimit => {
            return Err(Error::SolverLimit(format!(
                "economic dispatch stopped at the node limit ({})",
                options.node_limit
            )))
        }
    }
    let intervals = extract_decisions(config, state, forecast, &index, &sol.x);
    let dt = config.horizon.dt_hours;
    let costs: Vec<IntervalCost> = intervals
        .iter()
        .zip(&forecast.intervals)
        .map(|(d, f)| model::interval_cost(config, d, f.buy_price, f.sell_price, dt))
        .collect();
    Ok(DispatchSolution {
        total_cost: costs.iter().map(IntervalCost::total).sum(),
        intervals,
        costs,
        objective_value: sol.objective_value,
        nodes_explored: sol.nodes_explored,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpcStep {
    pub solution: DispatchSolution,
    pub committed: IntervalDecision,
    pub next_state: SystemState,
}

/// Solves the horizon in `window` and commits its first interval.
pub fn mpc_step(
    config: &MicrogridConfig,
    state: &SystemState,
    window: &Forecast,
    options: &MilpOptions,
) -> Result<MpcStep> {
    let solution = solve_ed(config, state, window, options)?;
    let committed = solution.intervals[0].clone();
    let dt = config.horizon.dt_hours;
    let bess_energy_kwh = config
        .bess
        .iter()
        .zip(&state.bess_energy_kwh)
        .zip(&committed.bess)
        .map(|((spec, &e), d)| model::bess_step(spec, e, d.charge_kw, d.discharge_kw, dt).map(|(e, _)| e))
        .collect::<Result<Vec<_>>>()?;
    let next_state = SystemState {
        bess_energy_kwh,
        dg_previous_output_kw: committed.dg.iter().map(|d| d.output_kw).collect(),
        dg_previous_on: committed.dg.iter().map(|d| d.on).collect(),
    };
    Ok(MpcStep {
        solution,
        committed,
        next_state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DieselGenSpec, HorizonSpec, ReservePolicy, TieLineSpec};

    fn grid_only(demand: f64, pv: Option<f64>) -> (MicrogridConfig, Forecast) {
        let mut config = MicrogridConfig {
            horizon: HorizonSpec {
                dt_hours: 0.25,
                n_intervals: 1,
            },
            diesel: vec![],
            bess: vec![],
            wind: vec![],
            pv: vec![],
            tie_line: TieLineSpec { p_max_kw: 1000.0 },
            reserve: ReservePolicy::default(),
        };
        let mut f = ForecastInterval {
            start: None,
            demand_kw: demand,
            buy_price: 0.2,
            sell_price: 0.16,
            wt_available_kw: vec![],
            pv_kw: vec![],
        };
        if let Some(pv) = pv {
            config.pv.push(crate::model::PvSystem {
                name: "roof".into(),
                spec: crate::model::PvSpec {
                    panel_area_m2: 1.0,
                    shade_ratio: 1.0,
                    efficiency: 0.2,
                },
                installations: 1,
            });
            f.pv_kw.push(pv);
        }
        (config, Forecast { intervals: vec![f] })
    }

    #[test]
    fn grid_only_microgrid_buys_its_load() {
        let (config, forecast) = grid_only(100.0, None);
        let state = SystemState::at_soc(&config, 0.5);
        let s = solve_ed(&config, &state, &forecast, &MilpOptions::default()).unwrap();
        let d = &s.intervals[0];
        assert!((d.trade.buy_kw - 100.0).abs() < 1e-9);
        assert_eq!(d.trade.sell_kw, 0.0);
        assert!((s.objective_value - 100.0 * 0.2 * 0.25).abs() < 1e-9);
        assert!((s.total_cost - s.objective_value).abs() < 1e-9);
    }

    #[test]
    fn pure_export_sells_pv() {
        let (config, forecast) = grid_only(0.0, Some(50.0));
        let state = SystemState::at_soc(&config, 0.5);
        let s = solve_ed(&config, &state, &forecast, &MilpOptions::default()).unwrap();
        let d = &s.intervals[0];
        assert!((d.trade.sell_kw - 50.0).abs() < 1e-9);
        assert_eq!(d.trade.buy_kw, 0.0);
        assert!((s.objective_value + 50.0 * 0.16 * 0.25).abs() < 1e-9);
    }

    #[test]
    fn reserve_row_has_expected_slack() {
        let (mut config, forecast) = grid_only(100.0, None);
        config.reserve.reserve_fraction = 0.1;
        let state = SystemState::at_soc(&config, 0.5);
        let (problem, index) = build_ed(&config, &state, &forecast).unwrap();
        let s = solve_ed(&config, &state, &forecast, &MilpOptions::default()).unwrap();
        let row = &problem.base.constraints[index.intervals[0].reserve_row];
        let mut x = vec![0.0; problem.base.n_vars()];
        x[index.intervals[0].trade.buy] = s.intervals[0].trade.buy_kw;
        // (1000 - 100) + 0 >= 10
        assert!((row.activity(&x) - row.rhs - (900.0 - 10.0)).abs() < 1e-9);
    }

    #[test]
    fn islanded_generator_serves_load_alone() {
        let (mut config, forecast) = grid_only(50.0, None);
        config.tie_line.p_max_kw = 0.0;
        config.diesel.push(DieselGenSpec::reference());
        for (prev_on, prev, startup) in [(false, 0.0, 5.0), (true, 60.0, 0.0)] {
            let state = SystemState {
                bess_energy_kwh: vec![],
                dg_previous_output_kw: vec![prev],
                dg_previous_on: vec![prev_on],
            };
            let s = solve_ed(&config, &state, &forecast, &MilpOptions::default()).unwrap();
            let d = &s.intervals[0].dg[0];
            assert!(d.on);
            assert_eq!(d.started, !prev_on);
            assert!((d.output_kw - 50.0).abs() < 1e-9);
            let expected = 50.0 * 0.1 * 0.25 + 3.4 * 0.25 + startup;
            assert!((s.total_cost - expected).abs() < 1e-9, "{} vs {expected}", s.total_cost);
        }
    }

    #[test]
    fn cheap_grid_keeps_generator_off() {
        let (mut config, mut forecast) = grid_only(120.0, None);
        config.diesel.push(DieselGenSpec::reference());
        forecast.intervals[0].buy_price = 0.05;
        forecast.intervals[0].sell_price = 0.04;
        let state = SystemState::at_soc(&config, 0.5);
        let s = solve_ed(&config, &state, &forecast, &MilpOptions::default()).unwrap();
        assert!(!s.intervals[0].dg[0].on);
        assert!((s.intervals[0].trade.buy_kw - 120.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_when_demand_exceeds_supply() {
        let (mut config, forecast) = grid_only(2000.0, None);
        config.tie_line.p_max_kw = 100.0;
        let state = SystemState::at_soc(&config, 0.5);
        assert!(matches!(
            solve_ed(&config, &state, &forecast, &MilpOptions::default()),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn rejects_mismatched_forecast() {
        let config = MicrogridConfig::reference();
        let (_, forecast) = grid_only(10.0, None);
        let state = SystemState::at_soc(&config, 0.5);
        assert!(matches!(build_ed(&config, &state, &forecast), Err(Error::Dimension(_))));
        assert!(build_ed(&config, &state, &Forecast::default()).is_err());
    }

    #[test]
    fn window_truncates_at_end() {
        let (_, f) = grid_only(1.0, None);
        let long = Forecast {
            intervals: vec![f.intervals[0].clone(); 5],
        };
        assert_eq!(long.window(3, 4).len(), 2);
        assert_eq!(long.window(7, 4).len(), 0);
    }
}
