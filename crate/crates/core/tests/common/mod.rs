//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use mgflex::dispatch::{Forecast, ForecastInterval, SystemState};
use mgflex::flexband::{BessTarget, DgTarget, TargetProfile};
use mgflex::lp::{self, LpOptions, LpProblem, LpStatus, Relation};
use mgflex::milp::MilpProblem;
use mgflex::model::{
    AlphaParams, BessSpec, DieselGenSpec, HorizonSpec, MicrogridConfig, ReservePolicy, TieLineSpec,
    WindTurbineSpec,
};
use mgflex::par::{self, ExecMode};

/// Release settings of the ten table rows, preceded by the all-zero row.
pub const ALPHA_ROWS: [(f64, f64, f64); 11] = [
    (0.0, 0.0, 0.0),
    (0.05, 0.01, 0.05),
    (0.05, 0.02, 0.05),
    (0.05, 0.02, 0.08),
    (0.08, 0.02, 0.08),
    (0.08, 0.05, 0.1),
    (0.1, 0.05, 0.1),
    (0.1, 0.08, 0.1),
    (0.12, 0.08, 0.1),
    (0.15, 0.08, 0.1),
    (0.15, 0.1, 0.1),
];

/// Selling scenario ranges (kW), row 0 being the bare target.
pub const SCENARIO_A_RANGES: [(f64, f64); 11] = [
    (-242.33, -242.33),
    (-247.33, -193.33),
    (-252.33, -193.33),
    (-252.33, -169.33),
    (-252.33, -163.93),
    (-267.33, -147.93),
    (-267.33, -144.33),
    (-282.33, -144.33),
    (-282.33, -140.73),
    (-282.33, -135.33),
    (-292.33, -135.33),
];

/// Buying scenario ranges (kW).
pub const SCENARIO_B_RANGES: [(f64, f64); 11] = [
    (814.33, 814.33),
    (809.33, 863.33),
    (804.33, 863.33),
    (804.33, 887.33),
    (804.33, 892.73),
    (789.33, 908.73),
    (789.33, 912.33),
    (774.33, 912.33),
    (774.33, 915.93),
    (774.33, 921.33),
    (764.33, 921.33),
];

pub const RANGE_SIZES: [f64; 10] = [54.0, 59.0, 83.0, 88.4, 119.4, 123.0, 138.0, 141.6, 147.0, 157.0];

/// `(power range size, cost range size, efficiency)` rows of the selling scenario.
pub const EFFICIENCY_A: [(f64, f64, f64); 10] = [
    (54.0, 1.19, 45.37815),
    (59.0, 1.345, 43.86617),
    (83.0, 1.965, 42.23919),
    (88.4, 1.971, 44.85033),
    (119.4, 2.845, 41.96837),
    (123.0, 2.851, 43.14276),
    (138.0, 3.311, 41.67925),
    (141.6, 3.314, 42.72782),
    (147.0, 3.318, 44.3038),
    (157.0, 3.625, 43.31),
];

pub const EFFICIENCY_B: [(f64, f64, f64); 10] = [
    (54.0, 1.37, 39.41606),
    (59.0, 1.49, 39.59732),
    (83.0, 2.21, 37.55656),
    (88.4, 2.24, 39.46429),
    (119.4, 3.1, 38.51613),
    (123.0, 3.12, 39.42308),
    (138.0, 3.49, 39.54155),
    (141.6, 3.51, 40.34188),
    (147.0, 3.53, 41.64306),
    (157.0, 3.78, 41.53439),
];

pub fn alpha(row: usize) -> AlphaParams {
    let (g, s, w) = ALPHA_ROWS[row];
    AlphaParams::uniform(g, s, w)
}

/// Reference fleet with a single-interval horizon.
pub fn reference_fleet() -> MicrogridConfig {
    let mut c = MicrogridConfig::reference();
    c.horizon.n_intervals = 1;
    c
}

/// A single interval whose load balances the given targets exactly, with a
/// mid-band battery and the generator already running at full output.
pub fn table_instance(bess_net_kw: f64, trade_kw: f64) -> (MicrogridConfig, SystemState, ForecastInterval, TargetProfile) {
    let config = reference_fleet();
    let state = SystemState {
        bess_energy_kwh: vec![250.0],
        dg_previous_output_kw: vec![180.0],
        dg_previous_on: vec![true],
    };
    let wind = 400.0;
    let demand = 180.0 + wind + bess_net_kw + trade_kw;
    let interval = ForecastInterval {
        start: None,
        demand_kw: demand,
        buy_price: 0.14,
        sell_price: 0.112,
        wt_available_kw: vec![100.0; 4],
        pv_kw: vec![],
    };
    let targets = TargetProfile {
        dg: vec![DgTarget {
            target_kw: 180.0,
            on: true,
        }],
        bess: vec![BessTarget {
            net_kw: bess_net_kw,
            charging: bess_net_kw < 0.0,
            discharging: bess_net_kw > 0.0,
        }],
        wt_kw: vec![100.0; 4],
        trade_kw,
    };
    (config, state, interval, targets)
}

/// Selling: generator at maximum, battery charging at 75 kW, exporting 242.33 kW.
pub fn scenario_a() -> (MicrogridConfig, SystemState, ForecastInterval, TargetProfile) {
    table_instance(-75.0, -242.33)
}

/// Buying: generator at maximum, battery discharging at its 20 kW minimum, importing 814.33 kW.
pub fn scenario_b() -> (MicrogridConfig, SystemState, ForecastInterval, TargetProfile) {
    table_instance(20.0, 814.33)
}

// ---------------------------------------------------------------------------
// Vertex enumeration oracle for bounded LPs.

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                let (top, rest) = a.split_at_mut(r);
                for (dst, src) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                    *dst -= f * src;
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

/// Minimum over all basic feasible solutions of an LP whose variables all
/// have finite bounds. `None` means infeasible.
pub fn lp_by_vertex_enumeration(p: &LpProblem) -> Option<f64> {
    let n = p.n_vars();
    assert!(p.bounds.iter().all(|(l, h)| l.is_finite() && h.is_finite()));
    // Candidate hyperplanes: every row, then lower and upper bounds.
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut eq_rows = Vec::new();
    let mut free_planes = Vec::new();
    for c in &p.constraints {
        let mut a = vec![0.0; n];
        for &(j, v) in &c.terms {
            a[j] += v;
        }
        if a.iter().all(|&v| v == 0.0) {
            // An empty row is either always or never satisfied.
            if c.violation(&a) > 1e-12 {
                return None;
            }
            continue;
        }
        if c.relation == Relation::Eq {
            eq_rows.push(planes.len());
        } else {
            free_planes.push(planes.len());
        }
        planes.push((a, c.rhs));
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        free_planes.push(planes.len());
        planes.push((e.clone(), p.bounds[j].0));
        free_planes.push(planes.len());
        planes.push((e, p.bounds[j].1));
    }
    if eq_rows.len() > n {
        // Overdetermined equalities: fall back to choosing n of them.
        free_planes.append(&mut eq_rows);
    }
    let k = n - eq_rows.len();
    let feasible = |x: &[f64]| {
        let scale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        p.bounds
            .iter()
            .zip(x)
            .all(|(&(l, h), &v)| v >= l - 1e-9 * scale && v <= h + 1e-9 * scale)
            && p.constraints.iter().all(|c| c.violation(x) <= 1e-9 * (scale + c.rhs.abs()))
    };
    let mut best: Option<f64> = None;
    combinations(free_planes.len(), k, &mut |pick| {
        let rows: Vec<usize> = eq_rows.iter().copied().chain(pick.iter().map(|&i| free_planes[i])).collect();
        let a = rows.iter().map(|&r| planes[r].0.clone()).collect();
        let b = rows.iter().map(|&r| planes[r].1).collect();
        if let Some(x) = gauss_solve(a, b) {
            if feasible(&x) {
                let v = p.objective_value(&x);
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
    });
    best
}

// ---------------------------------------------------------------------------
// Binary enumeration oracle for small MILPs.

/// Minimum over every 0/1 assignment of the binaries, each solved as an LP
/// with those binaries fixed. Assignments that break a row made only of
/// binaries are skipped without an LP solve.
pub fn milp_by_enumeration(p: &MilpProblem, exec: ExecMode) -> Option<f64> {
    let b = p.binary_vars.len();
    assert!(b <= 20);
    let is_bin: Vec<bool> = {
        let mut v = vec![false; p.base.n_vars()];
        for &j in &p.binary_vars {
            v[j] = true;
        }
        v
    };
    let pure_rows: Vec<_> = p
        .base
        .constraints
        .iter()
        .filter(|c| c.terms.iter().all(|&(j, _)| is_bin[j]))
        .collect();
    let opts = LpOptions::default();
    let results = par::map_range(exec, 1usize << b, |mask| {
        let mut bounds = p.base.bounds.clone();
        let mut x = vec![0.0; p.base.n_vars()];
        for (bit, &j) in p.binary_vars.iter().enumerate() {
            let v = ((mask >> bit) & 1) as f64;
            if v < bounds[j].0 || v > bounds[j].1 {
                return None;
            }
            bounds[j] = (v, v);
            x[j] = v;
        }
        if pure_rows.iter().any(|c| c.violation(&x) > 1e-12) {
            return None;
        }
        let s = lp::solve_lp_with_bounds(&p.base, &bounds, &opts).expect("well-formed LP");
        match s.status {
            LpStatus::Optimal => Some(s.objective_value),
            LpStatus::Infeasible => None,
            other => panic!("unexpected LP status {other:?}"),
        }
    });
    results.into_iter().flatten().reduce(f64::min)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

// ---------------------------------------------------------------------------
// Small random dispatch instances.

pub struct EdInstance {
    pub config: MicrogridConfig,
    pub state: SystemState,
    pub forecast: Forecast,
}

/// A small fleet with `n_dg` generators, `n_bess` batteries and one turbine
/// over `horizon` intervals, drawn from `rng`.
pub fn random_ed_instance(rng: &mut impl rand::Rng, n_dg: usize, n_bess: usize, horizon: usize) -> EdInstance {
    let diesel: Vec<DieselGenSpec> = (0..n_dg)
        .map(|i| {
            let p_max = rng.random_range(40.0..200.0f64).round();
            DieselGenSpec {
                name: format!("dg{i}"),
                p_min_kw: (p_max * rng.random_range(0.05..0.3f64)).round(),
                p_max_kw: p_max,
                ramp_kw_per_h: rng.random_range(80.0..400.0f64).round(),
                energy_cost_per_kwh: rng.random_range(0.05..0.2f64),
                no_load_cost: rng.random_range(0.0..5.0f64),
                startup_cost: rng.random_range(0.0..8.0f64),
            }
        })
        .collect();
    let bess: Vec<BessSpec> = (0..n_bess)
        .map(|k| {
            let e_max = rng.random_range(100.0..600.0f64).round();
            let p_max = rng.random_range(30.0..120.0f64).round();
            BessSpec {
                name: format!("bess{k}"),
                e_max_kwh: e_max,
                p_max_kw: p_max,
                p_min_kw: (p_max * rng.random_range(0.0..0.3f64)).round().max(1.0),
                eta_charge: rng.random_range(0.85..0.98),
                eta_discharge: rng.random_range(0.85..0.98),
                soc_penalty_cost: rng.random_range(0.0..50.0),
                ..BessSpec::reference()
            }
        })
        .collect();
    let wind = vec![WindTurbineSpec::reference()];
    let config = MicrogridConfig {
        horizon: HorizonSpec {
            dt_hours: 0.25,
            n_intervals: horizon,
        },
        diesel,
        bess,
        wind,
        pv: vec![],
        tie_line: TieLineSpec {
            p_max_kw: rng.random_range(100.0..600.0f64).round(),
        },
        reserve: ReservePolicy {
            reserve_fraction: rng.random_range(0.0..0.15),
        },
    };
    let state = SystemState {
        bess_energy_kwh: config
            .bess
            .iter()
            .map(|b| b.e_max_kwh * rng.random_range(0.05..0.95))
            .collect(),
        dg_previous_output_kw: config.diesel.iter().map(|_| 0.0).collect(),
        dg_previous_on: config.diesel.iter().map(|_| false).collect(),
    };
    let mut state = state;
    for (i, d) in config.diesel.iter().enumerate() {
        if rng.random_bool(0.5) {
            state.dg_previous_on[i] = true;
            state.dg_previous_output_kw[i] = rng.random_range(d.p_min_kw..=d.p_max_kw);
        }
    }
    let intervals = (0..horizon)
        .map(|_| {
            let buy = rng.random_range(0.02..0.3f64);
            ForecastInterval {
                start: None,
                demand_kw: rng.random_range(20.0..500.0),
                buy_price: buy,
                sell_price: buy * rng.random_range(0.5..1.0),
                wt_available_kw: vec![rng.random_range(0.0..200.0)],
                pv_kw: vec![],
            }
        })
        .collect();
    EdInstance {
        config,
        state,
        forecast: Forecast { intervals },
    }
}

// ---------------------------------------------------------------------------
// Grid brute force for single-interval trade bounds.

fn centi(x: f64) -> i64 {
    (x * 100.0).round() as i64
}

/// Extreme trade over a 0.01 kW grid of device set-points, for fleets with
/// at most one generator. `maximize` selects the direction. Returns `None`
/// if no grid point is feasible.
pub fn trade_bound_by_grid(
    config: &MicrogridConfig,
    state: &SystemState,
    interval: &ForecastInterval,
    targets: &TargetProfile,
    alpha: &AlphaParams,
    maximize: bool,
) -> Option<f64> {
    assert!(config.diesel.len() <= 1);
    let dt = config.horizon.dt_hours;
    let eps = 1e-9;

    // Every feasible grid point of each device, as its power injection.
    let dg_points: Vec<f64> = match (config.diesel.first(), targets.dg.first()) {
        (None, _) => vec![0.0],
        (Some(spec), Some(t)) => {
            if !t.on {
                vec![0.0]
            } else {
                let band = alpha.dg.for_device(0) * spec.p_max_kw;
                let ramp = dt * spec.ramp_kw_per_h;
                let prev = state.dg_previous_output_kw[0];
                (centi(t.target_kw - band)..=centi(t.target_kw + band))
                    .map(|c| c as f64 / 100.0)
                    .filter(|&p| {
                        p >= spec.p_min_kw - eps
                            && p <= spec.p_max_kw + eps
                            && (p - prev).abs() <= ramp + eps
                            && (p - t.target_kw).abs() <= band + eps
                    })
                    .collect()
            }
        }
        _ => unreachable!(),
    };
    let mut other_min = 0.0;
    let mut other_max = 0.0;
    for (k, (spec, t)) in config.bess.iter().zip(&targets.bess).enumerate() {
        let band = alpha.bess.for_device(k) * spec.e_max_kwh;
        let e0 = state.bess_energy_kwh[k];
        let pts: Vec<f64> = (centi(t.net_kw - band)..=centi(t.net_kw + band))
            .map(|c| c as f64 / 100.0)
            .filter(|&net| {
                let ok_mode = if t.charging {
                    -net >= spec.p_min_kw - eps && -net <= spec.p_max_kw + eps
                } else if t.discharging {
                    net >= spec.p_min_kw - eps && net <= spec.p_max_kw + eps
                } else {
                    net == 0.0
                };
                let (chg, dis) = if net < 0.0 { (-net, 0.0) } else { (0.0, net) };
                let e = e0 + dt * (spec.eta_charge * chg - dis / spec.eta_discharge);
                ok_mode && e >= spec.e_min_kwh - eps && e <= spec.e_max_kwh + eps && (net - t.net_kw).abs() <= band + eps
            })
            .collect();
        if pts.is_empty() {
            return None;
        }
        other_min += pts.iter().copied().fold(f64::INFINITY, f64::min);
        other_max += pts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    }
    for (j, (spec, &t)) in config.wind.iter().zip(&targets.wt_kw).enumerate() {
        let band = alpha.wt.for_device(j) * spec.rated_kw;
        let avail = interval.wt_available_kw[j];
        let pts: Vec<f64> = (centi(t - band)..=centi(t))
            .map(|c| c as f64 / 100.0)
            .filter(|&p| p >= -eps && p <= avail + eps && p >= t - band - eps)
            .collect();
        if pts.is_empty() {
            return None;
        }
        other_min += pts.iter().copied().fold(f64::INFINITY, f64::min);
        other_max += pts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    }

    let net_load = interval.demand_kw - interval.pv_kw.iter().sum::<f64>();
    let grid = config.tie_line.p_max_kw;
    let headroom: f64 = config.diesel.iter().map(|d| d.p_max_kw).sum();
    let mut best: Option<f64> = None;
    for &p in &dg_points {
        // trade = net_load - p - (bess + wind injections)
        let reachable_hi = net_load - p - other_min;
        let reachable_lo = net_load - p - other_max;
        let cap_hi = grid.min(grid + headroom - p - config.reserve.reserve_fraction * interval.demand_kw);
        let cap_lo = -grid;
        let hi = reachable_hi.min(cap_hi);
        let lo = reachable_lo.max(cap_lo);
        if hi < lo - eps {
            continue;
        }
        let v = if maximize { hi } else { lo };
        best = Some(match best {
            None => v,
            Some(b) if maximize => b.max(v),
            Some(b) => b.min(v),
        });
    }
    best
}
