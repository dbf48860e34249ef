mod common;

use mgflex::dispatch::{self, Forecast};
use mgflex::flexband::{self, Direction};
use mgflex::milp::MilpOptions;
use mgflex::model::AlphaParams;
use mgflex::ExecMode;

#[test]
fn saturated_devices_freeze_one_side() {
    let opts = MilpOptions::default();
    // Selling: generator at maximum and battery at maximum charge, so only
    // the export-decreasing side responds to the generator and wind.
    let (c, s, i, t) = common::scenario_a();
    let r = |g, b, w| flexband::trading_range(&c, &s, &i, &t, &AlphaParams::uniform(g, b, w), &opts).unwrap();
    let base = r(0.05, 0.02, 0.05);
    let more_dg = r(0.1, 0.02, 0.05);
    assert_eq!(base.lower_kw, more_dg.lower_kw);
    assert!(more_dg.upper_kw > base.upper_kw);
    let more_bess = r(0.05, 0.05, 0.05);
    assert_eq!(base.upper_kw, more_bess.upper_kw);
    assert!(more_bess.lower_kw < base.lower_kw);

    // Buying: battery at its minimum discharge cannot reduce discharge further.
    let (c, s, i, t) = common::scenario_b();
    let r = |g, b, w| flexband::trading_range(&c, &s, &i, &t, &AlphaParams::uniform(g, b, w), &opts).unwrap();
    assert_eq!(r(0.05, 0.01, 0.05).upper_kw, r(0.05, 0.1, 0.05).upper_kw);
}

#[test]
fn range_decomposes_into_device_headrooms() {
    let (c, s, i, t) = common::scenario_a();
    for row in 1..common::ALPHA_ROWS.len() {
        let (g, b, w) = common::ALPHA_ROWS[row];
        let r = flexband::trading_range(&c, &s, &i, &t, &common::alpha(row), &MilpOptions::default()).unwrap();
        let up = g * 180.0 + w * 200.0 * 4.0;
        let down = b * 500.0;
        assert!((r.upper_kw - t.trade_kw - up).abs() < 1e-6, "row {row}");
        assert!((t.trade_kw - r.lower_kw - down).abs() < 1e-6, "row {row}");
    }
}

#[test]
fn bounds_balance_and_keep_modes() {
    let (c, s, i, t) = common::scenario_b();
    for dir in [Direction::Min, Direction::Max] {
        let b = flexband::solve_bound(dir, &c, &s, &i, &t, &common::alpha(10), &MilpOptions::default()).unwrap();
        let d = &b.decision;
        assert!(d.dg[0].on && d.bess[0].discharging && !d.bess[0].charging);
        assert!(d.bess[0].discharge_kw >= 20.0 - 1e-9);
        assert!((d.trade.net_kw() - b.trade_kw).abs() < 1e-6);
    }
}

#[test]
fn package_from_dispatch_matches_targets() {
    let mut config = common::reference_fleet();
    config.horizon.n_intervals = 2;
    let state = dispatch::SystemState::at_soc(&config, 0.5);
    let f = dispatch::ForecastInterval {
        start: None,
        demand_kw: 700.0,
        buy_price: 0.15,
        sell_price: 0.12,
        wt_available_kw: vec![90.0; 4],
        pv_kw: vec![],
    };
    let forecast = Forecast { intervals: vec![f.clone(); 2] };
    let opts = MilpOptions::default();
    let sol = dispatch::solve_ed(&config, &state, &forecast, &opts).unwrap();
    let zero = flexband::make_data_package(&config, &state, 0, &f, &sol, &AlphaParams::zero(), &opts).unwrap();
    assert_eq!(zero.target_kw, sol.intervals[0].trade.net_kw());
    assert_eq!(zero.range.lower_kw, zero.target_kw);
    assert_eq!(zero.range.upper_kw, zero.target_kw);
    assert!((zero.range.cost_lower - zero.range.cost_target).abs() < 1e-9);
    assert!((zero.range.cost_upper - zero.range.cost_target).abs() < 1e-9);

    let wide = flexband::make_data_package(&config, &state, 0, &f, &sol, &common::alpha(5), &opts).unwrap();
    assert!(wide.range.lower_kw <= wide.target_kw && wide.target_kw <= wide.range.upper_kw);
    assert!(wide.range.power_span() > 0.0);
}

#[test]
fn sweep_is_identical_in_both_modes() {
    let (c, s, i, t) = common::scenario_a();
    let alphas: Vec<AlphaParams> = (0..common::ALPHA_ROWS.len()).map(common::alpha).collect();
    let run = |exec| flexband::sweep(&c, &s, 0, &i, &t, &alphas, &MilpOptions { exec, ..Default::default() }).unwrap();
    assert_eq!(run(ExecMode::Sequential), run(ExecMode::Parallel));
}

#[test]
fn per_device_alpha_applies_to_each_unit() {
    let (c, s, i, t) = common::scenario_a();
    let alpha = AlphaParams {
        dg: 0.0.into(),
        bess: 0.0.into(),
        wt: mgflex::model::Alpha::PerDevice(vec![0.1, 0.0, 0.0, 0.05]),
    };
    let r = flexband::trading_range(&c, &s, &i, &t, &alpha, &MilpOptions::default()).unwrap();
    assert!((r.upper_kw - (t.trade_kw + 20.0 + 10.0)).abs() < 1e-6);
    assert_eq!(r.lower_kw, t.trade_kw);
}
