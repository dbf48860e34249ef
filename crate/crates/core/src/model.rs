//! Device parameters, per-interval decision records and the closed-form
//! device physics and cost evaluations.
//!
//! Units: power kW, energy kWh, prices $/kWh, durations hours.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Relative slack accepted by [`bess_step`] before clamping to the energy
/// bounds; covers solver round-off on the committed setpoints.
const ENERGY_ROUNDOFF: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonSpec {
    pub dt_hours: f64,
    pub n_intervals: usize,
}

impl Default for HorizonSpec {
    fn default() -> Self {
        HorizonSpec {
            dt_hours: 0.25,
            n_intervals: 4,
        }
    }
}

impl HorizonSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt_hours > 0.0 && self.dt_hours.is_finite()) {
            return Err(Error::Config(format!("dt_hours must be > 0, got {}", self.dt_hours)));
        }
        if self.n_intervals == 0 {
            return Err(Error::Config("n_intervals must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DieselGenSpec {
    #[serde(default)]
    pub name: String,
    pub p_min_kw: f64,
    pub p_max_kw: f64,
    pub ramp_kw_per_h: f64,
    pub energy_cost_per_kwh: f64,
    /// Charged per hour of online operation.
    pub no_load_cost: f64,
    /// Charged once per start.
    pub startup_cost: f64,
}

impl DieselGenSpec {
    /// The 180 kW unit used in the reference test system.
    pub fn reference() -> Self {
        DieselGenSpec {
            name: "dg".into(),
            p_min_kw: 18.0,
            p_max_kw: 180.0,
            ramp_kw_per_h: 240.0,
            energy_cost_per_kwh: 0.1,
            no_load_cost: 3.4,
            startup_cost: 5.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.p_min_kw >= 0.0
            && self.p_min_kw <= self.p_max_kw
            && self.p_max_kw.is_finite()
            && self.ramp_kw_per_h > 0.0
            && self.energy_cost_per_kwh >= 0.0
            && self.no_load_cost >= 0.0
            && self.startup_cost >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid diesel generator {:?}", self.name)))
        }
    }
}

fn default_soc_low() -> f64 {
    0.2
}
fn default_soc_high() -> f64 {
    0.8
}
fn default_power_cost() -> f64 {
    0.01
}
fn default_soc_penalty() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BessSpec {
    #[serde(default)]
    pub name: String,
    pub e_max_kwh: f64,
    #[serde(default)]
    pub e_min_kwh: f64,
    pub p_max_kw: f64,
    pub p_min_kw: f64,
    pub eta_charge: f64,
    pub eta_discharge: f64,
    #[serde(default = "default_soc_low")]
    pub soc_low: f64,
    #[serde(default = "default_soc_high")]
    pub soc_high: f64,
    #[serde(default = "default_power_cost")]
    pub power_cost_per_kwh: f64,
    /// Cost per unit of SOC slack (a slack of 1.0 means 100 % of capacity).
    #[serde(default = "default_soc_penalty")]
    pub soc_penalty_cost: f64,
}

impl BessSpec {
    /// 500 kWh lithium-ion unit of the reference test system, 90 % efficient
    /// each way, charging or discharging between 20 and 75 kW.
    pub fn reference() -> Self {
        BessSpec {
            name: "bess".into(),
            e_max_kwh: 500.0,
            e_min_kwh: 0.0,
            p_max_kw: 75.0,
            p_min_kw: 20.0,
            eta_charge: 0.9,
            eta_discharge: 0.9,
            soc_low: default_soc_low(),
            soc_high: default_soc_high(),
            power_cost_per_kwh: default_power_cost(),
            soc_penalty_cost: default_soc_penalty(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.e_min_kwh >= 0.0
            && self.e_min_kwh < self.e_max_kwh
            && self.e_max_kwh.is_finite()
            && self.p_min_kw > 0.0
            && self.p_min_kw <= self.p_max_kw
            && self.p_max_kw.is_finite()
            && self.eta_charge > 0.0
            && self.eta_charge <= 1.0
            && self.eta_discharge > 0.0
            && self.eta_discharge <= 1.0
            && self.soc_low >= 0.0
            && self.soc_low < self.soc_high
            && self.soc_high <= 1.0
            && self.power_cost_per_kwh >= 0.0
            && self.soc_penalty_cost >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid battery {:?}", self.name)))
        }
    }
}

/// Betz limit on the rotor power coefficient.
pub const BETZ_LIMIT: f64 = 0.59;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindTurbineSpec {
    #[serde(default)]
    pub name: String,
    pub rated_kw: f64,
    pub rotor_area_m2: f64,
    pub air_density_kg_m3: f64,
    pub power_coefficient: f64,
}

impl WindTurbineSpec {
    /// 200 kW turbine sized so that `wt_power` is exactly `v^3 / 10` kW
    /// below rating (100 kW at 10 m/s).
    pub fn reference() -> Self {
        WindTurbineSpec {
            name: "wt".into(),
            rated_kw: 200.0,
            rotor_area_m2: 400.0,
            air_density_kg_m3: 1.25,
            power_coefficient: 0.4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.rated_kw > 0.0
            && self.rated_kw.is_finite()
            && self.rotor_area_m2 >= 0.0
            && self.air_density_kg_m3 >= 0.0
            && self.power_coefficient > 0.0
            && self.power_coefficient <= BETZ_LIMIT;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid wind turbine {:?}", self.name)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvSpec {
    pub panel_area_m2: f64,
    pub shade_ratio: f64,
    pub efficiency: f64,
}

impl PvSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.panel_area_m2 >= 0.0
            && (0.0..=1.0).contains(&self.shade_ratio)
            && self.efficiency > 0.0
            && self.efficiency <= 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config("invalid PV panel parameters".into()))
        }
    }
}

/// A group of identical rooftop installations sharing one [`PvSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvSystem {
    #[serde(default)]
    pub name: String,
    pub spec: PvSpec,
    #[serde(default = "one")]
    pub installations: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TieLineSpec {
    pub p_max_kw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ReservePolicy {
    pub reserve_fraction: f64,
}

/// Static description of the microgrid fleet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicrogridConfig {
    #[serde(default)]
    pub horizon: HorizonSpec,
    #[serde(default)]
    pub diesel: Vec<DieselGenSpec>,
    #[serde(default)]
    pub bess: Vec<BessSpec>,
    #[serde(default)]
    pub wind: Vec<WindTurbineSpec>,
    #[serde(default)]
    pub pv: Vec<PvSystem>,
    pub tie_line: TieLineSpec,
    #[serde(default)]
    pub reserve: ReservePolicy,
}

impl MicrogridConfig {
    /// The reference test system: one diesel unit, four 200 kW turbines and
    /// a 500 kWh battery behind a 1500 kW tie-line with a 10 % reserve.
    pub fn reference() -> Self {
        MicrogridConfig {
            horizon: HorizonSpec::default(),
            diesel: vec![DieselGenSpec::reference()],
            bess: vec![BessSpec::reference()],
            wind: (0..4)
                .map(|i| WindTurbineSpec {
                    name: format!("wt{i}"),
                    ..WindTurbineSpec::reference()
                })
                .collect(),
            pv: Vec::new(),
            tie_line: TieLineSpec { p_max_kw: 1500.0 },
            reserve: ReservePolicy {
                reserve_fraction: 0.1,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.horizon.validate()?;
        self.diesel.iter().try_for_each(DieselGenSpec::validate)?;
        self.bess.iter().try_for_each(BessSpec::validate)?;
        self.wind.iter().try_for_each(WindTurbineSpec::validate)?;
        self.pv.iter().try_for_each(|p| p.spec.validate())?;
        // A zero limit is allowed and models an islanded microgrid.
        if !(self.tie_line.p_max_kw >= 0.0 && self.tie_line.p_max_kw.is_finite()) {
            return Err(Error::Config("tie-line p_max_kw must be finite and >= 0".into()));
        }
        if !(0.0..=1.0).contains(&self.reserve.reserve_fraction) {
            return Err(Error::Config("reserve_fraction must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DgDecision {
    pub output_kw: f64,
    pub on: bool,
    pub started: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BessDecision {
    pub charge_kw: f64,
    pub discharge_kw: f64,
    pub charging: bool,
    pub discharging: bool,
    /// Stored energy at the end of the interval.
    pub energy_kwh: f64,
    pub soc: f64,
    pub oc_slack: f64,
    pub od_slack: f64,
}

impl BessDecision {
    /// Signed net output, positive when discharging.
    pub fn net_kw(&self) -> f64 {
        self.discharge_kw - self.charge_kw
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TradeDecision {
    pub buy_kw: f64,
    pub sell_kw: f64,
    pub buying: bool,
    pub selling: bool,
}

impl TradeDecision {
    /// Signed trading power, positive when importing.
    pub fn net_kw(&self) -> f64 {
        self.buy_kw - self.sell_kw
    }
}

/// Setpoints and statuses of every device for one dispatch interval.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IntervalDecision {
    pub dg: Vec<DgDecision>,
    pub bess: Vec<BessDecision>,
    pub wt_kw: Vec<f64>,
    pub pv_kw: Vec<f64>,
    pub trade: TradeDecision,
}

/// Release factor for one device class: either one value for every device
/// or one value per device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Alpha {
    Uniform(f64),
    PerDevice(Vec<f64>),
}

impl Default for Alpha {
    fn default() -> Self {
        Alpha::Uniform(0.0)
    }
}

impl From<f64> for Alpha {
    fn from(v: f64) -> Self {
        Alpha::Uniform(v)
    }
}

impl Alpha {
    pub fn for_device(&self, i: usize) -> f64 {
        match self {
            Alpha::Uniform(a) => *a,
            Alpha::PerDevice(v) => v.get(i).copied().unwrap_or(0.0),
        }
    }

    fn values(&self) -> Vec<f64> {
        match self {
            Alpha::Uniform(a) => vec![*a],
            Alpha::PerDevice(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AlphaParams {
    #[serde(default)]
    pub dg: Alpha,
    #[serde(default)]
    pub bess: Alpha,
    #[serde(default)]
    pub wt: Alpha,
}

impl AlphaParams {
    pub fn uniform(dg: f64, bess: f64, wt: f64) -> Self {
        AlphaParams {
            dg: Alpha::Uniform(dg),
            bess: Alpha::Uniform(bess),
            wt: Alpha::Uniform(wt),
        }
    }

    pub fn zero() -> Self {
        Self::uniform(0.0, 0.0, 0.0)
    }

    pub fn validate(&self, config: &MicrogridConfig) -> Result<()> {
        for (label, alpha, n) in [
            ("dg", &self.dg, config.diesel.len()),
            ("bess", &self.bess, config.bess.len()),
            ("wt", &self.wt, config.wind.len()),
        ] {
            if let Alpha::PerDevice(v) = alpha {
                if v.len() != n {
                    return Err(Error::Dimension(format!(
                        "alpha.{label} has {} entries for {n} devices",
                        v.len()
                    )));
                }
            }
            if alpha.values().iter().any(|a| !(*a >= 0.0 && a.is_finite())) {
                return Err(Error::InvalidInput(format!("alpha.{label} must be >= 0")));
            }
        }
        Ok(())
    }
}

/// Wind turbine output from the actuator-disc relation, clipped at the
/// nameplate rating.
pub fn wt_power(spec: &WindTurbineSpec, wind_speed_m_s: f64) -> f64 {
    let v = wind_speed_m_s.max(0.0);
    let watts = 0.5 * spec.air_density_kg_m3 * spec.rotor_area_m2 * v * v * v * spec.power_coefficient;
    (watts / 1000.0).min(spec.rated_kw).max(0.0)
}

/// Output of one PV installation for a given irradiance.
pub fn pv_power(spec: &PvSpec, irradiance_w_m2: f64) -> f64 {
    irradiance_w_m2.max(0.0) * spec.shade_ratio * spec.panel_area_m2 * spec.efficiency / 1000.0
}

/// Advances the battery energy by one interval. Returns `(energy_kwh, soc)`.
pub fn bess_step(
    spec: &BessSpec,
    energy_kwh: f64,
    charge_kw: f64,
    discharge_kw: f64,
    dt_hours: f64,
) -> Result<(f64, f64)> {
    if charge_kw < 0.0 || discharge_kw < 0.0 {
        return Err(Error::InvalidInput("battery powers must be nonnegative".into()));
    }
    if charge_kw > 0.0 && discharge_kw > 0.0 {
        return Err(Error::InvalidInput(format!(
            "battery {:?} cannot charge ({charge_kw} kW) and discharge ({discharge_kw} kW) at once",
            spec.name
        )));
    }
    let next = energy_kwh + dt_hours * (spec.eta_charge * charge_kw - discharge_kw / spec.eta_discharge);
    let slop = ENERGY_ROUNDOFF * spec.e_max_kwh;
    if next < -slop || next > spec.e_max_kwh + slop {
        return Err(Error::InvalidInput(format!(
            "battery {:?} energy would leave [0, {}] kWh: {next}",
            spec.name, spec.e_max_kwh
        )));
    }
    let next = next.clamp(0.0, spec.e_max_kwh);
    Ok((next, next / spec.e_max_kwh))
}

/// Diesel generator cost for one interval: energy and no-load costs accrue
/// with interval length, the startup cost once per start.
pub fn dg_cost(spec: &DieselGenSpec, output_kw: f64, on: bool, started: bool, dt_hours: f64) -> f64 {
    let on = f64::from(u8::from(on));
    let started = f64::from(u8::from(started));
    output_kw * spec.energy_cost_per_kwh * dt_hours + on * spec.no_load_cost * dt_hours + started * spec.startup_cost
}

/// Tie-line cost for one interval; negative values are revenue.
pub fn trade_cost(buy_kw: f64, sell_kw: f64, buy_price: f64, sell_price: f64, dt_hours: f64) -> f64 {
    (buy_kw * buy_price - sell_kw * sell_price) * dt_hours
}

/// Battery degradation cost for one interval: throughput plus SOC-band
/// violation penalty.
///
/// The charge term multiplies by the charge efficiency, exactly as the cost
/// model is usually written, rather than dividing by it.
pub fn bess_cost(
    spec: &BessSpec,
    charge_kw: f64,
    discharge_kw: f64,
    oc_slack: f64,
    od_slack: f64,
    dt_hours: f64,
) -> f64 {
    let power = (discharge_kw / spec.eta_discharge + charge_kw * spec.eta_charge) * spec.power_cost_per_kwh * dt_hours;
    power + (od_slack + oc_slack) * spec.soc_penalty_cost
}

/// Smallest SOC slacks that make `soc` satisfy the soft band.
/// Returns `(oc_slack, od_slack)`.
pub fn soc_slacks(spec: &BessSpec, soc: f64) -> (f64, f64) {
    ((soc - spec.soc_high).max(0.0), (spec.soc_low - soc).max(0.0))
}

/// Per-interval cost split into the three objective terms.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IntervalCost {
    pub dg: f64,
    pub grid: f64,
    pub bess: f64,
}

impl IntervalCost {
    pub fn total(&self) -> f64 {
        self.dg + self.grid + self.bess
    }
}

/// Evaluates the objective terms of one interval on a decision record.
pub fn interval_cost(
    config: &MicrogridConfig,
    decision: &IntervalDecision,
    buy_price: f64,
    sell_price: f64,
    dt_hours: f64,
) -> IntervalCost {
    let dg = config
        .diesel
        .iter()
        .zip(&decision.dg)
        .map(|(spec, d)| dg_cost(spec, d.output_kw, d.on, d.started, dt_hours))
        .sum();
    let bess = config
        .bess
        .iter()
        .zip(&decision.bess)
        .map(|(spec, d)| bess_cost(spec, d.charge_kw, d.discharge_kw, d.oc_slack, d.od_slack, dt_hours))
        .sum();
    let grid = trade_cost(
        decision.trade.buy_kw,
        decision.trade.sell_kw,
        buy_price,
        sell_price,
        dt_hours,
    );
    IntervalCost { dg, grid, bess }
}
