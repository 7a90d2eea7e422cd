//! Hour-by-hour power management and the annual energy ledger.
//!
//! Bus model: wind turbines, diesel generators, and the load share the AC
//! bus; PV and the battery bank live on the DC bus. A single bidirectional
//! converter (one shared rating, one efficiency) moves energy between buses;
//! its per-hour throughput budget is shared by inversion and rectification.
//!
//! Each hour the engine serves the load from wind, then inverted PV. Surplus
//! renewable power charges the battery (PV directly on the DC bus, wind
//! through the rectifier), then feeds the diversion water heater (wind
//! directly, PV through the inverter), and whatever remains is dumped. In
//! deficit hours the battery discharges down to its floor state of charge
//! before generators commit under the active strategy. Generator surplus may
//! charge the battery but is never diverted to the heater.
//!
//! An operating reserve equal to configurable fractions of the current PV
//! and wind output must be covered every hour by spare battery discharge
//! power plus online generator headroom; hours short of reserve commit the
//! cheapest additional generator set at minimum load.
//!
//! All quantities are kW on a 1-hour step, so power and energy coincide.

use serde::{Deserialize, Serialize};

use crate::components::{BatterySpec, ConverterSpec, GeneratorSpec, PvSpec, WindTurbineSpec};
use crate::error::{Error, Result};
use crate::load::LoadProfile;
use crate::resource::ResourceYear;
use crate::thermal::{DiversionLedger, DiversionLoad, HotWaterSpec};
use crate::HOURS_PER_YEAR;

const EPS_KW: f64 = 1e-9;

/// Generator-commitment and battery-use policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DispatchStrategy {
    /// Generators produce exactly the residual load.
    LoadFollowing,
    /// Committed generators run at rated power; surplus charges the battery
    /// up to a setpoint state of charge.
    CycleCharging,
    /// Fixed priority order (ascending rating), engaged until the residual
    /// is met.
    GeneratorOrder,
    /// Chooses load-following or cycle-charging each hour by marginal cost.
    Combined,
}

impl DispatchStrategy {
    pub const ALL: [DispatchStrategy; 4] = [
        DispatchStrategy::LoadFollowing,
        DispatchStrategy::CycleCharging,
        DispatchStrategy::GeneratorOrder,
        DispatchStrategy::Combined,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DispatchStrategy::LoadFollowing => "load_following",
            DispatchStrategy::CycleCharging => "cycle_charging",
            DispatchStrategy::GeneratorOrder => "generator_order",
            DispatchStrategy::Combined => "combined",
        }
    }
}

/// One candidate system sizing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfiguration {
    pub pv_kw: f64,
    pub wind_count: u32,
    pub gen_kw: [f64; 3],
    pub battery_strings: u32,
    pub converter_kw: f64,
    pub strategy: DispatchStrategy,
}

/// Component parameter set shared by every configuration in a study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentLibrary {
    /// PV parameters; `rated_kw` is overridden per configuration.
    pub pv: PvSpec,
    pub wind: WindTurbineSpec,
    /// Generator template; `rated_kw` is overridden per configuration.
    pub generator: GeneratorSpec,
    pub battery: BatterySpec,
    /// Converter template; `rated_kw` is overridden per configuration.
    pub converter: ConverterSpec,
}

impl ComponentLibrary {
    pub fn validate(&self) -> Result<()> {
        self.pv.validate()?;
        self.wind.validate()?;
        self.generator.validate()?;
        self.battery.validate()?;
        self.converter.validate()
    }
}

/// Policy knobs of the power-management loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispatchSettings {
    /// Operating reserve as a fraction of current PV output.
    pub reserve_pv_fraction: f64,
    /// Operating reserve as a fraction of current wind output.
    pub reserve_wind_fraction: f64,
    /// Battery terminal power limit as a fraction of bank capacity per hour.
    pub battery_c_rate: f64,
    /// Cycle charging stops charging the battery at this state of charge.
    pub cycle_charge_soc_setpoint: f64,
    /// State of charge at hour zero.
    pub initial_soc: f64,
}

impl Default for DispatchSettings {
    fn default() -> Self {
        Self {
            reserve_pv_fraction: 0.30,
            reserve_wind_fraction: 0.50,
            battery_c_rate: 0.20,
            cycle_charge_soc_setpoint: 0.80,
            initial_soc: 1.0,
        }
    }
}

/// Everything a year-simulation needs besides the configuration.
#[derive(Debug, Clone)]
pub struct SimulationInputs {
    pub library: ComponentLibrary,
    pub settings: DispatchSettings,
    pub resources: ResourceYear,
    pub load: LoadProfile,
    pub hot_water: HotWaterSpec,
}

/// Mutable dispatch state carried between hours.
#[derive(Debug, Clone, PartialEq)]
pub struct DispatchState {
    /// Battery state of charge as a fraction of bank capacity.
    pub soc: f64,
    /// Cumulative run hours per generator.
    pub gen_hours: [f64; 3],
    pub gen_on: [bool; 3],
    pub hour_index: usize,
}

/// Power flows and end state of one dispatch hour; every field ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HourlyRecord {
    pub hour: usize,
    pub pv_kw: f64,
    pub wind_kw: f64,
    pub gen_kw: [f64; 3],
    pub load_kw: f64,
    /// Power into the battery terminals (DC side).
    pub batt_charge_kw: f64,
    /// Power out of the battery terminals (DC side).
    pub batt_discharge_kw: f64,
    /// Power delivered into the diversion heater.
    pub diverted_kw: f64,
    pub dumped_kw: f64,
    pub converter_loss_kw: f64,
    pub unmet_kw: f64,
    pub fuel_l: f64,
    pub soc_end: f64,
}

impl HourlyRecord {
    /// Supply minus use; zero (to rounding) when the ledger is consistent.
    ///
    /// Unserved load is carried as a virtual source so the identity covers
    /// shortage hours too:
    /// `pv + wind + Σgen + discharge + unmet = load + charge + diverted +
    /// dumped + converter loss`.
    pub fn energy_balance_residual_kwh(&self) -> f64 {
        let supply = self.pv_kw
            + self.wind_kw
            + self.gen_kw.iter().sum::<f64>()
            + self.batt_discharge_kw
            + self.unmet_kw;
        let used = self.load_kw
            + self.batt_charge_kw
            + self.diverted_kw
            + self.dumped_kw
            + self.converter_loss_kw;
        supply - used
    }
}

/// Annual energy ledger of one simulated configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub pv_kwh: f64,
    pub wind_kwh: f64,
    pub gen_kwh: [f64; 3],
    pub gen_fuel_l: [f64; 3],
    /// Annual electrical demand, kWh.
    pub load_kwh: f64,
    pub load_served_kwh: f64,
    pub excess_total_kwh: f64,
    pub excess_diverted_kwh: f64,
    pub excess_dumped_kwh: f64,
    pub fuel_total_l: f64,
    pub gen_hours: [f64; 3],
    /// 1 − generator production / total production.
    pub renewable_fraction: f64,
    pub unmet_load_kwh: f64,
    /// Energy drawn out of storage (stored side), kWh/yr.
    pub battery_throughput_kwh: f64,
    pub battery_charge_kwh: f64,
    pub battery_discharge_kwh: f64,
    pub diversion: DiversionLedger,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub records: Option<Vec<HourlyRecord>>,
}

impl SimulationResult {
    /// Total electrical production from all sources, kWh.
    pub fn production_kwh(&self) -> f64 {
        self.pv_kwh + self.wind_kwh + self.gen_kwh.iter().sum::<f64>()
    }
}

/// Result of a generator commitment decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Commitment {
    pub outputs: [f64; 3],
    /// Total production, kW (may exceed the request via minimum-load floors
    /// or cycle charging, or fall short of it on capacity exhaustion).
    pub production_kw: f64,
    /// Request that could not be met, kW.
    pub shortfall_kw: f64,
    pub fuel_l: f64,
}

fn subset_sums(mask: u8, gens: &[GeneratorSpec; 3]) -> (f64, f64) {
    let mut rated = 0.0;
    let mut min = 0.0;
    for (i, g) in gens.iter().enumerate() {
        if mask & (1 << i) != 0 {
            rated += g.rated_kw;
            min += g.min_output_kw();
        }
    }
    (rated, min)
}

/// Fills committed units in ascending-rating order: every unit at least its
/// minimum load, remainder distributed up to ratings.
fn allocate(production: f64, mask: u8, gens: &[GeneratorSpec; 3]) -> [f64; 3] {
    let mut order: [usize; 3] = [0, 1, 2];
    order.sort_by(|&a, &b| gens[a].rated_kw.partial_cmp(&gens[b].rated_kw).unwrap().then(a.cmp(&b)));
    let mut out = [0.0; 3];
    let mut remaining = production;
    for &i in &order {
        if mask & (1 << i) != 0 {
            out[i] = gens[i].min_output_kw();
            remaining -= out[i];
        }
    }
    for &i in &order {
        if mask & (1 << i) != 0 && remaining > 0.0 {
            let add = remaining.min(gens[i].rated_kw - out[i]);
            out[i] += add;
            remaining -= add;
        }
    }
    out
}

fn subset_fuel(production: f64, mask: u8, gens: &[GeneratorSpec; 3]) -> f64 {
    let out = allocate(production, mask, gens);
    let mut fuel = 0.0;
    for (i, g) in gens.iter().enumerate() {
        if out[i] > 0.0 {
            fuel += g.fuel_curve_intercept * g.rated_kw + g.fuel_curve_slope * out[i];
        }
    }
    fuel
}

/// Picks the cheapest feasible generator subset.
///
/// A subset is feasible when its capacity covers the requested production and
/// leaves at least `reserve_shortfall_kw` of headroom above it. Ties break to
/// fewer units, then lower subset index. When reserve cannot be satisfied the
/// selection retries without it; when capacity cannot cover the request, all
/// available units run at rated power and the shortfall is reported.
fn cheapest_subset(
    need_kw: f64,
    reserve_shortfall_kw: f64,
    gens: &[GeneratorSpec; 3],
    run_at_rated_surplus_kw: f64,
) -> Commitment {
    let active: u8 = (0..3).fold(0, |m, i| if gens[i].rated_kw > 0.0 { m | (1 << i) } else { m });
    let mut best: Option<(f64, u32, u8, f64)> = None; // (fuel, units, mask, production)

    for pass in 0..2 {
        let reserve = if pass == 0 { reserve_shortfall_kw } else { 0.0 };
        for mask in 1u8..8 {
            if mask & !active != 0 {
                continue;
            }
            let (rated, min) = subset_sums(mask, gens);
            if rated + EPS_KW < need_kw {
                continue;
            }
            let base = need_kw.max(min);
            // Cycle charging raises production toward rated to charge the
            // battery, bounded by what the battery can absorb.
            let production = (base + run_at_rated_surplus_kw).min(rated).max(base);
            if rated - production + EPS_KW < reserve {
                continue;
            }
            let fuel = subset_fuel(production, mask, gens);
            let units = mask.count_ones();
            let candidate = (fuel, units, mask, production);
            let better = match &best {
                None => true,
                Some((bf, bu, bm, _)) => {
                    (fuel, units, mask) < (*bf, *bu, *bm)
                        || (fuel - bf).abs() < 1e-9 && (units, mask) < (*bu, *bm)
                }
            };
            if better {
                best = Some(candidate);
            }
        }
        if best.is_some() {
            break;
        }
    }

    match best {
        Some((fuel, _, mask, production)) => Commitment {
            outputs: allocate(production, mask, gens),
            production_kw: production,
            shortfall_kw: (need_kw - production).max(0.0),
            fuel_l: fuel,
        },
        None => {
            // Not enough capacity: run everything available at rated.
            if active == 0 {
                return Commitment {
                    outputs: [0.0; 3],
                    production_kw: 0.0,
                    shortfall_kw: need_kw.max(0.0),
                    fuel_l: 0.0,
                };
            }
            let (rated, _) = subset_sums(active, gens);
            Commitment {
                outputs: allocate(rated, active, gens),
                production_kw: rated,
                shortfall_kw: (need_kw - rated).max(0.0),
                fuel_l: subset_fuel(rated, active, gens),
            }
        }
    }
}

/// Engages units in ascending-rating priority until the request is covered.
fn priority_order(need_kw: f64, reserve_shortfall_kw: f64, gens: &[GeneratorSpec; 3]) -> Commitment {
    let mut order: [usize; 3] = [0, 1, 2];
    order.sort_by(|&a, &b| gens[a].rated_kw.partial_cmp(&gens[b].rated_kw).unwrap().then(a.cmp(&b)));
    let mut out = [0.0; 3];
    let mut remaining = need_kw;
    let mut headroom = 0.0;
    for &i in &order {
        if gens[i].rated_kw <= 0.0 {
            continue;
        }
        if remaining <= EPS_KW && headroom + EPS_KW >= reserve_shortfall_kw {
            break;
        }
        let target = remaining.clamp(gens[i].min_output_kw(), gens[i].rated_kw);
        out[i] = target;
        remaining -= target;
        headroom += gens[i].rated_kw - target;
    }
    let production: f64 = out.iter().sum();
    let mut fuel = 0.0;
    for (i, g) in gens.iter().enumerate() {
        if out[i] > 0.0 {
            fuel += g.fuel_curve_intercept * g.rated_kw + g.fuel_curve_slope * out[i];
        }
    }
    Commitment {
        outputs: out,
        production_kw: production,
        shortfall_kw: remaining.max(0.0),
        fuel_l: fuel,
    }
}

/// Commits generators against a residual load under the given strategy.
///
/// `cc_absorbable_kw` bounds how much above the residual cycle charging may
/// produce (what the battery can take on the AC side); `reserve_shortfall_kw`
/// is reserve the committed capacity must additionally cover as headroom.
pub fn commit_generators(
    net_load_kw: f64,
    gens: &[GeneratorSpec; 3],
    strategy: DispatchStrategy,
    reserve_shortfall_kw: f64,
    cc_absorbable_kw: f64,
) -> Commitment {
    match strategy {
        DispatchStrategy::LoadFollowing | DispatchStrategy::Combined => {
            cheapest_subset(net_load_kw, reserve_shortfall_kw, gens, 0.0)
        }
        DispatchStrategy::CycleCharging => {
            cheapest_subset(net_load_kw, reserve_shortfall_kw, gens, cc_absorbable_kw.max(0.0))
        }
        DispatchStrategy::GeneratorOrder => priority_order(net_load_kw, reserve_shortfall_kw, gens),
    }
}

/// Precomputed per-configuration dispatch engine.
pub struct Engine {
    pv: PvSpec,
    wind: WindTurbineSpec,
    wind_count: f64,
    gens: [GeneratorSpec; 3],
    strategy: DispatchStrategy,
    bank_kwh: f64,
    min_soc: f64,
    eta_c: f64,
    eta_d: f64,
    eta_conv: f64,
    converter_kw: f64,
    batt_power_kw: f64,
    settings: DispatchSettings,
    wear_per_kwh: f64,
    fuel_price: f64,
}

/// Per-hour inputs to one dispatch step.
#[derive(Debug, Clone, Copy)]
pub struct StepInputs {
    pub ghi_kw_m2: f64,
    pub wind_m_s: f64,
    pub ambient_c: f64,
    pub load_kw: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct GenPlan {
    outputs: [f64; 3],
    production_kw: f64,
    fuel_l: f64,
    batt_discharge_ac_kw: f64,
    charge_terminal_from_gens_kw: f64,
    unmet_kw: f64,
}

impl Engine {
    pub fn new(config: &SystemConfiguration, inputs: &SimulationInputs) -> Result<Self> {
        inputs.library.validate()?;
        let s = inputs.settings;
        for (name, x) in [
            ("reserve_pv_fraction", s.reserve_pv_fraction),
            ("reserve_wind_fraction", s.reserve_wind_fraction),
            ("battery_c_rate", s.battery_c_rate),
        ] {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::invalid(format!("{name} must be ≥ 0, got {x}")));
            }
        }
        if config.pv_kw < 0.0 || config.converter_kw < 0.0 || config.gen_kw.iter().any(|&g| g < 0.0) {
            return Err(Error::invalid("component sizes must be ≥ 0".to_string()));
        }
        let lib = &inputs.library;
        let battery = &lib.battery;
        let bank_kwh = battery.bank_capacity_kwh(config.battery_strings);
        Ok(Self {
            pv: lib.pv.with_rating(config.pv_kw),
            wind: lib.wind.clone(),
            wind_count: config.wind_count as f64,
            gens: [
                lib.generator.with_rating(config.gen_kw[0]),
                lib.generator.with_rating(config.gen_kw[1]),
                lib.generator.with_rating(config.gen_kw[2]),
            ],
            strategy: config.strategy,
            bank_kwh,
            min_soc: battery.min_soc,
            eta_c: battery.charge_efficiency(),
            eta_d: battery.discharge_efficiency(),
            eta_conv: lib.converter.efficiency,
            converter_kw: config.converter_kw,
            batt_power_kw: s.battery_c_rate * bank_kwh,
            settings: s,
            wear_per_kwh: if battery.lifetime_throughput_kwh > 0.0 {
                battery.replacement_per_unit / battery.lifetime_throughput_kwh
            } else {
                0.0
            },
            fuel_price: lib.generator.fuel.price_per_l,
        })
    }

    pub fn initial_state(&self) -> DispatchState {
        DispatchState {
            soc: if self.bank_kwh > 0.0 { self.settings.initial_soc } else { 1.0 },
            gen_hours: [0.0; 3],
            gen_on: [false; 3],
            hour_index: 0,
        }
    }

    /// Battery terminal power the bank could still deliver this hour, kW.
    fn spare_discharge_terminal_kw(&self, soc: f64, discharging_kw: f64) -> f64 {
        if self.bank_kwh <= 0.0 {
            return 0.0;
        }
        let power = (self.batt_power_kw - discharging_kw).max(0.0);
        let energy = ((soc - self.min_soc).max(0.0) * self.bank_kwh * self.eta_d - discharging_kw).max(0.0);
        power.min(energy)
    }

    /// Maximum battery charge terminal power toward `soc_limit`, kW.
    fn charge_terminal_limit_kw(&self, soc: f64, soc_limit: f64) -> f64 {
        if self.bank_kwh <= 0.0 || self.eta_c <= 0.0 {
            return 0.0;
        }
        let headroom = ((soc_limit - soc).max(0.0) * self.bank_kwh) / self.eta_c;
        self.batt_power_kw.min(headroom)
    }

    /// Advances one hour. `diversion` is stepped exactly once.
    pub fn step(
        &self,
        state: &mut DispatchState,
        diversion: &mut DiversionLoad,
        hour: usize,
        inp: StepInputs,
    ) -> Result<HourlyRecord> {
        let eta = self.eta_conv;
        let pv = self.pv.power_kw(inp.ghi_kw_m2, inp.ambient_c);
        let wind = self.wind_count * self.wind.power_kw(inp.wind_m_s);
        let load = inp.load_kw;

        let mut conv_used = 0.0; // output-side throughput consumed
        let mut conv_loss = 0.0;
        let mut charge_terminal = 0.0;
        let mut discharge_terminal = 0.0;
        let mut outputs = [0.0; 3];
        let mut fuel_total = 0.0;
        let mut diverted = 0.0;
        let mut dumped = 0.0;
        let mut unmet = 0.0;
        let mut soc = state.soc;

        // Load service: wind on its own bus, then PV through the inverter.
        let wind_to_load = wind.min(load);
        let mut residual = load - wind_to_load;
        let mut wind_surplus = wind - wind_to_load;
        let pv_to_load = (pv * eta).min(self.converter_kw - conv_used).min(residual).max(0.0);
        let pv_to_load_dc = if pv_to_load > 0.0 { pv_to_load / eta } else { 0.0 };
        conv_used += pv_to_load;
        conv_loss += pv_to_load_dc - pv_to_load;
        residual -= pv_to_load;
        let mut pv_surplus = pv - pv_to_load_dc;

        let reserve_required =
            self.settings.reserve_pv_fraction * pv + self.settings.reserve_wind_fraction * wind;

        if residual <= EPS_KW {
            // Charge from renewable surplus: PV directly, then wind through
            // the rectifier. Renewable charging may fill the bank completely.
            let chg_limit = self.charge_terminal_limit_kw(soc, 1.0);
            let pv_chg = pv_surplus.min(chg_limit);
            charge_terminal += pv_chg;
            pv_surplus -= pv_chg;
            let wind_chg_terminal = (wind_surplus * eta)
                .min(chg_limit - charge_terminal)
                .min(self.converter_kw - conv_used)
                .max(0.0);
            if wind_chg_terminal > 0.0 {
                let wind_chg_ac = wind_chg_terminal / eta;
                charge_terminal += wind_chg_terminal;
                conv_used += wind_chg_terminal;
                conv_loss += wind_chg_ac - wind_chg_terminal;
                wind_surplus -= wind_chg_ac;
            }

            // Diversion heater: wind surplus feeds it directly, PV surplus
            // through the inverter.
            let pv_invertible = (pv_surplus * eta).min(self.converter_kw - conv_used).max(0.0);
            let offered = wind_surplus + pv_invertible;
            let absorbed = diversion.step(hour % 24, offered);
            let wind_div = absorbed.min(wind_surplus);
            let pv_div_out = absorbed - wind_div;
            if pv_div_out > 0.0 {
                let pv_div_dc = pv_div_out / eta;
                conv_used += pv_div_out;
                conv_loss += pv_div_dc - pv_div_out;
                pv_surplus -= pv_div_dc;
            }
            wind_surplus -= wind_div;
            diverted = absorbed;
            dumped += wind_surplus + pv_surplus;

            soc = self.apply_charge(soc, charge_terminal);

            // Reserve: spare battery power plus generator headroom must
            // cover the requirement; otherwise commit units at minimum load.
            let batt_reserve = self.spare_discharge_terminal_kw(soc, 0.0) * eta;
            let shortfall = reserve_required - batt_reserve;
            if shortfall > EPS_KW {
                let plan = cheapest_subset(0.0, shortfall, &self.gens, 0.0);
                outputs = plan.outputs;
                fuel_total = plan.fuel_l;
                // Generator minimum-load output: battery first (within the
                // power budget left after renewable charging), rest dumped.
                let extra_terminal = (plan.production_kw * eta)
                    .min(self.charge_terminal_limit_kw(soc, 1.0))
                    .min((self.batt_power_kw - charge_terminal).max(0.0))
                    .min(self.converter_kw - conv_used)
                    .max(0.0);
                if extra_terminal > 0.0 {
                    let extra_ac = extra_terminal / eta;
                    charge_terminal += extra_terminal;
                    conv_used += extra_terminal;
                    conv_loss += extra_ac - extra_terminal;
                    soc = self.apply_charge(soc, extra_terminal);
                    dumped += plan.production_kw - extra_ac;
                } else {
                    dumped += plan.production_kw;
                }
            }
        } else {
            // Deficit hour: the heater gets nothing but its tank still drains.
            diversion.step(hour % 24, 0.0);

            let plan = self.plan_deficit(soc, residual, reserve_required, conv_used)?;
            outputs = plan.outputs;
            fuel_total = plan.fuel_l;
            unmet = plan.unmet_kw;

            if plan.batt_discharge_ac_kw > 0.0 {
                let terminal = plan.batt_discharge_ac_kw / eta;
                discharge_terminal += terminal;
                conv_used += plan.batt_discharge_ac_kw;
                conv_loss += terminal - plan.batt_discharge_ac_kw;
                soc -= terminal / self.eta_d / self.bank_kwh;
            }
            if plan.charge_terminal_from_gens_kw > 0.0 {
                let terminal = plan.charge_terminal_from_gens_kw;
                let ac_in = terminal / eta;
                charge_terminal += terminal;
                conv_used += terminal;
                conv_loss += ac_in - terminal;
                soc = self.apply_charge(soc, terminal);
            }

            // Generator overshoot beyond load service and battery charging
            // has nowhere useful to go.
            let gen_to_load = residual - plan.batt_discharge_ac_kw - plan.unmet_kw;
            let gen_charge_ac = if plan.charge_terminal_from_gens_kw > 0.0 {
                plan.charge_terminal_from_gens_kw / eta
            } else {
                0.0
            };
            dumped += (plan.production_kw - gen_to_load - gen_charge_ac).max(0.0);
            // PV stranded behind a saturated converter during a deficit.
            dumped += pv_surplus;
        }

        debug_assert!(conv_used <= self.converter_kw + 1e-6);
        soc = self.clamp_soc(soc)?;
        // Tiny negative residues from float subtraction are bookkeeping noise.
        dumped = dumped.max(0.0);

        for (i, &out) in outputs.iter().enumerate() {
            state.gen_on[i] = out > 0.0;
            if state.gen_on[i] {
                state.gen_hours[i] += 1.0;
            }
        }
        state.soc = soc;
        state.hour_index = hour + 1;

        Ok(HourlyRecord {
            hour,
            pv_kw: pv,
            wind_kw: wind,
            gen_kw: outputs,
            load_kw: load,
            batt_charge_kw: charge_terminal,
            batt_discharge_kw: discharge_terminal,
            diverted_kw: diverted,
            dumped_kw: dumped,
            converter_loss_kw: conv_loss,
            unmet_kw: unmet,
            fuel_l: fuel_total,
            soc_end: soc,
        })
    }

    fn apply_charge(&self, soc: f64, charge_terminal: f64) -> f64 {
        if charge_terminal > 0.0 && self.bank_kwh > 0.0 {
            soc + charge_terminal * self.eta_c / self.bank_kwh
        } else {
            soc
        }
    }

    fn clamp_soc(&self, soc: f64) -> Result<f64> {
        if self.bank_kwh <= 0.0 {
            return Ok(soc);
        }
        let tol = 1e-7;
        if soc < self.min_soc - tol || soc > 1.0 + tol {
            return Err(Error::DispatchContract(format!(
                "state of charge {soc} escaped [{}, 1]",
                self.min_soc
            )));
        }
        Ok(soc.clamp(self.min_soc, 1.0))
    }

    /// Maximum AC power the battery can put on the bus this hour, kW.
    fn deliverable_ac_kw(&self, soc: f64, conv_headroom_kw: f64) -> f64 {
        if self.bank_kwh <= 0.0 {
            return 0.0;
        }
        let terminal_energy = (soc - self.min_soc).max(0.0) * self.bank_kwh * self.eta_d;
        let terminal = self.batt_power_kw.min(terminal_energy);
        (terminal * self.eta_conv).min(conv_headroom_kw).max(0.0)
    }

    fn plan_deficit(
        &self,
        soc: f64,
        residual: f64,
        reserve_required: f64,
        conv_used: f64,
    ) -> Result<GenPlan> {
        let conv_headroom = self.converter_kw - conv_used;
        let deliverable = self.deliverable_ac_kw(soc, conv_headroom);

        match self.strategy {
            DispatchStrategy::LoadFollowing => {
                Ok(self.plan_battery_first(soc, residual, reserve_required, conv_headroom, deliverable, false))
            }
            DispatchStrategy::GeneratorOrder => {
                Ok(self.plan_battery_first(soc, residual, reserve_required, conv_headroom, deliverable, true))
            }
            DispatchStrategy::CycleCharging => {
                if deliverable + EPS_KW >= residual {
                    Ok(self.plan_battery_first(soc, residual, reserve_required, conv_headroom, deliverable, false))
                } else {
                    Ok(self.plan_cycle_charge(soc, residual, reserve_required, conv_headroom, deliverable))
                }
            }
            DispatchStrategy::Combined => {
                let lf = self.plan_battery_first(soc, residual, reserve_required, conv_headroom, deliverable, false);
                if deliverable + EPS_KW >= residual {
                    return Ok(lf);
                }
                let cc = self.plan_cycle_charge(soc, residual, reserve_required, conv_headroom, deliverable);
                // Marginal cost per useful kWh: fuel plus a battery-wear
                // proxy on energy cycled through storage; cycle charging is
                // credited with the stored energy it can deliver later.
                let lf_removed = if self.eta_d > 0.0 {
                    lf.batt_discharge_ac_kw / self.eta_conv.max(1e-12) / self.eta_d
                } else {
                    0.0
                };
                let lf_cost = lf.fuel_l * self.fuel_price + self.wear_per_kwh * lf_removed;
                let lf_useful = residual - lf.unmet_kw;
                let cc_stored = cc.charge_terminal_from_gens_kw * self.eta_c;
                let cc_cost = cc.fuel_l * self.fuel_price + self.wear_per_kwh * cc_stored;
                let cc_useful = (residual - cc.unmet_kw) + cc_stored * self.eta_d * self.eta_conv;
                // Cross-multiplied cost-per-useful comparison; ties keep LF.
                if lf_cost * cc_useful <= cc_cost * lf_useful {
                    Ok(lf)
                } else {
                    Ok(cc)
                }
            }
        }
    }

    /// Battery discharges first (down to the floor), generators take the rest.
    fn plan_battery_first(
        &self,
        soc: f64,
        residual: f64,
        reserve_required: f64,
        conv_headroom: f64,
        deliverable: f64,
        priority_order_commit: bool,
    ) -> GenPlan {
        let batt_ac = residual.min(deliverable);
        let gen_need = residual - batt_ac;
        let mut plan = GenPlan {
            batt_discharge_ac_kw: batt_ac,
            ..Default::default()
        };
        let discharging_terminal = if self.eta_conv > 0.0 { batt_ac / self.eta_conv } else { 0.0 };
        let soc_after = if self.bank_kwh > 0.0 && self.eta_d > 0.0 {
            soc - discharging_terminal / self.eta_d / self.bank_kwh
        } else {
            soc
        };
        let batt_reserve =
            self.spare_discharge_terminal_kw(soc_after, discharging_terminal) * self.eta_conv;
        let reserve_shortfall = (reserve_required - batt_reserve).max(0.0);

        if gen_need > EPS_KW || reserve_shortfall > EPS_KW {
            let commitment = if priority_order_commit {
                priority_order(gen_need.max(0.0), reserve_shortfall, &self.gens)
            } else {
                cheapest_subset(gen_need.max(0.0), reserve_shortfall, &self.gens, 0.0)
            };
            plan.outputs = commitment.outputs;
            plan.production_kw = commitment.production_kw;
            plan.fuel_l = commitment.fuel_l;
            plan.unmet_kw = commitment.shortfall_kw;
            // Minimum-load overshoot charges the battery only when the bank
            // is idle this hour (no simultaneous charge and discharge).
            let overshoot = (commitment.production_kw - gen_need).max(0.0);
            if overshoot > EPS_KW && batt_ac <= EPS_KW {
                let terminal = (overshoot * self.eta_conv)
                    .min(self.charge_terminal_limit_kw(soc, 1.0))
                    .min(conv_headroom)
                    .max(0.0);
                plan.charge_terminal_from_gens_kw = terminal;
            }
        }
        plan
    }

    /// Generators serve the whole residual at rated output; surplus charges
    /// the battery toward the setpoint. The battery does not discharge.
    fn plan_cycle_charge(
        &self,
        soc: f64,
        residual: f64,
        reserve_required: f64,
        conv_headroom: f64,
        deliverable: f64,
    ) -> GenPlan {
        let batt_reserve = self.spare_discharge_terminal_kw(soc, 0.0) * self.eta_conv;
        let reserve_shortfall = (reserve_required - batt_reserve).max(0.0);
        let chg_terminal_cap = self
            .charge_terminal_limit_kw(soc, self.settings.cycle_charge_soc_setpoint)
            .min(conv_headroom)
            .max(0.0);
        let absorbable_ac = if self.eta_conv > 0.0 { chg_terminal_cap / self.eta_conv } else { 0.0 };

        let commitment = cheapest_subset(residual, reserve_shortfall, &self.gens, absorbable_ac);
        let mut plan = GenPlan {
            outputs: commitment.outputs,
            production_kw: commitment.production_kw,
            fuel_l: commitment.fuel_l,
            ..Default::default()
        };

        let mut shortfall = commitment.shortfall_kw;
        if shortfall > EPS_KW {
            // Capacity exhausted: let the battery cover what it can.
            let assist = shortfall.min(deliverable);
            plan.batt_discharge_ac_kw = assist;
            shortfall -= assist;
        } else {
            let surplus_ac = (commitment.production_kw - residual).max(0.0);
            plan.charge_terminal_from_gens_kw = (surplus_ac * self.eta_conv).min(chg_terminal_cap);
        }
        plan.unmet_kw = shortfall;
        plan
    }
}

/// Simulates one full year for a configuration.
///
/// Folds [`Engine::step`] over all 8760 hours from the configured initial
/// state of charge. Pure: identical inputs give a bit-identical result.
pub fn simulate_year(
    config: &SystemConfiguration,
    inputs: &SimulationInputs,
    keep_records: bool,
) -> Result<SimulationResult> {
    let engine = Engine::new(config, inputs)?;
    let mut state = engine.initial_state();
    let mut diversion = DiversionLoad::new(effective_hot_water(config, inputs))?;

    let demand = inputs.load.demand_kw();
    let res = &inputs.resources;
    if demand.len() != HOURS_PER_YEAR || res.ghi.len() != HOURS_PER_YEAR {
        return Err(Error::invalid("simulation inputs must cover 8760 hours".to_string()));
    }

    let mut out = SimulationResult {
        pv_kwh: 0.0,
        wind_kwh: 0.0,
        gen_kwh: [0.0; 3],
        gen_fuel_l: [0.0; 3],
        load_kwh: 0.0,
        load_served_kwh: 0.0,
        excess_total_kwh: 0.0,
        excess_diverted_kwh: 0.0,
        excess_dumped_kwh: 0.0,
        fuel_total_l: 0.0,
        gen_hours: [0.0; 3],
        renewable_fraction: 0.0,
        unmet_load_kwh: 0.0,
        battery_throughput_kwh: 0.0,
        battery_charge_kwh: 0.0,
        battery_discharge_kwh: 0.0,
        diversion: DiversionLedger::default(),
        records: if keep_records { Some(Vec::with_capacity(HOURS_PER_YEAR)) } else { None },
    };

    let eta_d = inputs.library.battery.discharge_efficiency();
    #[allow(clippy::needless_range_loop)] // one index drives four parallel series
    for hour in 0..HOURS_PER_YEAR {
        let record = engine.step(
            &mut state,
            &mut diversion,
            hour,
            StepInputs {
                ghi_kw_m2: res.ghi[hour],
                wind_m_s: res.wind_speed[hour],
                ambient_c: res.ambient_temp[hour],
                load_kw: demand[hour],
            },
        )?;
        out.pv_kwh += record.pv_kw;
        out.wind_kwh += record.wind_kw;
        for i in 0..3 {
            out.gen_kwh[i] += record.gen_kw[i];
            if record.gen_kw[i] > 0.0 {
                let g = &engine.gens[i];
                out.gen_fuel_l[i] +=
                    g.fuel_curve_intercept * g.rated_kw + g.fuel_curve_slope * record.gen_kw[i];
            }
        }
        out.load_kwh += record.load_kw;
        out.load_served_kwh += record.load_kw - record.unmet_kw;
        out.excess_diverted_kwh += record.diverted_kw;
        out.excess_dumped_kwh += record.dumped_kw;
        out.fuel_total_l += record.fuel_l;
        out.unmet_load_kwh += record.unmet_kw;
        out.battery_charge_kwh += record.batt_charge_kw;
        out.battery_discharge_kwh += record.batt_discharge_kw;
        if eta_d > 0.0 {
            out.battery_throughput_kwh += record.batt_discharge_kw / eta_d;
        }
        if let Some(records) = &mut out.records {
            records.push(record);
        }
    }

    out.excess_total_kwh = out.excess_diverted_kwh + out.excess_dumped_kwh;
    out.gen_hours = state.gen_hours;
    let production = out.production_kwh();
    out.renewable_fraction = if production > 0.0 {
        1.0 - out.gen_kwh.iter().sum::<f64>() / production
    } else {
        0.0
    };
    out.diversion = diversion.ledger();
    Ok(out)
}

/// Fills unset hot-water defaults from the configuration: heater rating
/// defaults to the converter rating, tank capacity to one day of demand.
pub fn effective_hot_water(config: &SystemConfiguration, inputs: &SimulationInputs) -> HotWaterSpec {
    let mut spec = inputs.hot_water.clone();
    if spec.heater_power_kw <= 0.0 {
        spec.heater_power_kw = config.converter_kw;
    }
    if spec.tank_capacity_kwh <= 0.0 {
        spec.tank_capacity_kwh = spec.annual_demand_kwh().unwrap_or(0.0) / crate::DAYS_PER_YEAR as f64;
    }
    spec
}

/// Formats the hourly trace in the export schema (stable across runs).
pub fn write_trace_csv(records: &[HourlyRecord]) -> String {
    use std::fmt::Write as _;
    let mut s = String::with_capacity(records.len() * 160);
    s.push_str(
        "hour,pv_kw,wind_kw,gen1_kw,gen2_kw,gen3_kw,load_kw,batt_charge_kw,batt_discharge_kw,\
         diverted_kw,dumped_kw,converter_loss_kw,unmet_kw,fuel_l,soc_end\n",
    );
    for r in records {
        let _ = writeln!(
            s,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            r.hour,
            r.pv_kw,
            r.wind_kw,
            r.gen_kw[0],
            r.gen_kw[1],
            r.gen_kw[2],
            r.load_kw,
            r.batt_charge_kw,
            r.batt_discharge_kw,
            r.diverted_kw,
            r.dumped_kw,
            r.converter_loss_kw,
            r.unmet_kw,
            r.fuel_l,
            r.soc_end,
        );
    }
    s
}
