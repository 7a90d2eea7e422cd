//! Discounted cash-flow economics: net present cost, cost of energy, CO₂.
//!
//! Cash flows are discounted year by year at the real interest rate: capital
//! at year zero, O&M and fuel annually, replacements at component-lifetime
//! multiples (battery lifetime from throughput, generator lifetime from run
//! hours, others from calendar life), and an optional linear-depreciation
//! salvage credit at the horizon.

use serde::{Deserialize, Serialize};

use crate::components::FuelSpec;
use crate::dispatch::{ComponentLibrary, SimulationResult, SystemConfiguration};
use crate::error::{Error, Result};

/// kg CO₂ per kg of oxidized carbon.
const CO2_PER_CARBON: f64 = 3.667;

/// Discounting parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EconomicParams {
    /// Nominal annual interest rate.
    pub nominal_interest: f64,
    /// Annual inflation rate.
    pub inflation: f64,
    /// Project horizon, years.
    pub project_lifetime_yr: u32,
    /// Credit remaining component life at the horizon.
    pub salvage_credit: bool,
}

impl EconomicParams {
    pub fn validate(&self) -> Result<()> {
        if 1.0 + self.inflation <= 0.0 {
            return Err(Error::invalid(format!("inflation may not be ≤ -1, got {}", self.inflation)));
        }
        if self.project_lifetime_yr < 1 {
            return Err(Error::invalid("project lifetime must be ≥ 1 year".to_string()));
        }
        Ok(())
    }

    /// Inflation-adjusted real interest rate.
    pub fn real_interest_rate(&self) -> Result<f64> {
        real_interest(self.nominal_interest, self.inflation)
    }
}

/// Real interest rate `(i' − f) / (1 + f)`.
pub fn real_interest(nominal: f64, inflation: f64) -> Result<f64> {
    if 1.0 + inflation <= 0.0 {
        return Err(Error::invalid(format!("inflation may not be ≤ -1, got {inflation}")));
    }
    Ok((nominal - inflation) / (1.0 + inflation))
}

/// Capital recovery factor `i(1+i)^n / ((1+i)^n − 1)`; `1/n` at `i = 0`.
pub fn crf(i: f64, n: u32) -> f64 {
    assert!(n >= 1, "capital recovery factor needs n ≥ 1");
    assert!(i > -1.0, "interest rate must exceed -1");
    if i == 0.0 {
        return 1.0 / n as f64;
    }
    let f = (1.0 + i).powi(n as i32);
    i * f / (f - 1.0)
}

/// Present value of costs for one component.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub capital: f64,
    pub replacement: f64,
    pub om: f64,
    pub fuel: f64,
    /// Salvage credit (≤ 0).
    pub salvage: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.capital + self.replacement + self.om + self.fuel + self.salvage
    }
}

/// One named row of the cost table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentCost {
    pub name: String,
    #[serde(flatten)]
    pub costs: CostBreakdown,
}

/// Priced outcome of one simulated year extended over the project horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EconomicSummary {
    /// Net present cost, $.
    pub npc: f64,
    /// Equivalent uniform annual cost, $/yr.
    pub annualized: f64,
    /// Cost of energy, $/kWh served.
    pub coe: f64,
    /// Annual CO₂ emissions, kg/yr.
    pub co2_kg_yr: f64,
    pub breakdown: Vec<ComponentCost>,
}

/// CO₂ mass from burning `fuel_l` liters, kg.
pub fn co2_mass_kg(fuel_l: f64, fuel: &FuelSpec) -> f64 {
    // MJ/L × tC/TJ × 1e-6 TJ/MJ gives tonnes of carbon; ×3.667 gives CO₂.
    let tons = CO2_PER_CARBON
        * fuel_l
        * fuel.heating_value_mj_l
        * fuel.carbon_emission_factor_tc_tj
        * 1e-6
        * fuel.oxidized_fraction;
    tons * 1000.0
}

struct ComponentFlows {
    name: &'static str,
    capital: f64,
    replacement_cost: f64,
    om_per_yr: f64,
    fuel_per_yr: f64,
    /// Wear-out interval in years; `None` means the component never wears.
    life_yr: Option<f64>,
}

/// Prices a simulated year over the project horizon.
pub fn npc_from_cashflows(
    config: &SystemConfiguration,
    sim: &SimulationResult,
    library: &ComponentLibrary,
    econ: &EconomicParams,
) -> Result<EconomicSummary> {
    econ.validate()?;
    let i = econ.real_interest_rate()?;
    let n = econ.project_lifetime_yr;
    let crf_i_n = crf(i, n);
    let discount = |t: f64| (1.0 + i).powf(-t);
    let annuity: f64 = (1..=n).map(|t| discount(t as f64)).sum();

    let battery_units = library.battery.bank_units(config.battery_strings) as f64;
    let bank_lifetime_kwh = battery_units * library.battery.lifetime_throughput_kwh;

    let mut flows: Vec<ComponentFlows> = vec![
        ComponentFlows {
            name: "pv",
            capital: library.pv.capital_per_kw * config.pv_kw,
            replacement_cost: library.pv.replacement_per_kw * config.pv_kw,
            om_per_yr: library.pv.om_per_kw_yr * config.pv_kw,
            fuel_per_yr: 0.0,
            life_yr: positive_life(library.pv.lifetime_yr, config.pv_kw > 0.0),
        },
        ComponentFlows {
            name: "wind",
            capital: library.wind.capital_per_unit * config.wind_count as f64,
            replacement_cost: library.wind.replacement_per_unit * config.wind_count as f64,
            om_per_yr: library.wind.om_per_unit_yr * config.wind_count as f64,
            fuel_per_yr: 0.0,
            life_yr: positive_life(library.wind.lifetime_yr, config.wind_count > 0),
        },
    ];

    let fuel_price = library.generator.fuel.price_per_l;
    for g in 0..3 {
        let rated = config.gen_kw[g];
        let hours = sim.gen_hours[g];
        let life = if rated > 0.0 && hours > 0.0 {
            Some(library.generator.lifetime_hours / hours)
        } else {
            None
        };
        flows.push(ComponentFlows {
            name: ["generator1", "generator2", "generator3"][g],
            capital: library.generator.capital_per_kw * rated,
            replacement_cost: library.generator.replacement_per_kw * rated,
            om_per_yr: library.generator.om_per_hr * hours,
            fuel_per_yr: sim.gen_fuel_l[g] * fuel_price,
            life_yr: life,
        });
    }

    let battery_life = if battery_units > 0.0 && sim.battery_throughput_kwh > 0.0 {
        Some(bank_lifetime_kwh / sim.battery_throughput_kwh)
    } else {
        None
    };
    flows.push(ComponentFlows {
        name: "battery",
        capital: library.battery.capital_per_unit * battery_units,
        replacement_cost: library.battery.replacement_per_unit * battery_units,
        om_per_yr: library.battery.om_per_unit_yr * battery_units,
        fuel_per_yr: 0.0,
        life_yr: battery_life,
    });
    flows.push(ComponentFlows {
        name: "converter",
        capital: library.converter.capital_per_kw * config.converter_kw,
        replacement_cost: library.converter.replacement_per_kw * config.converter_kw,
        om_per_yr: library.converter.om_per_kw_yr * config.converter_kw,
        fuel_per_yr: 0.0,
        life_yr: positive_life(library.converter.lifetime_yr, config.converter_kw > 0.0),
    });

    let horizon = n as f64;
    let mut breakdown = Vec::with_capacity(flows.len());
    let mut npc = 0.0;
    for flow in &flows {
        let mut costs = CostBreakdown {
            capital: flow.capital,
            om: flow.om_per_yr * annuity,
            fuel: flow.fuel_per_yr * annuity,
            ..Default::default()
        };
        let mut last_replacement = 0.0;
        if let Some(life) = flow.life_yr {
            let mut t = life;
            while t < horizon - 1e-9 {
                costs.replacement += flow.replacement_cost * discount(t);
                last_replacement = t;
                t += life;
            }
            if econ.salvage_credit && flow.replacement_cost > 0.0 {
                let age_at_end = horizon - last_replacement;
                let remaining = (life - age_at_end).max(0.0);
                costs.salvage = -flow.replacement_cost * (remaining / life) * discount(horizon);
            }
        } else if econ.salvage_credit && flow.replacement_cost > 0.0 {
            // Never wears out within the model: full residual value.
            costs.salvage = -flow.replacement_cost * discount(horizon);
        }
        npc += costs.total();
        breakdown.push(ComponentCost {
            name: flow.name.to_string(),
            costs,
        });
    }

    let annualized = npc * crf_i_n;
    if sim.load_served_kwh <= 0.0 {
        return Err(Error::CoeUndefined);
    }
    let coe = annualized / sim.load_served_kwh;

    Ok(EconomicSummary {
        npc,
        annualized,
        coe,
        co2_kg_yr: co2_mass_kg(sim.fuel_total_l, &library.generator.fuel),
        breakdown,
    })
}

fn positive_life(life: f64, present: bool) -> Option<f64> {
    if present && life > 0.0 {
        Some(life)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispatch::test_fixtures::{library, simulation_inputs};
    use crate::dispatch::{simulate_year, DispatchStrategy};

    #[test]
    fn real_interest_reference() {
        assert_eq!(real_interest(0.05, 0.0).unwrap(), 0.05);
        let i = real_interest(0.08, 0.03).unwrap();
        assert!((i - 0.048_543_689_320_388_35).abs() < 1e-12);
        assert_eq!(real_interest(0.04, 0.04).unwrap(), 0.0);
        assert!(real_interest(0.05, -1.0).is_err());
    }

    #[test]
    fn crf_reference() {
        assert!((crf(0.05, 1) - 1.05).abs() < 1e-12);
        assert!((crf(0.06, 25) - 0.078_226_718_212_273_95).abs() < 1e-12);
        assert_eq!(crf(0.0, 20), 0.05);
    }

    #[test]
    fn crf_inverts_annuity_factor() {
        for i in [0.0, 0.01, 0.05, 0.1, 0.2] {
            for n in [1u32, 2, 5, 10, 30] {
                let annuity: f64 = (1..=n).map(|t| (1.0f64 + i).powi(-(t as i32))).sum();
                assert!(
                    (crf(i, n) * annuity - 1.0).abs() < 1e-12,
                    "i={i} n={n}: {}",
                    crf(i, n) * annuity
                );
            }
        }
    }

    #[test]
    fn co2_reference() {
        let fuel = FuelSpec {
            heating_value_mj_l: 36.4,
            carbon_emission_factor_tc_tj: 20.0,
            oxidized_fraction: 0.99,
            price_per_l: 1.2,
        };
        assert_eq!(co2_mass_kg(0.0, &fuel), 0.0);
        let per_l = co2_mass_kg(1.0, &fuel);
        assert!((per_l - 2.642_880_24).abs() < 1e-6, "per_l = {per_l}");
        // Linear in volume.
        assert!((co2_mass_kg(1000.0, &fuel) - 1000.0 * per_l).abs() < 1e-9);
    }

    fn diesel_config() -> SystemConfiguration {
        SystemConfiguration {
            pv_kw: 0.0,
            wind_count: 0,
            gen_kw: [100.0, 300.0, 500.0],
            battery_strings: 0,
            converter_kw: 0.0,
            strategy: DispatchStrategy::LoadFollowing,
        }
    }

    fn econ() -> EconomicParams {
        EconomicParams {
            nominal_interest: 0.08,
            inflation: 0.04,
            project_lifetime_yr: 25,
            salvage_credit: true,
        }
    }

    #[test]
    fn npc_annualized_identity() {
        let inputs = simulation_inputs(11);
        let cfg = diesel_config();
        let sim = simulate_year(&cfg, &inputs, false).unwrap();
        let summary = npc_from_cashflows(&cfg, &sim, &inputs.library, &econ()).unwrap();
        let i = econ().real_interest_rate().unwrap();
        assert!(
            (summary.annualized / crf(i, 25) - summary.npc).abs() / summary.npc < 1e-9,
            "identity violated"
        );
        let from_rows: f64 = summary.breakdown.iter().map(|c| c.costs.total()).sum();
        assert!((from_rows - summary.npc).abs() / summary.npc < 1e-12);
        assert!(summary.npc > 0.0);
        assert!(summary.coe > 0.0);
    }

    #[test]
    fn single_capital_matches_crf_identity() {
        // A config with only one cost source: PV capital (zero out the rest).
        let mut lib = library();
        lib.pv.om_per_kw_yr = 0.0;
        lib.pv.replacement_per_kw = 0.0;
        lib.pv.capital_per_kw = 1.0; // $1/kW → $1000 for 1000 kW
        let cfg = SystemConfiguration {
            pv_kw: 1000.0,
            wind_count: 0,
            gen_kw: [0.0, 0.0, 0.0],
            battery_strings: 0,
            converter_kw: 0.0,
            strategy: DispatchStrategy::LoadFollowing,
        };
        let mut inputs = simulation_inputs(3);
        inputs.library = lib;
        let sim = simulate_year(&cfg, &inputs, false).unwrap();
        // Zero-converter PV serves nothing, so fake a served quantity to
        // exercise the identity without a CoeUndefined error.
        let mut sim = sim;
        sim.load_served_kwh = 1.0;
        let summary = npc_from_cashflows(&cfg, &sim, &inputs.library, &econ()).unwrap();
        assert!((summary.npc - 1000.0).abs() < 1e-9, "npc = {}", summary.npc);
        let i = econ().real_interest_rate().unwrap();
        assert!((summary.annualized - 1000.0 * crf(i, 25)).abs() < 1e-9);
    }

    #[test]
    fn battery_replacement_schedule_from_throughput() {
        // 200 units × 9300 kWh at 372,000 kWh/yr wears out in exactly 5 years:
        // replacements at years 5, 10, 15, 20 of a 25-year horizon.
        let inputs = simulation_inputs(5);
        let cfg = SystemConfiguration {
            pv_kw: 0.0,
            wind_count: 0,
            gen_kw: [100.0, 300.0, 500.0],
            battery_strings: 5,
            converter_kw: 500.0,
            strategy: DispatchStrategy::LoadFollowing,
        };
        let mut sim = simulate_year(&cfg, &inputs, false).unwrap();
        sim.battery_throughput_kwh = 372_000.0;
        let e = EconomicParams {
            salvage_credit: false,
            ..econ()
        };
        let summary = npc_from_cashflows(&cfg, &sim, &inputs.library, &e).unwrap();
        let battery = summary
            .breakdown
            .iter()
            .find(|c| c.name == "battery")
            .unwrap();
        let i = e.real_interest_rate().unwrap();
        let unit_cost = inputs.library.battery.replacement_per_unit * 200.0;
        let expected: f64 = [5.0f64, 10.0, 15.0, 20.0]
            .iter()
            .map(|t| unit_cost * (1.0 + i).powf(-t))
            .sum();
        assert!(
            (battery.costs.replacement - expected).abs() / expected < 1e-12,
            "replacement PV = {}, expected {expected}",
            battery.costs.replacement
        );
    }

    #[test]
    fn zero_served_load_is_an_error() {
        let inputs = simulation_inputs(6);
        let cfg = diesel_config();
        let mut sim = simulate_year(&cfg, &inputs, false).unwrap();
        sim.load_served_kwh = 0.0;
        assert!(matches!(
            npc_from_cashflows(&cfg, &sim, &inputs.library, &econ()),
            Err(Error::CoeUndefined)
        ));
    }

    #[test]
    fn coe_invariant_under_uniform_scaling() {
        // Scaling all loads, production, and costs by α leaves COE unchanged.
        let inputs = simulation_inputs(8);
        let cfg = diesel_config();
        let sim = simulate_year(&cfg, &inputs, false).unwrap();
        let base = npc_from_cashflows(&cfg, &sim, &inputs.library, &econ()).unwrap();

        let alpha = 3.0;
        let mut scaled_inputs = inputs.clone();
        scaled_inputs.library.generator.capital_per_kw *= alpha;
        scaled_inputs.library.generator.replacement_per_kw *= alpha;
        scaled_inputs.library.generator.om_per_hr *= alpha;
        scaled_inputs.library.generator.fuel.price_per_l *= alpha;
        let mut sim_scaled = sim.clone();
        sim_scaled.load_served_kwh *= alpha;
        // Costs per unit scaled by α with served load scaled by α: the fuel
        // and O&M quantities scale through the simulation result untouched,
        // so rebuild the summary from component costs directly.
        let scaled = npc_from_cashflows(&cfg, &sim_scaled, &scaled_inputs.library, &econ()).unwrap();
        // capital/replacement/om scale by α while served scales by α; fuel
        // volume is unchanged but its price scaled by α too.
        assert!(
            (scaled.coe - base.coe).abs() / base.coe < 1e-9,
            "coe {} vs {}",
            scaled.coe,
            base.coe
        );
    }
}
