//! The run configuration file: schema, defaults, validation, and conversion
//! into the core simulation types.
//!
//! `microgrid dump-defaults` emits the default configuration; parsing that
//! text and re-serializing it reproduces it byte for byte.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use microgrid_core::components::{
    BatterySpec, CellParams, ConverterSpec, FuelSpec, GeneratorSpec, PvSpec, WindTurbineSpec,
};
use microgrid_core::dispatch::{
    ComponentLibrary, DispatchSettings, DispatchStrategy, SimulationInputs, SystemConfiguration,
};
use microgrid_core::economics::EconomicParams;
use microgrid_core::error::{Error, Result};
use microgrid_core::load::{
    appliances_from_csv, synthesize_load, Appliance, CalibrationTargets, LoadProfile,
    LoadSynthesisSpec,
};
use microgrid_core::optimizer::{AxisRange, CountRange, Feasibility, SearchSpace, SensitivityAxes};
use microgrid_core::resource::{synthesize_resource_year, ResourceYear, SynthesisSpec};
use microgrid_core::scenario;
use microgrid_core::thermal::HotWaterSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Synthesis,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadSourceKind {
    Appliances,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResourceConfig {
    pub source: SourceKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv_path: Option<PathBuf>,
    pub air_density_kg_m3: f64,
    pub anemometer_height_m: f64,
    pub synthesis: ResourceSynthesisConfig,
}

impl Default for ResourceConfig {
    fn default() -> Self {
        Self {
            source: SourceKind::Synthesis,
            csv_path: None,
            air_density_kg_m3: 1.225,
            anemometer_height_m: 50.0,
            synthesis: ResourceSynthesisConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResourceSynthesisConfig {
    pub monthly_ghi_kwh_m2_day: [f64; 12],
    pub monthly_wind_m_s: [f64; 12],
    pub monthly_temp_c: [f64; 12],
    pub wind_shape_k: f64,
    pub ghi_noise: f64,
}

impl Default for ResourceSynthesisConfig {
    fn default() -> Self {
        Self {
            monthly_ghi_kwh_m2_day: scenario::MONTHLY_GHI_KWH_M2_DAY,
            monthly_wind_m_s: scenario::MONTHLY_WIND_M_S,
            monthly_temp_c: scenario::MONTHLY_TEMP_C,
            wind_shape_k: 2.0,
            ghi_noise: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ApplianceConfig {
    pub name: String,
    pub count: u32,
    pub hours_per_day: f64,
    pub rated_power_w: f64,
}

impl Default for ApplianceConfig {
    fn default() -> Self {
        Self {
            name: String::new(),
            count: 0,
            hours_per_day: 0.0,
            rated_power_w: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LoadConfig {
    pub source: LoadSourceKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv_path: Option<PathBuf>,
    /// Appliance inventory CSV (`name,count,hours_per_day,rated_power_w`);
    /// overrides the inline appliance list when set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub appliance_csv_path: Option<PathBuf>,
    pub variability: f64,
    /// Remap the profile so daily mean and peak hit the targets exactly.
    pub calibrate: bool,
    pub daily_mean_target_kwh: f64,
    pub peak_target_kw: f64,
    pub shape: [f64; 24],
    pub monthly_multipliers: [f64; 12],
    pub appliances: Vec<ApplianceConfig>,
}

impl Default for LoadConfig {
    fn default() -> Self {
        Self {
            source: LoadSourceKind::Appliances,
            csv_path: None,
            appliance_csv_path: None,
            variability: 0.05,
            calibrate: true,
            daily_mean_target_kwh: scenario::DAILY_LOAD_KWH,
            peak_target_kw: scenario::PEAK_LOAD_KW,
            shape: microgrid_core::load::hotel_evening_shape(),
            monthly_multipliers: [1.0; 12],
            appliances: microgrid_core::load::default_resort_inventory()
                .into_iter()
                .map(|a| ApplianceConfig {
                    name: a.name,
                    count: a.count,
                    hours_per_day: a.hours_per_day,
                    rated_power_w: a.rated_power_w,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PvConfig {
    pub derating: f64,
    pub temp_coeff_per_c: f64,
    pub noct_c: f64,
    pub cell_v_oc: f64,
    pub cell_i_sc: f64,
    pub cell_fill_factor: f64,
    pub cell_p_in_w: f64,
    pub capital_per_kw: f64,
    pub replacement_per_kw: f64,
    pub om_per_kw_yr: f64,
    pub lifetime_yr: f64,
}

impl Default for PvConfig {
    fn default() -> Self {
        let pv = scenario::default_library().pv;
        Self {
            derating: pv.derating,
            temp_coeff_per_c: pv.temp_coeff_per_c,
            noct_c: pv.noct_c,
            cell_v_oc: pv.cell.v_oc,
            cell_i_sc: pv.cell.i_sc,
            cell_fill_factor: pv.cell.fill_factor,
            cell_p_in_w: pv.cell.p_in_w,
            capital_per_kw: pv.capital_per_kw,
            replacement_per_kw: pv.replacement_per_kw,
            om_per_kw_yr: pv.om_per_kw_yr,
            lifetime_yr: pv.lifetime_yr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindConfig {
    pub rated_kw: f64,
    pub cut_in_m_s: f64,
    pub rated_speed_m_s: f64,
    pub cut_out_m_s: f64,
    pub hub_height_m: f64,
    pub lifetime_yr: f64,
    pub capital_per_unit: f64,
    pub replacement_per_unit: f64,
    pub om_per_unit_yr: f64,
}

impl Default for WindConfig {
    fn default() -> Self {
        let w = scenario::default_library().wind;
        Self {
            rated_kw: w.rated_kw,
            cut_in_m_s: w.cut_in_m_s,
            rated_speed_m_s: w.rated_speed_m_s,
            cut_out_m_s: w.cut_out_m_s,
            hub_height_m: w.hub_height_m,
            lifetime_yr: w.lifetime_yr,
            capital_per_unit: w.capital_per_unit,
            replacement_per_unit: w.replacement_per_unit,
            om_per_unit_yr: w.om_per_unit_yr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeneratorConfig {
    pub min_load_ratio: f64,
    pub lifetime_hours: f64,
    pub fuel_curve_intercept_l_hr_kw: f64,
    pub fuel_curve_slope_l_hr_kw: f64,
    pub capital_per_kw: f64,
    pub replacement_per_kw: f64,
    pub om_per_hr: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        let g = scenario::default_library().generator;
        Self {
            min_load_ratio: g.min_load_ratio,
            lifetime_hours: g.lifetime_hours,
            fuel_curve_intercept_l_hr_kw: g.fuel_curve_intercept,
            fuel_curve_slope_l_hr_kw: g.fuel_curve_slope,
            capital_per_kw: g.capital_per_kw,
            replacement_per_kw: g.replacement_per_kw,
            om_per_hr: g.om_per_hr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FuelConfig {
    pub heating_value_mj_l: f64,
    pub carbon_emission_factor_tc_tj: f64,
    pub oxidized_fraction: f64,
    pub price_per_l: f64,
}

impl Default for FuelConfig {
    fn default() -> Self {
        let f = scenario::default_library().generator.fuel;
        Self {
            heating_value_mj_l: f.heating_value_mj_l,
            carbon_emission_factor_tc_tj: f.carbon_emission_factor_tc_tj,
            oxidized_fraction: f.oxidized_fraction,
            price_per_l: f.price_per_l,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BatteryConfig {
    pub nominal_v: f64,
    pub capacity_ah: f64,
    pub round_trip_eff: f64,
    pub lifetime_throughput_kwh: f64,
    pub min_soc: f64,
    pub batteries_per_string: u32,
    pub capital_per_unit: f64,
    pub replacement_per_unit: f64,
    pub om_per_unit_yr: f64,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        let b = scenario::default_library().battery;
        Self {
            nominal_v: b.nominal_v,
            capacity_ah: b.capacity_ah,
            round_trip_eff: b.round_trip_eff,
            lifetime_throughput_kwh: b.lifetime_throughput_kwh,
            min_soc: b.min_soc,
            batteries_per_string: b.batteries_per_string,
            capital_per_unit: b.capital_per_unit,
            replacement_per_unit: b.replacement_per_unit,
            om_per_unit_yr: b.om_per_unit_yr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConverterConfig {
    pub efficiency: f64,
    pub lifetime_yr: f64,
    pub capital_per_kw: f64,
    pub replacement_per_kw: f64,
    pub om_per_kw_yr: f64,
}

impl Default for ConverterConfig {
    fn default() -> Self {
        let c = scenario::default_library().converter;
        Self {
            efficiency: c.efficiency,
            lifetime_yr: c.lifetime_yr,
            capital_per_kw: c.capital_per_kw,
            replacement_per_kw: c.replacement_per_kw,
            om_per_kw_yr: c.om_per_kw_yr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DispatchConfig {
    pub reserve_pv_fraction: f64,
    pub reserve_wind_fraction: f64,
    pub battery_c_rate: f64,
    pub cycle_charge_soc_setpoint: f64,
    pub initial_soc: f64,
}

impl Default for DispatchConfig {
    fn default() -> Self {
        let s = DispatchSettings::default();
        Self {
            reserve_pv_fraction: s.reserve_pv_fraction,
            reserve_wind_fraction: s.reserve_wind_fraction,
            battery_c_rate: s.battery_c_rate,
            cycle_charge_soc_setpoint: s.cycle_charge_soc_setpoint,
            initial_soc: s.initial_soc,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EconomicsConfig {
    pub nominal_interest: f64,
    pub inflation: f64,
    pub project_lifetime_yr: u32,
    pub salvage_credit: bool,
    /// Reserved hook; only 0.0 is accepted for now.
    pub carbon_penalty_per_kg_co2: f64,
}

impl Default for EconomicsConfig {
    fn default() -> Self {
        let e = scenario::default_economics();
        Self {
            nominal_interest: e.nominal_interest,
            inflation: e.inflation,
            project_lifetime_yr: e.project_lifetime_yr,
            salvage_credit: e.salvage_credit,
            carbon_penalty_per_kg_co2: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HotWaterConfig {
    pub liters_per_guest_day: f64,
    pub guests_per_day: f64,
    pub t_in_c: f64,
    pub t_f_c: f64,
    pub specific_heat_kj_kg_c: f64,
    /// 0 means one day of hot-water demand.
    pub tank_capacity_kwh: f64,
    /// 0 means the converter rating.
    pub heater_power_kw: f64,
}

impl Default for HotWaterConfig {
    fn default() -> Self {
        let h = scenario::default_hot_water();
        Self {
            liters_per_guest_day: h.liters_per_guest_day,
            guests_per_day: h.guests_per_day,
            t_in_c: h.t_in_c,
            t_f_c: h.t_f_c,
            specific_heat_kj_kg_c: h.specific_heat_kj_kg_c,
            tank_capacity_kwh: h.tank_capacity_kwh,
            heater_power_kw: h.heater_power_kw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub pv_kw: f64,
    pub wind_count: u32,
    pub gen_kw: [f64; 3],
    pub battery_strings: u32,
    pub converter_kw: f64,
    pub strategy: DispatchStrategy,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        let c = scenario::reference_hybrid();
        Self {
            pv_kw: c.pv_kw,
            wind_count: c.wind_count,
            gen_kw: c.gen_kw,
            battery_strings: c.battery_strings,
            converter_kw: c.converter_kw,
            strategy: c.strategy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeConfig {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountRangeConfig {
    pub min: u32,
    pub max: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchConfig {
    pub strategies: Vec<DispatchStrategy>,
    pub pv_kw: RangeConfig,
    pub wind_count: CountRangeConfig,
    pub gen1_kw: RangeConfig,
    pub gen2_kw: RangeConfig,
    pub gen3_kw: RangeConfig,
    pub battery_strings: CountRangeConfig,
    pub converter_kw: RangeConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        let s = scenario::default_search_space();
        let range = |a: AxisRange| RangeConfig { min: a.min, max: a.max, step: a.step };
        Self {
            strategies: s.strategies.clone(),
            pv_kw: range(s.pv_kw),
            wind_count: CountRangeConfig { min: s.wind_count.min, max: s.wind_count.max },
            gen1_kw: range(s.gen_kw[0]),
            gen2_kw: range(s.gen_kw[1]),
            gen3_kw: range(s.gen_kw[2]),
            battery_strings: CountRangeConfig {
                min: s.battery_strings.min,
                max: s.battery_strings.max,
            },
            converter_kw: range(s.converter_kw),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeasibilityConfig {
    pub max_unmet_fraction: f64,
}

impl Default for FeasibilityConfig {
    fn default() -> Self {
        Self { max_unmet_fraction: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensitivityConfig {
    pub solar_kwh_m2_day: RangeConfig,
    pub wind_m_s: RangeConfig,
}

impl Default for SensitivityConfig {
    fn default() -> Self {
        let axes = scenario::default_sensitivity_axes();
        Self {
            solar_kwh_m2_day: RangeConfig {
                min: axes.solar.min,
                max: axes.solar.max,
                step: axes.solar.step,
            },
            wind_m_s: RangeConfig {
                min: axes.wind.min,
                max: axes.wind.max,
                step: axes.wind.step,
            },
        }
    }
}

/// The complete run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub resource: ResourceConfig,
    pub load: LoadConfig,
    pub pv: PvConfig,
    pub wind: WindConfig,
    pub generator: GeneratorConfig,
    pub fuel: FuelConfig,
    pub battery: BatteryConfig,
    pub converter: ConverterConfig,
    pub dispatch: DispatchConfig,
    pub economics: EconomicsConfig,
    pub hot_water: HotWaterConfig,
    pub simulate: SimulateConfig,
    pub search: SearchConfig,
    pub feasibility: FeasibilityConfig,
    pub sensitivity: SensitivityConfig,
}

impl RunConfig {
    pub fn defaults() -> Self {
        Self {
            seed: 42,
            output_dir: PathBuf::from("out"),
            ..Default::default()
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config '{}': {e}", path.display())))?;
        let config: RunConfig = toml::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(format!("serialize config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        match (self.resource.source, &self.resource.csv_path) {
            (SourceKind::Csv, None) => {
                return Err(Error::Config(
                    "resource.csv_path is required when resource.source = \"csv\"".to_string(),
                ));
            }
            (SourceKind::Synthesis, Some(_)) => {
                return Err(Error::Config(
                    "resource.csv_path must be absent when resource.source = \"synthesis\"".to_string(),
                ));
            }
            _ => {}
        }
        match (self.load.source, &self.load.csv_path) {
            (LoadSourceKind::Csv, None) => {
                return Err(Error::Config(
                    "load.csv_path is required when load.source = \"csv\"".to_string(),
                ));
            }
            (LoadSourceKind::Appliances, Some(_)) => {
                return Err(Error::Config(
                    "load.csv_path must be absent when load.source = \"appliances\"".to_string(),
                ));
            }
            _ => {}
        }
        self.library()?.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.search_space()?.validate()?;
        if !(0.0..=1.0).contains(&self.feasibility.max_unmet_fraction) {
            return Err(Error::Config(format!(
                "feasibility.max_unmet_fraction must be in [0, 1], got {}",
                self.feasibility.max_unmet_fraction
            )));
        }
        if self.economics.carbon_penalty_per_kg_co2 != 0.0 {
            return Err(Error::Config(
                "economics.carbon_penalty_per_kg_co2 is a reserved hook; only 0.0 is supported"
                    .to_string(),
            ));
        }
        Ok(())
    }

    /// Component library with per-configuration ratings left at zero.
    pub fn library(&self) -> Result<ComponentLibrary> {
        Ok(ComponentLibrary {
            pv: PvSpec {
                rated_kw: 0.0,
                derating: self.pv.derating,
                temp_coeff_per_c: self.pv.temp_coeff_per_c,
                noct_c: self.pv.noct_c,
                cell: CellParams {
                    v_oc: self.pv.cell_v_oc,
                    i_sc: self.pv.cell_i_sc,
                    fill_factor: self.pv.cell_fill_factor,
                    p_in_w: self.pv.cell_p_in_w,
                },
                capital_per_kw: self.pv.capital_per_kw,
                replacement_per_kw: self.pv.replacement_per_kw,
                om_per_kw_yr: self.pv.om_per_kw_yr,
                lifetime_yr: self.pv.lifetime_yr,
            },
            wind: WindTurbineSpec {
                rated_kw: self.wind.rated_kw,
                cut_in_m_s: self.wind.cut_in_m_s,
                rated_speed_m_s: self.wind.rated_speed_m_s,
                cut_out_m_s: self.wind.cut_out_m_s,
                hub_height_m: self.wind.hub_height_m,
                lifetime_yr: self.wind.lifetime_yr,
                capital_per_unit: self.wind.capital_per_unit,
                replacement_per_unit: self.wind.replacement_per_unit,
                om_per_unit_yr: self.wind.om_per_unit_yr,
            },
            generator: GeneratorSpec {
                rated_kw: 0.0,
                min_load_ratio: self.generator.min_load_ratio,
                lifetime_hours: self.generator.lifetime_hours,
                fuel: FuelSpec {
                    heating_value_mj_l: self.fuel.heating_value_mj_l,
                    carbon_emission_factor_tc_tj: self.fuel.carbon_emission_factor_tc_tj,
                    oxidized_fraction: self.fuel.oxidized_fraction,
                    price_per_l: self.fuel.price_per_l,
                },
                fuel_curve_intercept: self.generator.fuel_curve_intercept_l_hr_kw,
                fuel_curve_slope: self.generator.fuel_curve_slope_l_hr_kw,
                capital_per_kw: self.generator.capital_per_kw,
                replacement_per_kw: self.generator.replacement_per_kw,
                om_per_hr: self.generator.om_per_hr,
            },
            battery: BatterySpec {
                nominal_v: self.battery.nominal_v,
                capacity_ah: self.battery.capacity_ah,
                round_trip_eff: self.battery.round_trip_eff,
                lifetime_throughput_kwh: self.battery.lifetime_throughput_kwh,
                min_soc: self.battery.min_soc,
                batteries_per_string: self.battery.batteries_per_string,
                capital_per_unit: self.battery.capital_per_unit,
                replacement_per_unit: self.battery.replacement_per_unit,
                om_per_unit_yr: self.battery.om_per_unit_yr,
            },
            converter: ConverterSpec {
                rated_kw: 0.0,
                efficiency: self.converter.efficiency,
                lifetime_yr: self.converter.lifetime_yr,
                capital_per_kw: self.converter.capital_per_kw,
                replacement_per_kw: self.converter.replacement_per_kw,
                om_per_kw_yr: self.converter.om_per_kw_yr,
            },
        })
    }

    pub fn settings(&self) -> DispatchSettings {
        DispatchSettings {
            reserve_pv_fraction: self.dispatch.reserve_pv_fraction,
            reserve_wind_fraction: self.dispatch.reserve_wind_fraction,
            battery_c_rate: self.dispatch.battery_c_rate,
            cycle_charge_soc_setpoint: self.dispatch.cycle_charge_soc_setpoint,
            initial_soc: self.dispatch.initial_soc,
        }
    }

    pub fn economics(&self) -> EconomicParams {
        EconomicParams {
            nominal_interest: self.economics.nominal_interest,
            inflation: self.economics.inflation,
            project_lifetime_yr: self.economics.project_lifetime_yr,
            salvage_credit: self.economics.salvage_credit,
        }
    }

    pub fn hot_water(&self) -> HotWaterSpec {
        HotWaterSpec {
            liters_per_guest_day: self.hot_water.liters_per_guest_day,
            guests_per_day: self.hot_water.guests_per_day,
            t_in_c: self.hot_water.t_in_c,
            t_f_c: self.hot_water.t_f_c,
            specific_heat_kj_kg_c: self.hot_water.specific_heat_kj_kg_c,
            tank_capacity_kwh: self.hot_water.tank_capacity_kwh,
            heater_power_kw: self.hot_water.heater_power_kw,
        }
    }

    pub fn resources(&self) -> Result<ResourceYear> {
        match self.resource.source {
            SourceKind::Csv => {
                let path = self.resource.csv_path.as_ref().expect("validated");
                let mut year = ResourceYear::from_csv(path)?;
                year.air_density = self.resource.air_density_kg_m3;
                year.anemometer_height = self.resource.anemometer_height_m;
                Ok(year)
            }
            SourceKind::Synthesis => synthesize_resource_year(&SynthesisSpec {
                monthly_ghi_kwh_m2_day: self.resource.synthesis.monthly_ghi_kwh_m2_day,
                monthly_wind_m_s: self.resource.synthesis.monthly_wind_m_s,
                monthly_temp_c: self.resource.synthesis.monthly_temp_c,
                wind_shape_k: self.resource.synthesis.wind_shape_k,
                ghi_noise: self.resource.synthesis.ghi_noise,
                seed: self.seed,
                anemometer_height: self.resource.anemometer_height_m,
                air_density: self.resource.air_density_kg_m3,
            }),
        }
    }

    pub fn load_profile(&self) -> Result<LoadProfile> {
        match self.load.source {
            LoadSourceKind::Csv => {
                LoadProfile::from_csv(self.load.csv_path.as_ref().expect("validated"))
            }
            LoadSourceKind::Appliances => {
                let appliances: Vec<Appliance> = match &self.load.appliance_csv_path {
                    Some(path) => appliances_from_csv(path)?,
                    None => self
                        .load
                        .appliances
                        .iter()
                        .map(|a| Appliance {
                            name: a.name.clone(),
                            count: a.count,
                            hours_per_day: a.hours_per_day,
                            rated_power_w: a.rated_power_w,
                        })
                        .collect(),
                };
                synthesize_load(&LoadSynthesisSpec {
                    appliances,
                    shape: self.load.shape,
                    variability: self.load.variability,
                    monthly_multipliers: self.load.monthly_multipliers,
                    seed: self.seed,
                    calibration: if self.load.calibrate {
                        Some(CalibrationTargets {
                            daily_mean_kwh: self.load.daily_mean_target_kwh,
                            peak_kw: self.load.peak_target_kw,
                        })
                    } else {
                        None
                    },
                })
            }
        }
    }

    pub fn simulation_inputs(&self) -> Result<SimulationInputs> {
        Ok(SimulationInputs {
            library: self.library()?,
            settings: self.settings(),
            resources: self.resources()?,
            load: self.load_profile()?,
            hot_water: self.hot_water(),
        })
    }

    pub fn simulate_configuration(&self) -> SystemConfiguration {
        SystemConfiguration {
            pv_kw: self.simulate.pv_kw,
            wind_count: self.simulate.wind_count,
            gen_kw: self.simulate.gen_kw,
            battery_strings: self.simulate.battery_strings,
            converter_kw: self.simulate.converter_kw,
            strategy: self.simulate.strategy,
        }
    }

    pub fn search_space(&self) -> Result<SearchSpace> {
        let axis = |r: RangeConfig| AxisRange { min: r.min, max: r.max, step: r.step };
        let space = SearchSpace {
            pv_kw: axis(self.search.pv_kw),
            wind_count: CountRange {
                min: self.search.wind_count.min,
                max: self.search.wind_count.max,
            },
            gen_kw: [
                axis(self.search.gen1_kw),
                axis(self.search.gen2_kw),
                axis(self.search.gen3_kw),
            ],
            battery_strings: CountRange {
                min: self.search.battery_strings.min,
                max: self.search.battery_strings.max,
            },
            converter_kw: axis(self.search.converter_kw),
            strategies: self.search.strategies.clone(),
        };
        space.validate()?;
        Ok(space)
    }

    pub fn feasibility(&self) -> Feasibility {
        Feasibility {
            max_unmet_fraction: self.feasibility.max_unmet_fraction,
        }
    }

    pub fn sensitivity_axes(&self) -> SensitivityAxes {
        SensitivityAxes {
            solar: AxisRange {
                min: self.sensitivity.solar_kwh_m2_day.min,
                max: self.sensitivity.solar_kwh_m2_day.max,
                step: self.sensitivity.solar_kwh_m2_day.step,
            },
            wind: AxisRange {
                min: self.sensitivity.wind_m_s.min,
                max: self.sensitivity.wind_m_s.max,
                step: self.sensitivity.wind_m_s.step,
            },
        }
    }
}
