//! The bundled island-resort study: component parameters, resource and load
//! synthesis defaults, economics, and the reference system sizings.
//!
//! These values define the out-of-the-box scenario the CLI ships with. Every
//! one of them can be overridden through the configuration file.

use crate::components::{
    BatterySpec, CellParams, ConverterSpec, FuelSpec, GeneratorSpec, PvSpec, WindTurbineSpec,
};
use crate::dispatch::{
    ComponentLibrary, DispatchSettings, DispatchStrategy, SystemConfiguration,
};
use crate::economics::EconomicParams;
use crate::load::{default_resort_inventory, hotel_evening_shape, LoadSynthesisSpec};
use crate::load::CalibrationTargets;
use crate::optimizer::{AxisRange, CountRange, SearchSpace, SensitivityAxes};
use crate::resource::SynthesisSpec;
use crate::thermal::HotWaterSpec;

/// Daily-mean electrical demand target, kWh/day.
pub const DAILY_LOAD_KWH: f64 = 19_072.0;

/// Annual peak demand target, kW.
pub const PEAK_LOAD_KW: f64 = 2068.0;

/// Monthly mean wind speeds at hub height, m/s (monsoon-season profile,
/// annual mean 5.2 m/s).
pub const MONTHLY_WIND_M_S: [f64; 12] = [
    8.89, 7.90, 4.51, 4.56, 2.82, 6.33, 3.17, 5.23, 3.16, 2.80, 7.91, 5.42,
];

/// Monthly mean daily insolation, kWh/m²/day.
pub const MONTHLY_GHI_KWH_M2_DAY: [f64; 12] = [4.2; 12];

/// Monthly mean ambient temperature, °C.
pub const MONTHLY_TEMP_C: [f64; 12] = [27.0; 12];

pub fn default_library() -> ComponentLibrary {
    ComponentLibrary {
        pv: PvSpec {
            rated_kw: 0.0,
            derating: 0.80,
            temp_coeff_per_c: -0.005,
            noct_c: 47.0,
            cell: CellParams {
                v_oc: 38.0,
                i_sc: 9.2,
                fill_factor: 0.74,
                p_in_w: 1700.0,
            },
            capital_per_kw: 2000.0,
            replacement_per_kw: 2000.0,
            om_per_kw_yr: 10.0,
            lifetime_yr: 25.0,
        },
        wind: WindTurbineSpec {
            rated_kw: 250.0,
            cut_in_m_s: 3.5,
            rated_speed_m_s: 8.4,
            cut_out_m_s: 18.0,
            hub_height_m: 50.0,
            lifetime_yr: 20.0,
            capital_per_unit: 375_000.0,
            replacement_per_unit: 262_500.0,
            om_per_unit_yr: 7500.0,
        },
        generator: GeneratorSpec {
            rated_kw: 0.0,
            min_load_ratio: 0.25,
            lifetime_hours: 15_000.0,
            fuel: FuelSpec {
                heating_value_mj_l: 36.4,
                carbon_emission_factor_tc_tj: 20.0,
                oxidized_fraction: 0.99,
                price_per_l: 1.20,
            },
            fuel_curve_intercept: 0.085,
            fuel_curve_slope: 0.246,
            capital_per_kw: 220.0,
            replacement_per_kw: 200.0,
            om_per_hr: 0.03,
        },
        battery: BatterySpec {
            nominal_v: 6.0,
            capacity_ah: 1231.0,
            round_trip_eff: 0.96,
            lifetime_throughput_kwh: 9300.0,
            min_soc: 0.30,
            batteries_per_string: 40,
            capital_per_unit: 1200.0,
            replacement_per_unit: 1170.0,
            om_per_unit_yr: 10.0,
        },
        converter: ConverterSpec {
            rated_kw: 0.0,
            efficiency: 0.95,
            lifetime_yr: 15.0,
            capital_per_kw: 890.0,
            replacement_per_kw: 800.0,
            om_per_kw_yr: 10.0,
        },
    }
}

pub fn default_synthesis(seed: u64) -> SynthesisSpec {
    SynthesisSpec {
        monthly_ghi_kwh_m2_day: MONTHLY_GHI_KWH_M2_DAY,
        monthly_wind_m_s: MONTHLY_WIND_M_S,
        monthly_temp_c: MONTHLY_TEMP_C,
        wind_shape_k: 2.0,
        ghi_noise: 0.0,
        seed,
        anemometer_height: 50.0,
        air_density: 1.225,
    }
}

pub fn default_load_spec(seed: u64) -> LoadSynthesisSpec {
    LoadSynthesisSpec {
        appliances: default_resort_inventory(),
        shape: hotel_evening_shape(),
        variability: 0.05,
        monthly_multipliers: [1.0; 12],
        seed,
        calibration: Some(CalibrationTargets {
            daily_mean_kwh: DAILY_LOAD_KWH,
            peak_kw: PEAK_LOAD_KW,
        }),
    }
}

/// 250 guests at 200 L/day heated from 25 °C to 50 °C (≈530 MWh/yr). Zero
/// heater rating and tank capacity mean "derive from the configuration":
/// heater = converter rating, tank = one day of demand.
pub fn default_hot_water() -> HotWaterSpec {
    HotWaterSpec {
        liters_per_guest_day: 200.0,
        guests_per_day: 250.0,
        t_in_c: 25.0,
        t_f_c: 50.0,
        specific_heat_kj_kg_c: 4.18,
        tank_capacity_kwh: 0.0,
        heater_power_kw: 0.0,
    }
}

pub fn default_settings() -> DispatchSettings {
    DispatchSettings::default()
}

pub fn default_economics() -> EconomicParams {
    EconomicParams {
        nominal_interest: 0.08,
        inflation: 0.04,
        project_lifetime_yr: 25,
        salvage_credit: true,
    }
}

/// The full sizing search space of the study.
pub fn default_search_space() -> SearchSpace {
    SearchSpace {
        pv_kw: AxisRange { min: 0.0, max: 1000.0, step: 50.0 },
        wind_count: CountRange { min: 0, max: 8 },
        gen_kw: [
            AxisRange { min: 0.0, max: 500.0, step: 50.0 },
            AxisRange { min: 0.0, max: 500.0, step: 50.0 },
            AxisRange { min: 0.0, max: 500.0, step: 50.0 },
        ],
        battery_strings: CountRange { min: 0, max: 10 },
        converter_kw: AxisRange { min: 0.0, max: 1000.0, step: 100.0 },
        strategies: DispatchStrategy::ALL.to_vec(),
    }
}

pub fn default_sensitivity_axes() -> SensitivityAxes {
    SensitivityAxes {
        solar: AxisRange { min: 3.0, max: 5.0, step: 0.4 },
        wind: AxisRange { min: 2.0, max: 4.0, step: 0.4 },
    }
}

/// The reference hybrid sizing highlighted by the study.
pub fn reference_hybrid() -> SystemConfiguration {
    SystemConfiguration {
        pv_kw: 600.0,
        wind_count: 4,
        gen_kw: [100.0, 300.0, 500.0],
        battery_strings: 5,
        converter_kw: 500.0,
        strategy: DispatchStrategy::Combined,
    }
}

/// All-diesel baseline sized to carry the peak (largest units in the search
/// space), used for emissions comparisons.
pub fn diesel_baseline() -> SystemConfiguration {
    SystemConfiguration {
        pv_kw: 0.0,
        wind_count: 0,
        gen_kw: [500.0, 500.0, 500.0],
        battery_strings: 0,
        converter_kw: 0.0,
        strategy: DispatchStrategy::LoadFollowing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{DAYS_PER_YEAR, MONTH_DAYS};

    #[test]
    fn monthly_wind_annual_mean() {
        let mean: f64 = MONTHLY_WIND_M_S
            .iter()
            .zip(MONTH_DAYS.iter())
            .map(|(v, &d)| v * d as f64)
            .sum::<f64>()
            / DAYS_PER_YEAR as f64;
        assert!((mean - 5.2).abs() < 0.01, "annual mean {mean}");
    }

    #[test]
    fn library_is_valid() {
        default_library().validate().unwrap();
        default_search_space().validate().unwrap();
        default_hot_water().validate().unwrap();
    }
}
