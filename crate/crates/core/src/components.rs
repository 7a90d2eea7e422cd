//! Per-component power, fuel, and efficiency models.
//!
//! Each spec struct carries the technical parameters and the cost figures the
//! economics module needs. Specs are immutable after construction and all
//! operations are pure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Module-level electrical parameters for the cell-efficiency calculator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellParams {
    /// Open-circuit voltage, V.
    pub v_oc: f64,
    /// Short-circuit current, A.
    pub i_sc: f64,
    pub fill_factor: f64,
    /// Incident power on the module, W.
    pub p_in_w: f64,
}

/// Photovoltaic array parameters (DC side, rating at standard test conditions).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvSpec {
    pub rated_kw: f64,
    /// Output derating factor in (0, 1].
    pub derating: f64,
    /// Power temperature coefficient, 1/°C (negative).
    pub temp_coeff_per_c: f64,
    /// Nominal operating cell temperature, °C.
    pub noct_c: f64,
    pub cell: CellParams,
    pub capital_per_kw: f64,
    pub replacement_per_kw: f64,
    pub om_per_kw_yr: f64,
    pub lifetime_yr: f64,
}

impl PvSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.derating > 0.0 && self.derating <= 1.0) {
            return Err(Error::invalid(format!("PV derating must be in (0, 1], got {}", self.derating)));
        }
        if self.rated_kw < 0.0 {
            return Err(Error::invalid(format!("PV rating must be ≥ 0, got {}", self.rated_kw)));
        }
        Ok(())
    }

    /// Cell temperature from ambient and irradiance via the NOCT model.
    pub fn cell_temp_c(&self, ghi_kw_m2: f64, ambient_c: f64) -> f64 {
        ambient_c + (self.noct_c - 20.0) / 0.8 * ghi_kw_m2
    }

    /// DC output power at the given irradiance and ambient temperature, kW.
    pub fn power_kw(&self, ghi_kw_m2: f64, ambient_c: f64) -> f64 {
        if ghi_kw_m2 <= 0.0 {
            return 0.0;
        }
        let cell = self.cell_temp_c(ghi_kw_m2, ambient_c);
        let p = self.rated_kw * self.derating * ghi_kw_m2 * (1.0 + self.temp_coeff_per_c * (cell - 25.0));
        p.max(0.0)
    }

    /// Same array at a different rating (for sizing sweeps).
    pub fn with_rating(&self, rated_kw: f64) -> Self {
        Self { rated_kw, ..self.clone() }
    }

    /// Module conversion efficiency from the cell parameters.
    pub fn cell_efficiency(&self) -> Result<f64> {
        pv_cell_efficiency(self.cell.v_oc, self.cell.i_sc, self.cell.fill_factor, self.cell.p_in_w)
    }
}

/// Standalone cell-efficiency calculator: `V_oc · I_sc · FF / P_in`.
pub fn pv_cell_efficiency(v_oc: f64, i_sc: f64, fill_factor: f64, p_in_w: f64) -> Result<f64> {
    if !p_in_w.is_finite() || p_in_w <= 0.0 {
        return Err(Error::invalid(format!("input power must be > 0, got {p_in_w}")));
    }
    if !(0.0..=1.0).contains(&fill_factor) {
        return Err(Error::invalid(format!("fill factor must be in [0, 1], got {fill_factor}")));
    }
    Ok(v_oc * i_sc * fill_factor / p_in_w)
}

/// Wind turbine parameters (one unit).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindTurbineSpec {
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

impl WindTurbineSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.cut_in_m_s > 0.0
            && self.cut_in_m_s < self.rated_speed_m_s
            && self.rated_speed_m_s < self.cut_out_m_s)
        {
            return Err(Error::invalid(format!(
                "turbine speeds must satisfy 0 < cut_in < rated < cut_out, got {} / {} / {}",
                self.cut_in_m_s, self.rated_speed_m_s, self.cut_out_m_s
            )));
        }
        Ok(())
    }

    /// AC output of one turbine at wind speed `v`, kW.
    ///
    /// Zero below cut-in and at/above cut-out, rated between rated speed and
    /// cut-out, cubic in between: `rated·(v³−v_ci³)/(v_r³−v_ci³)`.
    pub fn power_kw(&self, v: f64) -> f64 {
        if v < self.cut_in_m_s || v >= self.cut_out_m_s {
            0.0
        } else if v >= self.rated_speed_m_s {
            self.rated_kw
        } else {
            let v3 = v.powi(3);
            let ci3 = self.cut_in_m_s.powi(3);
            let r3 = self.rated_speed_m_s.powi(3);
            self.rated_kw * (v3 - ci3) / (r3 - ci3)
        }
    }
}

/// Diesel fuel properties for the emissions model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuelSpec {
    /// Lower heating value, MJ/L.
    pub heating_value_mj_l: f64,
    /// Carbon emission factor, t C / TJ.
    pub carbon_emission_factor_tc_tj: f64,
    /// Fraction of carbon oxidized, in [0, 1].
    pub oxidized_fraction: f64,
    pub price_per_l: f64,
}

impl FuelSpec {
    pub fn validate(&self) -> Result<()> {
        if self.heating_value_mj_l < 0.0
            || self.carbon_emission_factor_tc_tj < 0.0
            || !(0.0..=1.0).contains(&self.oxidized_fraction)
            || self.price_per_l < 0.0
        {
            return Err(Error::invalid("fuel spec fields out of range".to_string()));
        }
        Ok(())
    }
}

/// Diesel generator parameters (one unit; `rated_kw` set per configuration).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub rated_kw: f64,
    /// Minimum permitted loading as a fraction of the rating.
    pub min_load_ratio: f64,
    pub lifetime_hours: f64,
    pub fuel: FuelSpec,
    /// No-load fuel term, L/h per rated kW.
    pub fuel_curve_intercept: f64,
    /// Marginal fuel term, L/h per output kW.
    pub fuel_curve_slope: f64,
    pub capital_per_kw: f64,
    pub replacement_per_kw: f64,
    pub om_per_hr: f64,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.min_load_ratio) {
            return Err(Error::invalid(format!(
                "min_load_ratio must be in [0, 1), got {}",
                self.min_load_ratio
            )));
        }
        if !self.lifetime_hours.is_finite() || self.lifetime_hours <= 0.0 {
            return Err(Error::invalid(format!(
                "lifetime_hours must be > 0, got {}",
                self.lifetime_hours
            )));
        }
        self.fuel.validate()
    }

    /// Minimum permitted output when running, kW.
    pub fn min_output_kw(&self) -> f64 {
        self.min_load_ratio * self.rated_kw
    }

    /// Fuel burned producing `output_kw` for `dt_h` hours, L.
    ///
    /// Zero when off; outputs inside the forbidden band `(0, min_output)` or
    /// above the rating are dispatch-contract violations.
    pub fn fuel_liters(&self, output_kw: f64, dt_h: f64) -> Result<f64> {
        if output_kw == 0.0 {
            return Ok(0.0);
        }
        let tol = 1e-9 * self.rated_kw.max(1.0);
        if output_kw < self.min_output_kw() - tol || output_kw > self.rated_kw + tol {
            return Err(Error::DispatchContract(format!(
                "generator output {output_kw} kW outside [{}, {}]",
                self.min_output_kw(),
                self.rated_kw
            )));
        }
        Ok((self.fuel_curve_intercept * self.rated_kw + self.fuel_curve_slope * output_kw) * dt_h)
    }

    pub fn with_rating(&self, rated_kw: f64) -> Self {
        Self { rated_kw, ..self.clone() }
    }
}

/// Battery storage parameters (one unit; banks are strings of units).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatterySpec {
    pub nominal_v: f64,
    pub capacity_ah: f64,
    /// Round-trip efficiency in (0, 1].
    pub round_trip_eff: f64,
    /// Lifetime energy throughput of one unit, kWh.
    pub lifetime_throughput_kwh: f64,
    /// Floor state of charge in [0, 1).
    pub min_soc: f64,
    pub batteries_per_string: u32,
    pub capital_per_unit: f64,
    pub replacement_per_unit: f64,
    pub om_per_unit_yr: f64,
}

impl BatterySpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.round_trip_eff > 0.0 && self.round_trip_eff <= 1.0) {
            return Err(Error::invalid(format!(
                "round_trip_eff must be in (0, 1], got {}",
                self.round_trip_eff
            )));
        }
        if !(0.0..1.0).contains(&self.min_soc) {
            return Err(Error::invalid(format!("min_soc must be in [0, 1), got {}", self.min_soc)));
        }
        Ok(())
    }

    /// Charge efficiency, √(round-trip efficiency).
    pub fn charge_efficiency(&self) -> f64 {
        self.round_trip_eff.sqrt()
    }

    /// Discharge efficiency, √(round-trip efficiency).
    pub fn discharge_efficiency(&self) -> f64 {
        self.round_trip_eff.sqrt()
    }

    /// Nominal bank capacity for the given number of strings, kWh.
    pub fn bank_capacity_kwh(&self, strings: u32) -> f64 {
        strings as f64 * self.batteries_per_string as f64 * self.nominal_v * self.capacity_ah / 1000.0
    }

    /// Units in a bank of the given number of strings.
    pub fn bank_units(&self, strings: u32) -> u32 {
        strings * self.batteries_per_string
    }
}

/// Bidirectional converter parameters; one shared rating covers inversion
/// and rectification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConverterSpec {
    pub rated_kw: f64,
    pub efficiency: f64,
    pub lifetime_yr: f64,
    pub capital_per_kw: f64,
    pub replacement_per_kw: f64,
    pub om_per_kw_yr: f64,
}

/// Outcome of pushing power through the converter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Converted {
    /// Power delivered on the far side, kW.
    pub output_kw: f64,
    /// Input that could not be accepted without exceeding the rating, kW.
    pub curtailed_kw: f64,
}

/// Conversion direction; both share the rating and efficiency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConversionDirection {
    DcToAc,
    AcToDc,
}

impl ConverterSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::invalid(format!(
                "converter efficiency must be in (0, 1], got {}",
                self.efficiency
            )));
        }
        if self.rated_kw < 0.0 {
            return Err(Error::invalid(format!(
                "converter rating must be ≥ 0, got {}",
                self.rated_kw
            )));
        }
        Ok(())
    }

    /// Converts `power_kw`, clamping the input so output stays within rating.
    pub fn convert(&self, power_kw: f64, _direction: ConversionDirection) -> Converted {
        let power = power_kw.max(0.0);
        let max_input = if self.efficiency > 0.0 {
            self.rated_kw / self.efficiency
        } else {
            0.0
        };
        let accepted = power.min(max_input);
        Converted {
            output_kw: accepted * self.efficiency,
            curtailed_kw: power - accepted,
        }
    }
}
