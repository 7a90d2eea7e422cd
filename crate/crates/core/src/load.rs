//! Electrical load profiles built from an appliance inventory.
//!
//! The synthesized profile distributes the inventory's daily energy over a
//! 24-hour shape template with optional seeded day-to-day variability and
//! monthly multipliers, then (optionally) calibrates the result to exact
//! daily-mean and peak targets.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{month_of_day, DAYS_PER_YEAR, HOURS_PER_YEAR};

/// One inventory row: a class of identical appliances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Appliance {
    pub name: String,
    pub count: u32,
    pub hours_per_day: f64,
    pub rated_power_w: f64,
}

impl Appliance {
    pub fn new(name: impl Into<String>, count: u32, hours_per_day: f64, rated_power_w: f64) -> Result<Self> {
        let a = Self {
            name: name.into(),
            count,
            hours_per_day,
            rated_power_w,
        };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=24.0).contains(&self.hours_per_day) {
            return Err(Error::invalid(format!(
                "appliance '{}': hours_per_day must be in [0, 24], got {}",
                self.name, self.hours_per_day
            )));
        }
        if !self.rated_power_w.is_finite() || self.rated_power_w < 0.0 {
            return Err(Error::invalid(format!(
                "appliance '{}': rated_power_w must be ≥ 0, got {}",
                self.name, self.rated_power_w
            )));
        }
        Ok(())
    }
}

/// Daily energy of one inventory row, kWh/day.
pub fn appliance_daily_energy(a: &Appliance) -> f64 {
    a.count as f64 * a.hours_per_day * a.rated_power_w / 1000.0
}

/// An 8760-hour demand series with cached summary statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadProfile {
    demand: Vec<f64>,
    daily_mean_kwh: f64,
    peak_kw: f64,
}

impl LoadProfile {
    pub fn from_demand(demand: Vec<f64>) -> Result<Self> {
        if demand.len() != HOURS_PER_YEAR {
            return Err(Error::invalid(format!(
                "load profile must have {HOURS_PER_YEAR} entries, got {}",
                demand.len()
            )));
        }
        let mut peak = 0.0f64;
        for (h, &d) in demand.iter().enumerate() {
            if !d.is_finite() || d < 0.0 {
                return Err(Error::invalid(format!("demand[{h}] = {d} is not a valid load")));
            }
            peak = peak.max(d);
        }
        let daily_mean_kwh = demand.iter().sum::<f64>() / DAYS_PER_YEAR as f64;
        Ok(Self {
            demand,
            daily_mean_kwh,
            peak_kw: peak,
        })
    }

    pub fn demand_kw(&self) -> &[f64] {
        &self.demand
    }

    /// Mean daily energy, kWh/day.
    pub fn daily_mean_kwh(&self) -> f64 {
        self.daily_mean_kwh
    }

    /// Highest hourly demand, kW.
    pub fn peak_kw(&self) -> f64 {
        self.peak_kw
    }

    /// Total annual energy, kWh.
    pub fn annual_kwh(&self) -> f64 {
        self.daily_mean_kwh * DAYS_PER_YEAR as f64
    }

    /// Reads `hour,load_kw` with 8760 data rows.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Csv {
            path: path.display().to_string(),
            row: 0,
            message: format!("cannot read file: {e}"),
        })?;
        let display = path.display().to_string();
        let csv_err = |row: usize, message: String| Error::Csv {
            path: display.clone(),
            row,
            message,
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| csv_err(1, "file is empty".to_string()))?;
        if header.trim() != "hour,load_kw" {
            return Err(csv_err(1, format!("expected header 'hour,load_kw', got '{header}'")));
        }
        let mut demand = Vec::with_capacity(HOURS_PER_YEAR);
        for (idx, line) in lines {
            let row = idx + 1;
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 2 {
                return Err(csv_err(row, format!("expected 2 fields, got {}", fields.len())));
            }
            let hour: usize = fields[0]
                .trim()
                .parse()
                .map_err(|_| csv_err(row, format!("bad hour '{}'", fields[0])))?;
            if hour != demand.len() {
                return Err(csv_err(row, format!("hour {hour} out of order; expected {}", demand.len())));
            }
            let kw: f64 = fields[1]
                .trim()
                .parse()
                .map_err(|_| csv_err(row, format!("bad load_kw '{}'", fields[1])))?;
            demand.push(kw);
        }
        if demand.len() != HOURS_PER_YEAR {
            return Err(csv_err(
                demand.len() + 1,
                format!("expected {HOURS_PER_YEAR} data rows, got {}", demand.len()),
            ));
        }
        Self::from_demand(demand)
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::with_capacity(HOURS_PER_YEAR * 16);
        s.push_str("hour,load_kw\n");
        for (h, d) in self.demand.iter().enumerate() {
            let _ = writeln!(s, "{h},{d:.6}");
        }
        s
    }
}

/// Reads an appliance inventory CSV: `name,count,hours_per_day,rated_power_w`.
pub fn appliances_from_csv(path: &Path) -> Result<Vec<Appliance>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Csv {
        path: path.display().to_string(),
        row: 0,
        message: format!("cannot read file: {e}"),
    })?;
    let display = path.display().to_string();
    let csv_err = |row: usize, message: String| Error::Csv {
        path: display.clone(),
        row,
        message,
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| csv_err(1, "file is empty".to_string()))?;
    if header.trim() != "name,count,hours_per_day,rated_power_w" {
        return Err(csv_err(
            1,
            format!("expected header 'name,count,hours_per_day,rated_power_w', got '{header}'"),
        ));
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let row = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(csv_err(row, format!("expected 4 fields, got {}", fields.len())));
        }
        let count: u32 = fields[1]
            .trim()
            .parse()
            .map_err(|_| csv_err(row, format!("bad count '{}'", fields[1])))?;
        let hours: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| csv_err(row, format!("bad hours_per_day '{}'", fields[2])))?;
        let watts: f64 = fields[3]
            .trim()
            .parse()
            .map_err(|_| csv_err(row, format!("bad rated_power_w '{}'", fields[3])))?;
        out.push(
            Appliance::new(fields[0].trim(), count, hours, watts)
                .map_err(|e| csv_err(row, e.to_string()))?,
        );
    }
    Ok(out)
}

/// Exact calibration targets for the synthesized profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTargets {
    pub daily_mean_kwh: f64,
    pub peak_kw: f64,
}

/// Inputs for [`synthesize_load`].
#[derive(Debug, Clone, PartialEq)]
pub struct LoadSynthesisSpec {
    pub appliances: Vec<Appliance>,
    /// 24 non-negative hourly weights, not all zero.
    pub shape: [f64; 24],
    /// Day-to-day multiplicative variability in [0, 1).
    pub variability: f64,
    /// Seasonal multipliers, one per month.
    pub monthly_multipliers: [f64; 12],
    pub seed: u64,
    /// When present, the profile is remapped to hit these targets exactly.
    pub calibration: Option<CalibrationTargets>,
}

/// Default evening-peaked hotel shape: deep troughs 02:00-05:00, a broad
/// daytime air-conditioning plateau, peak 19:00-22:00.
pub fn hotel_evening_shape() -> [f64; 24] {
    [
        0.34, 0.28, 0.26, 0.26, 0.28, 0.36, // 00-05
        0.55, 0.78, 0.94, 1.02, 1.08, 1.12, // 06-11
        1.16, 1.18, 1.18, 1.16, 1.16, 1.20, // 12-17
        1.30, 1.40, 1.44, 1.36, 1.00, 0.62, // 18-23
    ]
}

/// Builds a load profile from the inventory.
///
/// Uncalibrated, the daily mean equals the inventory's summed daily energy
/// exactly. With calibration, hours above the mean power level are stretched
/// linearly so the annual peak lands on `peak_kw`, and hours at or below the
/// mean are rescaled to restore `daily_mean_kwh`; both targets then hold
/// exactly and non-negativity is preserved.
pub fn synthesize_load(spec: &LoadSynthesisSpec) -> Result<LoadProfile> {
    for a in &spec.appliances {
        a.validate()?;
    }
    if spec.shape.iter().any(|&w| !w.is_finite() || w < 0.0) {
        return Err(Error::invalid("shape weights must be ≥ 0".to_string()));
    }
    let shape_sum: f64 = spec.shape.iter().sum();
    if shape_sum <= 0.0 {
        return Err(Error::invalid("shape weights must not all be zero".to_string()));
    }
    if !(0.0..1.0).contains(&spec.variability) {
        return Err(Error::invalid(format!(
            "variability must be in [0, 1), got {}",
            spec.variability
        )));
    }
    for (m, &f) in spec.monthly_multipliers.iter().enumerate() {
        if !f.is_finite() || f < 0.0 {
            return Err(Error::invalid(format!(
                "monthly_multipliers[{m}] must be ≥ 0, got {f}"
            )));
        }
    }

    let daily_target: f64 = spec.appliances.iter().map(appliance_daily_energy).sum();

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut demand = vec![0.0; HOURS_PER_YEAR];
    for day in 0..DAYS_PER_YEAR {
        let month = month_of_day(day);
        let jitter = if spec.variability > 0.0 {
            1.0 + spec.variability * (2.0 * rng.gen::<f64>() - 1.0)
        } else {
            1.0
        };
        let day_energy = daily_target * spec.monthly_multipliers[month] * jitter;
        for h in 0..24 {
            demand[day * 24 + h] = day_energy * spec.shape[h] / shape_sum;
        }
    }

    // Rescale so the realized daily mean equals the inventory target exactly.
    let total: f64 = demand.iter().sum();
    if total > 0.0 {
        let f = daily_target * DAYS_PER_YEAR as f64 / total;
        for d in &mut demand {
            *d *= f;
        }
    }

    if let Some(targets) = spec.calibration {
        calibrate(&mut demand, targets)?;
    }

    LoadProfile::from_demand(demand)
}

fn calibrate(demand: &mut [f64], targets: CalibrationTargets) -> Result<()> {
    if targets.daily_mean_kwh <= 0.0 || targets.peak_kw <= 0.0 {
        return Err(Error::invalid("calibration targets must be > 0".to_string()));
    }
    let n = demand.len() as f64;
    let mean_power_target = targets.daily_mean_kwh / 24.0;
    if targets.peak_kw < mean_power_target {
        return Err(Error::invalid(format!(
            "peak target {} kW is below the mean power implied by the daily target ({:.3} kW)",
            targets.peak_kw, mean_power_target
        )));
    }

    let current_mean = demand.iter().sum::<f64>() / n;
    if current_mean <= 0.0 {
        return Err(Error::invalid("cannot calibrate an all-zero profile".to_string()));
    }
    let s = mean_power_target / current_mean;
    for d in demand.iter_mut() {
        *d *= s;
    }

    // Stretch only the max hour's neighborhood (top percentile of hours) so
    // the annual extreme lands on the peak target without inflating every
    // above-average evening.
    let peak0 = demand.iter().cloned().fold(0.0f64, f64::max);
    let mut sorted: Vec<f64> = demand.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut pivot = sorted[(0.99 * (sorted.len() - 1) as f64) as usize];
    if pivot >= peak0 || pivot < mean_power_target {
        pivot = mean_power_target;
    }
    if peak0 <= pivot {
        return Err(Error::invalid(
            "profile is too flat to calibrate: peak does not exceed the mean".to_string(),
        ));
    }

    // Stretch the above-mean hours so the annual maximum hits the peak target.
    let gain = (targets.peak_kw - pivot) / (peak0 - pivot);
    let mut above_sum = 0.0;
    let mut below_sum = 0.0;
    for d in demand.iter_mut() {
        if *d > pivot {
            *d = pivot + gain * (*d - pivot);
            above_sum += *d;
        } else {
            below_sum += *d;
        }
    }

    // Rescale the remaining hours to restore the mean exactly.
    let needed_below = mean_power_target * n - above_sum;
    if below_sum > 0.0 {
        if needed_below < 0.0 {
            return Err(Error::invalid(
                "calibration infeasible: stretched peak hours exceed the energy target".to_string(),
            ));
        }
        let beta = needed_below / below_sum;
        if beta * pivot > targets.peak_kw {
            return Err(Error::invalid(
                "calibration infeasible: restoring the mean would exceed the peak target".to_string(),
            ));
        }
        for d in demand.iter_mut() {
            if *d <= pivot {
                *d *= beta;
            }
        }
    }
    Ok(())
}

/// The resort appliance inventory used as the bundled default scenario
/// (duplicated rows collapsed once).
pub fn default_resort_inventory() -> Vec<Appliance> {
    let rows: [(&str, u32, f64, f64); 16] = [
        ("air conditioner", 400, 15.0, 1400.0),
        ("television", 282, 7.0, 175.0),
        ("light", 1000, 17.0, 30.0),
        ("lamp", 620, 8.0, 20.0),
        ("bulb", 60, 10.0, 45.0),
        ("overhead projector", 3, 6.0, 250.0),
        ("slide projector", 3, 6.0, 320.0),
        ("microphone", 7, 4.0, 15.0),
        ("refrigerator", 320, 15.0, 450.0),
        ("hair straightener", 312, 5.0, 2500.0),
        ("coffee maker", 312, 5.0, 1500.0),
        ("fan", 600, 10.0, 80.0),
        ("microwave oven", 7, 7.0, 3000.0),
        ("desktop computer", 6, 15.0, 120.0),
        ("laptop", 5, 15.0, 80.0),
        ("printer", 5, 5.0, 100.0),
    ];
    rows.iter()
        .map(|&(name, count, hours, watts)| Appliance {
            name: name.to_string(),
            count,
            hours_per_day: hours,
            rated_power_w: watts,
        })
        .collect()
}
