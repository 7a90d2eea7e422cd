//! Annual solar/wind/temperature series and Weibull wind statistics.
//!
//! A [`ResourceYear`] either comes from a measured CSV
//! (`hour,ghi_kw_m2,wind_m_s,temp_c`, 8760 rows) or is synthesized from
//! twelve monthly means per quantity. Synthesis is a pure function of its
//! arguments: the same [`SynthesisSpec`] always yields the same series.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::{DAYS_PER_YEAR, HOURS_PER_YEAR, MONTH_DAYS};

/// Exponent of the empirical shape-factor fit `k = (σ/V_m)^(-1.086)`.
const SHAPE_FIT_EXPONENT: f64 = -1.086;

/// Daylight window for synthesized irradiance, local hours [start, end).
const DAYLIGHT_START: usize = 6;
const DAYLIGHT_END: usize = 18;

/// Two-parameter Weibull distribution of wind speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeibullParams {
    /// Shape factor k (dimensionless, > 0).
    pub k: f64,
    /// Scale factor c (m/s, > 0).
    pub c: f64,
}

impl WeibullParams {
    pub fn new(k: f64, c: f64) -> Result<Self> {
        if !k.is_finite() || k <= 0.0 {
            return Err(Error::invalid(format!("Weibull shape k must be > 0, got {k}")));
        }
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::invalid(format!("Weibull scale c must be > 0, got {c}")));
        }
        Ok(Self { k, c })
    }

    /// Mean of the distribution, `c·Γ(1 + 1/k)`.
    pub fn mean(&self) -> f64 {
        self.c * gamma(1.0 + 1.0 / self.k)
    }

    /// Standard deviation, `c·√(Γ(1+2/k) − Γ²(1+1/k))`.
    pub fn std_dev(&self) -> f64 {
        let g1 = gamma(1.0 + 1.0 / self.k);
        let g2 = gamma(1.0 + 2.0 / self.k);
        self.c * (g2 - g1 * g1).max(0.0).sqrt()
    }

    /// Inverse CDF; `u` must lie in [0, 1).
    pub fn quantile(&self, u: f64) -> f64 {
        self.c * (-(1.0 - u).ln()).powf(1.0 / self.k)
    }
}

fn check_speed(v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::invalid(format!(
            "wind speed must be finite and non-negative, got {v}"
        )));
    }
    Ok(())
}

/// Probability density of wind speed `v` (per m/s).
pub fn weibull_pdf(v: f64, p: &WeibullParams) -> Result<f64> {
    check_speed(v)?;
    let r = v / p.c;
    // 0^0 = 1 makes the k = 1 exponential limit come out right at v = 0.
    Ok((p.k / p.c) * r.powf(p.k - 1.0) * (-r.powf(p.k)).exp())
}

/// Probability that wind speed is ≤ `v`.
pub fn weibull_cdf(v: f64, p: &WeibullParams) -> Result<f64> {
    check_speed(v)?;
    Ok(1.0 - (-(v / p.c).powf(p.k)).exp())
}

/// Shape factor from the coefficient of variation σ/V_m.
pub fn shape_from_cv(cv: f64) -> f64 {
    cv.powf(SHAPE_FIT_EXPONENT)
}

/// Fits Weibull parameters to a wind-speed sample by the standard-deviation
/// technique: `k = (σ/V_m)^(-1.086)`, then `c = V_m / Γ(1 + 1/k)` so the
/// fitted mean matches the sample mean.
pub fn fit_weibull(samples: &[f64]) -> Result<WeibullParams> {
    if samples.len() < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 samples to fit, got {}",
            samples.len()
        )));
    }
    for (i, &s) in samples.iter().enumerate() {
        if !s.is_finite() || s < 0.0 {
            return Err(Error::invalid(format!("sample {i} is not a wind speed: {s}")));
        }
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if mean <= 0.0 {
        return Err(Error::invalid("sample mean must be > 0".to_string()));
    }
    let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0);
    let std_dev = var.sqrt();
    if std_dev <= 0.0 {
        return Err(Error::DegenerateSamples(
            "all samples equal (zero standard deviation)".to_string(),
        ));
    }
    let k = shape_from_cv(std_dev / mean);
    let c = mean / gamma(1.0 + 1.0 / k);
    WeibullParams::new(k, c)
}

/// Summary wind statistics derived from fitted Weibull parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindSampleStats {
    /// Mean wind speed V_m (m/s).
    pub mean: f64,
    /// Standard deviation σ (m/s).
    pub std_dev: f64,
    /// Most probable wind speed (m/s); 0 when k ≤ 1.
    pub v_mp: f64,
    /// Wind speed carrying maximum energy (m/s).
    pub v_max_e: f64,
    /// Wind power density ½·ρ·c³·Γ(1+3/k) (W/m²).
    pub power_density: f64,
}

/// Closed-form wind statistics for the given distribution and air density.
pub fn wind_stats(p: &WeibullParams, air_density: f64) -> WindSampleStats {
    let v_mp = if p.k > 1.0 {
        p.c * ((p.k - 1.0) / p.k).powf(1.0 / p.k)
    } else {
        0.0
    };
    let v_max_e = p.c * ((p.k + 2.0) / p.k).powf(1.0 / p.k);
    let power_density = 0.5 * air_density * p.c.powi(3) * gamma(1.0 + 3.0 / p.k);
    WindSampleStats {
        mean: p.mean(),
        std_dev: p.std_dev(),
        v_mp,
        v_max_e,
        power_density,
    }
}

/// One year of hourly resource data.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceYear {
    /// Global horizontal irradiance, kW/m².
    pub ghi: Vec<f64>,
    /// Wind speed at anemometer height, m/s.
    pub wind_speed: Vec<f64>,
    /// Ambient temperature, °C.
    pub ambient_temp: Vec<f64>,
    /// Anemometer height, m (assumed equal to hub height; no shear model).
    pub anemometer_height: f64,
    /// Air density, kg/m³.
    pub air_density: f64,
}

impl ResourceYear {
    pub fn new(
        ghi: Vec<f64>,
        wind_speed: Vec<f64>,
        ambient_temp: Vec<f64>,
        anemometer_height: f64,
        air_density: f64,
    ) -> Result<Self> {
        for (name, series) in [("ghi", &ghi), ("wind_speed", &wind_speed), ("ambient_temp", &ambient_temp)] {
            if series.len() != HOURS_PER_YEAR {
                return Err(Error::invalid(format!(
                    "{name} must have {HOURS_PER_YEAR} entries, got {}",
                    series.len()
                )));
            }
        }
        for (h, &g) in ghi.iter().enumerate() {
            if !g.is_finite() || g < 0.0 {
                return Err(Error::invalid(format!("ghi[{h}] = {g} is not a valid irradiance")));
            }
        }
        for (h, &v) in wind_speed.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(format!("wind_speed[{h}] = {v} is not a valid speed")));
            }
        }
        if !air_density.is_finite() || air_density <= 0.0 {
            return Err(Error::invalid(format!("air density must be > 0, got {air_density}")));
        }
        Ok(Self {
            ghi,
            wind_speed,
            ambient_temp,
            anemometer_height,
            air_density,
        })
    }

    /// Annual mean daily insolation, kWh/m²/day.
    pub fn annual_mean_ghi_kwh_m2_day(&self) -> f64 {
        self.ghi.iter().sum::<f64>() / DAYS_PER_YEAR as f64
    }

    /// Annual mean wind speed, m/s.
    pub fn annual_mean_wind_m_s(&self) -> f64 {
        self.wind_speed.iter().sum::<f64>() / HOURS_PER_YEAR as f64
    }

    /// Copy with solar and wind series linearly rescaled by the given factors.
    pub fn scaled(&self, solar_factor: f64, wind_factor: f64) -> Self {
        let mut out = self.clone();
        for g in &mut out.ghi {
            *g *= solar_factor;
        }
        for v in &mut out.wind_speed {
            *v *= wind_factor;
        }
        out
    }

    /// Reads `hour,ghi_kw_m2,wind_m_s,temp_c` with exactly 8760 data rows.
    ///
    /// Any malformed row is a hard error carrying its 1-based line number.
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
        let (_, header) = lines
            .next()
            .ok_or_else(|| csv_err(1, "file is empty".to_string()))?;
        if header.trim() != "hour,ghi_kw_m2,wind_m_s,temp_c" {
            return Err(csv_err(
                1,
                format!("expected header 'hour,ghi_kw_m2,wind_m_s,temp_c', got '{header}'"),
            ));
        }
        let mut ghi = Vec::with_capacity(HOURS_PER_YEAR);
        let mut wind = Vec::with_capacity(HOURS_PER_YEAR);
        let mut temp = Vec::with_capacity(HOURS_PER_YEAR);
        for (idx, line) in lines {
            let row = idx + 1;
            if line.trim().is_empty() {
                return Err(csv_err(row, "blank row".to_string()));
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(csv_err(row, format!("expected 4 fields, got {}", fields.len())));
            }
            let hour: usize = fields[0]
                .trim()
                .parse()
                .map_err(|_| csv_err(row, format!("bad hour '{}'", fields[0])))?;
            if hour != ghi.len() {
                return Err(csv_err(
                    row,
                    format!("hour {hour} out of order; expected {}", ghi.len()),
                ));
            }
            let parse = |name: &str, raw: &str| -> Result<f64> {
                raw.trim()
                    .parse::<f64>()
                    .map_err(|_| csv_err(row, format!("bad {name} '{raw}'")))
            };
            let g = parse("ghi_kw_m2", fields[1])?;
            let v = parse("wind_m_s", fields[2])?;
            let t = parse("temp_c", fields[3])?;
            if !g.is_finite() || g < 0.0 {
                return Err(csv_err(row, format!("ghi_kw_m2 must be ≥ 0, got {g}")));
            }
            if !v.is_finite() || v < 0.0 {
                return Err(csv_err(row, format!("wind_m_s must be ≥ 0, got {v}")));
            }
            ghi.push(g);
            wind.push(v);
            temp.push(t);
        }
        if ghi.len() != HOURS_PER_YEAR {
            return Err(csv_err(
                ghi.len() + 1,
                format!("expected {HOURS_PER_YEAR} data rows, got {}", ghi.len()),
            ));
        }
        Self::new(ghi, wind, temp, 50.0, 1.225)
    }

    /// Writes the series back out in the ingestion schema.
    pub fn to_csv_string(&self) -> String {
        let mut s = String::with_capacity(HOURS_PER_YEAR * 32);
        s.push_str("hour,ghi_kw_m2,wind_m_s,temp_c\n");
        for h in 0..HOURS_PER_YEAR {
            let _ = writeln!(
                s,
                "{h},{:.6},{:.6},{:.6}",
                self.ghi[h], self.wind_speed[h], self.ambient_temp[h]
            );
        }
        s
    }
}

/// Inputs for synthesizing a [`ResourceYear`] from monthly means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisSpec {
    /// Monthly mean daily insolation, kWh/m²/day.
    pub monthly_ghi_kwh_m2_day: [f64; 12],
    /// Monthly mean wind speed, m/s.
    pub monthly_wind_m_s: [f64; 12],
    /// Monthly mean ambient temperature, °C.
    pub monthly_temp_c: [f64; 12],
    /// Weibull shape used for hourly wind draws.
    pub wind_shape_k: f64,
    /// Optional day-to-day multiplicative irradiance noise, 0 disables.
    pub ghi_noise: f64,
    /// RNG seed; the synthesis is a pure function of this spec.
    pub seed: u64,
    pub anemometer_height: f64,
    pub air_density: f64,
}

impl SynthesisSpec {
    fn validate(&self) -> Result<()> {
        for (name, arr) in [
            ("monthly_ghi_kwh_m2_day", &self.monthly_ghi_kwh_m2_day),
            ("monthly_wind_m_s", &self.monthly_wind_m_s),
        ] {
            for (m, &x) in arr.iter().enumerate() {
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::invalid(format!("{name}[{m}] must be ≥ 0, got {x}")));
                }
            }
        }
        if !self.wind_shape_k.is_finite() || self.wind_shape_k <= 0.0 {
            return Err(Error::invalid(format!(
                "wind_shape_k must be > 0, got {}",
                self.wind_shape_k
            )));
        }
        if !(0.0..1.0).contains(&self.ghi_noise) {
            return Err(Error::invalid(format!(
                "ghi_noise must be in [0, 1), got {}",
                self.ghi_noise
            )));
        }
        Ok(())
    }
}

/// Builds an 8760-hour resource year from monthly means.
///
/// Irradiance follows a half-sine between 06:00 and 18:00 local, scaled so
/// each month's realized mean matches its target exactly. Wind speeds are
/// inverse-CDF draws from the month's Weibull distribution, linearly rescaled
/// to the monthly mean. Temperature is the monthly mean plus a fixed ±3 °C
/// diurnal swing peaking at 14:00.
pub fn synthesize_resource_year(spec: &SynthesisSpec) -> Result<ResourceYear> {
    spec.validate()?;

    // Independent RNG streams so enabling irradiance noise never perturbs wind.
    let mut ghi_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    ghi_rng.set_stream(1);
    let mut wind_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    wind_rng.set_stream(2);

    let daylight_hours = DAYLIGHT_END - DAYLIGHT_START;
    let shape: Vec<f64> = (0..24)
        .map(|h| {
            if (DAYLIGHT_START..DAYLIGHT_END).contains(&h) {
                let x = (h - DAYLIGHT_START) as f64 + 0.5;
                (std::f64::consts::PI * x / daylight_hours as f64).sin()
            } else {
                0.0
            }
        })
        .collect();
    let shape_sum: f64 = shape.iter().sum();

    let mut ghi = vec![0.0; HOURS_PER_YEAR];
    let mut wind = vec![0.0; HOURS_PER_YEAR];
    let mut temp = vec![0.0; HOURS_PER_YEAR];

    let mut day0 = 0usize;
    for (m, &days) in MONTH_DAYS.iter().enumerate() {
        let month_start = day0 * 24;
        let month_hours = days * 24;

        // Irradiance: per-day half-sine hitting the day's energy target.
        for d in 0..days {
            let noise = if spec.ghi_noise > 0.0 {
                1.0 + spec.ghi_noise * (2.0 * ghi_rng.gen::<f64>() - 1.0)
            } else {
                1.0
            };
            let daily = spec.monthly_ghi_kwh_m2_day[m] * noise;
            for h in 0..24 {
                ghi[month_start + d * 24 + h] = daily * shape[h] / shape_sum;
            }
        }
        // Rescale the month so its realized mean is the target exactly.
        let target_total = spec.monthly_ghi_kwh_m2_day[m] * days as f64;
        let actual_total: f64 = ghi[month_start..month_start + month_hours].iter().sum();
        if actual_total > 0.0 {
            let f = target_total / actual_total;
            for g in &mut ghi[month_start..month_start + month_hours] {
                *g *= f;
            }
        }

        // Wind: Weibull draws rescaled to the monthly mean.
        let target_mean = spec.monthly_wind_m_s[m];
        if target_mean > 0.0 {
            let params = WeibullParams::new(
                spec.wind_shape_k,
                target_mean / gamma(1.0 + 1.0 / spec.wind_shape_k),
            )?;
            for h in 0..month_hours {
                wind[month_start + h] = params.quantile(wind_rng.gen::<f64>());
            }
            let actual: f64 =
                wind[month_start..month_start + month_hours].iter().sum::<f64>() / month_hours as f64;
            if actual > 0.0 {
                let f = target_mean / actual;
                for v in &mut wind[month_start..month_start + month_hours] {
                    *v *= f;
                }
            }
        }

        // Temperature: deterministic diurnal swing around the monthly mean.
        for h in 0..month_hours {
            let hour_of_day = h % 24;
            let swing = 3.0 * (std::f64::consts::TAU * (hour_of_day as f64 - 14.0) / 24.0).cos();
            temp[month_start + h] = spec.monthly_temp_c[m] + swing;
        }

        day0 += days;
    }

    ResourceYear::new(ghi, wind, temp, spec.anemometer_height, spec.air_density)
}
