//! Sizing search: enumeration, ranking by net present cost, and two-axis
//! resource sensitivity sweeps.
//!
//! Configurations are evaluated independently (in parallel via rayon) and
//! merged in enumeration order, so rankings are identical regardless of
//! worker count. Feasible results sort by NPC ascending with ties broken by
//! lower CO₂ and then enumeration order.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispatch::{
    simulate_year, DispatchStrategy, SimulationInputs, SimulationResult, SystemConfiguration,
};
use crate::economics::{npc_from_cashflows, EconomicParams, EconomicSummary};
use crate::error::{Error, Result};

/// Inclusive numeric axis `min..=max` in increments of `step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl AxisRange {
    pub fn validate(&self, name: &str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.step.is_finite()) {
            return Err(Error::Config(format!("{name}: axis bounds must be finite")));
        }
        if self.min > self.max {
            return Err(Error::Config(format!(
                "{name}: min {} exceeds max {}",
                self.min, self.max
            )));
        }
        if self.step <= 0.0 {
            return Err(Error::Config(format!("{name}: step must be > 0, got {}", self.step)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.min + i as f64 * self.step).collect()
    }

    /// Same axis with the step doubled (coarse mode).
    pub fn coarse(&self) -> Self {
        Self {
            step: self.step * 2.0,
            ..*self
        }
    }
}

/// Inclusive integer axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRange {
    pub min: u32,
    pub max: u32,
}

impl CountRange {
    pub fn validate(&self, name: &str) -> Result<()> {
        if self.min > self.max {
            return Err(Error::Config(format!(
                "{name}: min {} exceeds max {}",
                self.min, self.max
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<u32> {
        (self.min..=self.max).collect()
    }
}

/// The sizing search space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub pv_kw: AxisRange,
    pub wind_count: CountRange,
    pub gen_kw: [AxisRange; 3],
    pub battery_strings: CountRange,
    pub converter_kw: AxisRange,
    pub strategies: Vec<DispatchStrategy>,
}

impl SearchSpace {
    pub fn validate(&self) -> Result<()> {
        self.pv_kw.validate("pv_kw")?;
        self.wind_count.validate("wind_count")?;
        for (i, g) in self.gen_kw.iter().enumerate() {
            g.validate(&format!("gen_kw[{i}]"))?;
        }
        self.battery_strings.validate("battery_strings")?;
        self.converter_kw.validate("converter_kw")?;
        if self.strategies.is_empty() {
            return Err(Error::Config("at least one dispatch strategy required".to_string()));
        }
        Ok(())
    }

    /// Number of configurations the space contains.
    pub fn cardinality(&self) -> u128 {
        let axes = [
            self.pv_kw.values().len(),
            self.wind_count.values().len(),
            self.gen_kw[0].values().len(),
            self.gen_kw[1].values().len(),
            self.gen_kw[2].values().len(),
            self.battery_strings.values().len(),
            self.converter_kw.values().len(),
            self.strategies.len(),
        ];
        axes.iter().map(|&n| n as u128).product()
    }

    /// Space with every continuous axis step doubled.
    pub fn coarse(&self) -> Self {
        Self {
            pv_kw: self.pv_kw.coarse(),
            gen_kw: [self.gen_kw[0].coarse(), self.gen_kw[1].coarse(), self.gen_kw[2].coarse()],
            converter_kw: self.converter_kw.coarse(),
            ..self.clone()
        }
    }
}

/// Enumerates the space in deterministic lexicographic order
/// (pv, wind, gen1, gen2, gen3, battery, converter, strategy).
pub fn enumerate(space: &SearchSpace) -> Result<impl Iterator<Item = SystemConfiguration>> {
    space.validate()?;
    let total = space.cardinality();
    if total > usize::MAX as u128 {
        return Err(Error::Config(format!("search space of {total} configurations is too large")));
    }
    let pv = space.pv_kw.values();
    let wind = space.wind_count.values();
    let g1 = space.gen_kw[0].values();
    let g2 = space.gen_kw[1].values();
    let g3 = space.gen_kw[2].values();
    let batt = space.battery_strings.values();
    let conv = space.converter_kw.values();
    let strategies = space.strategies.clone();

    Ok((0..total as usize).map(move |flat| {
        // Decompose the flat index with the strategy axis fastest.
        let mut idx = flat;
        let strategy = strategies[idx % strategies.len()];
        idx /= strategies.len();
        let converter_kw = conv[idx % conv.len()];
        idx /= conv.len();
        let strings = batt[idx % batt.len()];
        idx /= batt.len();
        let gen3 = g3[idx % g3.len()];
        idx /= g3.len();
        let gen2 = g2[idx % g2.len()];
        idx /= g2.len();
        let gen1 = g1[idx % g1.len()];
        idx /= g1.len();
        let wind_count = wind[idx % wind.len()];
        idx /= wind.len();
        let pv_kw = pv[idx];
        SystemConfiguration {
            pv_kw,
            wind_count,
            gen_kw: [gen1, gen2, gen3],
            battery_strings: strings,
            converter_kw,
            strategy,
        }
    }))
}

/// Feasibility screen applied to every simulated configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    /// Highest tolerated unmet fraction of annual demand.
    pub max_unmet_fraction: f64,
}

impl Default for Feasibility {
    fn default() -> Self {
        Self {
            max_unmet_fraction: 0.0,
        }
    }
}

/// One evaluated configuration in the ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedResult {
    /// 1-based position; feasible entries first, ordered by NPC.
    pub rank: usize,
    pub configuration: SystemConfiguration,
    pub simulation: SimulationResult,
    pub economics: EconomicSummary,
    pub feasible: bool,
    /// Why the entry is infeasible (empty when feasible).
    pub reason: String,
}

fn evaluate(
    index: usize,
    config: SystemConfiguration,
    inputs: &SimulationInputs,
    econ: &EconomicParams,
    feasibility: &Feasibility,
) -> Result<(usize, RankedResult)> {
    let sim = simulate_year(&config, inputs, false)?;
    let economics = npc_from_cashflows(&config, &sim, &inputs.library, econ)?;
    let unmet_fraction = if sim.load_kwh > 0.0 {
        sim.unmet_load_kwh / sim.load_kwh
    } else {
        0.0
    };
    let feasible = unmet_fraction <= feasibility.max_unmet_fraction + 1e-12;
    let reason = if feasible {
        String::new()
    } else {
        format!(
            "unmet load fraction {:.4} exceeds limit {:.4}",
            unmet_fraction, feasibility.max_unmet_fraction
        )
    };
    Ok((
        index,
        RankedResult {
            rank: 0,
            configuration: config,
            simulation: sim,
            economics,
            feasible,
            reason,
        },
    ))
}

fn rank(mut evaluated: Vec<(usize, RankedResult)>) -> Vec<RankedResult> {
    // NPC ascending among feasible entries, ties by CO₂ then enumeration
    // order; infeasible entries trail in enumeration order.
    evaluated.sort_by(|(ia, a), (ib, b)| {
        b.feasible
            .cmp(&a.feasible)
            .then_with(|| {
                if a.feasible && b.feasible {
                    a.economics
                        .npc
                        .total_cmp(&b.economics.npc)
                        .then(a.economics.co2_kg_yr.total_cmp(&b.economics.co2_kg_yr))
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .then(ia.cmp(ib))
    });
    evaluated
        .into_iter()
        .enumerate()
        .map(|(i, (_, mut r))| {
            r.rank = i + 1;
            r
        })
        .collect()
}

/// Simulates and prices every configuration in the space, ranked by NPC.
pub fn optimize(
    space: &SearchSpace,
    inputs: &SimulationInputs,
    econ: &EconomicParams,
    feasibility: &Feasibility,
) -> Result<Vec<RankedResult>> {
    let configs: Vec<SystemConfiguration> = enumerate(space)?.collect();
    optimize_configs(configs, inputs, econ, feasibility)
}

/// Evaluates an explicit configuration list (enumeration order = list order).
pub fn optimize_configs(
    configs: Vec<SystemConfiguration>,
    inputs: &SimulationInputs,
    econ: &EconomicParams,
    feasibility: &Feasibility,
) -> Result<Vec<RankedResult>> {
    let evaluated: Result<Vec<(usize, RankedResult)>> = configs
        .into_par_iter()
        .enumerate()
        .map(|(i, config)| evaluate(i, config, inputs, econ, feasibility))
        .collect();
    Ok(rank(evaluated?))
}

/// Deterministic Latin-hypercube subsample of the space.
///
/// Each axis is stratified into `samples` bins; one configuration is drawn
/// per bin with a seeded permutation per axis. Duplicates collapse, so the
/// result may hold fewer than `samples` entries.
pub fn sample_space(space: &SearchSpace, samples: usize, seed: u64) -> Result<Vec<SystemConfiguration>> {
    space.validate()?;
    if samples == 0 {
        return Err(Error::Config("sample count must be ≥ 1".to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = samples;

    fn axis_picks<T: Clone>(values: &[T], n: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        order
            .into_iter()
            .map(|stratum| {
                let u = (stratum as f64 + rng.gen::<f64>()) / n as f64;
                let idx = ((u * values.len() as f64) as usize).min(values.len() - 1);
                values[idx].clone()
            })
            .collect()
    }

    let pv = axis_picks(&space.pv_kw.values(), n, &mut rng);
    let wind = axis_picks(&space.wind_count.values(), n, &mut rng);
    let g1 = axis_picks(&space.gen_kw[0].values(), n, &mut rng);
    let g2 = axis_picks(&space.gen_kw[1].values(), n, &mut rng);
    let g3 = axis_picks(&space.gen_kw[2].values(), n, &mut rng);
    let batt = axis_picks(&space.battery_strings.values(), n, &mut rng);
    let conv = axis_picks(&space.converter_kw.values(), n, &mut rng);
    let strategies = axis_picks(&space.strategies, n, &mut rng);

    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let config = SystemConfiguration {
            pv_kw: pv[i],
            wind_count: wind[i],
            gen_kw: [g1[i], g2[i], g3[i]],
            battery_strings: batt[i],
            converter_kw: conv[i],
            strategy: strategies[i],
        };
        let key = format!(
            "{:.3}|{}|{:.3}|{:.3}|{:.3}|{}|{:.3}|{}",
            config.pv_kw,
            config.wind_count,
            config.gen_kw[0],
            config.gen_kw[1],
            config.gen_kw[2],
            config.battery_strings,
            config.converter_kw,
            config.strategy.name()
        );
        if seen.insert(key) {
            out.push(config);
        }
    }
    Ok(out)
}

/// Architecture label: which component families the configuration carries.
pub fn architecture_label(config: &SystemConfiguration) -> String {
    let mut parts = Vec::new();
    if config.pv_kw > 0.0 {
        parts.push("pv");
    }
    if config.wind_count > 0 {
        parts.push("wind");
    }
    if config.gen_kw.iter().any(|&g| g > 0.0) {
        parts.push("diesel");
    }
    if config.battery_strings > 0 {
        parts.push("battery");
    }
    if parts.is_empty() {
        "none".to_string()
    } else {
        parts.join("-")
    }
}

/// Axes of the sensitivity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityAxes {
    /// Annual mean insolation axis, kWh/m²/day.
    pub solar: AxisRange,
    /// Annual mean wind-speed axis, m/s.
    pub wind: AxisRange,
}

/// One cell of the sensitivity map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityCell {
    pub solar_kwh_m2_day: f64,
    pub wind_m_s: f64,
    /// Winning architecture, or "none" when no configuration is feasible.
    pub winner: String,
}

/// Re-optimizes on resources rescaled to each grid cell's annual means and
/// records the winning architecture class.
pub fn sensitivity(
    space: &SearchSpace,
    inputs: &SimulationInputs,
    econ: &EconomicParams,
    feasibility: &Feasibility,
    axes: &SensitivityAxes,
) -> Result<Vec<SensitivityCell>> {
    let configs: Vec<SystemConfiguration> = enumerate(space)?.collect();
    sensitivity_with_configs(&configs, inputs, econ, feasibility, axes)
}

/// [`sensitivity`] over an explicit candidate list (for sampled or coarse
/// searches).
pub fn sensitivity_with_configs(
    configs: &[SystemConfiguration],
    inputs: &SimulationInputs,
    econ: &EconomicParams,
    feasibility: &Feasibility,
    axes: &SensitivityAxes,
) -> Result<Vec<SensitivityCell>> {
    axes.solar.validate("sensitivity solar axis")?;
    axes.wind.validate("sensitivity wind axis")?;
    let base_solar = inputs.resources.annual_mean_ghi_kwh_m2_day();
    let base_wind = inputs.resources.annual_mean_wind_m_s();
    if base_solar <= 0.0 || base_wind <= 0.0 {
        return Err(Error::Config(
            "sensitivity requires nonzero base solar and wind resources".to_string(),
        ));
    }

    let mut cells = Vec::new();
    for solar in axes.solar.values() {
        for wind in axes.wind.values() {
            let scaled = inputs
                .resources
                .scaled(solar / base_solar, wind / base_wind);
            let cell_inputs = SimulationInputs {
                resources: scaled,
                ..inputs.clone()
            };
            let ranked = optimize_configs(configs.to_vec(), &cell_inputs, econ, feasibility)?;
            let winner = ranked
                .iter()
                .find(|r| r.feasible)
                .map(|r| architecture_label(&r.configuration))
                .unwrap_or_else(|| "none".to_string());
            cells.push(SensitivityCell {
                solar_kwh_m2_day: solar,
                wind_m_s: wind,
                winner,
            });
        }
    }
    Ok(cells)
}

/// Ranked-results CSV with one row per feasible configuration;
/// `batteries_per_string` converts strings to unit counts.
pub fn write_ranked_csv(results: &[RankedResult], batteries_per_string: u32) -> String {
    let mut s = String::new();
    s.push_str("rank,pv_kw,wind_n,gen1_kw,gen2_kw,gen3_kw,batteries,conv_kw,dispatch,coe,npc,rf_pct,ee_mwh\n");
    for r in results.iter().filter(|r| r.feasible) {
        let cfg = &r.configuration;
        let batteries = cfg.battery_strings * batteries_per_string;
        let _ = writeln!(
            s,
            "{},{:.0},{},{:.0},{:.0},{:.0},{},{:.0},{},{:.4},{:.2},{:.2},{:.3}",
            r.rank,
            cfg.pv_kw,
            cfg.wind_count,
            cfg.gen_kw[0],
            cfg.gen_kw[1],
            cfg.gen_kw[2],
            batteries,
            cfg.converter_kw,
            cfg.strategy.name(),
            r.economics.coe,
            r.economics.npc,
            r.simulation.renewable_fraction * 100.0,
            r.simulation.excess_total_kwh / 1000.0,
        );
    }
    s
}

/// Generator-utilization CSV (run hours, contribution shares, CO₂).
pub fn write_utilization_csv(results: &[RankedResult]) -> String {
    let mut s = String::new();
    s.push_str("rank,gen1_hours,gen2_hours,gen3_hours,pv_pct,wind_pct,gen1_pct,gen2_pct,gen3_pct,co2_kg_yr\n");
    for r in results.iter().filter(|r| r.feasible) {
        let sim = &r.simulation;
        let production = sim.production_kwh();
        let pct = |x: f64| if production > 0.0 { 100.0 * x / production } else { 0.0 };
        let _ = writeln!(
            s,
            "{},{:.0},{:.0},{:.0},{:.2},{:.2},{:.2},{:.2},{:.2},{:.0}",
            r.rank,
            sim.gen_hours[0],
            sim.gen_hours[1],
            sim.gen_hours[2],
            pct(sim.pv_kwh),
            pct(sim.wind_kwh),
            pct(sim.gen_kwh[0]),
            pct(sim.gen_kwh[1]),
            pct(sim.gen_kwh[2]),
            r.economics.co2_kg_yr,
        );
    }
    s
}

/// Sensitivity-map CSV.
pub fn write_sensitivity_csv(cells: &[SensitivityCell]) -> String {
    let mut s = String::new();
    s.push_str("solar,wind,winner_label\n");
    for c in cells {
        let _ = writeln!(s, "{:.1},{:.1},{}", c.solar_kwh_m2_day, c.wind_m_s, c.winner);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispatch::test_fixtures::simulation_inputs;

    fn econ() -> EconomicParams {
        EconomicParams {
            nominal_interest: 0.08,
            inflation: 0.04,
            project_lifetime_yr: 25,
            salvage_credit: true,
        }
    }

    fn point_axis(v: f64) -> AxisRange {
        AxisRange { min: v, max: v, step: 1.0 }
    }

    fn toy_space() -> SearchSpace {
        SearchSpace {
            pv_kw: AxisRange { min: 0.0, max: 600.0, step: 300.0 },
            wind_count: CountRange { min: 0, max: 4 },
            gen_kw: [point_axis(100.0), point_axis(300.0), point_axis(500.0)],
            battery_strings: CountRange { min: 5, max: 5 },
            converter_kw: point_axis(500.0),
            strategies: vec![DispatchStrategy::LoadFollowing, DispatchStrategy::CycleCharging],
        }
    }

    #[test]
    fn enumeration_counts() {
        let single = SearchSpace {
            pv_kw: point_axis(100.0),
            wind_count: CountRange { min: 2, max: 2 },
            gen_kw: [point_axis(100.0), point_axis(300.0), point_axis(500.0)],
            battery_strings: CountRange { min: 1, max: 1 },
            converter_kw: point_axis(500.0),
            strategies: vec![DispatchStrategy::LoadFollowing],
        };
        assert_eq!(single.cardinality(), 1);
        assert_eq!(enumerate(&single).unwrap().count(), 1);

        let small = SearchSpace {
            pv_kw: AxisRange { min: 0.0, max: 100.0, step: 50.0 },
            wind_count: CountRange { min: 0, max: 1 },
            ..single.clone()
        };
        assert_eq!(small.cardinality(), 6);
        assert_eq!(enumerate(&small).unwrap().count(), 6);

        // The full-study shape: 21 × 9 × 11³ × 11 × 11 × 4.
        let full = SearchSpace {
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
        };
        assert_eq!(
            full.cardinality(),
            21u128 * 9 * 11 * 11 * 11 * 11 * 11 * 4
        );
    }

    #[test]
    fn empty_space_rejected() {
        let mut space = toy_space();
        space.strategies.clear();
        assert!(enumerate(&space).is_err());
        space = toy_space();
        space.pv_kw = AxisRange { min: 100.0, max: 0.0, step: 50.0 };
        assert!(space.validate().is_err());
    }

    #[test]
    fn ranking_matches_brute_force() {
        let inputs = simulation_inputs(1);
        let space = toy_space();
        let feas = Feasibility { max_unmet_fraction: 1.0 };
        let ranked = optimize(&space, &inputs, &econ(), &feas).unwrap();
        assert_eq!(ranked.len() as u128, space.cardinality());

        // Independent exhaustive re-evaluation, one config at a time.
        let mut best = f64::INFINITY;
        for config in enumerate(&space).unwrap() {
            let sim = simulate_year(&config, &inputs, false).unwrap();
            let summary = npc_from_cashflows(&config, &sim, &inputs.library, &econ()).unwrap();
            best = best.min(summary.npc);
        }
        assert!(
            (ranked[0].economics.npc - best).abs() < 1e-6,
            "rank-1 NPC {} vs brute force {best}",
            ranked[0].economics.npc
        );

        // Total order among feasible entries.
        for pair in ranked.windows(2) {
            if pair[1].feasible {
                assert!(pair[0].feasible);
                assert!(
                    pair[0].economics.npc <= pair[1].economics.npc + 1e-9,
                    "ranking out of order"
                );
            }
            assert_eq!(pair[1].rank, pair[0].rank + 1);
        }
    }

    #[test]
    fn wind_free_dominates_on_calm_site() {
        // Without wind resource, a wind-bearing configuration never outranks
        // its wind-free twin.
        let mut inputs = simulation_inputs(2);
        for v in &mut inputs.resources.wind_speed {
            *v = 0.0;
        }
        let space = SearchSpace {
            wind_count: CountRange { min: 0, max: 2 },
            ..toy_space()
        };
        let feas = Feasibility { max_unmet_fraction: 1.0 };
        let ranked = optimize(&space, &inputs, &econ(), &feas).unwrap();
        for r in &ranked {
            if r.configuration.wind_count == 0 {
                continue;
            }
            let twin_rank = ranked
                .iter()
                .find(|t| {
                    t.configuration.wind_count == 0
                        && t.configuration.pv_kw == r.configuration.pv_kw
                        && t.configuration.gen_kw == r.configuration.gen_kw
                        && t.configuration.battery_strings == r.configuration.battery_strings
                        && t.configuration.converter_kw == r.configuration.converter_kw
                        && t.configuration.strategy == r.configuration.strategy
                })
                .map(|t| t.rank)
                .unwrap();
            assert!(twin_rank < r.rank, "turbines added cost but no energy");
        }
    }

    #[test]
    fn subspace_minimum_dominates() {
        let inputs = simulation_inputs(3);
        let feas = Feasibility { max_unmet_fraction: 1.0 };
        let space = toy_space();
        let sub = SearchSpace {
            wind_count: CountRange { min: 0, max: 1 },
            ..toy_space()
        };
        let full = optimize(&space, &inputs, &econ(), &feas).unwrap();
        let narrow = optimize(&sub, &inputs, &econ(), &feas).unwrap();
        assert!(narrow[0].economics.npc >= full[0].economics.npc - 1e-9);
    }

    #[test]
    fn sampling_is_deterministic_and_within_space() {
        let space = toy_space();
        let a = sample_space(&space, 20, 7).unwrap();
        let b = sample_space(&space, 20, 7).unwrap();
        assert_eq!(a, b);
        let pv_values = space.pv_kw.values();
        for cfg in &a {
            assert!(pv_values.contains(&cfg.pv_kw));
            assert!(cfg.wind_count <= 4);
        }
        let c = sample_space(&space, 20, 8).unwrap();
        assert_ne!(a, c, "different seeds should give different samples");
    }

    #[test]
    fn parallel_and_serial_rankings_agree() {
        let inputs = simulation_inputs(4);
        let space = toy_space();
        let feas = Feasibility { max_unmet_fraction: 1.0 };
        let parallel = optimize(&space, &inputs, &econ(), &feas).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = pool.install(|| optimize(&space, &inputs, &econ(), &feas)).unwrap();
        assert_eq!(parallel, serial);
    }

    #[test]
    fn single_cell_sensitivity_matches_plain_optimize() {
        let inputs = simulation_inputs(5);
        let space = toy_space();
        let feas = Feasibility { max_unmet_fraction: 1.0 };
        let base_solar = inputs.resources.annual_mean_ghi_kwh_m2_day();
        let base_wind = inputs.resources.annual_mean_wind_m_s();
        let axes = SensitivityAxes {
            solar: point_axis(base_solar),
            wind: point_axis(base_wind),
        };
        let cells = sensitivity(&space, &inputs, &econ(), &feas, &axes).unwrap();
        assert_eq!(cells.len(), 1);
        let ranked = optimize(&space, &inputs, &econ(), &feas).unwrap();
        let expected = architecture_label(&ranked[0].configuration);
        assert_eq!(cells[0].winner, expected);
    }

    #[test]
    fn architecture_labels() {
        let mut cfg = SystemConfiguration {
            pv_kw: 600.0,
            wind_count: 4,
            gen_kw: [100.0, 300.0, 500.0],
            battery_strings: 5,
            converter_kw: 500.0,
            strategy: DispatchStrategy::Combined,
        };
        assert_eq!(architecture_label(&cfg), "pv-wind-diesel-battery");
        cfg.pv_kw = 0.0;
        cfg.wind_count = 0;
        cfg.battery_strings = 0;
        assert_eq!(architecture_label(&cfg), "diesel");
        cfg.gen_kw = [0.0; 3];
        assert_eq!(architecture_label(&cfg), "none");
    }

    #[test]
    fn csv_writers_have_expected_shape() {
        let inputs = simulation_inputs(6);
        let space = SearchSpace {
            pv_kw: point_axis(600.0),
            wind_count: CountRange { min: 4, max: 4 },
            gen_kw: [point_axis(100.0), point_axis(300.0), point_axis(500.0)],
            battery_strings: CountRange { min: 5, max: 5 },
            converter_kw: point_axis(500.0),
            strategies: vec![DispatchStrategy::Combined],
        };
        let feas = Feasibility { max_unmet_fraction: 1.0 };
        let ranked = optimize(&space, &inputs, &econ(), &feas).unwrap();
        let csv = write_ranked_csv(&ranked, 40);
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.lines().nth(1).unwrap().starts_with("1,600,4,100,300,500,200,500,combined,"));
        let util = write_utilization_csv(&ranked);
        assert_eq!(util.lines().count(), 2);
    }
}
