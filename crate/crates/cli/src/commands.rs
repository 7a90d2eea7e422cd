//! Subcommand implementations and report emission.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use microgrid_core::dispatch::{
    simulate_year, write_trace_csv, SimulationResult, SystemConfiguration,
};
use microgrid_core::economics::{npc_from_cashflows, EconomicSummary};
use microgrid_core::error::{Error, Result};
use microgrid_core::optimizer::{
    enumerate, optimize_configs, sample_space, sensitivity_with_configs, write_ranked_csv,
    write_sensitivity_csv, write_utilization_csv, RankedResult,
};

use crate::config::RunConfig;

/// Hard cap on configurations evaluated in one run; larger spaces must use
/// `--sample` or `--coarse`.
const MAX_EVALUATIONS: u128 = 2_000_000;

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    config_sha256: String,
}

fn write_manifest(config: &RunConfig, command: &str, out_dir: &Path) -> Result<()> {
    let toml_text = config.to_toml()?;
    let mut hasher = Sha256::new();
    hasher.update(toml_text.as_bytes());
    let manifest = Manifest {
        command,
        version: env!("CARGO_PKG_VERSION"),
        seed: config.seed,
        config_sha256: format!("{:x}", hasher.finalize()),
    };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Config(format!("serialize manifest: {e}")))?;
    fs::write(out_dir.join("manifest.json"), json + "\n")?;
    // The effective configuration itself, for exact reruns.
    fs::write(out_dir.join("config.toml"), toml_text)?;
    Ok(())
}

fn ensure_out_dir(config: &RunConfig) -> Result<std::path::PathBuf> {
    let dir = config.output_dir.clone();
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

#[derive(Serialize)]
struct BalanceCheck {
    status: &'static str,
    worst_abs_residual_kwh: f64,
}

#[derive(Serialize)]
struct SimulationReport<'a> {
    configuration: &'a SystemConfiguration,
    simulation: &'a SimulationResult,
    economics: &'a EconomicSummary,
    energy_balance: BalanceCheck,
}

pub fn cmd_simulate(config: &RunConfig, trace: bool) -> Result<()> {
    let out_dir = ensure_out_dir(config)?;
    let inputs = config.simulation_inputs()?;
    let system = config.simulate_configuration();

    let mut sim = simulate_year(&system, &inputs, true)?;
    let economics = npc_from_cashflows(&system, &sim, &inputs.library, &config.economics())?;

    let records = sim.records.take().expect("records requested");
    let worst = records
        .iter()
        .map(|r| r.energy_balance_residual_kwh().abs())
        .fold(0.0f64, f64::max);
    let balance = BalanceCheck {
        status: if worst < 1e-6 { "PASS" } else { "FAIL" },
        worst_abs_residual_kwh: worst,
    };
    let status = balance.status;

    let report = SimulationReport {
        configuration: &system,
        simulation: &sim,
        economics: &economics,
        energy_balance: balance,
    };
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Config(format!("serialize report: {e}")))?;
    fs::write(out_dir.join("report.json"), json + "\n")?;
    if trace {
        fs::write(out_dir.join("trace.csv"), write_trace_csv(&records))?;
    }
    write_manifest(config, "simulate", &out_dir)?;

    println!("simulated one year: {}", describe(&system));
    println!(
        "  production   pv {:.1} MWh, wind {:.1} MWh, generators {:.1} MWh",
        sim.pv_kwh / 1000.0,
        sim.wind_kwh / 1000.0,
        sim.gen_kwh.iter().sum::<f64>() / 1000.0
    );
    println!(
        "  load         {:.1} MWh demanded, {:.1} MWh served, {:.1} MWh unmet",
        sim.load_kwh / 1000.0,
        sim.load_served_kwh / 1000.0,
        sim.unmet_load_kwh / 1000.0
    );
    println!(
        "  excess       {:.1} MWh ({:.1} MWh diverted to water heating, {:.1} MWh dumped)",
        sim.excess_total_kwh / 1000.0,
        sim.excess_diverted_kwh / 1000.0,
        sim.excess_dumped_kwh / 1000.0
    );
    println!(
        "  renewables   {:.1}% of production; fuel {:.0} L; CO2 {:.0} kg/yr",
        sim.renewable_fraction * 100.0,
        sim.fuel_total_l,
        economics.co2_kg_yr
    );
    println!(
        "  economics    NPC ${:.0}, annualized ${:.0}/yr, COE ${:.4}/kWh",
        economics.npc, economics.annualized, economics.coe
    );
    println!("energy balance self-check: {status}");
    println!("report written to {}", out_dir.join("report.json").display());
    Ok(())
}

fn configurations_to_evaluate(
    config: &RunConfig,
    sample: Option<usize>,
    coarse: bool,
) -> Result<Vec<SystemConfiguration>> {
    let mut space = config.search_space()?;
    if coarse {
        space = space.coarse();
    }
    let cardinality = space.cardinality();
    println!("search space: {cardinality} configurations");
    match sample {
        Some(n) => {
            let configs = sample_space(&space, n, config.seed)?;
            println!("evaluating a {}-point latin-hypercube sample", configs.len());
            Ok(configs)
        }
        None => {
            if cardinality > MAX_EVALUATIONS {
                return Err(Error::Config(format!(
                    "search space has {cardinality} configurations (limit {MAX_EVALUATIONS} \
                     for exhaustive runs); use --sample N or --coarse"
                )));
            }
            Ok(enumerate(&space)?.collect())
        }
    }
}

pub fn cmd_optimize(config: &RunConfig, sample: Option<usize>, coarse: bool) -> Result<()> {
    let out_dir = ensure_out_dir(config)?;
    let inputs = config.simulation_inputs()?;
    let configs = configurations_to_evaluate(config, sample, coarse)?;
    let ranked = optimize_configs(configs, &inputs, &config.economics(), &config.feasibility())?;

    let feasible = ranked.iter().filter(|r| r.feasible).count();
    fs::write(
        out_dir.join("ranked.csv"),
        write_ranked_csv(&ranked, config.battery.batteries_per_string),
    )?;
    fs::write(
        out_dir.join("generator_utilization.csv"),
        write_utilization_csv(&ranked),
    )?;
    write_manifest(config, "optimize", &out_dir)?;

    println!("{feasible} feasible of {} evaluated", ranked.len());
    if feasible == 0 && !ranked.is_empty() {
        println!(
            "no configuration kept unmet load within {:.4}; consider raising \
             feasibility.max_unmet_fraction or widening the search space",
            config.feasibility.max_unmet_fraction
        );
    }
    print_top_table(&ranked, config.battery.batteries_per_string);
    println!("results written to {}", out_dir.join("ranked.csv").display());
    Ok(())
}

fn print_top_table(ranked: &[RankedResult], batteries_per_string: u32) {
    println!(
        "{:>4} {:>7} {:>5} {:>6} {:>6} {:>6} {:>6} {:>7} {:<16} {:>8} {:>14} {:>7} {:>9}",
        "rank", "pv_kw", "wind", "gen1", "gen2", "gen3", "batt", "conv_kw", "dispatch", "coe", "npc", "rf_pct", "ee_mwh"
    );
    for r in ranked.iter().filter(|r| r.feasible).take(10) {
        let c = &r.configuration;
        println!(
            "{:>4} {:>7.0} {:>5} {:>6.0} {:>6.0} {:>6.0} {:>6} {:>7.0} {:<16} {:>8.4} {:>14.2} {:>7.2} {:>9.3}",
            r.rank,
            c.pv_kw,
            c.wind_count,
            c.gen_kw[0],
            c.gen_kw[1],
            c.gen_kw[2],
            c.battery_strings * batteries_per_string,
            c.converter_kw,
            c.strategy.name(),
            r.economics.coe,
            r.economics.npc,
            r.simulation.renewable_fraction * 100.0,
            r.simulation.excess_total_kwh / 1000.0,
        );
    }
}

pub fn cmd_sensitivity(config: &RunConfig, sample: Option<usize>, coarse: bool) -> Result<()> {
    let out_dir = ensure_out_dir(config)?;
    let inputs = config.simulation_inputs()?;
    let axes = config.sensitivity_axes();
    let cells = axes.solar.values().len() * axes.wind.values().len();
    let configs = configurations_to_evaluate(config, sample, coarse)?;
    if (configs.len() as u128) * (cells as u128) > MAX_EVALUATIONS {
        return Err(Error::Config(format!(
            "{} configurations × {cells} sensitivity cells exceeds the evaluation limit; \
             use --sample N or --coarse",
            configs.len()
        )));
    }
    let map = sensitivity_with_configs(&configs, &inputs, &config.economics(), &config.feasibility(), &axes)?;
    fs::write(out_dir.join("sensitivity.csv"), write_sensitivity_csv(&map))?;
    write_manifest(config, "sensitivity", &out_dir)?;

    println!("sensitivity map over {cells} cells:");
    for cell in &map {
        println!(
            "  solar {:>4.1} kWh/m2/day  wind {:>4.1} m/s  ->  {}",
            cell.solar_kwh_m2_day, cell.wind_m_s, cell.winner
        );
    }
    println!("map written to {}", out_dir.join("sensitivity.csv").display());
    Ok(())
}

pub fn cmd_dump_defaults() -> Result<()> {
    print!("{}", RunConfig::defaults().to_toml()?);
    Ok(())
}

fn describe(c: &SystemConfiguration) -> String {
    format!(
        "pv {:.0} kW, {} turbines, generators {:.0}/{:.0}/{:.0} kW, {} battery strings, converter {:.0} kW, {}",
        c.pv_kw,
        c.wind_count,
        c.gen_kw[0],
        c.gen_kw[1],
        c.gen_kw[2],
        c.battery_strings,
        c.converter_kw,
        c.strategy.name()
    )
}
