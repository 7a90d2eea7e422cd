//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured values (visible with `--nocapture`).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use microgrid_core::components::FuelSpec;
use microgrid_core::dispatch::{
    simulate_year, DispatchStrategy, SimulationInputs, SystemConfiguration,
};
use microgrid_core::economics::{co2_mass_kg, crf, npc_from_cashflows, real_interest};
use microgrid_core::load::synthesize_load;
use microgrid_core::optimizer::{
    enumerate, optimize, AxisRange, CountRange, Feasibility, SearchSpace,
};
use microgrid_core::resource::{fit_weibull, synthesize_resource_year, weibull_cdf, WeibullParams};
use microgrid_core::scenario;
use microgrid_core::thermal::heater_energy_kwh;

fn scenario_inputs(seed: u64) -> SimulationInputs {
    SimulationInputs {
        library: scenario::default_library(),
        settings: scenario::default_settings(),
        resources: synthesize_resource_year(&scenario::default_synthesis(seed)).unwrap(),
        load: synthesize_load(&scenario::default_load_spec(seed)).unwrap(),
        hot_water: scenario::default_hot_water(),
    }
}

#[test]
fn c1_formula_oracles() {
    let crf_value = crf(0.06, 25);
    assert!((crf_value - 0.078227).abs() < 1e-6, "crf = {crf_value}");

    let i = real_interest(0.08, 0.03).unwrap();
    assert!((i - 0.048544).abs() < 1e-6, "real interest = {i}");

    let p = WeibullParams::new(2.0, 6.0).unwrap();
    let cdf_at_scale = weibull_cdf(6.0, &p).unwrap();
    assert!((cdf_at_scale - 0.632121).abs() < 1e-6, "cdf(c) = {cdf_at_scale}");

    let battery = scenario::default_library().battery;
    let product = battery.charge_efficiency() * battery.discharge_efficiency();
    assert!((product - 0.96).abs() < 1e-12, "√rt identity = {product}");

    let heat = heater_energy_kwh(1000.0, 40.0, 30.0, 4.18).unwrap();
    assert!((heat - 11.611).abs() < 1e-3, "heater energy = {heat}");

    println!(
        "ACCEPTANCE 1 PASS: crf={crf_value:.6} real_i={i:.6} cdf(c)={cdf_at_scale:.6} \
         eff_product={product:.12} heat={heat:.4} kWh"
    );
}

#[test]
fn c2_weibull_fit_round_trip() {
    let truth = WeibullParams::new(2.0, 6.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let samples: Vec<f64> = (0..100_000).map(|_| truth.quantile(rng.gen())).collect();
    let fitted = fit_weibull(&samples).unwrap();
    let k_err = (fitted.k - 2.0).abs() / 2.0;
    let c_err = (fitted.c - 6.0).abs() / 6.0;
    assert!(k_err < 0.02, "k = {} ({k_err:.4} rel)", fitted.k);
    assert!(c_err < 0.02, "c = {} ({c_err:.4} rel)", fitted.c);
    println!(
        "ACCEPTANCE 2 PASS: fitted k={:.4} (err {:.2}%), c={:.4} (err {:.2}%)",
        fitted.k,
        100.0 * k_err,
        fitted.c,
        100.0 * c_err
    );
}

#[test]
fn c3_energy_balance_and_soc_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked_hours = 0usize;
    let mut worst = 0.0f64;
    for trial in 0..100u64 {
        let inputs = scenario_inputs(trial);
        let config = SystemConfiguration {
            pv_kw: *[0.0, 100.0, 400.0, 600.0, 1000.0].get(rng.gen_range(0..5)).unwrap(),
            wind_count: rng.gen_range(0..=8),
            gen_kw: [
                *[0.0, 100.0, 200.0].get(rng.gen_range(0..3)).unwrap(),
                *[0.0, 300.0, 400.0].get(rng.gen_range(0..3)).unwrap(),
                *[0.0, 500.0].get(rng.gen_range(0..2)).unwrap(),
            ],
            battery_strings: rng.gen_range(0..=10),
            converter_kw: *[0.0, 200.0, 500.0, 1000.0].get(rng.gen_range(0..4)).unwrap(),
            strategy: DispatchStrategy::ALL[rng.gen_range(0..4)],
        };
        let sim = simulate_year(&config, &inputs, true).unwrap();
        let min_soc = inputs.library.battery.min_soc;
        for record in sim.records.as_ref().unwrap() {
            let residual = record.energy_balance_residual_kwh().abs();
            worst = worst.max(residual);
            assert!(
                residual < 1e-6,
                "trial {trial} hour {}: residual {residual}",
                record.hour
            );
            if config.battery_strings > 0 {
                assert!(
                    record.soc_end >= min_soc - 1e-9 && record.soc_end <= 1.0 + 1e-9,
                    "trial {trial} hour {}: soc {}",
                    record.hour,
                    record.soc_end
                );
            }
            checked_hours += 1;
        }
    }
    assert_eq!(checked_hours, 876_000);
    println!("ACCEPTANCE 3 PASS: {checked_hours} hourly records balanced (worst residual {worst:.2e} kWh)");
}

#[test]
fn c4_diversion_demand_reproduction() {
    // 250 guests × 200 L/day × 365 days at ΔT = 19.5 °C.
    let mass_kg = 250.0 * 200.0 * 365.0;
    let demand_mwh = heater_energy_kwh(mass_kg, 19.5, 0.0, 4.18).unwrap() / 1000.0;
    let err = (demand_mwh - 413.2).abs() / 413.2;
    assert!(err < 0.005, "demand {demand_mwh} MWh ({err:.4} rel)");
    println!("ACCEPTANCE 4 PASS: annual water-heating demand {demand_mwh:.2} MWh (err {:.3}%)", 100.0 * err);
}

#[test]
fn c5_load_calibration() {
    let profile = synthesize_load(&scenario::default_load_spec(42)).unwrap();
    let mean = profile.daily_mean_kwh();
    let peak = profile.peak_kw();
    assert!((mean - 19_072.0).abs() < 1.0, "daily mean {mean}");
    assert!((peak - 2068.0).abs() < 1.0, "peak {peak}");
    println!("ACCEPTANCE 5 PASS: daily mean {mean:.3} kWh, peak {peak:.3} kW");
}

#[test]
fn c6_optimizer_matches_brute_force() {
    let inputs = scenario_inputs(6);
    // 3 × 3 × 2 × 2 × 2 = 72 ≤ 200 configurations.
    let space = SearchSpace {
        pv_kw: AxisRange { min: 0.0, max: 600.0, step: 300.0 },
        wind_count: CountRange { min: 0, max: 2 },
        gen_kw: [
            AxisRange { min: 100.0, max: 100.0, step: 50.0 },
            AxisRange { min: 300.0, max: 300.0, step: 50.0 },
            AxisRange { min: 450.0, max: 500.0, step: 50.0 },
        ],
        battery_strings: CountRange { min: 4, max: 5 },
        converter_kw: AxisRange { min: 500.0, max: 500.0, step: 100.0 },
        strategies: vec![DispatchStrategy::LoadFollowing, DispatchStrategy::CycleCharging],
    };
    let econ = scenario::default_economics();
    let feas = Feasibility { max_unmet_fraction: 1.0 };
    let ranked = optimize(&space, &inputs, &econ, &feas).unwrap();

    // Independent exhaustive re-evaluation.
    let mut best_npc = f64::INFINITY;
    let mut count = 0;
    for config in enumerate(&space).unwrap() {
        let sim = simulate_year(&config, &inputs, false).unwrap();
        let summary = npc_from_cashflows(&config, &sim, &inputs.library, &econ).unwrap();
        best_npc = best_npc.min(summary.npc);
        count += 1;
    }
    assert!(count <= 200, "reduced space too large: {count}");
    assert!(
        (ranked[0].economics.npc - best_npc).abs() < 1e-6,
        "rank-1 NPC {} vs brute force {best_npc}",
        ranked[0].economics.npc
    );

    // Total order per the tie-break rules.
    for pair in ranked.windows(2) {
        assert_eq!(pair[1].rank, pair[0].rank + 1);
        if pair[0].feasible && pair[1].feasible {
            let a = &pair[0].economics;
            let b = &pair[1].economics;
            assert!(
                a.npc < b.npc + 1e-9 || (a.npc - b.npc).abs() < 1e-9 && a.co2_kg_yr <= b.co2_kg_yr + 1e-9,
                "tie-break violated between ranks {} and {}",
                pair[0].rank,
                pair[1].rank
            );
        }
    }
    println!(
        "ACCEPTANCE 6 PASS: rank-1 NPC {:.2} equals brute-force minimum over {count} configurations",
        ranked[0].economics.npc
    );
}

#[test]
fn c7_reference_scenario_bands() {
    let inputs = scenario_inputs(42);
    let econ = scenario::default_economics();

    let hybrid = scenario::reference_hybrid();
    let sim_h = simulate_year(&hybrid, &inputs, false).unwrap();
    let eco_h = npc_from_cashflows(&hybrid, &sim_h, &inputs.library, &econ).unwrap();

    let diesel = scenario::diesel_baseline();
    let sim_d = simulate_year(&diesel, &inputs, false).unwrap();
    let eco_d = npc_from_cashflows(&diesel, &sim_d, &inputs.library, &econ).unwrap();

    let rf = sim_h.renewable_fraction;
    assert!((0.20..=0.45).contains(&rf), "renewable fraction {rf}");

    let excess_share = sim_h.excess_total_kwh / sim_h.production_kwh();
    assert!(
        (0.05..=0.15).contains(&excess_share),
        "excess share {excess_share}"
    );

    let ratio = eco_h.co2_kg_yr / eco_d.co2_kg_yr;
    assert!(ratio < 0.6, "CO2 ratio {ratio}");

    println!(
        "ACCEPTANCE 7 PASS: RF {:.1}% (band 20-45), excess {:.1}% of production (band 5-15), \
         CO2 hybrid/diesel {:.3} (< 0.6); hybrid {:.0} kg/yr vs diesel-only {:.0} kg/yr",
        rf * 100.0,
        excess_share * 100.0,
        ratio,
        eco_h.co2_kg_yr,
        eco_d.co2_kg_yr
    );
}

#[test]
fn c8_co2_unit_oracle() {
    // Hand unit conversion: 36.4 MJ/L × 1e-6 TJ/MJ × 20 tC/TJ × 0.99 oxidized
    // gives tonnes of carbon per liter; CO2/C mass ratio from molar masses.
    let carbon_t_per_l: f64 = 36.4e-6 * 20.0 * 0.99;
    let co2_per_c: f64 = (12.011 + 2.0 * 15.999) / 12.011;
    let by_hand_kg: f64 = carbon_t_per_l * co2_per_c * 1000.0;

    let fuel = FuelSpec {
        heating_value_mj_l: 36.4,
        carbon_emission_factor_tc_tj: 20.0,
        oxidized_fraction: 0.99,
        price_per_l: 1.2,
    };
    let implemented = co2_mass_kg(1.0, &fuel);

    assert!((implemented - 2.64).abs() / 2.64 < 0.02, "implemented {implemented}");
    assert!((by_hand_kg - 2.64).abs() / 2.64 < 0.02, "hand conversion {by_hand_kg}");
    assert!((implemented - by_hand_kg).abs() / by_hand_kg < 0.02);
    println!("ACCEPTANCE 8 PASS: CO2 {implemented:.5} kg/L (hand conversion {by_hand_kg:.5} kg/L)");
}
