//! End-to-end tests of the `microgrid` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn microgrid(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_microgrid"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

/// A fast config: tiny search space, loose feasibility.
fn toy_config(out_dir: &Path) -> String {
    format!(
        r#"seed = 7
output_dir = "{}"

[feasibility]
max_unmet_fraction = 1.0

[search]
strategies = ["load_following", "cycle_charging"]
pv_kw = {{ min = 0.0, max = 600.0, step = 300.0 }}
wind_count = {{ min = 0, max = 2 }}
gen1_kw = {{ min = 100.0, max = 100.0, step = 50.0 }}
gen2_kw = {{ min = 300.0, max = 300.0, step = 50.0 }}
gen3_kw = {{ min = 500.0, max = 500.0, step = 50.0 }}
battery_strings = {{ min = 5, max = 5 }}
converter_kw = {{ min = 500.0, max = 500.0, step = 100.0 }}
"#,
        out_dir.display()
    )
}

#[test]
fn dump_defaults_parse_dump_is_a_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    let first = microgrid(&["dump-defaults"], dir.path());
    assert!(first.status.success());
    let text = stdout(&first);

    let config_path = dir.path().join("defaults.toml");
    fs::write(&config_path, &text).unwrap();
    // Parsing the dump must succeed (simulate validates the config), and the
    // dump itself is already canonical.
    let parsed: toml::Value = toml::from_str(&text).unwrap();
    assert_eq!(parsed["seed"].as_integer(), Some(42));

    let second = microgrid(&["dump-defaults"], dir.path());
    assert_eq!(stdout(&second), text, "dump is not stable");
}

#[test]
fn dumped_defaults_carry_component_costs() {
    let dir = tempfile::tempdir().unwrap();
    let out = microgrid(&["dump-defaults"], dir.path());
    let text = stdout(&out);
    let parsed: toml::Value = toml::from_str(&text).unwrap();
    assert_eq!(parsed["pv"]["capital_per_kw"].as_float(), Some(2000.0));
    assert_eq!(parsed["wind"]["capital_per_unit"].as_float(), Some(375_000.0));
    assert_eq!(parsed["battery"]["capacity_ah"].as_float(), Some(1231.0));
    assert_eq!(parsed["converter"]["capital_per_kw"].as_float(), Some(890.0));
}

#[test]
fn simulate_writes_report_and_balances() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = microgrid(
        &["--out", out_dir.to_str().unwrap(), "simulate"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("energy balance self-check: PASS"));
    assert!(out_dir.join("report.json").exists());
    assert!(out_dir.join("manifest.json").exists());
    assert!(!out_dir.join("trace.csv").exists());

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["energy_balance"]["status"], "PASS");
    assert!(report["economics"]["npc"].as_f64().unwrap() > 0.0);
    assert!(report["simulation"]["diversion"]["absorbed_kwh_yr"].as_f64().unwrap() > 0.0);
}

#[test]
fn simulate_trace_flag_writes_hourly_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = microgrid(
        &["--out", out_dir.to_str().unwrap(), "simulate", "--trace"],
        dir.path(),
    );
    assert!(out.status.success());
    let trace = fs::read_to_string(out_dir.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 8761);
}

#[test]
fn missing_resource_csv_is_a_config_error_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.toml");
    fs::write(
        &config_path,
        "seed = 1\n[resource]\nsource = \"csv\"\ncsv_path = \"nowhere/missing.csv\"\n",
    )
    .unwrap();
    let out = microgrid(
        &["--config", config_path.to_str().unwrap(), "simulate"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("missing.csv"), "stderr: {}", stderr(&out));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.toml");
    fs::write(&config_path, "seed = 1\nnot_a_real_key = true\n").unwrap();
    let out = microgrid(
        &["--config", config_path.to_str().unwrap(), "simulate"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn optimize_csv_rows_equal_feasible_count() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let config_path = dir.path().join("toy.toml");
    fs::write(&config_path, toy_config(&out_dir)).unwrap();
    let out = microgrid(
        &["--config", config_path.to_str().unwrap(), "optimize"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    // "N feasible of M evaluated"
    let feasible: usize = text
        .lines()
        .find(|l| l.contains("feasible of"))
        .and_then(|l| l.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    let ranked = fs::read_to_string(out_dir.join("ranked.csv")).unwrap();
    assert_eq!(ranked.lines().count(), feasible + 1);
    // 3 pv × 3 wind × 2 strategies = 18 evaluated, loose feasibility.
    assert!(text.contains("of 18 evaluated"));
    assert!(out_dir.join("generator_utilization.csv").exists());
}

#[test]
fn hybrid_outranks_diesel_when_fuel_is_dear() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let config = format!(
        r#"seed = 7
output_dir = "{}"

[fuel]
price_per_l = 4.0

[feasibility]
max_unmet_fraction = 1.0

[search]
strategies = ["combined"]
pv_kw = {{ min = 0.0, max = 600.0, step = 600.0 }}
wind_count = {{ min = 0, max = 4 }}
gen1_kw = {{ min = 100.0, max = 100.0, step = 50.0 }}
gen2_kw = {{ min = 300.0, max = 300.0, step = 50.0 }}
gen3_kw = {{ min = 500.0, max = 500.0, step = 50.0 }}
battery_strings = {{ min = 5, max = 5 }}
converter_kw = {{ min = 500.0, max = 500.0, step = 100.0 }}
"#,
        out_dir.display()
    );
    let config_path = dir.path().join("dear_fuel.toml");
    fs::write(&config_path, config).unwrap();
    let out = microgrid(
        &["--config", config_path.to_str().unwrap(), "optimize"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let ranked = fs::read_to_string(out_dir.join("ranked.csv")).unwrap();
    let rank_of = |pv: &str, wind: &str| -> usize {
        ranked
            .lines()
            .skip(1)
            .find(|l| {
                let f: Vec<&str> = l.split(',').collect();
                f[1] == pv && f[2] == wind
            })
            .map(|l| l.split(',').next().unwrap().parse().unwrap())
            .expect("row present")
    };
    let hybrid = rank_of("600", "4");
    let diesel = rank_of("0", "0");
    assert!(hybrid < diesel, "hybrid rank {hybrid} vs diesel rank {diesel}");
}

#[test]
fn sensitivity_single_cell_and_bad_axis() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let mut config = toy_config(&out_dir);
    config.push_str(
        "\n[sensitivity]\nsolar_kwh_m2_day = { min = 4.2, max = 4.2, step = 0.4 }\nwind_m_s = { min = 5.2, max = 5.2, step = 0.4 }\n",
    );
    let config_path = dir.path().join("sens.toml");
    fs::write(&config_path, &config).unwrap();
    let out = microgrid(
        &["--config", config_path.to_str().unwrap(), "sensitivity"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let map = fs::read_to_string(out_dir.join("sensitivity.csv")).unwrap();
    assert_eq!(map.lines().count(), 2, "one header and one cell");

    // min > max is a config error.
    let broken = config.replace("min = 4.2, max = 4.2", "min = 5.0, max = 4.0");
    fs::write(&config_path, broken).unwrap();
    let out = microgrid(
        &["--config", config_path.to_str().unwrap(), "sensitivity"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn full_space_requires_sampling() {
    let dir = tempfile::tempdir().unwrap();
    let out = microgrid(
        &["--out", dir.path().join("x").to_str().unwrap(), "optimize"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--sample"), "stderr: {}", stderr(&out));
}

#[test]
fn default_sensitivity_axes_have_36_cells() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let config_path = dir.path().join("toy.toml");
    fs::write(&config_path, toy_config(&out_dir)).unwrap();
    let out = microgrid(
        &["--config", config_path.to_str().unwrap(), "sensitivity"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let map = fs::read_to_string(out_dir.join("sensitivity.csv")).unwrap();
    assert_eq!(map.lines().count(), 37, "6 × 6 default grid plus header");
}
