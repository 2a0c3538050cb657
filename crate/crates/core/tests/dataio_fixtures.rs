use std::fs;
use std::path::{Path, PathBuf};

use assetgrid_core::dataio::*;
use assetgrid_core::fleet::{AssetFleet, LoadKind};
use assetgrid_core::schedule::grid_only_schedule;
use assetgrid_core::thermal::horizon_loss_of_life;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn inputs() -> (AssetFleet, TimeSeriesTable, assetgrid_core::thermal::TransformerThermalParams) {
    (
        parse_assets(&data("fleet.json")).unwrap(),
        parse_timeseries(&data("sample_day.csv")).unwrap(),
        parse_transformer(&data("transformer.json")).unwrap(),
    )
}

#[test]
fn bundled_fleet_counts_and_values() {
    let f = parse_assets(&data("fleet.json")).unwrap();
    assert_eq!(
        (f.dispatchable.len(), f.renewable.len(), f.storage.len(), f.loads.len()),
        (4, 2, 1, 5)
    );
    let g1 = &f.dispatchable[0];
    assert_eq!((g1.cost_per_mwh, g1.p_min, g1.p_max, g1.min_up, g1.min_down, g1.ramp_up), (27.7, 1.0, 5.0, 3, 3, 2.5));
    let ess = &f.storage[0];
    assert_eq!((ess.energy_max, ess.charge_min, ess.charge_max), (10.0, 0.4, 2.0));
    assert_eq!((ess.min_charge_time, ess.min_discharge_time), (5, 5));
    let names: Vec<&str> = f.loads.iter().map(|l| l.name.as_str()).collect();
    assert_eq!(names, ["L1", "L2", "L3", "L4", "L5"]);
}

#[test]
fn sample_day_values() {
    let t = parse_timeseries(&data("sample_day.csv")).unwrap();
    assert_eq!(t.rows.len(), 24);
    assert_eq!(t.renewable_names, ["G5", "G6"]);
    assert_eq!(t.rows[0].fixed_load, 8.73);
    assert_eq!(t.rows[11].price, 68.95);
    assert_eq!(t.rows[16].price, 115.45);
    assert_eq!(t.rows[13].renewable[1], 1.20);
}

#[test]
fn partial_day_rejected() {
    let text = fs::read_to_string(data("sample_day.csv")).unwrap();
    let short: String = text.lines().take(24).map(|l| format!("{l}\n")).collect();
    assert!(parse_timeseries_str(Path::new("short.csv"), &short).is_err());
}

#[test]
fn empty_sections_make_a_valid_fleet() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("empty.json");
    fs::write(&p, "{}").unwrap();
    let f = parse_assets(&p).unwrap();
    assert!(f.is_empty());
}

#[test]
fn inverted_unit_capacity_names_the_unit() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(data("fleet.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["dispatchable"][2]["p_min"] = 4.0.into();
    let p = dir.path().join("bad.json");
    fs::write(&p, v.to_string()).unwrap();
    let msg = parse_assets(&p).unwrap_err().to_string();
    assert!(msg.contains("G3"), "{msg}");
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("broken.json");
    fs::write(&p, "{\n  \"dispatchable\": [\n    { \"name\": 3 }\n  ]\n}").unwrap();
    match parse_assets(&p).unwrap_err() {
        DataError::Json { line, .. } => assert_eq!(line, 3),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn fleet_round_trips() {
    let (fleet, table, _) = inputs();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("fleet.json");
    fs::write(&p, serde_json::to_string_pretty(&fleet).unwrap()).unwrap();
    assert_eq!(parse_assets(&p).unwrap(), fleet);
    let back = parse_timeseries_str(Path::new("t.csv"), &timeseries_to_csv(&table)).unwrap();
    assert_eq!(back, table);
}

#[test]
fn price_scale_transform() {
    let (fleet, table, params) = inputs();
    let same = apply_scenario(&ScenarioConfig::named("base"), &fleet, &table, &params).unwrap();
    for (h, r) in same.hours.iter().zip(&table.rows) {
        assert_eq!(h.price, r.price);
    }
    let up = ScenarioConfig {
        price_scale: 0.3,
        ..ScenarioConfig::named("up")
    };
    let c = apply_scenario(&up, &fleet, &table, &params).unwrap();
    assert!((c.hours[11].price - 89.635).abs() < 1e-9);
}

#[test]
fn adjustable_delta_shifts_the_total() {
    let (fleet, table, params) = inputs();
    let before: f64 = fleet.loads.iter().map(|l| l.required_energy).sum();
    let cfg = ScenarioConfig {
        adjustable_energy_delta: 50.0,
        ..ScenarioConfig::named("more")
    };
    let c = apply_scenario(&cfg, &fleet, &table, &params).unwrap();
    let after: f64 = c.fleet.loads.iter().map(|l| l.required_energy).sum();
    assert!((after - before - 50.0).abs() < 1e-9);
    // Total demand is unchanged: the energy moves out of the fixed load.
    let fixed_before: f64 = table.rows.iter().map(|r| r.fixed_load).sum();
    let fixed_after: f64 = c.hours.iter().map(|h| h.fixed_load).sum();
    assert!((fixed_before - fixed_after - 50.0).abs() < 1e-9);
}

#[test]
fn overload_touches_sixty_hours_deterministically() {
    let fleet = parse_assets(&data("fleet.json")).unwrap();
    let table = parse_timeseries(&data("synthetic_year.csv")).unwrap();
    let params = parse_transformer(&data("transformer.json")).unwrap();
    let cfg = parse_scenario(&data("scenarios/case3_overload.json")).unwrap();
    let cfg = ScenarioConfig { days: None, ..cfg };
    let a = apply_scenario(&cfg, &fleet, &table, &params).unwrap();
    let b = apply_scenario(&cfg, &fleet, &table, &params).unwrap();
    assert_eq!(a.overloaded_hours.len(), 60);
    assert_eq!(a, b);
    let mut days: Vec<usize> = a.overloaded_hours.iter().map(|t| t / 24).collect();
    days.dedup();
    assert_eq!(days.len(), 20);
    let local: f64 = a.fleet.dispatchable.iter().map(|u| u.p_max).sum();
    let committed: f64 = a
        .fleet
        .loads
        .iter()
        .filter(|l| l.kind == LoadKind::Curtailable)
        .map(|l| l.d_min)
        .sum();
    let target = 1.2 * params.rated_power;
    for &t in &a.overloaded_hours {
        let h = &a.hours[t];
        assert!(t % 24 >= 12 && t % 24 <= 14);
        assert!(h.fixed_load + committed - local - h.renewable_total() >= target - 1e-9);
        assert!(h.loading_cap_fraction >= 1.2 && h.line_capacity >= target);
    }
}

#[test]
fn bundled_year_matches_the_generator() {
    let sample = parse_timeseries(&data("sample_day.csv")).unwrap();
    let year = parse_timeseries(&data("synthetic_year.csv")).unwrap();
    let generated = SyntheticYear::default().generate(&sample).unwrap();
    assert_eq!(year.rows.len(), 8760);
    assert_eq!(generated, year);
    let week = parse_timeseries(&data("synthetic_week.csv")).unwrap();
    assert_eq!(week, year.slice_days(196, 7).unwrap());
}

fn grid_only_bundle() -> ResultsBundle {
    let (fleet, table, params) = inputs();
    let cfg = parse_scenario(&data("scenarios/case0_grid_only.json")).unwrap();
    let case = apply_scenario(&cfg, &fleet, &table, &params).unwrap();
    let schedule = grid_only_schedule(&case.fleet, &case.hours, &case.report_params).unwrap();
    let amb: Vec<f64> = case.hours.iter().map(|h| h.ambient).collect();
    let life = horizon_loss_of_life(&schedule.magnitudes(), &amb, None, &case.report_params).unwrap();
    ResultsBundle {
        summary: Summary {
            scenario: cfg.name.clone(),
            case: cfg.case,
            hours: case.hours.len(),
            operation_cost: schedule.operation_cost,
            lol_percent: life.total_lol_percent,
            lifetime_years: life.expected_lifetime_years,
            termination: None,
            benders_iterations: 0,
            overloaded_hours: vec![],
            asset_management: false,
            investment_cost: case.report_params.investment_cost,
        },
        scenario: cfg,
        fleet: case.fleet,
        hours: case.hours,
        params: case.report_params,
        schedule,
        iterations: vec![],
    }
}

#[test]
fn writes_are_byte_identical() {
    let bundle = grid_only_bundle();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let pa = write_results(&bundle, a.path()).unwrap();
    let pb = write_results(&bundle, b.path()).unwrap();
    assert_eq!(pa.len(), 3);
    for (x, y) in pa.iter().zip(&pb) {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
    }
}

#[test]
fn schedule_table_reproduces_the_summary() {
    let bundle = grid_only_bundle();
    let dir = tempfile::tempdir().unwrap();
    write_results(&bundle, dir.path()).unwrap();
    let mut rdr = csv::Reader::from_path(dir.path().join("schedule.csv")).unwrap();
    let head = rdr.headers().unwrap().clone();
    for col in ["hour", "fixed_load_mw", "price", "ambient_c", "G5_mw", "G6_mw", "exchange_mw", "k_ultimate", "lol_percent"] {
        assert!(head.iter().any(|h| h == col), "missing {col}");
    }
    let ix = |name: &str| head.iter().position(|h| h == name).unwrap();
    let (ex, amb) = (ix("exchange_mw"), ix("ambient_c"));
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 24);
    let mags: Vec<f64> = rows.iter().map(|r| r[ex].parse::<f64>().unwrap().abs()).collect();
    let ambient: Vec<f64> = rows.iter().map(|r| r[amb].parse().unwrap()).collect();
    let life = horizon_loss_of_life(&mags, &ambient, None, &bundle.params).unwrap();
    let rel = (life.total_lol_percent - bundle.summary.lol_percent).abs() / bundle.summary.lol_percent;
    assert!(rel <= 1e-9);
}

#[test]
fn empty_horizon_is_not_written() {
    let mut bundle = grid_only_bundle();
    bundle.hours.clear();
    bundle.schedule.hours = 0;
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    assert!(write_results(&bundle, &out).is_err());
    assert!(!out.exists());
}
