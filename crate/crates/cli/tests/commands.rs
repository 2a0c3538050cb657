use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn assetgrid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_assetgrid"))
        .args(args)
        .env_remove("ASSETGRID_OUT")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn missing_input_exits_2_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let o = assetgrid(&[
        "run",
        "--assets",
        p(&missing),
        "--series",
        p(&data("sample_day.csv")),
        "--scenario",
        p(&data("scenarios/case1_economic.json")),
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nope.json"), "{}", stderr(&o));
}

#[test]
fn empty_sweep_values_are_a_usage_error() {
    let o = assetgrid(&[
        "sweep",
        "--axis",
        "price",
        "--values=",
        "--assets",
        p(&data("fleet.json")),
        "--series",
        p(&data("sample_day.csv")),
        "--scenario",
        p(&data("scenarios/case5_sensitivity.json")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

fn loading_csv(dir: &Path, rows: usize, load: f64, ambient: f64) -> PathBuf {
    let mut s = String::from("hour,exchange_mw,ambient_c\n");
    for h in 1..=rows {
        s.push_str(&format!("{h},{load},{ambient}\n"));
    }
    let path = dir.join("loading.csv");
    fs::write(&path, s).unwrap();
    path
}

/// Last two numbers printed by `lol`: loss of life and lifetime.
fn lol_numbers(o: &Output) -> (f64, f64) {
    let out = stdout(o);
    let nums: Vec<f64> = out
        .split(|c: char| !(c.is_ascii_digit() || c == '.' || c == 'e' || c == '-'))
        .filter_map(|w| w.parse().ok())
        .collect();
    (nums[nums.len() - 2], nums[nums.len() - 1])
}

#[test]
fn rated_year_at_thirty_degrees() {
    let dir = tempfile::tempdir().unwrap();
    let csv = loading_csv(dir.path(), 8760, 10.0, 30.0);
    let o = assetgrid(&["lol", "--series", p(&csv)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (lol, life) = lol_numbers(&o);
    assert!((lol - 4.8667).abs() < 5e-5, "{lol}");
    assert!((life - 20.55).abs() < 5e-3, "{life}");
}

#[test]
fn idle_year_still_ages() {
    let dir = tempfile::tempdir().unwrap();
    let csv = loading_csv(dir.path(), 8760, 0.0, 20.0);
    let o = assetgrid(&["lol", "--series", p(&csv)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(lol_numbers(&o).0 > 0.0);
}

#[test]
fn ragged_rows_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ragged.csv");
    fs::write(&csv, "hour,exchange_mw,ambient_c\n1,5,20\n2,5\n").unwrap();
    let o = assetgrid(&["lol", "--series", p(&csv)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn grid_only_case_ages_the_transformer() {
    let dir = tempfile::tempdir().unwrap();
    let o = assetgrid(&[
        "run",
        "--assets",
        p(&data("fleet.json")),
        "--series",
        p(&data("sample_day.csv")),
        "--scenario",
        p(&data("scenarios/case0_grid_only.json")),
        "--params",
        p(&data("transformer.json")),
        "--out",
        p(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert!(summary["lol_percent"].as_f64().unwrap() > 0.0);
    assert_eq!(summary["benders_iterations"], 0);

    // The schedule holds only the forced import.
    let text = fs::read_to_string(dir.path().join("schedule.csv")).unwrap();
    let head: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    assert!(!head.iter().any(|h| h.starts_with("G1") || h.starts_with("ESS") || h.starts_with("L1")));
    assert!(dir.path().join("plot.csv").exists());

    // The exchange column reproduces the reported loss of life.
    let o = assetgrid(&["lol", "--series", p(&dir.path().join("schedule.csv")), "--params", p(&data("transformer.json"))]);
    let (lol, _) = lol_numbers(&o);
    let want = summary["lol_percent"].as_f64().unwrap();
    assert!((lol - want).abs() <= 1e-9 * want);
}

#[test]
fn unservable_hour_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(data("sample_day.csv")).unwrap();
    let heavy: String = text
        .lines()
        .map(|l| if l.starts_with("5,") { "5,100,18.51,24.7,0.63,0".to_string() } else { l.to_string() })
        .map(|l| l + "\n")
        .collect();
    let series = dir.path().join("heavy.csv");
    fs::write(&series, heavy).unwrap();
    let o = assetgrid(&[
        "run",
        "--assets",
        p(&data("fleet.json")),
        "--series",
        p(&series),
        "--scenario",
        p(&data("scenarios/case1_economic.json")),
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("hour"));
}

#[test]
fn validate_reports_the_fleet() {
    let o = assetgrid(&["validate", "--assets", p(&data("fleet.json")), "--series", p(&data("synthetic_week.csv"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("168 hours"));
}

#[test]
fn synth_reproduces_the_bundled_week() {
    let dir = tempfile::tempdir().unwrap();
    let year = dir.path().join("year.csv");
    let week = dir.path().join("week.csv");
    let o = assetgrid(&[
        "synth",
        "--sample",
        p(&data("sample_day.csv")),
        "--out",
        p(&year),
        "--week-start",
        "196",
        "--week-out",
        p(&week),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read(&week).unwrap(), fs::read(data("synthetic_week.csv")).unwrap());
    assert_eq!(fs::read(&year).unwrap(), fs::read(data("synthetic_year.csv")).unwrap());
}
