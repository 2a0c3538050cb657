//! Fleet and time-series inputs, scenario transforms and results bundles.
//!
//! Time series are CSV with the header
//! `hour,fixed_load_mw,price,ambient_c,<one column per renewable unit>`,
//! hours numbered from 1. Fleets, scenarios and transformer parameters are
//! JSON.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benders::{IterationRecord, Termination};
use crate::fleet::{AssetFleet, FleetError, HourlyInput, LoadKind, HOURS_PER_DAY};
use crate::schedule::ScheduleSolution;
use crate::thermal::{horizon_loss_of_life, TransformerThermalParams};

pub const SERIES_HEADER: [&str; 4] = ["hour", "fixed_load_mw", "price", "ambient_c"];

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: line {line}, column {column}: {msg}", path.display())]
    Json {
        path: PathBuf,
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("{}: line {line}: {msg}", path.display())]
    Csv { path: PathBuf, line: u64, msg: String },
    #[error(transparent)]
    Fleet(#[from] FleetError),
    #[error("{0}")]
    Invalid(String),
}

fn read(path: &Path) -> Result<String, DataError> {
    fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, DataError> {
    serde_json::from_str(text).map_err(|e| DataError::Json {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })
}

pub fn parse_assets(path: &Path) -> Result<AssetFleet, DataError> {
    let fleet: AssetFleet = parse_json(path, &read(path)?)?;
    fleet.validate()?;
    Ok(fleet)
}

pub fn parse_transformer(path: &Path) -> Result<TransformerThermalParams, DataError> {
    let p: TransformerThermalParams = parse_json(path, &read(path)?)?;
    p.validate().map_err(|e| DataError::Invalid(format!("{}: {e}", path.display())))?;
    Ok(p)
}

pub fn parse_scenario(path: &Path) -> Result<ScenarioConfig, DataError> {
    let s: ScenarioConfig = parse_json(path, &read(path)?)?;
    s.validate()
        .map_err(|e| DataError::Invalid(format!("{}: {e}", path.display())))?;
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub fixed_load: f64,
    pub price: f64,
    pub ambient: f64,
    pub renewable: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TimeSeriesTable {
    pub renewable_names: Vec<String>,
    pub rows: Vec<SeriesRow>,
}

impl TimeSeriesTable {
    pub fn days(&self) -> usize {
        self.rows.len() / HOURS_PER_DAY
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.rows.is_empty() || self.rows.len() % HOURS_PER_DAY != 0 {
            return Err(format!("{} hourly rows is not a positive multiple of 24", self.rows.len()));
        }
        for (i, r) in self.rows.iter().enumerate() {
            if r.renewable.len() != self.renewable_names.len() {
                return Err(format!("hour {}: wrong number of renewable columns", i + 1));
            }
            let all = [r.fixed_load, r.price, r.ambient];
            if all.iter().chain(&r.renewable).any(|v| !v.is_finite()) {
                return Err(format!("hour {}: non-finite value", i + 1));
            }
            if r.fixed_load < 0.0 || r.renewable.iter().any(|&v| v < 0.0) {
                return Err(format!("hour {}: loads and renewable output must be non-negative", i + 1));
            }
        }
        Ok(())
    }

    /// Days `start..start + count` as a new table.
    pub fn slice_days(&self, start: usize, count: usize) -> Result<Self, String> {
        if start + count > self.days() || count == 0 {
            return Err(format!("days {start}..{} outside a {}-day series", start + count, self.days()));
        }
        Ok(Self {
            renewable_names: self.renewable_names.clone(),
            rows: self.rows[start * HOURS_PER_DAY..(start + count) * HOURS_PER_DAY].to_vec(),
        })
    }
}

pub fn parse_timeseries(path: &Path) -> Result<TimeSeriesTable, DataError> {
    parse_timeseries_str(path, &read(path)?)
}

pub fn parse_timeseries_str(path: &Path, text: &str) -> Result<TimeSeriesTable, DataError> {
    let err = |line: u64, msg: String| DataError::Csv {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| err(1, e.to_string()))?.clone();
    let found: Vec<&str> = headers.iter().collect();
    if found.len() < SERIES_HEADER.len() || found[..SERIES_HEADER.len()] != SERIES_HEADER {
        return Err(err(1, format!("header must start with {}", SERIES_HEADER.join(","))));
    }
    let renewable_names: Vec<String> = found[SERIES_HEADER.len()..].iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| err(line, e.to_string()))?;
        let num = |k: usize| -> Result<f64, DataError> {
            rec[k]
                .parse::<f64>()
                .map_err(|e| err(line, format!("column {}: {e}", headers[k].to_string())))
        };
        let hour = num(0)?;
        if hour != (i + 1) as f64 {
            return Err(err(line, format!("expected hour {}, found {}", i + 1, &rec[0])));
        }
        rows.push(SeriesRow {
            fixed_load: num(1)?,
            price: num(2)?,
            ambient: num(3)?,
            renewable: (SERIES_HEADER.len()..rec.len()).map(num).collect::<Result<_, _>>()?,
        });
    }
    let table = TimeSeriesTable { renewable_names, rows };
    table
        .validate()
        .map_err(|m| DataError::Invalid(format!("{}: {m}", path.display())))?;
    Ok(table)
}

pub fn timeseries_to_csv(table: &TimeSeriesTable) -> String {
    let mut s = SERIES_HEADER.join(",");
    for n in &table.renewable_names {
        s.push(',');
        s.push_str(n);
    }
    s.push('\n');
    for (i, r) in table.rows.iter().enumerate() {
        write!(s, "{},{},{},{}", i + 1, r.fixed_load, r.price, r.ambient).unwrap();
        for v in &r.renewable {
            write!(s, ",{v}").unwrap();
        }
        s.push('\n');
    }
    s
}

/// Extra fixed load placed on chosen hours so that serving it needs
/// `target_fraction` of the transformer rating from the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverloadInjection {
    pub days: usize,
    /// 1-based hours of the day.
    pub hours: Vec<usize>,
    pub target_fraction: f64,
    pub seed: u64,
}

fn default_block() -> Option<usize> {
    Some(1)
}
fn default_true() -> bool {
    true
}
fn default_cap() -> f64 {
    1.0
}
fn default_line() -> f64 {
    20.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub case: Option<u32>,
    /// Serve the fixed load from the grid alone and evaluate aging only.
    #[serde(default)]
    pub grid_only: bool,
    #[serde(default)]
    pub start_day: usize,
    #[serde(default)]
    pub days: Option<usize>,
    /// Days per master problem; `null` solves the horizon at once.
    #[serde(default = "default_block")]
    pub block_days: Option<usize>,
    #[serde(default)]
    pub price_scale: f64,
    #[serde(default = "default_cap")]
    pub loading_cap_fraction: f64,
    #[serde(default = "default_line")]
    pub line_capacity: f64,
    #[serde(default)]
    pub adjustable_energy_delta: f64,
    #[serde(default)]
    pub overload: Option<OverloadInjection>,
    #[serde(default = "default_true")]
    pub asset_management: bool,
    /// Replaces the transformer parameters given on the command line.
    #[serde(default)]
    pub transformer: Option<TransformerThermalParams>,
    /// Replaces only the value of one insulation life.
    #[serde(default)]
    pub investment_cost: Option<f64>,
    #[serde(default)]
    pub gap_tolerance: Option<f64>,
    #[serde(default)]
    pub max_iterations: Option<usize>,
    #[serde(default)]
    pub master_gap: Option<f64>,
    #[serde(default)]
    pub master_time_limit: Option<f64>,
}

impl ScenarioConfig {
    pub fn named(name: &str) -> Self {
        Self {
            name: name.to_string(),
            case: None,
            grid_only: false,
            start_day: 0,
            days: None,
            block_days: default_block(),
            price_scale: 0.0,
            loading_cap_fraction: default_cap(),
            line_capacity: default_line(),
            adjustable_energy_delta: 0.0,
            overload: None,
            asset_management: true,
            transformer: None,
            investment_cost: None,
            gap_tolerance: None,
            max_iterations: None,
            master_gap: None,
            master_time_limit: None,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.price_scale > -1.0 && self.price_scale.is_finite()) {
            return Err("price_scale must exceed -1".into());
        }
        if !(self.loading_cap_fraction > 0.0 && self.line_capacity > 0.0) {
            return Err("loading_cap_fraction and line_capacity must be positive".into());
        }
        if !self.adjustable_energy_delta.is_finite() {
            return Err("adjustable_energy_delta must be finite".into());
        }
        if self.days == Some(0) || self.block_days == Some(0) {
            return Err("days and block_days must be at least 1".into());
        }
        if let Some(o) = &self.overload {
            if !(o.target_fraction > 0.0) {
                return Err("overload target_fraction must be positive".into());
            }
            if o.hours.iter().any(|&h| h == 0 || h > HOURS_PER_DAY) || o.hours.is_empty() {
                return Err("overload hours must be non-empty and within 1..=24".into());
            }
        }
        if self.investment_cost.is_some_and(|c| !(c >= 0.0)) {
            return Err("investment_cost must be non-negative".into());
        }
        Ok(())
    }
}

/// Inputs after a scenario has been applied.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedCase {
    pub fleet: AssetFleet,
    pub hours: Vec<HourlyInput>,
    /// Parameters the optimizer sees; the aging cost is zero when asset
    /// management is off.
    pub params: TransformerThermalParams,
    /// Parameters used to report loss of life.
    pub report_params: TransformerThermalParams,
    /// 0-based horizon hours that received an overload increment.
    pub overloaded_hours: Vec<usize>,
}

pub fn apply_scenario(
    config: &ScenarioConfig,
    fleet: &AssetFleet,
    table: &TimeSeriesTable,
    params: &TransformerThermalParams,
) -> Result<PreparedCase, DataError> {
    config.validate().map_err(DataError::Invalid)?;
    table.validate().map_err(DataError::Invalid)?;
    let days = config.days.unwrap_or(table.days().saturating_sub(config.start_day));
    let table = table.slice_days(config.start_day, days).map_err(DataError::Invalid)?;

    let mut report = config.transformer.unwrap_or(*params);
    if let Some(c) = config.investment_cost {
        report.investment_cost = c;
    }
    report.validate().map_err(|e| DataError::Invalid(e.to_string()))?;
    let mut opt_params = report;
    if !config.asset_management {
        opt_params.investment_cost = 0.0;
    }

    let mut fleet = if config.grid_only {
        AssetFleet {
            renewable: fleet.renewable.clone(),
            ..Default::default()
        }
    } else {
        fleet.clone()
    };

    let energy_before: Vec<f64> = fleet.loads.iter().map(|l| l.required_energy).collect();
    let total: f64 = energy_before.iter().sum();
    if config.adjustable_energy_delta != 0.0 {
        if total <= 0.0 {
            return Err(DataError::Invalid("no adjustable energy to scale".into()));
        }
        // More energy means proportionally more adjustable load, so ratings
        // scale with the requirement.
        let f = (total + config.adjustable_energy_delta) / total;
        if !(f >= 0.0) {
            return Err(DataError::Invalid(format!(
                "adjustable energy delta {} exceeds the fleet total {total}",
                config.adjustable_energy_delta
            )));
        }
        for l in &mut fleet.loads {
            l.required_energy *= f;
            l.d_min *= f;
            l.d_max *= f;
        }
    }
    fleet.validate()?;

    let mut order = Vec::with_capacity(fleet.renewable.len());
    for u in &fleet.renewable {
        let idx = table.renewable_names.iter().position(|n| *n == u.name).ok_or_else(|| {
            DataError::Invalid(format!("time series has no column for renewable unit {}", u.name))
        })?;
        order.push(idx);
    }

    let mut hours: Vec<HourlyInput> = table
        .rows
        .iter()
        .map(|r| HourlyInput {
            fixed_load: r.fixed_load,
            renewable: order.iter().map(|&i| r.renewable[i]).collect(),
            price: r.price * (1.0 + config.price_scale),
            ambient: r.ambient,
            grid_connected: true,
            line_capacity: config.line_capacity,
            loading_cap_fraction: config.loading_cap_fraction,
        })
        .collect();

    if config.adjustable_energy_delta != 0.0 {
        // Demand converted to adjustable load leaves the fixed load evenly
        // over the hours of each load's window.
        for (l, &before) in fleet.loads.iter().zip(&energy_before) {
            let (s, e, _) = l.effective_window();
            let per_hour = (l.required_energy - before) / (e - s + 1) as f64;
            for (d, day) in hours.chunks_mut(HOURS_PER_DAY).enumerate() {
                for (t, h) in day.iter_mut().enumerate().take(e + 1).skip(s) {
                    h.fixed_load -= per_hour;
                    if h.fixed_load < -1e-9 {
                        return Err(DataError::Invalid(format!(
                            "moving energy into {} leaves negative fixed load at day {d} hour {}",
                            l.name,
                            t + 1
                        )));
                    }
                    h.fixed_load = h.fixed_load.max(0.0);
                }
            }
        }
    }

    if config.grid_only {
        for h in &mut hours {
            let need = (h.fixed_load - h.renewable_total()).abs();
            h.line_capacity = h.line_capacity.max(need);
            h.loading_cap_fraction = h.loading_cap_fraction.max(need / report.rated_power);
        }
    }

    let mut overloaded_hours = Vec::new();
    if let Some(o) = &config.overload {
        if o.days > days {
            return Err(DataError::Invalid(format!(
                "cannot overload {} days of a {days}-day horizon",
                o.days
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
        let mut chosen = sample(&mut rng, days, o.days).into_vec();
        chosen.sort_unstable();
        let local_max: f64 = fleet.dispatchable.iter().map(|u| u.p_max).sum();
        // Curtailable loads run all day, so their minimum draw is always there.
        let committed: f64 = fleet
            .loads
            .iter()
            .filter(|l| l.kind == LoadKind::Curtailable && l.required_energy > 0.0)
            .map(|l| l.d_min)
            .sum();
        let target = o.target_fraction * report.rated_power;
        for d in chosen {
            for &h in &o.hours {
                let t = d * HOURS_PER_DAY + h - 1;
                let hi = &mut hours[t];
                let import_now = hi.fixed_load + committed - local_max - hi.renewable_total();
                hi.fixed_load += (target - import_now).max(0.0);
                hi.loading_cap_fraction = hi.loading_cap_fraction.max(o.target_fraction);
                hi.line_capacity = hi.line_capacity.max(target);
                overloaded_hours.push(t);
            }
        }
    }

    Ok(PreparedCase {
        fleet,
        hours,
        params: opt_params,
        report_params: report,
        overloaded_hours,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub case: Option<u32>,
    pub hours: usize,
    pub operation_cost: f64,
    pub lol_percent: f64,
    pub lifetime_years: f64,
    pub termination: Option<Termination>,
    pub benders_iterations: usize,
    pub overloaded_hours: Vec<usize>,
    pub asset_management: bool,
    pub investment_cost: f64,
}

/// Everything a run writes to disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultsBundle {
    pub scenario: ScenarioConfig,
    pub fleet: AssetFleet,
    pub hours: Vec<HourlyInput>,
    pub params: TransformerThermalParams,
    pub schedule: ScheduleSolution,
    pub iterations: Vec<IterationRecord>,
    pub summary: Summary,
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    #[serde(flatten)]
    summary: &'a Summary,
    scenario_config: &'a ScenarioConfig,
    transformer: &'a TransformerThermalParams,
}

pub fn schedule_to_csv(bundle: &ResultsBundle) -> Result<String, DataError> {
    let s = &bundle.schedule;
    let amb: Vec<f64> = bundle.hours.iter().map(|h| h.ambient).collect();
    let life = horizon_loss_of_life(&s.magnitudes(), &amb, None, &bundle.params)
        .map_err(|e| DataError::Invalid(e.to_string()))?;
    let mut head: Vec<String> = ["hour", "fixed_load_mw", "price", "ambient_c"].map(String::from).to_vec();
    for u in &bundle.fleet.renewable {
        head.push(format!("{}_mw", u.name));
    }
    for u in &s.units {
        head.push(format!("{}_mw", u.name));
        head.push(format!("{}_on", u.name));
    }
    for st in &s.storage {
        head.push(format!("{}_discharge_mw", st.name));
        head.push(format!("{}_charge_mw", st.name));
        head.push(format!("{}_energy_mwh", st.name));
    }
    for l in &s.loads {
        head.push(format!("{}_mw", l.name));
    }
    head.extend(
        [
            "exchange_mw",
            "export_mw",
            "import_mw",
            "k_initial",
            "k_ultimate",
            "hotspot_c",
            "lol_percent",
        ]
        .map(String::from),
    );
    let mut out = head.join(",");
    out.push('\n');
    let b = |f: bool| if f { 1 } else { 0 };
    for t in 0..s.hours {
        let h = &bundle.hours[t];
        let mut row: Vec<String> = vec![(t + 1).to_string(), h.fixed_load.to_string(), h.price.to_string(), h.ambient.to_string()];
        row.extend(h.renewable.iter().map(f64::to_string));
        for u in &s.units {
            row.push(u.output[t].to_string());
            row.push(b(u.on[t]).to_string());
        }
        for st in &s.storage {
            row.push(st.discharge[t].to_string());
            row.push(st.charge[t].to_string());
            row.push(st.energy[t].to_string());
        }
        for l in &s.loads {
            row.push(l.demand[t].to_string());
        }
        let iv = &life.intervals[t];
        row.extend([
            s.exchange[t].to_string(),
            s.export[t].to_string(),
            s.import[t].to_string(),
            s.k_initial[t].to_string(),
            s.k_ultimate[t].to_string(),
            iv.hotspot_temp.to_string(),
            iv.lol_percent.to_string(),
        ]);
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn iterations_to_csv(records: &[IterationRecord]) -> Result<String, DataError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(|e| DataError::Invalid(e.to_string()))?;
    }
    if records.is_empty() {
        w.write_record([
            "block",
            "iteration",
            "lower_bound",
            "q_hat",
            "upper_bound",
            "best_upper_bound",
            "gap",
            "cut_issued",
            "gradient_clamped",
            "master_status",
            "master_nodes",
        ])
        .map_err(|e| DataError::Invalid(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| DataError::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn summary_to_json(bundle: &ResultsBundle) -> String {
    let file = SummaryFile {
        summary: &bundle.summary,
        scenario_config: &bundle.scenario,
        transformer: &bundle.params,
    };
    let mut s = serde_json::to_string_pretty(&file).expect("summary serializes");
    s.push('\n');
    s
}

fn write_file(path: &Path, contents: &str) -> Result<(), DataError> {
    fs::write(path, contents).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `schedule.csv`, `iterations.csv` and `summary.json` into `out_dir`.
pub fn write_results(bundle: &ResultsBundle, out_dir: &Path) -> Result<Vec<PathBuf>, DataError> {
    if bundle.schedule.hours == 0 || bundle.hours.is_empty() {
        return Err(DataError::Invalid("refusing to write an empty horizon".into()));
    }
    if bundle.schedule.hours != bundle.hours.len() {
        return Err(DataError::Invalid("schedule and inputs cover different horizons".into()));
    }
    fs::create_dir_all(out_dir).map_err(|source| DataError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let files = [
        ("schedule.csv", schedule_to_csv(bundle)?),
        ("iterations.csv", iterations_to_csv(&bundle.iterations)?),
        ("summary.json", summary_to_json(bundle)),
    ];
    let mut paths = Vec::new();
    for (name, body) in files {
        let p = out_dir.join(name);
        write_file(&p, &body)?;
        paths.push(p);
    }
    Ok(paths)
}

/// How the synthetic year is derived from the sample day.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticYear {
    pub days: usize,
    pub seed: u64,
    /// Relative jitter applied independently to load, price and renewables.
    pub jitter: f64,
    pub ambient_mean: f64,
    pub ambient_seasonal: f64,
    pub ambient_diurnal: f64,
    /// Day of year (0-based) with the warmest mean.
    pub warmest_day: f64,
    /// Hour of day (1-based) with the warmest ambient.
    pub warmest_hour: f64,
}

impl Default for SyntheticYear {
    fn default() -> Self {
        Self {
            days: 365,
            seed: 7,
            jitter: 0.10,
            ambient_mean: 21.0,
            ambient_seasonal: 8.0,
            ambient_diurnal: 5.0,
            warmest_day: 200.0,
            warmest_hour: 15.0,
        }
    }
}

impl SyntheticYear {
    /// Ambient at a 0-based day and 1-based hour, rounded to 0.1 °C.
    pub fn ambient(&self, day: usize, hour: usize) -> f64 {
        use std::f64::consts::TAU;
        let season = (TAU * (day as f64 - self.warmest_day) / 365.0).cos();
        let diurnal = (TAU * (hour as f64 - self.warmest_hour) / HOURS_PER_DAY as f64).cos();
        let v = self.ambient_mean + self.ambient_seasonal * season + self.ambient_diurnal * diurnal;
        (v * 10.0).round() / 10.0
    }

    /// Tiles `sample` (one day) with seeded multiplicative jitter and
    /// replaces its ambient column with the seasonal profile.
    pub fn generate(&self, sample: &TimeSeriesTable) -> Result<TimeSeriesTable, String> {
        if sample.rows.len() != HOURS_PER_DAY {
            return Err("sample must hold exactly one day".into());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut jit = |v: f64| {
            let f: f64 = rng.gen_range(-self.jitter..=self.jitter);
            ((v * (1.0 + f)) * 1000.0).round() / 1000.0
        };
        let mut rows = Vec::with_capacity(self.days * HOURS_PER_DAY);
        for d in 0..self.days {
            for (h, r) in sample.rows.iter().enumerate() {
                rows.push(SeriesRow {
                    fixed_load: jit(r.fixed_load),
                    price: jit(r.price),
                    ambient: self.ambient(d, h + 1),
                    renewable: r.renewable.iter().map(|&v| jit(v)).collect(),
                });
            }
        }
        Ok(TimeSeriesTable {
            renewable_names: sample.renewable_names.clone(),
            rows,
        })
    }
}
