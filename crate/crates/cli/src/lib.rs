//! Command implementations behind the `assetgrid` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use assetgrid_core::benders::{optimize, BendersError, BendersOptions};
use assetgrid_core::dataio::{
    apply_scenario, parse_assets, parse_scenario, parse_timeseries, parse_transformer, timeseries_to_csv,
    write_results, DataError, PreparedCase, ResultsBundle, ScenarioConfig, Summary, SyntheticYear,
    TimeSeriesTable,
};
use assetgrid_core::fleet::HOURS_PER_DAY;
use assetgrid_core::schedule::{
    grid_only_schedule, validate_schedule, CarryState, ScheduleError, FEASIBILITY_TOL,
};
use assetgrid_core::thermal::{horizon_loss_of_life, ThermalError, TransformerThermalParams};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Default output directory when `--out` is not given.
pub const OUT_ENV: &str = "ASSETGRID_OUT";

#[derive(Debug, Parser)]
#[command(name = "assetgrid", version, about = "Transformer-aware microgrid scheduling")]
pub struct Cli {
    /// Repeat for more detail (-v iterations, -vv solver timings).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Schedule one scenario and write its results bundle.
    Run(RunArgs),
    /// Run a scenario across values of one sensitivity axis, with and
    /// without asset management.
    Sweep(SweepArgs),
    /// Loss of life of a loading series.
    Lol(LolArgs),
    /// Parse and cross-check inputs without solving.
    Validate(ValidateArgs),
    /// Build a synthetic multi-day series from a one-day sample.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CaseArgs {
    #[arg(long)]
    pub assets: PathBuf,
    #[arg(long)]
    pub series: PathBuf,
    #[arg(long)]
    pub scenario: PathBuf,
    /// Transformer parameters; built-in defaults when omitted.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, env = OUT_ENV, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub case: CaseArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    Price,
    LoadingCap,
    AdjustableEnergy,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::Price => "price",
            Axis::LoadingCap => "loading_cap",
            Axis::AdjustableEnergy => "adjustable_energy",
        }
    }

    pub fn apply(self, base: &ScenarioConfig, value: f64) -> ScenarioConfig {
        let mut s = base.clone();
        match self {
            Axis::Price => s.price_scale = value,
            Axis::LoadingCap => s.loading_cap_fraction = value,
            Axis::AdjustableEnergy => s.adjustable_energy_delta = value,
        }
        s.name = format!("{}_{}_{}", base.name, self.label(), value);
        s
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub case: CaseArgs,
    #[arg(long, value_enum)]
    pub axis: Axis,
    /// Comma-separated axis values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct LolArgs {
    /// CSV with an `ambient_c` column and a loading column.
    #[arg(long)]
    pub series: PathBuf,
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Loading column in MW; `exchange_mw` if present, else `fixed_load_mw`.
    #[arg(long)]
    pub column: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub assets: PathBuf,
    #[arg(long)]
    pub series: PathBuf,
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long)]
    pub params: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// One-day sample series.
    #[arg(long)]
    pub sample: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 365)]
    pub days: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Also write `count` days starting at this 0-based day to `--week-out`.
    #[arg(long, requires = "week_out")]
    pub week_start: Option<usize>,
    #[arg(long, default_value_t = 7)]
    pub week_days: usize,
    #[arg(long)]
    pub week_out: Option<PathBuf>,
}

/// Process exit code for an error raised by a command.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<BendersError>() {
            return match e {
                BendersError::Schedule(s) => schedule_code(s),
                BendersError::Thermal(_) | BendersError::Options(_) => EXIT_USAGE,
                BendersError::Numerical { .. } => EXIT_NUMERICAL,
            };
        }
        if let Some(s) = cause.downcast_ref::<ScheduleError>() {
            return schedule_code(s);
        }
        if cause.downcast_ref::<DataError>().is_some() || cause.downcast_ref::<ThermalError>().is_some() {
            return EXIT_USAGE;
        }
        if cause.downcast_ref::<NumericalIssue>().is_some() {
            return EXIT_NUMERICAL;
        }
    }
    EXIT_USAGE
}

fn schedule_code(e: &ScheduleError) -> i32 {
    match e {
        ScheduleError::Infeasible(_) | ScheduleError::InfeasibleHour { .. } => EXIT_INFEASIBLE,
        ScheduleError::Input(_) => EXIT_USAGE,
        ScheduleError::Violations(_) => EXIT_NUMERICAL,
    }
}

/// A produced schedule failed its own replay.
#[derive(Debug)]
pub struct NumericalIssue(pub String);

impl std::fmt::Display for NumericalIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NumericalIssue {}

pub fn load_params(path: Option<&Path>) -> Result<TransformerThermalParams> {
    Ok(match path {
        Some(p) => parse_transformer(p)?,
        None => TransformerThermalParams::default(),
    })
}

pub fn benders_options(s: &ScenarioConfig) -> BendersOptions {
    let mut o = BendersOptions {
        block_days: s.block_days,
        ..Default::default()
    };
    if let Some(g) = s.gap_tolerance {
        o.gap_tolerance = g;
    }
    if let Some(n) = s.max_iterations {
        o.max_iterations = n;
    }
    if let Some(g) = s.master_gap {
        o.master_limits.target_gap = g;
    }
    if let Some(t) = s.master_time_limit {
        o.master_limits.max_seconds = t;
    }
    o
}

/// Solves a prepared case and checks the schedule before returning it.
pub fn solve_case(scenario: &ScenarioConfig, case: &PreparedCase) -> Result<ResultsBundle> {
    let (schedule, iterations, termination) = if scenario.grid_only {
        (grid_only_schedule(&case.fleet, &case.hours, &case.report_params)?, Vec::new(), None)
    } else {
        let r = optimize(&case.fleet, &case.hours, &case.params, &benders_options(scenario))?;
        (r.schedule, r.iterations, Some(r.termination))
    };
    let carry = CarryState::initial(&case.fleet);
    let violations = validate_schedule(&case.fleet, &case.hours, &case.report_params, &carry, &schedule, FEASIBILITY_TOL);
    if let Some(v) = violations.first() {
        return Err(NumericalIssue(format!(
            "schedule fails replay ({} violations; first: {} {} at hour {:?} by {:e})",
            violations.len(),
            v.unit,
            v.rule,
            v.hour,
            v.amount
        ))
        .into());
    }
    let ambient: Vec<f64> = case.hours.iter().map(|h| h.ambient).collect();
    let life = horizon_loss_of_life(&schedule.magnitudes(), &ambient, None, &case.report_params)?;
    let summary = Summary {
        scenario: scenario.name.clone(),
        case: scenario.case,
        hours: schedule.hours,
        operation_cost: schedule.operation_cost,
        lol_percent: life.total_lol_percent,
        lifetime_years: life.expected_lifetime_years,
        termination,
        benders_iterations: iterations.len(),
        overloaded_hours: case.overloaded_hours.clone(),
        asset_management: scenario.asset_management && !scenario.grid_only,
        investment_cost: case.report_params.investment_cost,
    };
    Ok(ResultsBundle {
        scenario: scenario.clone(),
        fleet: case.fleet.clone(),
        hours: case.hours.clone(),
        params: case.report_params,
        schedule,
        iterations,
        summary,
    })
}

pub struct Inputs {
    pub fleet: assetgrid_core::fleet::AssetFleet,
    pub table: TimeSeriesTable,
    pub params: TransformerThermalParams,
}

pub fn load_inputs(assets: &Path, series: &Path, params: Option<&Path>) -> Result<Inputs> {
    Ok(Inputs {
        fleet: parse_assets(assets)?,
        table: parse_timeseries(series)?,
        params: load_params(params)?,
    })
}

pub fn run_scenario(inputs: &Inputs, scenario: &ScenarioConfig) -> Result<ResultsBundle> {
    let case = apply_scenario(scenario, &inputs.fleet, &inputs.table, &inputs.params)?;
    solve_case(scenario, &case)
}

/// Tidy per-hour loading table for plotting.
pub fn plot_csv(bundles: &[(&str, &ResultsBundle)]) -> String {
    let mut s = String::from("hour,case,exchange_mw,loading_pu\n");
    for (label, b) in bundles {
        for t in 0..b.schedule.hours {
            let pm = b.schedule.exchange[t];
            writeln!(s, "{},{label},{pm},{}", t + 1, pm.abs() / b.params.rated_power).unwrap();
        }
    }
    s
}

fn write_bundle(bundle: &ResultsBundle, dir: &Path, label: &str) -> Result<()> {
    write_results(bundle, dir)?;
    let p = dir.join("plot.csv");
    fs::write(&p, plot_csv(&[(label, bundle)])).with_context(|| format!("writing {}", p.display()))?;
    Ok(())
}

pub fn cmd_run(args: &RunArgs) -> Result<Summary> {
    let c = &args.case;
    let scenario = parse_scenario(&c.scenario)?;
    let inputs = load_inputs(&c.assets, &c.series, c.params.as_deref())?;
    let bundle = run_scenario(&inputs, &scenario)?;
    write_bundle(&bundle, &c.out, &scenario.name)?;
    let s = &bundle.summary;
    println!(
        "{}: cost {:.2}, loss of life {:.6}%, lifetime {:.2} years -> {}",
        s.scenario,
        s.operation_cost,
        s.lol_percent,
        s.lifetime_years,
        c.out.display()
    );
    Ok(bundle.summary)
}

/// One sweep point: results without and with asset management.
#[derive(Debug)]
pub struct SweepPoint {
    pub value: f64,
    pub without: Result<Summary>,
    pub with: Result<Summary>,
}

/// Runs every point of a sweep, one thread per point, writing each bundle
/// under `out/<axis>_<value>/{without_am,with_am}`.
pub fn sweep(inputs: &Inputs, base: &ScenarioConfig, axis: Axis, values: &[f64], out: Option<&Path>) -> Vec<SweepPoint> {
    let run_variant = |value: f64, managed: bool| -> Result<Summary> {
        let mut sc = axis.apply(base, value);
        sc.asset_management = managed;
        let b = run_scenario(inputs, &sc)?;
        if let Some(out) = out {
            let dir = out
                .join(format!("{}_{value}", axis.label()))
                .join(if managed { "with_am" } else { "without_am" });
            write_bundle(&b, &dir, &sc.name)?;
        }
        Ok(b.summary)
    };
    std::thread::scope(|scope| {
        let handles: Vec<_> = values
            .iter()
            .map(|&v| {
                let f = &run_variant;
                scope.spawn(move || SweepPoint {
                    value: v,
                    without: f(v, false),
                    with: f(v, true),
                })
            })
            .collect();
        handles
            .into_iter()
            .zip(values)
            .map(|(h, &v)| {
                h.join().unwrap_or_else(|_| SweepPoint {
                    value: v,
                    without: Err(anyhow!("sweep worker panicked")),
                    with: Err(anyhow!("sweep worker panicked")),
                })
            })
            .collect()
    })
}

pub fn sweep_csv(axis: Axis, points: &[SweepPoint]) -> String {
    let mut s = format!(
        "{},lol_without_am,lol_with_am,lifetime_without_am,lifetime_with_am,cost_without_am,cost_with_am\n",
        axis.label()
    );
    let f = |r: &Result<Summary>, g: fn(&Summary) -> f64| r.as_ref().map(|x| g(x).to_string()).unwrap_or_else(|_| "failed".into());
    for p in points {
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            p.value,
            f(&p.without, |x| x.lol_percent),
            f(&p.with, |x| x.lol_percent),
            f(&p.without, |x| x.lifetime_years),
            f(&p.with, |x| x.lifetime_years),
            f(&p.without, |x| x.operation_cost),
            f(&p.with, |x| x.operation_cost),
        )
        .unwrap();
    }
    s
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<Vec<SweepPoint>> {
    if args.values.is_empty() {
        bail!("--values needs at least one value");
    }
    let c = &args.case;
    let base = parse_scenario(&c.scenario)?;
    for &v in &args.values {
        args.axis.apply(&base, v).validate().map_err(|e| anyhow!("value {v}: {e}"))?;
    }
    let inputs = load_inputs(&c.assets, &c.series, c.params.as_deref())?;
    let points = sweep(&inputs, &base, args.axis, &args.values, Some(&c.out));
    fs::create_dir_all(&c.out).with_context(|| format!("creating {}", c.out.display()))?;
    let p = c.out.join(format!("sweep_{}.csv", args.axis.label()));
    let table = sweep_csv(args.axis, &points);
    fs::write(&p, &table).with_context(|| format!("writing {}", p.display()))?;
    for pt in &points {
        for r in [&pt.without, &pt.with] {
            if let Err(e) = r {
                warn!("point {}: {e:#}", pt.value);
            }
        }
    }
    print!("{table}");
    Ok(points)
}

/// Total loss of life and implied lifetime of the loading column of a CSV.
pub fn cmd_lol(args: &LolArgs) -> Result<(f64, f64)> {
    let params = load_params(args.params.as_deref())?;
    let text = fs::read_to_string(&args.series).map_err(|source| DataError::Io {
        path: args.series.clone(),
        source,
    })?;
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| csv_error(&args.series, 1, e))?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let col = match &args.column {
        Some(c) => find(c).ok_or_else(|| data_error(&args.series, format!("no column {c}")))?,
        None => find("exchange_mw")
            .or_else(|| find("fixed_load_mw"))
            .ok_or_else(|| data_error(&args.series, "no exchange_mw or fixed_load_mw column".into()))?,
    };
    let amb = find("ambient_c").ok_or_else(|| data_error(&args.series, "no ambient_c column".into()))?;
    let mut loading = Vec::new();
    let mut ambient = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| csv_error(&args.series, line, e))?;
        let num = |k: usize| -> Result<f64, DataError> {
            rec.get(k)
                .filter(|s| !s.trim().is_empty())
                .ok_or_else(|| DataError::Csv {
                    path: args.series.clone(),
                    line,
                    msg: format!("missing value in column {}", &headers[k]),
                })?
                .trim()
                .parse::<f64>()
                .map_err(|e| DataError::Csv {
                    path: args.series.clone(),
                    line,
                    msg: format!("column {}: {e}", &headers[k]),
                })
        };
        loading.push(num(col)?.abs());
        ambient.push(num(amb)?);
    }
    let life = horizon_loss_of_life(&loading, &ambient, None, &params)?;
    println!(
        "{} intervals: loss of life {}%, expected lifetime {} years",
        loading.len(),
        life.total_lol_percent,
        life.expected_lifetime_years
    );
    Ok((life.total_lol_percent, life.expected_lifetime_years))
}

fn csv_error(path: &Path, line: u64, e: csv::Error) -> DataError {
    DataError::Csv {
        path: path.to_path_buf(),
        line,
        msg: e.to_string(),
    }
}

fn data_error(path: &Path, msg: String) -> DataError {
    DataError::Invalid(format!("{}: {msg}", path.display()))
}

pub fn cmd_validate(args: &ValidateArgs) -> Result<()> {
    let inputs = load_inputs(&args.assets, &args.series, args.params.as_deref())?;
    let scenario = match &args.scenario {
        Some(p) => parse_scenario(p)?,
        None => ScenarioConfig::named("validate"),
    };
    let case = apply_scenario(&scenario, &inputs.fleet, &inputs.table, &inputs.params)?;
    assetgrid_core::schedule::check_hourly_capability(&case.fleet, &case.hours, &case.params)?;
    let f = &case.fleet;
    println!(
        "ok: {} dispatchable, {} renewable, {} storage, {} adjustable loads; {} hours ({} days)",
        f.dispatchable.len(),
        f.renewable.len(),
        f.storage.len(),
        f.loads.len(),
        case.hours.len(),
        case.hours.len() / HOURS_PER_DAY
    );
    Ok(())
}

pub fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let sample = parse_timeseries(&args.sample)?;
    let gen = SyntheticYear {
        days: args.days,
        seed: args.seed,
        ..Default::default()
    };
    let year = gen.generate(&sample).map_err(|m| data_error(&args.sample, m))?;
    write_series(&args.out, &year)?;
    if let (Some(start), Some(path)) = (args.week_start, &args.week_out) {
        let week = year.slice_days(start, args.week_days).map_err(|m| anyhow!(m))?;
        write_series(path, &week)?;
    }
    info!("wrote {} days to {}", year.days(), args.out.display());
    Ok(())
}

fn write_series(path: &Path, table: &TimeSeriesTable) -> Result<()> {
    fs::write(path, timeseries_to_csv(table)).with_context(|| format!("writing {}", path.display()))
}

pub fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run(a) => cmd_run(a).map(|_| ()),
        Command::Sweep(a) => {
            let points = cmd_sweep(a)?;
            let failed = points.iter().filter(|p| p.without.is_err() || p.with.is_err()).count();
            if failed > 0 {
                warn!("{failed} of {} sweep points failed", points.len());
            }
            Ok(())
        }
        Command::Lol(a) => cmd_lol(a).map(|_| ()),
        Command::Validate(a) => cmd_validate(a),
        Command::Synth(a) => cmd_synth(a),
    }
}
