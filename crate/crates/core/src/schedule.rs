//! The scheduling MILP: building it from a fleet and hourly inputs, adding
//! optimality cuts, decoding solver output and replaying a finished
//! schedule against every operating rule.
//!
//! Sign convention: exchange `P^M > 0` is export to the grid, `P^M < 0` is
//! import. The hourly balance is
//! `sum P_dg + renewables + discharge - charge - P^M = fixed load + adjustable load`
//! and the exchange cost is `price * (-P^M)` (paying for imports, earning
//! on exports).
//!
//! Minimum up/down, charge/discharge and on times are window inequalities
//! `sum_{tau=t}^{t+L-1} s_tau >= L (s_t - s_{t-1})` with `L` clipped at the
//! horizon end; state carried in from the previous block fixes the leading
//! hours of a run that has not yet lasted long enough.

use assetgrid_milp::{MilpModel, RowId, RowSense, VarId};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fleet::{AdjustableLoad, AssetFleet, HourlyInput, HOURS_PER_DAY};
use crate::thermal::{horizon_loss_of_life, TransformerThermalParams};

/// Absolute tolerance on row residuals when accepting a schedule.
pub const FEASIBILITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("infeasible at hour {hour}: {detail}")]
    InfeasibleHour { hour: usize, detail: String },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("assignment violates {} rows, first: {}", .0.len(), .0.first().map(String::as_str).unwrap_or(""))]
    Violations(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitCarry {
    pub on: bool,
    /// Consecutive hours in the current state, saturating.
    pub hours_in_state: u32,
    pub output: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StorageCarry {
    pub energy: f64,
    /// Consecutive charging hours ending at the previous hour (0 if idle or
    /// discharging).
    pub charging_hours: u32,
    pub discharging_hours: u32,
}

/// State at the boundary before the first hour of a block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarryState {
    pub units: Vec<UnitCarry>,
    pub storage: Vec<StorageCarry>,
    /// Exchange magnitude of the previous hour; `None` starts the first
    /// interval in thermal steady state.
    pub last_exchange: Option<f64>,
}

impl CarryState {
    pub fn initial(fleet: &AssetFleet) -> Self {
        Self {
            units: fleet
                .dispatchable
                .iter()
                .map(|u| UnitCarry {
                    on: u.initial_on,
                    hours_in_state: u.initial_hours_in_state.unwrap_or(u.min_up.max(u.min_down)),
                    output: u.initial_output,
                })
                .collect(),
            storage: fleet
                .storage
                .iter()
                .map(|s| StorageCarry {
                    energy: s.initial_energy,
                    charging_hours: 0,
                    discharging_hours: 0,
                })
                .collect(),
            last_exchange: None,
        }
    }

    /// State after `schedule` has run from `self`.
    pub fn advance(&self, schedule: &ScheduleSolution) -> Self {
        let n = schedule.hours;
        let run = |series: &[bool], value: bool, prior: u32| -> u32 {
            let tail = series.iter().rev().take_while(|&&s| s == value).count() as u32;
            if tail as usize == series.len() {
                tail.saturating_add(prior)
            } else {
                tail
            }
        };
        Self {
            units: self
                .units
                .iter()
                .zip(&schedule.units)
                .map(|(c, u)| {
                    let on = *u.on.last().unwrap_or(&c.on);
                    let prior = if on == c.on { c.hours_in_state } else { 0 };
                    UnitCarry {
                        on,
                        hours_in_state: run(&u.on, on, prior),
                        output: *u.output.last().unwrap_or(&c.output),
                    }
                })
                .collect(),
            storage: self
                .storage
                .iter()
                .zip(&schedule.storage)
                .map(|(c, s)| StorageCarry {
                    energy: *s.energy.last().unwrap_or(&c.energy),
                    charging_hours: if n == 0 || !s.charging[n - 1] {
                        if n == 0 {
                            c.charging_hours
                        } else {
                            0
                        }
                    } else {
                        run(&s.charging, true, c.charging_hours)
                    },
                    discharging_hours: if n == 0 || !s.discharging[n - 1] {
                        if n == 0 {
                            c.discharging_hours
                        } else {
                            0
                        }
                    } else {
                        run(&s.discharging, true, c.discharging_hours)
                    },
                })
                .collect(),
            last_exchange: schedule.exchange.last().map(|p| p.abs()).or(self.last_exchange),
        }
    }
}

/// Linear lower bound `Lambda >= constant + sum_t coeff_per_hour[t] * |P^M_t|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalityCut {
    pub constant: f64,
    pub coeff_per_hour: Vec<f64>,
}

impl OptimalityCut {
    pub fn evaluate(&self, magnitudes: &[f64]) -> f64 {
        self.constant
            + self
                .coeff_per_hour
                .iter()
                .zip(magnitudes)
                .map(|(c, m)| c * m)
                .sum::<f64>()
    }
}

/// Builds the cut anchored at `anchor` (hourly exchange magnitudes) from the
/// subproblem value and its sensitivities. `lambda[t]` is the sensitivity to
/// the initial loading of hour `t`, which is hour `t - 1`'s magnitude;
/// `mu[t]` is the sensitivity to hour `t`'s own magnitude. With a steady
/// start the first hour's initial loading is its own magnitude, so
/// `lambda[0]` also lands on hour 0.
pub fn make_cut(q_hat: f64, lambda: &[f64], mu: &[f64], anchor: &[f64], steady_start: bool) -> OptimalityCut {
    let n = anchor.len();
    let coeff_per_hour: Vec<f64> = (0..n)
        .map(|t| {
            let mut c = mu[t];
            if t + 1 < n {
                c += lambda[t + 1];
            }
            if t == 0 && steady_start {
                c += lambda[0];
            }
            c
        })
        .collect();
    let constant = q_hat - coeff_per_hour.iter().zip(anchor).map(|(c, a)| c * a).sum::<f64>();
    OptimalityCut {
        constant,
        coeff_per_hour,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarMap {
    pub hours: usize,
    pub dg_output: Vec<Vec<VarId>>,
    pub dg_on: Vec<Vec<VarId>>,
    pub discharge: Vec<Vec<VarId>>,
    pub charge: Vec<Vec<VarId>>,
    pub discharging: Vec<Vec<VarId>>,
    pub charging: Vec<Vec<VarId>>,
    pub energy: Vec<Vec<VarId>>,
    pub demand: Vec<Vec<Option<VarId>>>,
    pub load_on: Vec<Vec<Option<VarId>>>,
    pub exchange: Vec<VarId>,
    pub export: Vec<VarId>,
    pub import: Vec<VarId>,
    pub export_on: Vec<VarId>,
    pub import_on: Vec<VarId>,
    pub lambda: VarId,
    pub cut_rows: Vec<RowId>,
    pub steady_start: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MasterModel {
    pub model: MilpModel,
    pub vars: VarMap,
}

impl MasterModel {
    /// Appends `Lambda - sum coeff_t (P^M1_t + P^M2_t) >= constant`.
    pub fn add_cut(&mut self, cut: &OptimalityCut) -> RowId {
        let v = &self.vars;
        let mut coeffs = vec![(v.lambda, 1.0)];
        for t in 0..v.hours {
            let c = cut.coeff_per_hour[t];
            coeffs.push((v.export[t], -c));
            coeffs.push((v.import[t], -c));
        }
        let name = format!("cut{}", v.cut_rows.len());
        let row = self.model.add_row(name, coeffs, RowSense::Ge, cut.constant);
        self.vars.cut_rows.push(row);
        row
    }
}

/// Hours of the block covered by each daily cycle of `load`; cycles cut by
/// the horizon end are not scheduled.
pub fn load_cycles(load: &AdjustableLoad, hours: usize) -> Vec<(usize, usize)> {
    let (s, e, _) = load.effective_window();
    (0..hours.div_ceil(HOURS_PER_DAY))
        .map(|d| (d * HOURS_PER_DAY + s, d * HOURS_PER_DAY + e))
        .filter(|&(_, end)| end < hours)
        .collect()
}

/// Pre-build screening for hours that no dispatch can balance.
pub fn check_hourly_capability(
    fleet: &AssetFleet,
    hours: &[HourlyInput],
    params: &TransformerThermalParams,
) -> Result<(), ScheduleError> {
    for (t, h) in hours.iter().enumerate() {
        let limit = h.exchange_limit(params.rated_power);
        let dg: f64 = fleet.dispatchable.iter().map(|u| u.p_max).sum();
        let dis: f64 = fleet.storage.iter().map(|s| s.discharge_max).sum();
        let supply = dg + dis + h.renewable_total() + limit;
        if h.fixed_load > supply + FEASIBILITY_TOL {
            return Err(ScheduleError::InfeasibleHour {
                hour: t,
                detail: format!(
                    "fixed load {} MW exceeds the {supply} MW that local units, storage and the grid connection can supply",
                    h.fixed_load
                ),
            });
        }
        let hod = t % HOURS_PER_DAY;
        let flexible: f64 = fleet
            .loads
            .iter()
            .filter(|l| {
                let (s, e, _) = l.effective_window();
                (s..=e).contains(&hod)
            })
            .map(|l| l.d_max)
            .sum();
        let ch: f64 = fleet.storage.iter().map(|s| s.charge_max).sum();
        let sink = h.fixed_load + flexible + ch + limit;
        if h.renewable_total() > sink + FEASIBILITY_TOL {
            return Err(ScheduleError::InfeasibleHour {
                hour: t,
                detail: format!(
                    "renewable output {} MW exceeds the {sink} MW that loads, storage and export can absorb",
                    h.renewable_total()
                ),
            });
        }
    }
    Ok(())
}

fn validate_inputs(fleet: &AssetFleet, hours: &[HourlyInput], carry: &CarryState) -> Result<(), ScheduleError> {
    if hours.is_empty() {
        return Err(ScheduleError::Input("horizon must contain at least one hour".into()));
    }
    fleet.validate().map_err(|e| ScheduleError::Input(e.to_string()))?;
    if carry.units.len() != fleet.dispatchable.len() || carry.storage.len() != fleet.storage.len() {
        return Err(ScheduleError::Input("carry state does not match the fleet".into()));
    }
    for (t, h) in hours.iter().enumerate() {
        if h.renewable.len() != fleet.renewable.len() {
            return Err(ScheduleError::Input(format!(
                "hour {t}: {} renewable values for {} renewable units",
                h.renewable.len(),
                fleet.renewable.len()
            )));
        }
        if !(h.line_capacity > 0.0 && h.loading_cap_fraction > 0.0) {
            return Err(ScheduleError::Input(format!(
                "hour {t}: line capacity and loading cap must be positive"
            )));
        }
        let vals = [h.fixed_load, h.price, h.ambient, h.line_capacity, h.loading_cap_fraction];
        if vals.iter().chain(&h.renewable).any(|v| !v.is_finite()) || h.fixed_load < 0.0 {
            return Err(ScheduleError::Input(format!("hour {t}: non-finite or negative input")));
        }
    }
    Ok(())
}

/// Adds the window rows for a binary status series and fixes the leading
/// hours still owed to a run in progress.
///
/// `prev` is the status before hour 0 and `prev_run` how long it has held.
/// With `on_value` true the rows demand runs of ones; otherwise runs of
/// zeros.
#[allow(clippy::too_many_arguments)]
fn add_min_run(
    m: &mut MilpModel,
    name: &str,
    status: &[VarId],
    min_run: usize,
    on_value: bool,
    prev: bool,
    prev_run: u32,
    end: usize,
) {
    let n = status.len();
    if min_run <= 1 || n == 0 {
        return;
    }
    // Run in progress that is still short.
    if prev == on_value && (prev_run as usize) < min_run {
        let owed = (min_run - prev_run as usize).min(n);
        let v = if on_value { 1.0 } else { 0.0 };
        for &s in &status[..owed] {
            m.set_bounds(s, v, v);
        }
    }
    for t in 0..n {
        let l = min_run.min(end - t);
        if l <= 1 {
            continue;
        }
        // on_value:  sum s_tau - L s_t + L s_{t-1} >= 0
        // off_value: -sum s_tau + L s_t - L s_{t-1} >= -L
        let sign = if on_value { 1.0 } else { -1.0 };
        let mut coeffs: Vec<(VarId, f64)> = (t..t + l).map(|tau| (status[tau], sign)).collect();
        coeffs.push((status[t], -sign * l as f64));
        let mut rhs = if on_value { 0.0 } else { -(l as f64) };
        if t == 0 {
            if prev {
                rhs -= sign * l as f64;
            }
        } else {
            coeffs.push((status[t - 1], sign * l as f64));
        }
        m.add_row(format!("{name}_run{t}"), coeffs, RowSense::Ge, rhs);
    }
}

/// Upper bound on the loss-of-life cost over the block: every hour at its
/// exchange limit. The aging cost is increasing in each hourly magnitude.
fn lambda_ceiling(hours: &[HourlyInput], params: &TransformerThermalParams, carry: &CarryState) -> f64 {
    if params.investment_cost == 0.0 {
        return 0.0;
    }
    let caps: Vec<f64> = hours.iter().map(|h| h.exchange_limit(params.rated_power)).collect();
    let amb: Vec<f64> = hours.iter().map(|h| h.ambient).collect();
    let carry_in = carry.last_exchange.map(|c| c.max(0.0));
    match horizon_loss_of_life(&caps, &amb, carry_in, params) {
        Ok(h) => params.investment_cost * h.total_lol_percent / 100.0 * (1.0 + 1e-6) + 1.0,
        Err(_) => f64::MAX / 4.0,
    }
}

pub fn build_model(
    fleet: &AssetFleet,
    hours: &[HourlyInput],
    params: &TransformerThermalParams,
    carry: &CarryState,
    cuts: &[OptimalityCut],
) -> Result<MasterModel, ScheduleError> {
    validate_inputs(fleet, hours, carry)?;
    check_hourly_capability(fleet, hours, params)?;
    let n = hours.len();
    let mut m = MilpModel::new();

    let mut dg_output = Vec::new();
    let mut dg_on = Vec::new();
    for (i, u) in fleet.dispatchable.iter().enumerate() {
        let c = &carry.units[i];
        let p: Vec<VarId> = (0..n)
            .map(|t| m.add_continuous(format!("P_{}_{t}", u.name), 0.0, u.p_max, u.cost_per_mwh))
            .collect();
        let on: Vec<VarId> = (0..n).map(|t| m.add_binary(format!("I_{}_{t}", u.name), 0.0)).collect();
        for t in 0..n {
            m.add_row(format!("{}_max{t}", u.name), [(p[t], 1.0), (on[t], -u.p_max)], RowSense::Le, 0.0);
            if u.p_min > 0.0 {
                m.add_row(format!("{}_min{t}", u.name), [(p[t], 1.0), (on[t], -u.p_min)], RowSense::Ge, 0.0);
            }
        }
        if u.ramp_up < u.p_max {
            for t in 0..n {
                if t == 0 {
                    m.add_row(format!("{}_up0", u.name), [(p[0], 1.0)], RowSense::Le, u.ramp_up + c.output);
                } else {
                    m.add_row(format!("{}_up{t}", u.name), [(p[t], 1.0), (p[t - 1], -1.0)], RowSense::Le, u.ramp_up);
                }
            }
        }
        if u.ramp_down < u.p_max {
            for t in 0..n {
                if t == 0 {
                    m.add_row(format!("{}_dn0", u.name), [(p[0], -1.0)], RowSense::Le, u.ramp_down - c.output);
                } else {
                    m.add_row(format!("{}_dn{t}", u.name), [(p[t - 1], 1.0), (p[t], -1.0)], RowSense::Le, u.ramp_down);
                }
            }
        }
        add_min_run(&mut m, &format!("{}_up", u.name), &on, u.min_up as usize, true, c.on, c.hours_in_state, n);
        add_min_run(&mut m, &format!("{}_down", u.name), &on, u.min_down as usize, false, c.on, c.hours_in_state, n);
        dg_output.push(p);
        dg_on.push(on);
    }

    let mut discharge = Vec::new();
    let mut charge = Vec::new();
    let mut discharging = Vec::new();
    let mut charging = Vec::new();
    let mut energy = Vec::new();
    for (k, s) in fleet.storage.iter().enumerate() {
        let c = &carry.storage[k];
        let nm = &s.name;
        let pd: Vec<VarId> = (0..n).map(|t| m.add_continuous(format!("Pdch_{nm}_{t}"), 0.0, s.discharge_max, 0.0)).collect();
        let pc: Vec<VarId> = (0..n).map(|t| m.add_continuous(format!("Pch_{nm}_{t}"), 0.0, s.charge_max, 0.0)).collect();
        let u: Vec<VarId> = (0..n).map(|t| m.add_binary(format!("u_{nm}_{t}"), 0.0)).collect();
        let v: Vec<VarId> = (0..n).map(|t| m.add_binary(format!("v_{nm}_{t}"), 0.0)).collect();
        let e: Vec<VarId> = (0..n)
            .map(|t| m.add_continuous(format!("C_{nm}_{t}"), s.energy_min, s.energy_max, 0.0))
            .collect();
        for t in 0..n {
            m.add_row(format!("{nm}_dmax{t}"), [(pd[t], 1.0), (u[t], -s.discharge_max)], RowSense::Le, 0.0);
            if s.discharge_min > 0.0 {
                m.add_row(format!("{nm}_dmin{t}"), [(pd[t], 1.0), (u[t], -s.discharge_min)], RowSense::Ge, 0.0);
            }
            m.add_row(format!("{nm}_cmax{t}"), [(pc[t], 1.0), (v[t], -s.charge_max)], RowSense::Le, 0.0);
            if s.charge_min > 0.0 {
                m.add_row(format!("{nm}_cmin{t}"), [(pc[t], 1.0), (v[t], -s.charge_min)], RowSense::Ge, 0.0);
            }
            m.add_row(format!("{nm}_mode{t}"), [(u[t], 1.0), (v[t], 1.0)], RowSense::Le, 1.0);
            let mut coeffs = vec![(e[t], 1.0), (pd[t], s.period / s.efficiency), (pc[t], -s.period)];
            let rhs = if t == 0 {
                c.energy
            } else {
                coeffs.push((e[t - 1], -1.0));
                0.0
            };
            m.add_row(format!("{nm}_energy{t}"), coeffs, RowSense::Eq, rhs);
        }
        add_min_run(
            &mut m,
            &format!("{nm}_ch"),
            &v,
            s.min_charge_time as usize,
            true,
            c.charging_hours > 0,
            c.charging_hours,
            n,
        );
        add_min_run(
            &mut m,
            &format!("{nm}_dch"),
            &u,
            s.min_discharge_time as usize,
            true,
            c.discharging_hours > 0,
            c.discharging_hours,
            n,
        );
        discharge.push(pd);
        charge.push(pc);
        discharging.push(u);
        charging.push(v);
        energy.push(e);
    }

    let mut demand = Vec::new();
    let mut load_on = Vec::new();
    for l in &fleet.loads {
        let mut d = vec![None; n];
        let mut z = vec![None; n];
        let (_, _, min_on) = l.effective_window();
        for (start, end) in load_cycles(l, n) {
            let ds: Vec<VarId> = (start..=end)
                .map(|t| m.add_continuous(format!("D_{}_{t}", l.name), 0.0, l.d_max, 0.0))
                .collect();
            let zs: Vec<VarId> = (start..=end).map(|t| m.add_binary(format!("z_{}_{t}", l.name), 0.0)).collect();
            for (k, t) in (start..=end).enumerate() {
                m.add_row(format!("{}_max{t}", l.name), [(ds[k], 1.0), (zs[k], -l.d_max)], RowSense::Le, 0.0);
                if l.d_min > 0.0 {
                    m.add_row(format!("{}_min{t}", l.name), [(ds[k], 1.0), (zs[k], -l.d_min)], RowSense::Ge, 0.0);
                }
                d[t] = Some(ds[k]);
                z[t] = Some(zs[k]);
            }
            m.add_row(
                format!("{}_energy{start}", l.name),
                ds.iter().map(|&v| (v, 1.0)),
                RowSense::Eq,
                l.required_energy,
            );
            add_min_run(&mut m, &format!("{}_on{start}", l.name), &zs, min_on, true, false, 0, zs.len());
        }
        demand.push(d);
        load_on.push(z);
    }

    let mut exchange = Vec::new();
    let mut export = Vec::new();
    let mut import = Vec::new();
    let mut export_on = Vec::new();
    let mut import_on = Vec::new();
    for (t, h) in hours.iter().enumerate() {
        let limit = h.exchange_limit(params.rated_power);
        let big_m = h.line_capacity;
        let pm = m.add_continuous(format!("PM_{t}"), -limit, limit, -h.price);
        let pm1 = m.add_continuous(format!("PM1_{t}"), 0.0, big_m, 0.0);
        let pm2 = m.add_continuous(format!("PM2_{t}"), 0.0, big_m, 0.0);
        let x = m.add_binary(format!("x_{t}"), 0.0);
        let y = m.add_binary(format!("y_{t}"), 0.0);
        m.add_row(format!("sel{t}"), [(x, 1.0), (y, 1.0)], RowSense::Le, 1.0);
        m.add_row(format!("zero_lo{t}"), [(pm, 1.0), (x, big_m), (y, big_m)], RowSense::Ge, 0.0);
        m.add_row(format!("zero_hi{t}"), [(pm, 1.0), (x, -big_m), (y, -big_m)], RowSense::Le, 0.0);
        m.add_row(format!("exp_lo{t}"), [(pm, 1.0), (pm1, -1.0), (x, -big_m)], RowSense::Ge, -big_m);
        m.add_row(format!("exp_hi{t}"), [(pm, 1.0), (pm1, -1.0), (x, big_m)], RowSense::Le, big_m);
        m.add_row(format!("imp_lo{t}"), [(pm, 1.0), (pm2, 1.0), (y, -big_m)], RowSense::Ge, -big_m);
        m.add_row(format!("imp_hi{t}"), [(pm, 1.0), (pm2, 1.0), (y, big_m)], RowSense::Le, big_m);
        // Valid for every 0/1 selector and much tighter in the relaxation.
        m.add_row(format!("exp_gate{t}"), [(pm1, 1.0), (x, -big_m)], RowSense::Le, 0.0);
        m.add_row(format!("imp_gate{t}"), [(pm2, 1.0), (y, -big_m)], RowSense::Le, 0.0);
        m.add_row(format!("split{t}"), [(pm, 1.0), (pm1, -1.0), (pm2, 1.0)], RowSense::Eq, 0.0);
        exchange.push(pm);
        export.push(pm1);
        import.push(pm2);
        export_on.push(x);
        import_on.push(y);
    }

    for (t, h) in hours.iter().enumerate() {
        let mut coeffs: Vec<(VarId, f64)> = Vec::new();
        for p in &dg_output {
            coeffs.push((p[t], 1.0));
        }
        for k in 0..fleet.storage.len() {
            coeffs.push((discharge[k][t], 1.0));
            coeffs.push((charge[k][t], -1.0));
        }
        for d in &demand {
            if let Some(v) = d[t] {
                coeffs.push((v, -1.0));
            }
        }
        coeffs.push((exchange[t], -1.0));
        m.add_row(format!("balance{t}"), coeffs, RowSense::Eq, h.fixed_load - h.renewable_total());
    }

    let lambda = m.add_continuous("Lambda", 0.0, lambda_ceiling(hours, params, carry), 1.0);
    let mut master = MasterModel {
        model: m,
        vars: VarMap {
            hours: n,
            dg_output,
            dg_on,
            discharge,
            charge,
            discharging,
            charging,
            energy,
            demand,
            load_on,
            exchange,
            export,
            import,
            export_on,
            import_on,
            lambda,
            cut_rows: Vec::new(),
            steady_start: carry.last_exchange.is_none(),
        },
    };
    for cut in cuts {
        if cut.coeff_per_hour.len() != n {
            return Err(ScheduleError::Input(format!(
                "cut has {} hourly coefficients for a {n}-hour block",
                cut.coeff_per_hour.len()
            )));
        }
        master.add_cut(cut);
    }
    Ok(master)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitSchedule {
    pub name: String,
    pub output: Vec<f64>,
    pub on: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StorageSchedule {
    pub name: String,
    pub discharge: Vec<f64>,
    pub charge: Vec<f64>,
    pub discharging: Vec<bool>,
    pub charging: Vec<bool>,
    pub energy: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadSchedule {
    pub name: String,
    pub demand: Vec<f64>,
    pub on: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSolution {
    pub hours: usize,
    pub units: Vec<UnitSchedule>,
    pub storage: Vec<StorageSchedule>,
    pub loads: Vec<LoadSchedule>,
    /// Positive for export.
    pub exchange: Vec<f64>,
    pub export: Vec<f64>,
    pub import: Vec<f64>,
    pub export_on: Vec<bool>,
    pub import_on: Vec<bool>,
    pub k_initial: Vec<f64>,
    pub k_ultimate: Vec<f64>,
    pub operation_cost: f64,
    pub lambda: f64,
}

impl ScheduleSolution {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.export.iter().zip(&self.import).map(|(a, b)| a + b).collect()
    }

    /// Concatenates a later block onto this schedule.
    pub fn append(&mut self, other: ScheduleSolution) {
        self.hours += other.hours;
        for (a, b) in self.units.iter_mut().zip(other.units) {
            a.output.extend(b.output);
            a.on.extend(b.on);
        }
        for (a, b) in self.storage.iter_mut().zip(other.storage) {
            a.discharge.extend(b.discharge);
            a.charge.extend(b.charge);
            a.discharging.extend(b.discharging);
            a.charging.extend(b.charging);
            a.energy.extend(b.energy);
        }
        for (a, b) in self.loads.iter_mut().zip(other.loads) {
            a.demand.extend(b.demand);
            a.on.extend(b.on);
        }
        self.exchange.extend(other.exchange);
        self.export.extend(other.export);
        self.import.extend(other.import);
        self.export_on.extend(other.export_on);
        self.import_on.extend(other.import_on);
        self.k_initial.extend(other.k_initial);
        self.k_ultimate.extend(other.k_ultimate);
        self.operation_cost += other.operation_cost;
        self.lambda += other.lambda;
    }
}

/// Generation cost plus net purchase cost of `schedule`.
pub fn operation_cost(fleet: &AssetFleet, hours: &[HourlyInput], schedule: &ScheduleSolution) -> f64 {
    let mut cost = 0.0;
    for (u, s) in fleet.dispatchable.iter().zip(&schedule.units) {
        cost += u.cost_per_mwh * s.output.iter().sum::<f64>();
    }
    for (h, pm) in hours.iter().zip(&schedule.exchange) {
        cost -= h.price * pm;
    }
    cost
}

/// Splits a signed exchange series into export and import parts with their
/// selectors; zero maps to both selectors off.
pub fn split_exchange(exchange: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<bool>, Vec<bool>) {
    let export = exchange.iter().map(|&p| if p > 0.0 { p } else { 0.0 }).collect();
    let import = exchange.iter().map(|&p| if p < 0.0 { -p } else { 0.0 }).collect();
    let x = exchange.iter().map(|&p| p > 0.0).collect();
    let y = exchange.iter().map(|&p| p < 0.0).collect();
    (export, import, x, y)
}

/// Schedule of a fleet with nothing to dispatch: the grid covers fixed load
/// net of renewables, with no exchange limit applied.
pub fn grid_only_schedule(
    fleet: &AssetFleet,
    hours: &[HourlyInput],
    params: &TransformerThermalParams,
) -> Result<ScheduleSolution, ScheduleError> {
    if !(fleet.dispatchable.is_empty() && fleet.storage.is_empty() && fleet.loads.is_empty()) {
        return Err(ScheduleError::Input("grid-only supply needs a fleet without controllable assets".into()));
    }
    if hours.is_empty() {
        return Err(ScheduleError::Input("horizon must contain at least one hour".into()));
    }
    let exchange: Vec<f64> = hours.iter().map(|h| clean(h.renewable_total() - h.fixed_load)).collect();
    let (export, import, export_on, import_on) = split_exchange(&exchange);
    let mags: Vec<f64> = exchange.iter().map(|p| p.abs()).collect();
    let pn = params.rated_power;
    let mut sol = ScheduleSolution {
        hours: hours.len(),
        units: Vec::new(),
        storage: Vec::new(),
        loads: Vec::new(),
        k_initial: (0..mags.len()).map(|t| mags[t.saturating_sub(1)] / pn).collect(),
        k_ultimate: mags.iter().map(|m| m / pn).collect(),
        exchange,
        export,
        import,
        export_on,
        import_on,
        operation_cost: 0.0,
        lambda: 0.0,
    };
    sol.operation_cost = operation_cost(fleet, hours, &sol);
    Ok(sol)
}

fn clean(v: f64) -> f64 {
    if v.abs() < 1e-10 {
        0.0
    } else {
        v + 0.0
    }
}

pub fn decode_solution(
    master: &MasterModel,
    values: &[f64],
    fleet: &AssetFleet,
    hours: &[HourlyInput],
    params: &TransformerThermalParams,
    carry: &CarryState,
) -> Result<ScheduleSolution, ScheduleError> {
    let bad = master.model.violated_rows(values, FEASIBILITY_TOL);
    let bound_viol = master.model.max_bound_violation(values);
    if !bad.is_empty() || bound_viol > FEASIBILITY_TOL {
        let mut msgs: Vec<String> = bad
            .iter()
            .map(|(r, v)| format!("{} (by {v:e})", master.model.rows[r.0].name))
            .collect();
        if bound_viol > FEASIBILITY_TOL {
            msgs.push(format!("variable bounds (by {bound_viol:e})"));
        }
        return Err(ScheduleError::Violations(msgs));
    }
    let v = &master.vars;
    let n = v.hours;
    let val = |id: VarId| clean(values[id.0]);
    let flag = |id: VarId| values[id.0] > 0.5;
    let units = fleet
        .dispatchable
        .iter()
        .enumerate()
        .map(|(i, u)| UnitSchedule {
            name: u.name.clone(),
            output: v.dg_output[i].iter().map(|&id| val(id)).collect(),
            on: v.dg_on[i].iter().map(|&id| flag(id)).collect(),
        })
        .collect();
    let storage = fleet
        .storage
        .iter()
        .enumerate()
        .map(|(k, s)| StorageSchedule {
            name: s.name.clone(),
            discharge: v.discharge[k].iter().map(|&id| val(id)).collect(),
            charge: v.charge[k].iter().map(|&id| val(id)).collect(),
            discharging: v.discharging[k].iter().map(|&id| flag(id)).collect(),
            charging: v.charging[k].iter().map(|&id| flag(id)).collect(),
            energy: v.energy[k].iter().map(|&id| val(id)).collect(),
        })
        .collect();
    let loads = fleet
        .loads
        .iter()
        .enumerate()
        .map(|(d, l)| LoadSchedule {
            name: l.name.clone(),
            demand: v.demand[d].iter().map(|o| o.map_or(0.0, val)).collect(),
            on: v.load_on[d].iter().map(|o| o.is_some_and(flag)).collect(),
        })
        .collect();
    let exchange: Vec<f64> = v.exchange.iter().map(|&id| val(id)).collect();
    let export: Vec<f64> = v.export.iter().map(|&id| val(id)).collect();
    let import: Vec<f64> = v.import.iter().map(|&id| val(id)).collect();
    let mags: Vec<f64> = export.iter().zip(&import).map(|(a, b)| a + b).collect();
    let pn = params.rated_power;
    let k_ultimate: Vec<f64> = mags.iter().map(|m| m / pn).collect();
    let mut k_initial = Vec::with_capacity(n);
    for t in 0..n {
        k_initial.push(if t == 0 {
            carry.last_exchange.unwrap_or(mags[0]) / pn
        } else {
            mags[t - 1] / pn
        });
    }
    let mut sol = ScheduleSolution {
        hours: n,
        units,
        storage,
        loads,
        exchange,
        export,
        import,
        export_on: v.export_on.iter().map(|&id| flag(id)).collect(),
        import_on: v.import_on.iter().map(|&id| flag(id)).collect(),
        k_initial,
        k_ultimate,
        operation_cost: 0.0,
        lambda: val(v.lambda),
    };
    sol.operation_cost = operation_cost(fleet, hours, &sol);
    Ok(sol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub hour: Option<usize>,
    pub unit: String,
    pub rule: String,
    pub amount: f64,
}

struct Replay<'a> {
    tol: f64,
    out: &'a mut Vec<Violation>,
}

impl Replay<'_> {
    fn check(&mut self, hour: Option<usize>, unit: &str, rule: &str, amount: f64) {
        if !(amount <= self.tol) {
            self.out.push(Violation {
                hour,
                unit: unit.to_string(),
                rule: rule.to_string(),
                amount,
            });
        }
    }

    /// Every run of `value` that starts inside the window (or continues a
    /// run of `prior` hours from before it) must last `min_run` hours unless
    /// it reaches the window end.
    fn runs(&mut self, unit: &str, rule: &str, series: &[bool], value: bool, min_run: usize, prev: bool, prior: u32, offset: usize) {
        let n = series.len();
        let mut t = 0;
        while t < n {
            if series[t] != value {
                t += 1;
                continue;
            }
            let start = t;
            while t < n && series[t] == value {
                t += 1;
            }
            let mut len = t - start;
            if start == 0 && prev == value {
                len += prior as usize;
            }
            if t < n && len < min_run {
                self.check(Some(offset + start), unit, rule, (min_run - len) as f64);
            }
        }
        // A short carried-in run that the window switches off immediately.
        if n > 0 && prev == value && series[0] != value && (prior as usize) < min_run {
            self.check(Some(offset), unit, rule, (min_run - prior as usize) as f64);
        }
    }
}

/// Replays `schedule` against every operating rule, starting from `carry`.
/// Returns all violations above `tol`.
pub fn validate_schedule(
    fleet: &AssetFleet,
    hours: &[HourlyInput],
    params: &TransformerThermalParams,
    carry: &CarryState,
    schedule: &ScheduleSolution,
    tol: f64,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = hours.len();
    let mut r = Replay { tol, out: &mut out };
    if schedule.hours != n || schedule.exchange.len() != n {
        r.check(None, "schedule", "length matches horizon", f64::INFINITY);
        return out;
    }

    for t in 0..n {
        let h = &hours[t];
        let mut net = h.renewable_total() - h.fixed_load - schedule.exchange[t];
        for u in &schedule.units {
            net += u.output[t];
        }
        for s in &schedule.storage {
            net += s.discharge[t] - s.charge[t];
        }
        for l in &schedule.loads {
            net -= l.demand[t];
        }
        r.check(Some(t), "grid", "load balance", net.abs());

        let pm = schedule.exchange[t];
        let limit = h.exchange_limit(params.rated_power);
        let big_m = h.line_capacity;
        let (p1, p2) = (schedule.export[t], schedule.import[t]);
        let (x, y) = (schedule.export_on[t], schedule.import_on[t]);
        let b = |f: bool| if f { 1.0 } else { 0.0 };
        r.check(Some(t), "grid", "exchange limit", pm.abs() - limit);
        r.check(Some(t), "grid", "split non-negative", -p1.min(p2));
        r.check(Some(t), "grid", "one selector", b(x) + b(y) - 1.0);
        r.check(Some(t), "grid", "split reconstructs exchange", (b(x) * p1 - b(y) * p2 - pm).abs());
        r.check(Some(t), "grid", "magnitude equals split sum", (pm.abs() - (p1 + p2)).abs());
        r.check(Some(t), "grid", "export gated by selector", p1 - big_m * b(x));
        r.check(Some(t), "grid", "import gated by selector", p2 - big_m * b(y));
        r.check(Some(t), "grid", "zero exchange without selector", pm.abs() - big_m * (b(x) + b(y)));
        let k_prev = if t == 0 {
            carry.last_exchange.unwrap_or(pm.abs())
        } else {
            schedule.exchange[t - 1].abs()
        };
        r.check(Some(t), "grid", "initial loading ratio", (schedule.k_initial[t] - k_prev / params.rated_power).abs());
        r.check(Some(t), "grid", "ultimate loading ratio", (schedule.k_ultimate[t] - pm.abs() / params.rated_power).abs());
    }

    for ((u, s), c) in fleet.dispatchable.iter().zip(&schedule.units).zip(&carry.units) {
        let nm = &u.name;
        for t in 0..n {
            let p = s.output[t];
            if s.on[t] {
                r.check(Some(t), nm, "output at least p_min when on", u.p_min - p);
                r.check(Some(t), nm, "output at most p_max", p - u.p_max);
            } else {
                r.check(Some(t), nm, "no output when off", p.abs());
            }
            let prev = if t == 0 { c.output } else { s.output[t - 1] };
            r.check(Some(t), nm, "ramp up", p - prev - u.ramp_up);
            r.check(Some(t), nm, "ramp down", prev - p - u.ramp_down);
        }
        r.runs(nm, "minimum up time", &s.on, true, u.min_up as usize, c.on, c.hours_in_state, 0);
        r.runs(nm, "minimum down time", &s.on, false, u.min_down as usize, c.on, c.hours_in_state, 0);
    }

    for ((st, s), c) in fleet.storage.iter().zip(&schedule.storage).zip(&carry.storage) {
        let nm = &st.name;
        for t in 0..n {
            let b = |f: bool| if f { 1.0 } else { 0.0 };
            let (u, v) = (b(s.discharging[t]), b(s.charging[t]));
            r.check(Some(t), nm, "one mode at a time", u + v - 1.0);
            r.check(Some(t), nm, "discharge at most max", s.discharge[t] - st.discharge_max * u);
            r.check(Some(t), nm, "discharge at least min", st.discharge_min * u - s.discharge[t]);
            r.check(Some(t), nm, "charge at most max", s.charge[t] - st.charge_max * v);
            r.check(Some(t), nm, "charge at least min", st.charge_min * v - s.charge[t]);
            let prev = if t == 0 { c.energy } else { s.energy[t - 1] };
            let expect = prev - s.discharge[t] * st.period / st.efficiency + s.charge[t] * st.period;
            r.check(Some(t), nm, "energy balance", (s.energy[t] - expect).abs());
            r.check(Some(t), nm, "energy at least min", st.energy_min - s.energy[t]);
            r.check(Some(t), nm, "energy at most max", s.energy[t] - st.energy_max);
        }
        r.runs(nm, "minimum charge time", &s.charging, true, st.min_charge_time as usize, c.charging_hours > 0, c.charging_hours, 0);
        r.runs(
            nm,
            "minimum discharge time",
            &s.discharging,
            true,
            st.min_discharge_time as usize,
            c.discharging_hours > 0,
            c.discharging_hours,
            0,
        );
    }

    for (l, s) in fleet.loads.iter().zip(&schedule.loads) {
        let nm = &l.name;
        let cycles = load_cycles(l, n);
        let inside = |t: usize| cycles.iter().any(|&(a, b)| (a..=b).contains(&t));
        for t in 0..n {
            if inside(t) {
                let z = if s.on[t] { 1.0 } else { 0.0 };
                r.check(Some(t), nm, "demand at most max", s.demand[t] - l.d_max * z);
                r.check(Some(t), nm, "demand at least min", l.d_min * z - s.demand[t]);
            } else {
                r.check(Some(t), nm, "no demand outside window", s.demand[t].abs());
                r.check(Some(t), nm, "off outside window", if s.on[t] { 1.0 } else { 0.0 });
            }
        }
        let (_, _, min_on) = l.effective_window();
        for (a, b) in cycles {
            let total: f64 = s.demand[a..=b].iter().sum();
            r.check(Some(a), nm, "required energy", (total - l.required_energy).abs());
            r.runs(nm, "minimum on time", &s.on[a..=b], true, min_on, false, 0, a);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_cut_from_zero_duals() {
        let cut = make_cut(10.0, &[0.0, 0.0], &[0.0, 0.0], &[3.0, 4.0], true);
        assert_eq!(cut.constant, 10.0);
        assert_eq!(cut.coeff_per_hour, vec![0.0, 0.0]);
    }

    #[test]
    fn single_hour_cut_substitutes_directly() {
        let cut = make_cut(10.0, &[0.0], &[2.0], &[5.0], false);
        assert_eq!(cut.coeff_per_hour, vec![2.0]);
        assert_eq!(cut.constant, 0.0);
        assert_eq!(cut.evaluate(&[7.0]), 10.0 + 2.0 * (7.0 - 5.0));
    }

    #[test]
    fn cut_is_tight_at_anchor_and_sums_duals() {
        let lambda = [0.5, 1.5, 2.5];
        let mu = [1.0, 2.0, 3.0];
        let anchor = [4.0, 6.0, 8.0];
        let cut = make_cut(42.0, &lambda, &mu, &anchor, false);
        assert_eq!(cut.coeff_per_hour, vec![1.0 + 1.5, 2.0 + 2.5, 3.0]);
        assert!((cut.evaluate(&anchor) - 42.0).abs() < 1e-12);
        let steady = make_cut(42.0, &lambda, &mu, &anchor, true);
        assert_eq!(steady.coeff_per_hour[0], 1.0 + 1.5 + 0.5);
    }

    #[test]
    fn exchange_split_by_sign() {
        let (p1, p2, x, y) = split_exchange(&[3.0, -2.0, 0.0]);
        assert_eq!(p1, vec![3.0, 0.0, 0.0]);
        assert_eq!(p2, vec![0.0, 2.0, 0.0]);
        assert_eq!(x, vec![true, false, false]);
        assert_eq!(y, vec![false, true, false]);
    }
}
