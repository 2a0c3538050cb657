//! Benders iteration between the scheduling master and the transformer
//! aging subproblem, run block by block over the horizon.

use std::time::{Duration, Instant};

use assetgrid_milp::{BranchAndBound, MilpBackend, MilpStatus, SolverLimits};
use log::{debug, info};
use serde::Serialize;
use thiserror::Error;

use crate::fleet::{AssetFleet, HourlyInput, HOURS_PER_DAY};
use crate::schedule::{
    build_model, decode_solution, make_cut, CarryState, OptimalityCut, ScheduleError, ScheduleSolution,
};
use crate::thermal::{horizon_loss_of_life, loss_gradient, IntervalLoading, ThermalError, TransformerThermalParams};

#[derive(Debug, Error)]
pub enum BendersError {
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Thermal(#[from] ThermalError),
    #[error("invalid options: {0}")]
    Options(String),
    #[error("master solver failed in block {block}: {detail}")]
    Numerical { block: usize, detail: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BendersOptions {
    pub gap_tolerance: f64,
    pub max_iterations: usize,
    pub master_limits: SolverLimits,
    /// Per-unit loading below which gradients are taken at the floor.
    pub gradient_floor: f64,
    /// Days per master problem; `None` solves the whole horizon at once.
    pub block_days: Option<usize>,
}

impl Default for BendersOptions {
    fn default() -> Self {
        Self {
            gap_tolerance: 1e-4,
            max_iterations: 50,
            master_limits: SolverLimits::default(),
            gradient_floor: 1e-6,
            block_days: Some(1),
        }
    }
}

impl BendersOptions {
    pub fn validate(&self) -> Result<(), BendersError> {
        if !(self.gap_tolerance > 0.0) {
            return Err(BendersError::Options("gap tolerance must be positive".into()));
        }
        if self.max_iterations < 1 {
            return Err(BendersError::Options("at least one iteration is required".into()));
        }
        if !(self.gradient_floor > 0.0) {
            return Err(BendersError::Options("gradient floor must be positive".into()));
        }
        if self.block_days == Some(0) {
            return Err(BendersError::Options("block size must be at least one day".into()));
        }
        self.master_limits
            .validate()
            .map_err(|e| BendersError::Options(e.to_string()))
    }
}

/// Aging cost of a fixed exchange profile and its sensitivities.
#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemResult {
    pub q_hat: f64,
    /// Sensitivity of `q_hat` to each interval's initial loading, per MW.
    pub lambda: Vec<f64>,
    /// Sensitivity to each interval's ultimate loading, per MW.
    pub mu: Vec<f64>,
    pub lol_percent: f64,
    /// Some ratio sat below the gradient floor and was clamped for the
    /// derivative.
    pub clamped: bool,
}

/// `magnitudes` are hourly exchange magnitudes in MW; `initial` is the
/// magnitude of the hour before the first (steady start when `None`).
pub fn evaluate_subproblem(
    magnitudes: &[f64],
    ambient: &[f64],
    initial: Option<f64>,
    params: &TransformerThermalParams,
    gradient_floor: f64,
) -> Result<SubproblemResult, ThermalError> {
    let horizon = horizon_loss_of_life(magnitudes, ambient, initial, params)?;
    let psi = params.investment_cost;
    let scale = psi / (100.0 * params.rated_power);
    let mut clamped = false;
    let mut lambda = Vec::with_capacity(magnitudes.len());
    let mut mu = Vec::with_capacity(magnitudes.len());
    let pairs = crate::thermal::loading_ratios(magnitudes, initial, params.rated_power);
    for ((ki, ku), &amb) in pairs.into_iter().zip(ambient) {
        if ki < gradient_floor || ku < gradient_floor {
            clamped = true;
        }
        let g = loss_gradient(
            &IntervalLoading {
                k_initial: ki.max(gradient_floor),
                k_ultimate: ku.max(gradient_floor),
                ambient: amb,
            },
            params,
        )?;
        lambda.push(scale * g.d_lol_d_k_initial);
        mu.push(scale * g.d_lol_d_k_ultimate);
    }
    Ok(SubproblemResult {
        q_hat: psi * horizon.total_lol_percent / 100.0,
        lambda,
        mu,
        lol_percent: horizon.total_lol_percent,
        clamped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub block: usize,
    pub iteration: usize,
    pub lower_bound: f64,
    pub q_hat: f64,
    pub upper_bound: f64,
    pub best_upper_bound: f64,
    pub gap: f64,
    pub cut_issued: bool,
    pub gradient_clamped: bool,
    pub master_status: String,
    pub master_nodes: usize,
    #[serde(skip)]
    pub master_time: Duration,
    #[serde(skip)]
    pub subproblem_time: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    IterationLimit,
}

/// A cut together with the exchange profile it linearizes at.
#[derive(Debug, Clone, PartialEq)]
pub struct IssuedCut {
    pub block: usize,
    pub iteration: usize,
    /// Hourly exchange magnitudes of the block, MW.
    pub anchor: Vec<f64>,
    pub q_hat: f64,
    pub cut: OptimalityCut,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BendersResult {
    pub schedule: ScheduleSolution,
    pub operation_cost: f64,
    pub lol_percent: f64,
    pub lifetime_years: f64,
    pub iterations: Vec<IterationRecord>,
    pub cuts: Vec<IssuedCut>,
    pub termination: Termination,
}

fn blocks(hours: usize, block_days: Option<usize>) -> Vec<(usize, usize)> {
    let size = block_days.map_or(hours, |d| d * HOURS_PER_DAY).max(1);
    (0..hours).step_by(size).map(|s| (s, (s + size).min(hours))).collect()
}

struct BlockOutcome {
    schedule: ScheduleSolution,
    converged: bool,
}

#[allow(clippy::too_many_arguments)]
fn solve_block(
    block: usize,
    fleet: &AssetFleet,
    hours: &[HourlyInput],
    params: &TransformerThermalParams,
    carry: &CarryState,
    options: &BendersOptions,
    backend: &dyn MilpBackend,
    log: &mut Vec<IterationRecord>,
    cuts_out: &mut Vec<IssuedCut>,
) -> Result<BlockOutcome, BendersError> {
    let ambient: Vec<f64> = hours.iter().map(|h| h.ambient).collect();
    let mut master = build_model(fleet, hours, params, carry, &[])?;
    let mut lower = f64::NEG_INFINITY;
    let mut best: Option<(f64, ScheduleSolution)> = None;
    // Previous master solution with Lambda lifted onto the new cuts.
    let mut start: Option<Vec<f64>> = None;
    for it in 1..=options.max_iterations {
        let t0 = Instant::now();
        let sol = backend
            .solve_from(&master.model, &options.master_limits, start.as_deref())
            .map_err(|e| BendersError::Numerical {
                block,
                detail: e.to_string(),
            })?;
        let master_time = t0.elapsed();
        match sol.status {
            MilpStatus::Infeasible => {
                return Err(ScheduleError::Infeasible(format!(
                    "no schedule satisfies the operating rules in block {block} ({} hours)",
                    hours.len()
                ))
                .into())
            }
            MilpStatus::Unbounded => {
                return Err(BendersError::Numerical {
                    block,
                    detail: "master relaxation is unbounded".into(),
                })
            }
            _ => {}
        }
        let Some(values) = sol.values.as_ref() else {
            return Err(BendersError::Numerical {
                block,
                detail: format!("no incumbent within solver limits ({:?})", sol.status),
            });
        };
        let schedule = decode_solution(&master, values, fleet, hours, params, carry)?;
        lower = lower.max(sol.best_bound);

        let t1 = Instant::now();
        let mags = schedule.magnitudes();
        let sub = evaluate_subproblem(&mags, &ambient, carry.last_exchange, params, options.gradient_floor)?;
        let subproblem_time = t1.elapsed();

        let upper = schedule.operation_cost + sub.q_hat;
        if best.as_ref().is_none_or(|(ub, _)| upper < *ub) {
            best = Some((upper, schedule));
        }
        let best_ub = best.as_ref().map(|b| b.0).unwrap_or(upper);
        let gap = ((best_ub - lower) / best_ub.abs().max(1.0)).max(0.0);
        let converged = gap <= options.gap_tolerance;
        let cut_issued = !converged && it < options.max_iterations;
        if cut_issued {
            let cut = make_cut(sub.q_hat, &sub.lambda, &sub.mu, &mags, master.vars.steady_start);
            master.add_cut(&cut);
            let mut seed = values.clone();
            let lam = master.vars.lambda.0;
            let ceiling = master.model.vars[lam].upper;
            seed[lam] = seed[lam].max(cut.evaluate(&mags)).min(ceiling);
            start = Some(seed);
            cuts_out.push(IssuedCut {
                block,
                iteration: it,
                anchor: mags.clone(),
                q_hat: sub.q_hat,
                cut,
            });
        }
        info!(
            "block {block} iter {it}: LB {lower:.6} UB {best_ub:.6} gap {gap:.3e} cuts {}",
            master.vars.cut_rows.len()
        );
        debug!(
            "block {block} iter {it}: master {:?} ({} nodes, {:.3}s), subproblem {:.3}s",
            sol.status,
            sol.nodes,
            master_time.as_secs_f64(),
            subproblem_time.as_secs_f64()
        );
        log.push(IterationRecord {
            block,
            iteration: it,
            lower_bound: lower,
            q_hat: sub.q_hat,
            upper_bound: upper,
            best_upper_bound: best_ub,
            gap,
            cut_issued,
            gradient_clamped: sub.clamped,
            master_status: format!("{:?}", sol.status),
            master_nodes: sol.nodes,
            master_time,
            subproblem_time,
        });
        if converged {
            return Ok(BlockOutcome {
                schedule: best.expect("incumbent recorded").1,
                converged: true,
            });
        }
    }
    Ok(BlockOutcome {
        schedule: best.expect("at least one iteration ran").1,
        converged: false,
    })
}

pub fn optimize(
    fleet: &AssetFleet,
    hours: &[HourlyInput],
    params: &TransformerThermalParams,
    options: &BendersOptions,
) -> Result<BendersResult, BendersError> {
    optimize_with(fleet, hours, params, options, &BranchAndBound)
}

pub fn optimize_with(
    fleet: &AssetFleet,
    hours: &[HourlyInput],
    params: &TransformerThermalParams,
    options: &BendersOptions,
    backend: &dyn MilpBackend,
) -> Result<BendersResult, BendersError> {
    options.validate()?;
    params.validate()?;
    if hours.is_empty() {
        return Err(ScheduleError::Input("horizon must contain at least one hour".into()).into());
    }
    let mut carry = CarryState::initial(fleet);
    let mut schedule: Option<ScheduleSolution> = None;
    let mut iterations = Vec::new();
    let mut cuts = Vec::new();
    let mut all_converged = true;
    for (b, (start, end)) in blocks(hours.len(), options.block_days).into_iter().enumerate() {
        let out = solve_block(
            b,
            fleet,
            &hours[start..end],
            params,
            &carry,
            options,
            backend,
            &mut iterations,
            &mut cuts,
        )?;
        all_converged &= out.converged;
        carry = carry.advance(&out.schedule);
        match schedule.as_mut() {
            Some(s) => s.append(out.schedule),
            None => schedule = Some(out.schedule),
        }
    }
    let schedule = schedule.expect("non-empty horizon");
    let ambient: Vec<f64> = hours.iter().map(|h| h.ambient).collect();
    let life = horizon_loss_of_life(&schedule.magnitudes(), &ambient, None, params)?;
    Ok(BendersResult {
        operation_cost: schedule.operation_cost,
        lol_percent: life.total_lol_percent,
        lifetime_years: life.expected_lifetime_years,
        schedule,
        iterations,
        cuts,
        termination: if all_converged {
            Termination::Converged
        } else {
            Termination::IterationLimit
        },
    })
}
