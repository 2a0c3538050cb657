//! LP-based branch-and-bound over binary variables.
//!
//! Bounding solves the relaxation at each node; branching splits a
//! fractional binary into a `= 0` and a `= 1` child. The branching binary
//! is picked by pseudocosts (product of estimated objective gains, most
//! fractional while no history exists, lowest index on ties). The search
//! dives depth first until it holds an incumbent, then takes the best-bound
//! node and plunges into its preferred child until that line is pruned.
//! Nodes are re-optimized with the dual simplex starting from whatever basis
//! the previous node left behind, which stays dual feasible under bound
//! changes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use crate::error::ModelError;
use crate::model::{MilpModel, VarKind};
use crate::simplex::{Outcome, Simplex};

const NODE_VERIFY_AFTER: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverLimits {
    pub max_nodes: usize,
    pub max_seconds: f64,
    /// Relative gap `(incumbent - bound) / max(1, |incumbent|)` at which the
    /// search stops.
    pub target_gap: f64,
    pub integrality_tol: f64,
}

impl Default for SolverLimits {
    fn default() -> Self {
        Self {
            max_nodes: 1_000_000,
            max_seconds: 3600.0,
            target_gap: 1e-6,
            integrality_tol: 1e-6,
        }
    }
}

impl SolverLimits {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.max_nodes == 0 {
            return Err(ModelError::BadLimits("max_nodes"));
        }
        if !(self.max_seconds > 0.0) {
            return Err(ModelError::BadLimits("max_seconds"));
        }
        if !(self.target_gap > 0.0) {
            return Err(ModelError::BadLimits("target_gap"));
        }
        if !(self.integrality_tol > 0.0 && self.integrality_tol < 0.5) {
            return Err(ModelError::BadLimits("integrality_tol"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilpStatus {
    /// Search finished with the gap at or below the target.
    Optimal,
    /// A limit stopped the search while an incumbent was held.
    FeasibleWithGap,
    /// No assignment satisfies the rows and integrality.
    Infeasible,
    /// A limit stopped the search before any incumbent was found.
    LimitReached,
    /// The relaxation is unbounded.
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution {
    pub status: MilpStatus,
    pub values: Option<Vec<f64>>,
    pub objective: Option<f64>,
    /// Valid lower bound on the optimum.
    pub best_bound: f64,
    pub root_bound: f64,
    pub gap: f64,
    pub nodes: usize,
    pub lp_iterations: usize,
    pub wall_time: Duration,
    /// Incumbent objective each time it improved, in order.
    pub incumbent_history: Vec<f64>,
}

impl MilpSolution {
    pub fn has_incumbent(&self) -> bool {
        self.values.is_some()
    }
}

pub fn relative_gap(incumbent: f64, bound: f64) -> f64 {
    ((incumbent - bound) / incumbent.abs().max(1.0)).max(0.0)
}

/// Anything that can solve a [`MilpModel`] to the contract of
/// [`MilpSolution`].
pub trait MilpBackend: Send + Sync {
    fn solve(&self, model: &MilpModel, limits: &SolverLimits) -> Result<MilpSolution, ModelError>;

    /// Like [`solve`](Self::solve), seeded with a candidate assignment that
    /// is used as the first incumbent when it is feasible.
    fn solve_from(
        &self,
        model: &MilpModel,
        limits: &SolverLimits,
        start: Option<&[f64]>,
    ) -> Result<MilpSolution, ModelError> {
        let _ = start;
        self.solve(model, limits)
    }
}

/// The built-in branch-and-bound backend.
#[derive(Debug, Clone, Copy, Default)]
pub struct BranchAndBound;

impl MilpBackend for BranchAndBound {
    fn solve(&self, model: &MilpModel, limits: &SolverLimits) -> Result<MilpSolution, ModelError> {
        solve_milp(model, limits)
    }

    fn solve_from(
        &self,
        model: &MilpModel,
        limits: &SolverLimits,
        start: Option<&[f64]>,
    ) -> Result<MilpSolution, ModelError> {
        solve_milp_from(model, limits, start)
    }
}

#[derive(Debug, Clone)]
struct Node {
    bound: f64,
    depth: usize,
    id: usize,
    fixings: Vec<(u32, bool)>,
    /// Position in the binary list, direction and fractional distance of the
    /// branching that created this node.
    branch: Option<(usize, bool, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap is a max-heap: "greater" means "explore first".
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.id.cmp(&self.id))
    }
}

struct Search<'a> {
    model: &'a MilpModel,
    limits: SolverLimits,
    binaries: Vec<usize>,
    /// Binary-list position of each variable.
    position: Vec<usize>,
    root_lb: Vec<f64>,
    root_ub: Vec<f64>,
    engine: Simplex,
    lp_iterations: usize,
    incumbent: Option<(f64, Vec<f64>)>,
    history: Vec<f64>,
    /// Per binary: summed unit gains and observation counts, down then up.
    pseudo: Vec<[(f64, u32); 2]>,
}

impl<'a> Search<'a> {
    fn cutoff(&self) -> f64 {
        match &self.incumbent {
            Some((obj, _)) => obj - self.limits.target_gap * obj.abs().max(1.0),
            None => f64::INFINITY,
        }
    }

    fn apply(&mut self, fixings: &[(u32, bool)]) {
        let mut want: Vec<(f64, f64)> = self.root_lb.iter().copied().zip(self.root_ub.iter().copied()).collect();
        for &(j, up) in fixings {
            let k = self.position[j as usize];
            let v = if up { 1.0 } else { 0.0 };
            want[k] = (v, v);
        }
        for (k, &j) in self.binaries.iter().enumerate() {
            if self.engine.bounds(j) != want[k] {
                self.engine.set_bounds(j, want[k].0, want[k].1);
            }
        }
    }

    fn record_gain(&mut self, branch: Option<(usize, bool, f64)>, parent: f64, child: f64) {
        if let Some((k, up, dist)) = branch {
            if dist > 0.0 && parent.is_finite() {
                let slot = &mut self.pseudo[k][up as usize];
                slot.0 += (child - parent).max(0.0) / dist;
                slot.1 += 1;
            }
        }
    }

    fn reoptimize(&mut self) -> Outcome {
        let before = self.engine.iterations;
        let out = self.engine.dual();
        self.lp_iterations += self.engine.iterations - before;
        if out == Outcome::IterationLimit {
            // Start over from a fresh slack basis once before giving up.
            let mut fresh = Simplex::new(self.model);
            for &j in &self.binaries {
                let (l, u) = self.engine.bounds(j);
                fresh.set_bounds(j, l, u);
            }
            fresh.verify_after = NODE_VERIFY_AFTER;
            self.engine = fresh;
            let out = self.engine.primal();
            self.lp_iterations += self.engine.iterations;
            return out;
        }
        out
    }

    fn objective(&self) -> f64 {
        self.engine.objective() + self.model.objective_offset
    }

    /// Binary with the best pseudocost score, returned with its position
    /// in the binary list and its value.
    fn branching_candidate(&self) -> Option<(usize, usize, f64)> {
        let x = self.engine.values();
        let mut mean = [(0.0, 0u32); 2];
        for p in &self.pseudo {
            for dir in 0..2 {
                if p[dir].1 > 0 {
                    mean[dir].0 += p[dir].0 / p[dir].1 as f64;
                    mean[dir].1 += 1;
                }
            }
        }
        let avg = |dir: usize| {
            if mean[dir].1 > 0 {
                mean[dir].0 / mean[dir].1 as f64
            } else {
                1.0
            }
        };
        let fallback = [avg(0), avg(1)];
        let unit = |k: usize, dir: usize| {
            let (sum, n) = self.pseudo[k][dir];
            if n > 0 {
                sum / n as f64
            } else {
                fallback[dir]
            }
        };
        let mut best: Option<(usize, usize, f64)> = None;
        let mut best_score = f64::NEG_INFINITY;
        for (k, &j) in self.binaries.iter().enumerate() {
            let frac = x[j].min(1.0 - x[j]);
            if frac <= self.limits.integrality_tol {
                continue;
            }
            let down = (unit(k, 0) * x[j]).max(1e-6);
            let up = (unit(k, 1) * (1.0 - x[j])).max(1e-6);
            let score = down * up;
            if score > best_score {
                best_score = score;
                best = Some((k, j, x[j]));
            }
        }
        best
    }

    /// Snaps binaries to 0/1 and re-solves the continuous part so the
    /// incumbent satisfies the rows exactly rather than up to the
    /// integrality tolerance.
    fn polish(&mut self) -> Option<(f64, Vec<f64>)> {
        let raw: Vec<f64> = self.engine.values().to_vec();
        let raw_obj = self.objective();
        let snapped: Vec<(u32, bool)> = self
            .binaries
            .iter()
            .map(|&j| (j as u32, raw[j] > 0.5))
            .collect();
        self.apply(&snapped);
        self.engine.verify_after = 0;
        let out = self.reoptimize();
        self.engine.verify_after = NODE_VERIFY_AFTER;
        if out == Outcome::Optimal {
            let mut values = self.engine.values().to_vec();
            for &(j, up) in &snapped {
                values[j as usize] = if up { 1.0 } else { 0.0 };
            }
            Some((self.objective(), values))
        } else {
            let mut values = raw;
            for &(j, up) in &snapped {
                values[j as usize] = if up { 1.0 } else { 0.0 };
            }
            Some((raw_obj, values))
        }
    }
}

/// Solves `model` to the given limits.
pub fn solve_milp(model: &MilpModel, limits: &SolverLimits) -> Result<MilpSolution, ModelError> {
    solve_milp_from(model, limits, None)
}

/// Solves `model`, taking `start` as the first incumbent when it satisfies
/// bounds, rows and integrality within the integrality tolerance.
pub fn solve_milp_from(
    model: &MilpModel,
    limits: &SolverLimits,
    start: Option<&[f64]>,
) -> Result<MilpSolution, ModelError> {
    model.validate()?;
    limits.validate()?;
    let clock = Instant::now();
    let binaries: Vec<usize> = model
        .vars
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Binary)
        .map(|(j, _)| j)
        .collect();
    let mut position = vec![usize::MAX; model.num_vars()];
    for (k, &j) in binaries.iter().enumerate() {
        position[j] = k;
    }
    // Binary bounds are rounded inward so fixings are always 0 or 1.
    let mut root_lb = Vec::with_capacity(binaries.len());
    let mut root_ub = Vec::with_capacity(binaries.len());
    let mut engine = Simplex::new(model);
    for &j in &binaries {
        let v = &model.vars[j];
        let l = v.lower.ceil();
        let u = v.upper.floor();
        if l > u {
            return Ok(finish_infeasible(clock, 0, 0));
        }
        engine.set_bounds(j, l, u);
        root_lb.push(l);
        root_ub.push(u);
    }

    let incumbent = start.and_then(|x| accept_start(model, &binaries, limits, x));
    let seeded = incumbent.is_some();
    let mut search = Search {
        model,
        limits: *limits,
        pseudo: vec![[(0.0, 0); 2]; binaries.len()],
        binaries,
        position,
        root_lb,
        root_ub,
        engine,
        lp_iterations: 0,
        history: incumbent.iter().map(|i| i.0).collect(),
        incumbent,
    };

    let root = search.engine.primal();
    search.lp_iterations += search.engine.iterations;
    // Node bounds tolerate a few eta updates; polishing rebuilds the factor.
    search.engine.verify_after = NODE_VERIFY_AFTER;
    match root {
        Outcome::Infeasible => return Ok(finish_infeasible(clock, 1, search.lp_iterations)),
        Outcome::Unbounded => {
            return Ok(MilpSolution {
                status: MilpStatus::Unbounded,
                values: None,
                objective: None,
                best_bound: f64::NEG_INFINITY,
                root_bound: f64::NEG_INFINITY,
                gap: f64::INFINITY,
                nodes: 1,
                lp_iterations: search.lp_iterations,
                wall_time: clock.elapsed(),
                incumbent_history: Vec::new(),
            })
        }
        Outcome::IterationLimit | Outcome::Optimal => {}
    }
    let root_bound = if root == Outcome::Optimal {
        search.objective()
    } else {
        f64::NEG_INFINITY
    };

    let root_node = Node {
        bound: root_bound,
        depth: 0,
        id: 0,
        fixings: Vec::new(),
        branch: None,
    };
    let mut stack: Vec<Node> = Vec::new();
    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    if seeded {
        heap.push(root_node);
    } else {
        stack.push(root_node);
    }
    // Preferred child of the node just processed, explored next.
    let mut plunge: Option<Node> = None;
    let mut next_id = 1usize;
    let mut nodes = 0usize;
    // Bound of nodes dropped after numerical failure; keeps best_bound valid.
    let mut lost_bound = f64::INFINITY;
    let mut hit_limit = false;
    // The root relaxation is already solved; skip re-solving it.
    let mut root_pending = root == Outcome::Optimal;

    loop {
        let node = if let Some(n) = plunge.take() {
            n
        } else if search.incumbent.is_none() {
            match stack.pop() {
                Some(n) => n,
                None => break,
            }
        } else {
            if let Some((inc, _)) = &search.incumbent {
                let open = heap.peek().map_or(f64::INFINITY, |n| n.bound).min(lost_bound);
                if open.is_infinite() || relative_gap(*inc, open) <= limits.target_gap {
                    if open.is_infinite() && lost_bound.is_finite() {
                        hit_limit = true;
                    }
                    break;
                }
            }
            match heap.pop() {
                Some(n) => n,
                None => break,
            }
        };
        if node.bound >= search.cutoff() {
            continue;
        }
        if nodes >= limits.max_nodes || clock.elapsed().as_secs_f64() > limits.max_seconds {
            hit_limit = true;
            lost_bound = lost_bound.min(node.bound);
            break;
        }
        nodes += 1;

        let outcome = if root_pending {
            root_pending = false;
            Outcome::Optimal
        } else {
            search.apply(&node.fixings);
            search.reoptimize()
        };
        match outcome {
            Outcome::Infeasible => continue,
            Outcome::IterationLimit | Outcome::Unbounded => {
                lost_bound = lost_bound.min(node.bound);
                continue;
            }
            Outcome::Optimal => {}
        }
        let obj = search.objective();
        search.record_gain(node.branch, node.bound, obj);
        if obj >= search.cutoff() {
            continue;
        }
        match search.branching_candidate() {
            None => {
                if let Some((pobj, values)) = search.polish() {
                    if pobj < search.incumbent.as_ref().map_or(f64::INFINITY, |i| i.0) {
                        let first = search.incumbent.is_none();
                        search.incumbent = Some((pobj, values));
                        search.history.push(pobj);
                        if first {
                            heap.extend(stack.drain(..));
                        }
                    }
                }
            }
            Some((k, j, xj)) => {
                let make = |up: bool, id: usize| {
                    let mut fixings = node.fixings.clone();
                    fixings.push((j as u32, up));
                    Node {
                        bound: obj,
                        depth: node.depth + 1,
                        id,
                        fixings,
                        branch: Some((k, up, if up { 1.0 - xj } else { xj })),
                    }
                };
                let down = make(false, next_id);
                let up = make(true, next_id + 1);
                next_id += 2;
                // Toward the nearer integer first.
                let (near, far) = if xj >= 0.5 { (up, down) } else { (down, up) };
                if search.incumbent.is_none() {
                    stack.push(far);
                    stack.push(near);
                } else {
                    heap.push(far);
                    plunge = Some(near);
                }
            }
        }
    }

    let open_bound = heap
        .iter()
        .chain(stack.iter())
        .chain(plunge.iter())
        .map(|n| n.bound)
        .fold(lost_bound, f64::min);
    let lp_iterations = search.lp_iterations;
    let history = std::mem::take(&mut search.history);
    Ok(match search.incumbent {
        Some((obj, values)) => {
            let best_bound = open_bound.min(obj);
            let gap = relative_gap(obj, best_bound);
            let status = if hit_limit && gap > limits.target_gap {
                MilpStatus::FeasibleWithGap
            } else {
                MilpStatus::Optimal
            };
            MilpSolution {
                status,
                values: Some(values),
                objective: Some(obj),
                best_bound,
                root_bound,
                gap,
                nodes,
                lp_iterations,
                wall_time: clock.elapsed(),
                incumbent_history: history,
            }
        }
        None if hit_limit || lost_bound.is_finite() => MilpSolution {
            status: MilpStatus::LimitReached,
            values: None,
            objective: None,
            best_bound: open_bound,
            root_bound,
            gap: f64::INFINITY,
            nodes,
            lp_iterations,
            wall_time: clock.elapsed(),
            incumbent_history: history,
        },
        None => finish_infeasible(clock, nodes, lp_iterations),
    })
}

fn accept_start(model: &MilpModel, binaries: &[usize], limits: &SolverLimits, x: &[f64]) -> Option<(f64, Vec<f64>)> {
    if x.len() != model.num_vars() {
        return None;
    }
    let tol = limits.integrality_tol;
    if binaries.iter().any(|&j| x[j].min(1.0 - x[j]).abs() > tol) {
        return None;
    }
    if model.max_bound_violation(x) > tol || !model.violated_rows(x, tol).is_empty() {
        return None;
    }
    Some((model.objective_value(x), x.to_vec()))
}

fn finish_infeasible(start: Instant, nodes: usize, lp_iterations: usize) -> MilpSolution {
    MilpSolution {
        status: MilpStatus::Infeasible,
        values: None,
        objective: None,
        best_bound: f64::INFINITY,
        root_bound: f64::INFINITY,
        gap: f64::INFINITY,
        nodes,
        lp_iterations,
        wall_time: start.elapsed(),
        incumbent_history: Vec::new(),
    }
}
