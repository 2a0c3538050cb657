//! Bounded-variable simplex engine.
//!
//! Every row `i` gets a logical variable `r_i` so the constraint system is
//! `A x - r = 0` with each `r_i` carrying the row's sense as bounds. The
//! basis is an `m`-subset of the `n + m` columns of `[A | -I]`, kept as a
//! product-form inverse that is rebuilt every [`REFACTOR_EVERY`] pivots.
//!
//! Two algorithms share the state:
//! * primal simplex with a composite phase 1 (sum of infeasibilities),
//!   Dantzig pricing and Bland's rule once degeneracy stalls progress;
//! * dual simplex, used to re-optimize after bound changes.

use crate::factor::EtaFile;
use crate::model::{MilpModel, RowSense};

const REFACTOR_EVERY: usize = 100;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_STALL: usize = 40;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerances {
    pub primal: f64,
    pub dual: f64,
    pub pivot: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            primal: 1e-9,
            dual: 1e-9,
            pivot: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum VarState {
    Basic,
    Lower,
    Upper,
    /// Nonbasic free variable held at zero.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub(crate) struct Simplex {
    m: usize,
    n: usize,
    // Structural columns, compressed by column.
    col_start: Vec<usize>,
    col_row: Vec<usize>,
    col_val: Vec<f64>,
    // Same matrix compressed by row.
    row_start: Vec<usize>,
    row_col: Vec<usize>,
    row_val: Vec<f64>,
    cost: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    x: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    eta: EtaFile,
    since_refactor: usize,
    tol: Tolerances,
    pub iterations: usize,
    pub iteration_cap: usize,
    /// At optimality the factor is rebuilt and the result re-checked only
    /// when more than this many pivots have accumulated since the last
    /// rebuild.
    pub verify_after: usize,
    // Reusable dense work vectors.
    work_m: Vec<f64>,
    work_row: Vec<f64>,
}

impl Simplex {
    pub fn new(model: &MilpModel) -> Self {
        let n = model.num_vars();
        let m = model.num_rows();
        let mut counts = vec![0usize; n];
        for row in &model.rows {
            for &(v, _) in &row.coeffs {
                counts[v.0] += 1;
            }
        }
        let mut col_start = Vec::with_capacity(n + 1);
        col_start.push(0);
        for c in &counts {
            col_start.push(col_start.last().unwrap() + c);
        }
        let nnz = *col_start.last().unwrap();
        let mut col_row = vec![0; nnz];
        let mut col_val = vec![0.0; nnz];
        let mut fill = col_start.clone();
        let mut row_start = Vec::with_capacity(m + 1);
        let mut row_col = Vec::with_capacity(nnz);
        let mut row_val = Vec::with_capacity(nnz);
        row_start.push(0);
        for (i, row) in model.rows.iter().enumerate() {
            for &(v, a) in &row.coeffs {
                col_row[fill[v.0]] = i;
                col_val[fill[v.0]] = a;
                fill[v.0] += 1;
                row_col.push(v.0);
                row_val.push(a);
            }
            row_start.push(row_col.len());
        }

        let mut cost = Vec::with_capacity(n + m);
        let mut lb = Vec::with_capacity(n + m);
        let mut ub = Vec::with_capacity(n + m);
        for v in &model.vars {
            cost.push(v.objective);
            lb.push(v.lower);
            ub.push(v.upper);
        }
        for row in &model.rows {
            cost.push(0.0);
            let (l, u) = match row.sense {
                RowSense::Le => (f64::NEG_INFINITY, row.rhs),
                RowSense::Ge => (row.rhs, f64::INFINITY),
                RowSense::Eq => (row.rhs, row.rhs),
            };
            lb.push(l);
            ub.push(u);
        }

        let mut s = Self {
            m,
            n,
            col_start,
            col_row,
            col_val,
            row_start,
            row_col,
            row_val,
            cost,
            lb,
            ub,
            x: vec![0.0; n + m],
            state: vec![VarState::Lower; n + m],
            basis: (n..n + m).collect(),
            eta: EtaFile::new(m),
            since_refactor: 0,
            tol: Tolerances::default(),
            iterations: 0,
            iteration_cap: 50 * (n + m) + 10_000,
            verify_after: 0,
            work_m: vec![0.0; m],
            work_row: vec![0.0; n + m],
        };
        for j in 0..n {
            s.state[j] = s.preferred_nonbasic_state(j, s.cost[j]);
            s.x[j] = s.nonbasic_value(j);
        }
        for i in 0..m {
            s.state[n + i] = VarState::Basic;
        }
        s.refactor();
        s
    }

    pub fn num_structural(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.x[..self.n]
    }

    pub fn row_activities(&self) -> &[f64] {
        &self.x[self.n..]
    }

    pub fn objective(&self) -> f64 {
        self.cost[..self.n]
            .iter()
            .zip(&self.x[..self.n])
            .map(|(c, x)| c * x)
            .sum()
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        (self.lb[j], self.ub[j])
    }

    /// Changes the bounds of a structural variable. Nonbasic variables move
    /// with their bound, so the basis stays dual feasible.
    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.lb[j] = lower;
        self.ub[j] = upper;
        if self.state[j] != VarState::Basic {
            self.state[j] = self.fit_state(j, self.state[j]);
            let old = self.x[j];
            self.x[j] = self.nonbasic_value(j);
            if old != self.x[j] {
                self.shift_basics(j, self.x[j] - old);
            }
        }
    }

    /// Reduced costs for every column under the current basis.
    pub fn reduced_costs(&mut self) -> Vec<f64> {
        let y = self.duals_for(|s, j| s.cost[j]);
        (0..self.n + self.m)
            .map(|j| {
                if self.state[j] == VarState::Basic {
                    0.0
                } else {
                    self.cost[j] - self.dot_col(j, &y)
                }
            })
            .collect()
    }

    /// Row duals `y = c_B B^-1`.
    pub fn row_duals(&mut self) -> Vec<f64> {
        self.duals_for(|s, j| s.cost[j])
    }

    fn preferred_nonbasic_state(&self, j: usize, d: f64) -> VarState {
        let (l, u) = (self.lb[j], self.ub[j]);
        match (l.is_finite(), u.is_finite()) {
            (true, true) => {
                if d < 0.0 {
                    VarState::Upper
                } else {
                    VarState::Lower
                }
            }
            (true, false) => VarState::Lower,
            (false, true) => VarState::Upper,
            (false, false) => VarState::Zero,
        }
    }

    /// Closest legal nonbasic state to `want` given finite bounds.
    fn fit_state(&self, j: usize, want: VarState) -> VarState {
        let (l, u) = (self.lb[j], self.ub[j]);
        match want {
            VarState::Lower if l.is_finite() => VarState::Lower,
            VarState::Upper if u.is_finite() => VarState::Upper,
            _ => {
                if l.is_finite() {
                    VarState::Lower
                } else if u.is_finite() {
                    VarState::Upper
                } else {
                    VarState::Zero
                }
            }
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::Lower => self.lb[j],
            VarState::Upper => self.ub[j],
            VarState::Zero | VarState::Basic => 0.0,
        }
    }

    /// `x_B -= B^-1 a_j * delta` after nonbasic `j` moved by `delta`.
    fn shift_basics(&mut self, j: usize, delta: f64) {
        let mut col = std::mem::take(&mut self.work_m);
        self.load_col(j, &mut col);
        self.eta.ftran(&mut col);
        for (p, &a) in col.iter().enumerate() {
            if a != 0.0 {
                self.x[self.basis[p]] -= a * delta;
            }
        }
        self.work_m = col;
    }

    fn load_col(&self, j: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        if j < self.n {
            for e in self.col_start[j]..self.col_start[j + 1] {
                out[self.col_row[e]] = self.col_val[e];
            }
        } else {
            out[j - self.n] = -1.0;
        }
    }

    fn dot_col(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n {
            (self.col_start[j]..self.col_start[j + 1])
                .map(|e| self.col_val[e] * y[self.col_row[e]])
                .sum()
        } else {
            -y[j - self.n]
        }
    }

    fn col_nnz(&self, j: usize) -> usize {
        if j < self.n {
            self.col_start[j + 1] - self.col_start[j]
        } else {
            1
        }
    }

    fn duals_for(&mut self, cost: impl Fn(&Self, usize) -> f64) -> Vec<f64> {
        let mut y: Vec<f64> = (0..self.m).map(|p| cost(self, self.basis[p])).collect();
        self.eta.btran(&mut y);
        y
    }

    /// Rebuilds the factor from the current basic set, repairing singular
    /// bases by swapping in logicals, then recomputes basic values.
    pub fn refactor(&mut self) {
        let m = self.m;
        let n = self.n;
        self.eta.clear();
        let mut new_basis = vec![usize::MAX; m];
        let mut structural: Vec<usize> = Vec::new();
        for &j in &self.basis {
            if j >= n {
                let i = j - n;
                new_basis[i] = j;
                self.eta.push_unit(i, -1.0);
            } else {
                structural.push(j);
            }
        }
        structural.sort_by_key(|&j| (self.col_nnz(j), j));
        let mut col = vec![0.0; m];
        for &j in &structural {
            self.load_col(j, &mut col);
            self.eta.ftran(&mut col);
            let mut best = usize::MAX;
            let mut best_abs = 0.0;
            let mut col_max = 0.0f64;
            for (p, &v) in col.iter().enumerate() {
                col_max = col_max.max(v.abs());
                if new_basis[p] == usize::MAX && v.abs() > best_abs {
                    best_abs = v.abs();
                    best = p;
                }
            }
            if best == usize::MAX || best_abs <= 1e-9 * col_max.max(1.0) {
                // Dependent column: leave it out of the basis.
                self.state[j] = self.fit_state(j, VarState::Lower);
                self.x[j] = self.nonbasic_value(j);
                continue;
            }
            new_basis[best] = j;
            self.eta.push(best, &col);
        }
        for p in 0..m {
            if new_basis[p] == usize::MAX {
                let j = n + p;
                self.state[j] = VarState::Basic;
                new_basis[p] = j;
                self.eta.push_unit(p, -1.0);
            }
        }
        self.basis = new_basis;
        self.since_refactor = 0;
        self.recompute_basics();
    }

    fn recompute_basics(&mut self) {
        let mut rhs = vec![0.0; self.m];
        for j in 0..self.n + self.m {
            if self.state[j] == VarState::Basic {
                continue;
            }
            let xj = self.x[j];
            if xj == 0.0 {
                continue;
            }
            if j < self.n {
                for e in self.col_start[j]..self.col_start[j + 1] {
                    rhs[self.col_row[e]] -= self.col_val[e] * xj;
                }
            } else {
                rhs[j - self.n] += xj;
            }
        }
        self.eta.ftran(&mut rhs);
        for p in 0..self.m {
            self.x[self.basis[p]] = rhs[p];
        }
    }

    fn infeasibility(&self, j: usize) -> f64 {
        let x = self.x[j];
        if x < self.lb[j] - self.tol.primal {
            self.lb[j] - x
        } else if x > self.ub[j] + self.tol.primal {
            x - self.ub[j]
        } else {
            0.0
        }
    }

    fn primal_infeasible(&self) -> bool {
        self.basis.iter().any(|&j| self.infeasibility(j) > 0.0)
    }

    fn pivot(&mut self, r: usize, q: usize, alpha: &[f64], leave_state: VarState) {
        let leaving = self.basis[r];
        self.state[leaving] = leave_state;
        self.x[leaving] = self.nonbasic_value(leaving);
        self.state[q] = VarState::Basic;
        self.basis[r] = q;
        self.eta.push(r, alpha);
        self.since_refactor += 1;
    }

    fn dual_infeasibility(&self, j: usize, d: f64) -> f64 {
        if self.lb[j] == self.ub[j] {
            return 0.0;
        }
        match self.state[j] {
            VarState::Basic => 0.0,
            VarState::Lower => (-d).max(0.0),
            VarState::Upper => d.max(0.0),
            VarState::Zero => d.abs(),
        }
    }

    /// Primal simplex from the current basis: phase 1 on the sum of
    /// infeasibilities, then phase 2 on the true costs.
    pub fn primal(&mut self) -> Outcome {
        let mut degenerate = 0usize;
        let mut bland = false;
        let mut verified = 0;
        let mut alpha = vec![0.0; self.m];
        loop {
            if self.iterations >= self.iteration_cap {
                return Outcome::IterationLimit;
            }
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor();
            }
            let phase1 = self.primal_infeasible();
            let tol = self.tol;
            let y = if phase1 {
                self.duals_for(|s, j| {
                    let x = s.x[j];
                    if x < s.lb[j] - tol.primal {
                        -1.0
                    } else if x > s.ub[j] + tol.primal {
                        1.0
                    } else {
                        0.0
                    }
                })
            } else {
                self.duals_for(|s, j| s.cost[j])
            };

            // Pricing.
            let mut entering = None;
            let mut best = 0.0;
            for j in 0..self.n + self.m {
                if self.state[j] == VarState::Basic || self.lb[j] == self.ub[j] {
                    continue;
                }
                let c = if phase1 { 0.0 } else { self.cost[j] };
                let d = c - self.dot_col(j, &y);
                let infeas = self.dual_infeasibility(j, d);
                if infeas > tol.dual {
                    if bland {
                        entering = Some((j, d));
                        break;
                    }
                    if infeas > best {
                        best = infeas;
                        entering = Some((j, d));
                    }
                }
            }
            let Some((q, dq)) = entering else {
                if phase1 {
                    return Outcome::Infeasible;
                }
                // Confirm on a fresh factor before declaring optimality.
                if verified < 2 && self.since_refactor > self.verify_after {
                    verified += 1;
                    self.refactor();
                    continue;
                }
                return Outcome::Optimal;
            };
            self.iterations += 1;
            let dir = match self.state[q] {
                VarState::Lower => 1.0,
                VarState::Upper => -1.0,
                _ => {
                    if dq < 0.0 {
                        1.0
                    } else {
                        -1.0
                    }
                }
            };
            self.load_col(q, &mut alpha);
            self.eta.ftran(&mut alpha);

            // Harris two-pass ratio test.
            let blocking = |s: &Self, p: usize, a: f64| -> Option<(f64, VarState)> {
                let j = s.basis[p];
                let rate = -dir * a;
                let x = s.x[j];
                let (l, u) = (s.lb[j], s.ub[j]);
                if rate < 0.0 {
                    if phase1 && x < l - tol.primal {
                        None
                    } else if phase1 && x > u + tol.primal {
                        Some((x - u, VarState::Upper))
                    } else if l.is_finite() {
                        Some(((x - l).max(0.0), VarState::Lower))
                    } else {
                        None
                    }
                } else if phase1 && x > u + tol.primal {
                    None
                } else if phase1 && x < l - tol.primal {
                    Some((l - x, VarState::Lower))
                } else if u.is_finite() {
                    Some(((u - x).max(0.0), VarState::Upper))
                } else {
                    None
                }
            };
            let mut t_max = f64::INFINITY;
            for (p, &a) in alpha.iter().enumerate() {
                if a.abs() <= tol.pivot {
                    continue;
                }
                if let Some((dist, _)) = blocking(self, p, a) {
                    t_max = t_max.min((dist + tol.primal) / a.abs());
                }
            }
            let range = self.ub[q] - self.lb[q];
            let mut leave: Option<(usize, f64, VarState)> = None;
            if t_max.is_finite() {
                let mut best_a = 0.0;
                for (p, &a) in alpha.iter().enumerate() {
                    if a.abs() <= tol.pivot {
                        continue;
                    }
                    if let Some((dist, st)) = blocking(self, p, a) {
                        let ratio = dist / a.abs();
                        if ratio <= t_max {
                            let better = if bland {
                                leave.map_or(true, |(lp, lr, _)| {
                                    ratio < lr - 1e-12
                                        || (ratio <= lr + 1e-12 && self.basis[p] < self.basis[lp])
                                })
                            } else {
                                a.abs() > best_a
                            };
                            if better {
                                best_a = a.abs();
                                leave = Some((p, ratio, st));
                            }
                        }
                    }
                }
            }
            match leave {
                None if !range.is_finite() => {
                    return if phase1 {
                        // Cannot happen with a correct phase-1 cost; treat as
                        // numerical trouble.
                        Outcome::IterationLimit
                    } else {
                        Outcome::Unbounded
                    };
                }
                Some((_, t, _)) if range.is_finite() && range <= t => {
                    self.bound_flip(q, dir, range, &alpha);
                    degenerate = 0;
                    bland = false;
                }
                None => {
                    self.bound_flip(q, dir, range, &alpha);
                    degenerate = 0;
                    bland = false;
                }
                Some((r, t, st)) => {
                    let step = dir * t;
                    self.x[q] += step;
                    for (p, &a) in alpha.iter().enumerate() {
                        if a != 0.0 {
                            self.x[self.basis[p]] -= a * step;
                        }
                    }
                    self.pivot(r, q, &alpha, st);
                    if t <= 1e-12 {
                        degenerate += 1;
                        if degenerate >= DEGENERATE_STALL {
                            bland = true;
                        }
                    } else {
                        degenerate = 0;
                        bland = false;
                    }
                }
            }
            verified = 0;
        }
    }

    fn bound_flip(&mut self, q: usize, dir: f64, range: f64, alpha: &[f64]) {
        let step = dir * range;
        for (p, &a) in alpha.iter().enumerate() {
            if a != 0.0 {
                self.x[self.basis[p]] -= a * step;
            }
        }
        self.state[q] = if dir > 0.0 {
            VarState::Upper
        } else {
            VarState::Lower
        };
        self.x[q] = self.nonbasic_value(q);
    }

    /// Flips nonbasic boxed variables so the reduced costs are dual
    /// feasible. Returns false when some column cannot be repaired.
    fn make_dual_feasible(&mut self, d: &[f64]) -> bool {
        let mut ok = true;
        let mut moved = false;
        for j in 0..self.n + self.m {
            if self.state[j] == VarState::Basic || self.dual_infeasibility(j, d[j]) <= self.tol.dual {
                continue;
            }
            let want = if d[j] < 0.0 {
                VarState::Upper
            } else {
                VarState::Lower
            };
            let fitted = self.fit_state(j, want);
            if fitted != want {
                ok = false;
                continue;
            }
            self.state[j] = fitted;
            self.x[j] = self.nonbasic_value(j);
            moved = true;
        }
        if moved {
            self.recompute_basics();
        }
        ok
    }

    /// Dual simplex from the current basis. Falls back to the primal
    /// algorithm when the starting basis cannot be made dual feasible.
    pub fn dual(&mut self) -> Outcome {
        let mut d = self.reduced_costs();
        if !self.make_dual_feasible(&d) {
            return self.primal();
        }
        let tol = self.tol;
        let mut alpha = vec![0.0; self.m];
        let mut rho = vec![0.0; self.m];
        let mut bland = false;
        let mut degenerate = 0usize;
        let mut verified = 0;
        let mut confirmed = false;
        loop {
            if self.iterations >= self.iteration_cap {
                return Outcome::IterationLimit;
            }
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor();
                d = self.reduced_costs();
                if !self.make_dual_feasible(&d) {
                    return self.primal();
                }
            }
            // Leaving row: largest primal infeasibility.
            let mut leave = None;
            let mut worst = 0.0;
            for p in 0..self.m {
                let j = self.basis[p];
                let inf = self.infeasibility(j);
                if inf > 0.0 && (inf > worst || (bland && leave.is_none())) {
                    worst = inf;
                    leave = Some(p);
                    if bland {
                        break;
                    }
                }
            }
            let Some(r) = leave else {
                if verified < 2 && self.since_refactor > self.verify_after {
                    verified += 1;
                    self.refactor();
                    d = self.reduced_costs();
                    if !self.make_dual_feasible(&d) {
                        return self.primal();
                    }
                    continue;
                }
                // Primal feasible; mop up any dual infeasibility left by
                // tolerances with the primal algorithm.
                let dirty = (0..self.n + self.m).any(|j| self.dual_infeasibility(j, d[j]) > tol.dual);
                return if dirty { self.primal() } else { Outcome::Optimal };
            };
            self.iterations += 1;
            let lj = self.basis[r];
            let (target, leave_state, increase) = if self.x[lj] < self.lb[lj] {
                (self.lb[lj], VarState::Lower, true)
            } else {
                (self.ub[lj], VarState::Upper, false)
            };

            // Pivot row alpha_r = e_r B^-1 [A | -I].
            rho.iter_mut().for_each(|v| *v = 0.0);
            rho[r] = 1.0;
            self.eta.btran(&mut rho);
            let row = &mut self.work_row;
            row.iter_mut().for_each(|v| *v = 0.0);
            for (i, &ri) in rho.iter().enumerate() {
                if ri == 0.0 {
                    continue;
                }
                for e in self.row_start[i]..self.row_start[i + 1] {
                    row[self.row_col[e]] += ri * self.row_val[e];
                }
                row[self.n + i] = -ri;
            }

            // Eligible entering columns move x_r toward its violated bound.
            let eligible = |s: &Self, j: usize, a: f64| -> bool {
                if s.state[j] == VarState::Basic || s.lb[j] == s.ub[j] || a.abs() <= tol.pivot {
                    return false;
                }
                match (s.state[j], increase) {
                    (VarState::Lower, true) => a < 0.0,
                    (VarState::Lower, false) => a > 0.0,
                    (VarState::Upper, true) => a > 0.0,
                    (VarState::Upper, false) => a < 0.0,
                    (VarState::Zero, _) => true,
                    (VarState::Basic, _) => false,
                }
            };
            let mut theta_max = f64::INFINITY;
            for j in 0..self.n + self.m {
                let a = self.work_row[j];
                if eligible(self, j, a) {
                    theta_max = theta_max.min((d[j].abs() + tol.dual) / a.abs());
                }
            }
            if !theta_max.is_finite() {
                if !confirmed {
                    // Recheck the certificate on a fresh factor and basic values.
                    confirmed = true;
                    self.refactor();
                    d = self.reduced_costs();
                    if !self.make_dual_feasible(&d) {
                        return self.primal();
                    }
                    continue;
                }
                return Outcome::Infeasible;
            }
            let mut enter = None;
            let mut best_a = 0.0;
            let mut best_ratio = f64::INFINITY;
            for j in 0..self.n + self.m {
                let a = self.work_row[j];
                if !eligible(self, j, a) {
                    continue;
                }
                let ratio = d[j].abs() / a.abs();
                if ratio <= theta_max {
                    let better = if bland {
                        ratio < best_ratio - 1e-12
                    } else {
                        a.abs() > best_a
                    };
                    if better {
                        best_a = a.abs();
                        best_ratio = ratio;
                        enter = Some(j);
                    }
                }
            }
            let q = enter.expect("theta_max finite implies a candidate");
            let arq = self.work_row[q];

            self.load_col(q, &mut alpha);
            self.eta.ftran(&mut alpha);
            if (alpha[r] - arq).abs() > 1e-7 * (1.0 + arq.abs()) {
                // Row and column disagree: factor has drifted.
                self.refactor();
                d = self.reduced_costs();
                if !self.make_dual_feasible(&d) {
                    return self.primal();
                }
                continue;
            }
            let delta = (self.x[lj] - target) / alpha[r];
            self.x[q] += delta;
            for (p, &a) in alpha.iter().enumerate() {
                if a != 0.0 {
                    self.x[self.basis[p]] -= a * delta;
                }
            }
            // Dual update.
            let theta = d[q] / arq;
            for j in 0..self.n + self.m {
                let a = self.work_row[j];
                if a != 0.0 && self.state[j] != VarState::Basic {
                    d[j] -= theta * a;
                }
            }
            d[q] = 0.0;
            d[lj] = -theta;
            self.pivot(r, q, &alpha, leave_state);
            self.x[lj] = target;
            if theta.abs() <= 1e-12 {
                degenerate += 1;
                if degenerate >= DEGENERATE_STALL {
                    bland = true;
                }
            } else {
                degenerate = 0;
                bland = false;
            }
            verified = 0;
            confirmed = false;
        }
    }
}
