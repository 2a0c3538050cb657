//! Linear relaxation solves.

use crate::model::{MilpModel, RowSense};
use crate::simplex::{Outcome, Simplex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Pivoting hit the iteration cap without finishing.
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Includes the model's objective offset.
    pub objective: f64,
    pub values: Vec<f64>,
    pub row_activity: Vec<f64>,
    /// `d objective / d rhs` for each row.
    pub row_duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

impl From<Outcome> for LpStatus {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::Optimal => LpStatus::Optimal,
            Outcome::Infeasible => LpStatus::Infeasible,
            Outcome::Unbounded => LpStatus::Unbounded,
            Outcome::IterationLimit => LpStatus::NumericalFailure,
        }
    }
}

/// Which simplex variant performs a cold solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LpAlgorithm {
    #[default]
    Primal,
    Dual,
}

/// Solves the linear relaxation of `model` (integrality dropped) from a
/// slack basis with the primal simplex.
pub fn solve_lp(model: &MilpModel) -> LpSolution {
    solve_lp_with(model, LpAlgorithm::Primal)
}

pub fn solve_lp_with(model: &MilpModel, algorithm: LpAlgorithm) -> LpSolution {
    let mut engine = Simplex::new(model);
    let outcome = match algorithm {
        LpAlgorithm::Primal => engine.primal(),
        LpAlgorithm::Dual => engine.dual(),
    };
    extract(model, &mut engine, outcome.into())
}

pub(crate) fn extract(model: &MilpModel, engine: &mut Simplex, status: LpStatus) -> LpSolution {
    let n = engine.num_structural();
    let values = engine.values().to_vec();
    let row_activity = engine.row_activities().to_vec();
    let (row_duals, reduced_costs) = if status == LpStatus::Optimal {
        let y = engine.row_duals();
        let d = engine.reduced_costs();
        (y, d[..n].to_vec())
    } else {
        (vec![0.0; model.num_rows()], vec![0.0; n])
    };
    LpSolution {
        status,
        objective: model.objective_value(&values),
        values,
        row_activity,
        row_duals,
        reduced_costs,
        iterations: engine.iterations,
    }
}

/// Worst primal, dual and complementary-slackness residuals of an optimal
/// solution, recomputed from the model alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResiduals {
    pub primal: f64,
    pub dual: f64,
    pub complementarity: f64,
}

pub fn kkt_residuals(model: &MilpModel, sol: &LpSolution) -> KktResiduals {
    let x = &sol.values;
    let y = &sol.row_duals;
    let mut primal = model.max_bound_violation(x);
    for row in &model.rows {
        primal = primal.max(row.violation(x));
    }
    // Reduced costs from scratch: d = c - A^T y.
    let mut d: Vec<f64> = model.vars.iter().map(|v| v.objective).collect();
    for (i, row) in model.rows.iter().enumerate() {
        for &(v, a) in &row.coeffs {
            d[v.0] -= a * y[i];
        }
    }
    let scale = |v: f64| v.abs().max(1.0);
    let mut dual = 0.0f64;
    let mut comp = 0.0f64;
    for (j, var) in model.vars.iter().enumerate() {
        let at_lower = (x[j] - var.lower).abs() <= 1e-9 * scale(var.lower);
        let at_upper = (x[j] - var.upper).abs() <= 1e-9 * scale(var.upper);
        let viol = if var.lower == var.upper || (at_lower && at_upper) {
            0.0
        } else if at_lower {
            (-d[j]).max(0.0)
        } else if at_upper {
            d[j].max(0.0)
        } else {
            d[j].abs()
        };
        // Interior variables are covered here too: their reduced cost must vanish.
        dual = dual.max(viol);
    }
    for (i, row) in model.rows.iter().enumerate() {
        let act = row.activity(x);
        let slack = (act - row.rhs).abs();
        // Sign of the row dual must match the sense (minimization).
        let sign_viol = match row.sense {
            RowSense::Le => y[i].max(0.0),
            RowSense::Ge => (-y[i]).max(0.0),
            RowSense::Eq => 0.0,
        };
        dual = dual.max(sign_viol);
        if row.sense != RowSense::Eq {
            comp = comp.max((slack * y[i]).abs());
        }
    }
    KktResiduals {
        primal,
        dual,
        complementarity: comp,
    }
}
