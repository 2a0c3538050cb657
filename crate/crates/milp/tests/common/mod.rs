//! Random small MILPs and an exhaustive-enumeration oracle that solves the
//! continuous part of every binary assignment with an independent LP solver.

#![allow(dead_code)]

use assetgrid_milp::{MilpModel, RowSense, VarId, VarKind};
use microlp::{ComparisonOp, OptimizationDirection, Problem};
use rand::Rng;

pub struct InstanceShape {
    pub max_binaries: usize,
    pub max_continuous: usize,
    pub max_rows: usize,
}

pub const SMALL: InstanceShape = InstanceShape {
    max_binaries: 15,
    max_continuous: 10,
    max_rows: 20,
};

/// Random instance. Most are built around a random reference point so they
/// are feasible; about one in ten uses unanchored right-hand sides and may
/// be infeasible.
pub fn random_instance<R: Rng>(rng: &mut R, shape: &InstanceShape) -> MilpModel {
    let nb = rng.gen_range(1..=shape.max_binaries);
    let nc = rng.gen_range(0..=shape.max_continuous);
    let nr = rng.gen_range(1..=shape.max_rows);
    let anchored = rng.gen_bool(0.9);
    let mut m = MilpModel::new();
    let mut point = Vec::new();
    for i in 0..nb {
        let c = rng.gen_range(-10..=10) as f64;
        m.add_binary(format!("b{i}"), c);
        point.push(if rng.gen_bool(0.5) { 1.0 } else { 0.0 });
    }
    for i in 0..nc {
        let lo = rng.gen_range(-5..=0) as f64;
        let hi = lo + rng.gen_range(1..=10) as f64;
        let c = rng.gen_range(-100..=100) as f64 / 10.0;
        m.add_continuous(format!("x{i}"), lo, hi, c);
        point.push(rng.gen_range(lo..=hi));
    }
    let n = nb + nc;
    for r in 0..nr {
        let k = rng.gen_range(1..=n.min(6));
        let mut coeffs = Vec::new();
        for _ in 0..k {
            let j = rng.gen_range(0..n);
            let a = rng.gen_range(-50..=50) as f64 / 10.0;
            coeffs.push((VarId(j), a));
        }
        let act: f64 = coeffs.iter().map(|&(v, a)| a * point[v.0]).sum();
        let has_continuous = coeffs.iter().any(|&(v, a)| v.0 >= nb && a != 0.0);
        let sense = match rng.gen_range(0..10) {
            0 if has_continuous => RowSense::Eq,
            1..=5 => RowSense::Le,
            _ => RowSense::Ge,
        };
        let rhs = if anchored {
            let slack = rng.gen_range(0.0..3.0);
            match sense {
                RowSense::Le => act + slack,
                RowSense::Ge => act - slack,
                RowSense::Eq => act,
            }
        } else {
            rng.gen_range(-10.0..10.0)
        };
        m.add_row(format!("r{r}"), coeffs, sense, rhs);
    }
    m
}

/// Optimum over all binary assignments, or `None` when none is feasible.
pub fn enumerate_optimum(model: &MilpModel) -> Option<(f64, Vec<f64>)> {
    let bins: Vec<usize> = (0..model.num_vars())
        .filter(|&j| model.vars[j].kind == VarKind::Binary)
        .collect();
    let conts: Vec<usize> = (0..model.num_vars())
        .filter(|&j| model.vars[j].kind == VarKind::Continuous)
        .collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u64..(1u64 << bins.len()) {
        let mut x = vec![0.0; model.num_vars()];
        let mut ok = true;
        for (k, &j) in bins.iter().enumerate() {
            x[j] = ((mask >> k) & 1) as f64;
            let v = &model.vars[j];
            if x[j] < v.lower || x[j] > v.upper {
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        let Some(cont_values) = solve_continuous(model, &conts, &x) else {
            continue;
        };
        for (k, &j) in conts.iter().enumerate() {
            x[j] = cont_values[k];
        }
        let obj = model.objective_value(&x);
        if best.as_ref().map_or(true, |(b, _)| obj < *b) {
            best = Some((obj, x));
        }
    }
    best
}

fn solve_continuous(model: &MilpModel, conts: &[usize], fixed: &[f64]) -> Option<Vec<f64>> {
    let residual = |row: &assetgrid_milp::Row| -> f64 {
        row.rhs
            - row
                .coeffs
                .iter()
                .filter(|(v, _)| model.vars[v.0].kind == VarKind::Binary)
                .map(|&(v, a)| a * fixed[v.0])
                .sum::<f64>()
    };
    if conts.is_empty() {
        for row in &model.rows {
            if row.violation(fixed) > 1e-9 {
                return None;
            }
        }
        return Some(Vec::new());
    }
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let mut ids = vec![None; model.num_vars()];
    for &j in conts {
        let v = &model.vars[j];
        ids[j] = Some(p.add_var(v.objective, (v.lower, v.upper)));
    }
    for row in &model.rows {
        let rhs = residual(row);
        let terms: Vec<_> = row
            .coeffs
            .iter()
            .filter_map(|&(v, a)| ids[v.0].map(|id| (id, a)))
            .collect();
        if terms.is_empty() {
            let ok = match row.sense {
                RowSense::Le => rhs >= -1e-9,
                RowSense::Ge => rhs <= 1e-9,
                RowSense::Eq => rhs.abs() <= 1e-9,
            };
            if !ok {
                return None;
            }
            continue;
        }
        let op = match row.sense {
            RowSense::Le => ComparisonOp::Le,
            RowSense::Ge => ComparisonOp::Ge,
            RowSense::Eq => ComparisonOp::Eq,
        };
        p.add_constraint(&terms[..], op, rhs);
    }
    let sol = p.solve().ok()?.into_solution().ok()?;
    Some(conts.iter().map(|&j| sol.var_value(ids[j].unwrap())).collect())
}
