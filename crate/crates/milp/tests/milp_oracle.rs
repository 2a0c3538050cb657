use std::time::Instant;

use assetgrid_milp::{
    solve_lp, solve_milp, BranchAndBound, MilpBackend, MilpModel, MilpStatus, RowSense, SolverLimits,
    VarKind,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod common;

fn knapsack() -> MilpModel {
    let mut m = MilpModel::new();
    let a = m.add_binary("a", -3.0);
    let b = m.add_binary("b", -4.0);
    let c = m.add_binary("c", -5.0);
    m.add_row("w", [(a, 2.0), (b, 3.0), (c, 4.0)], RowSense::Le, 5.0);
    m
}

#[test]
fn knapsack_matches_enumeration() {
    let m = knapsack();
    let (expected, at) = common::enumerate_optimum(&m).unwrap();
    assert_eq!(expected, -7.0);
    assert_eq!(at, vec![1.0, 1.0, 0.0]);
    let sol = solve_milp(&m, &SolverLimits::default()).unwrap();
    assert_eq!(sol.status, MilpStatus::Optimal);
    assert_eq!(sol.objective, Some(-7.0));
    assert_eq!(sol.values.as_deref(), Some(&[1.0, 1.0, 0.0][..]));
    assert!(sol.best_bound <= -7.0 + 1e-9);
}

#[test]
fn fixed_binaries_reduce_to_the_lp() {
    let mut m = knapsack();
    m.vars[0].lower = 1.0;
    m.vars[1].upper = 0.0;
    m.vars[2].upper = 0.0;
    let lp = solve_lp(&m);
    let sol = solve_milp(&m, &SolverLimits::default()).unwrap();
    assert_eq!(sol.status, MilpStatus::Optimal);
    assert_eq!(sol.objective, Some(lp.objective));
    assert_eq!(sol.nodes, 1);
}

#[test]
fn infeasible_when_no_leaf_is_feasible() {
    let mut m = MilpModel::new();
    let a = m.add_binary("a", 1.0);
    let b = m.add_binary("b", 1.0);
    // The relaxation admits a = b = 0.5, but no 0/1 point.
    m.add_row("odd", [(a, 1.0), (b, 1.0)], RowSense::Eq, 1.0);
    m.add_row("same", [(a, 1.0), (b, -1.0)], RowSense::Eq, 0.0);
    let sol = solve_milp(&m, &SolverLimits::default()).unwrap();
    assert_eq!(sol.status, MilpStatus::Infeasible);
    assert!(sol.values.is_none());
}

#[test]
fn node_limit_reports_limit_status() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let limits = SolverLimits {
        max_nodes: 1,
        ..SolverLimits::default()
    };
    let mut saw_limit = false;
    for _ in 0..50 {
        let m = common::random_instance(&mut rng, &common::SMALL);
        let sol = solve_milp(&m, &limits).unwrap();
        assert!(sol.nodes <= 1);
        match sol.status {
            MilpStatus::FeasibleWithGap => {
                saw_limit = true;
                assert!(sol.best_bound <= sol.objective.unwrap() + 1e-9);
            }
            MilpStatus::LimitReached => {
                saw_limit = true;
                assert!(sol.values.is_none());
            }
            _ => {}
        }
    }
    assert!(saw_limit);
}

#[test]
fn limits_must_be_positive() {
    let m = knapsack();
    for bad in [
        SolverLimits {
            max_nodes: 0,
            ..SolverLimits::default()
        },
        SolverLimits {
            target_gap: 0.0,
            ..SolverLimits::default()
        },
        SolverLimits {
            max_seconds: -1.0,
            ..SolverLimits::default()
        },
    ] {
        assert!(solve_milp(&m, &bad).is_err());
    }
}

#[test]
fn hundred_seeded_instances_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    let mut solver_time = 0.0;
    let mut infeasible = 0;
    for k in 0..100 {
        let m = common::random_instance(&mut rng, &common::SMALL);
        let oracle = common::enumerate_optimum(&m);
        let t = Instant::now();
        let sol = BranchAndBound.solve(&m, &SolverLimits::default()).unwrap();
        solver_time += t.elapsed().as_secs_f64();
        match oracle {
            Some((obj, _)) => {
                assert_eq!(sol.status, MilpStatus::Optimal, "instance {k}");
                let got = sol.objective.unwrap();
                assert!((got - obj).abs() <= 1e-6, "instance {k}: {got} vs {obj}");
                let x = sol.values.as_ref().unwrap();
                for (j, v) in m.vars.iter().enumerate() {
                    if v.kind == VarKind::Binary {
                        assert!(x[j] == 0.0 || x[j] == 1.0);
                    }
                }
                assert!(m.violated_rows(x, 1e-8).is_empty(), "instance {k}");
                assert!(m.max_bound_violation(x) <= 1e-8);
            }
            None => {
                infeasible += 1;
                assert_eq!(sol.status, MilpStatus::Infeasible, "instance {k}");
            }
        }
    }
    assert!(infeasible < 50);
    assert!(solver_time < 60.0, "{solver_time}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn search_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = common::InstanceShape { max_binaries: 10, max_continuous: 6, max_rows: 12 };
        let m = common::random_instance(&mut rng, &shape);
        let sol = solve_milp(&m, &SolverLimits::default()).unwrap();
        let again = solve_milp(&m, &SolverLimits::default()).unwrap();
        prop_assert_eq!(sol.objective, again.objective);
        prop_assert_eq!(&sol.values, &again.values);
        if let (Some(obj), Some(x)) = (sol.objective, sol.values.as_ref()) {
            prop_assert!(sol.best_bound <= obj + 1e-9);
            prop_assert!(sol.root_bound <= obj + 1e-9);
            prop_assert!((sol.gap - assetgrid_milp::relative_gap(obj, sol.best_bound)).abs() < 1e-15);
            prop_assert!(sol.incumbent_history.windows(2).all(|w| w[1] <= w[0]));
            prop_assert_eq!(sol.incumbent_history.last().copied(), Some(obj));
            prop_assert!(m.violated_rows(x, 1e-8).is_empty());
            // Every integer-feasible point bounds the root relaxation from above.
            let (best, _) = common::enumerate_optimum(&m).unwrap();
            prop_assert!(sol.root_bound <= best + 1e-7);
        }
    }
}
