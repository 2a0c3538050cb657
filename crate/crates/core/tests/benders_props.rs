use std::path::{Path, PathBuf};

use assetgrid_core::benders::*;
use assetgrid_core::dataio::{apply_scenario, parse_assets, parse_timeseries, parse_transformer, PreparedCase, ScenarioConfig};
use assetgrid_core::fleet::{AssetFleet, HourlyInput};
use assetgrid_core::schedule::make_cut;
use assetgrid_core::thermal::TransformerThermalParams;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn sample_day(asset_management: bool) -> PreparedCase {
    let fleet = parse_assets(&data("fleet.json")).unwrap();
    let table = parse_timeseries(&data("sample_day.csv")).unwrap();
    let params = parse_transformer(&data("transformer.json")).unwrap();
    let config = ScenarioConfig {
        asset_management,
        ..ScenarioConfig::named("sample")
    };
    apply_scenario(&config, &fleet, &table, &params).unwrap()
}

fn fixed_hours(loads: &[f64]) -> Vec<HourlyInput> {
    loads
        .iter()
        .enumerate()
        .map(|(t, &l)| HourlyInput {
            fixed_load: l,
            renewable: vec![],
            price: 40.0 + t as f64,
            ambient: 28.0,
            grid_connected: true,
            line_capacity: 20.0,
            loading_cap_fraction: 1.5,
        })
        .collect()
}

fn q_hat(mags: &[f64], ambient: &[f64], initial: Option<f64>, p: &TransformerThermalParams) -> f64 {
    evaluate_subproblem(mags, ambient, initial, p, 1e-6).unwrap().q_hat
}

#[test]
fn no_aging_cost_converges_at_once() {
    let case = sample_day(false);
    assert_eq!(case.params.investment_cost, 0.0);
    let r = optimize(&case.fleet, &case.hours, &case.params, &BendersOptions::default()).unwrap();
    assert_eq!(r.iterations.len(), 1);
    let it = &r.iterations[0];
    assert_eq!(it.q_hat, 0.0);
    assert_eq!(r.schedule.lambda, 0.0);
    assert!(it.best_upper_bound - it.lower_bound <= 1e-6 * it.best_upper_bound.abs());
    assert_eq!(r.termination, Termination::Converged);
    assert!(r.cuts.is_empty());
}

#[test]
fn forced_exchange_closes_after_one_cut() {
    // Iteration 1 cannot see the aging cost (empty pool); the first cut is
    // exact at the only feasible profile, so iteration 2 closes the gap.
    let fleet = AssetFleet::default();
    let hours = fixed_hours(&[6.0, 9.0, 12.0, 7.0]);
    let p = TransformerThermalParams::default();
    let r = optimize(&fleet, &hours, &p, &BendersOptions::default()).unwrap();
    assert_eq!(r.iterations.len(), 2);
    let first = &r.iterations[0];
    let last = &r.iterations[1];
    assert!((first.upper_bound - last.upper_bound).abs() < 1e-9);
    assert!(last.gap <= 1e-9, "gap {}", last.gap);
    let mags: Vec<f64> = hours.iter().map(|h| h.fixed_load).collect();
    assert_eq!(r.schedule.magnitudes(), mags);
}

#[test]
fn cut_slope_matches_finite_differences() {
    let p = TransformerThermalParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..50 {
        let n = rng.gen_range(1..8);
        let mags: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..14.0)).collect();
        let amb: Vec<f64> = (0..n).map(|_| rng.gen_range(10.0..40.0)).collect();
        let initial = if trial % 2 == 0 { None } else { Some(rng.gen_range(1.0..14.0)) };
        let sub = evaluate_subproblem(&mags, &amb, initial, &p, 1e-6).unwrap();
        let cut = make_cut(sub.q_hat, &sub.lambda, &sub.mu, &mags, initial.is_none());
        let eps = 1e-5;
        for t in 0..n {
            let mut up = mags.clone();
            let mut down = mags.clone();
            up[t] += eps;
            down[t] -= eps;
            let fd = (q_hat(&up, &amb, initial, &p) - q_hat(&down, &amb, initial, &p)) / (2.0 * eps);
            let c = cut.coeff_per_hour[t];
            let rel = (fd - c).abs() / fd.abs().max(1e-12);
            assert!(rel <= 1e-4, "trial {trial} hour {t}: fd {fd} vs {c}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cuts_are_tight_and_underestimate_nearby(
        mags in prop::collection::vec(0.5f64..14.0, 1..10),
        amb in 10.0f64..40.0,
        dirs in prop::collection::vec(-1.0f64..1.0, 10),
        steady in any::<bool>(),
    ) {
        let p = TransformerThermalParams::default();
        let n = mags.len();
        let ambient = vec![amb; n];
        let initial = if steady { None } else { Some(mags[0]) };
        let sub = evaluate_subproblem(&mags, &ambient, initial, &p, 1e-6).unwrap();
        let cut = make_cut(sub.q_hat, &sub.lambda, &sub.mu, &mags, steady);
        prop_assert!((cut.evaluate(&mags) - sub.q_hat).abs() <= 1e-9 * sub.q_hat.abs().max(1.0));

        let norm = dirs[..n].iter().map(|d| d * d).sum::<f64>().sqrt().max(1e-12);
        let radius = 0.01 * p.rated_power;
        let moved: Vec<f64> = mags.iter().zip(&dirs).map(|(m, d)| m + radius * d / norm).collect();
        let q = q_hat(&moved, &ambient, initial, &p);
        prop_assert!(q >= cut.evaluate(&moved) - 1e-6 * sub.q_hat.abs());
    }
}

#[test]
fn sample_day_regression() {
    let case = sample_day(true);
    let r = optimize(&case.fleet, &case.hours, &case.params, &BendersOptions::default()).unwrap();
    assert_eq!(r.termination, Termination::Converged);
    assert_eq!(r.iterations.len(), 15);
    for w in r.iterations.windows(2) {
        assert!(w[1].lower_bound >= w[0].lower_bound);
        assert!(w[1].best_upper_bound <= w[0].best_upper_bound);
        assert!(w[1].gap < w[0].gap);
    }
    for c in &r.cuts {
        assert!((c.cut.evaluate(&c.anchor) - c.q_hat).abs() <= 1e-9 * c.q_hat.max(1.0));
    }
    let first_q = r.iterations[0].q_hat;
    let chosen = r.iterations.iter().map(|i| i.upper_bound).fold(f64::INFINITY, f64::min);
    assert_eq!(chosen, r.iterations.last().unwrap().best_upper_bound);
    assert!(r.lol_percent * case.params.investment_cost / 100.0 <= first_q);
    // Frozen from the first verified run.
    assert!((r.operation_cost - 11285.64).abs() < 0.01, "{}", r.operation_cost);
    assert!((r.lol_percent - 0.002415).abs() < 5e-7, "{}", r.lol_percent);
}

#[test]
fn asset_management_trades_cost_for_life() {
    let off = sample_day(false);
    let on = sample_day(true);
    let o = BendersOptions::default();
    let a = optimize(&off.fleet, &off.hours, &off.params, &o).unwrap();
    let b = optimize(&on.fleet, &on.hours, &on.params, &o).unwrap();
    let lol = |r: &BendersResult, c: &PreparedCase| {
        let amb: Vec<f64> = c.hours.iter().map(|h| h.ambient).collect();
        assetgrid_core::thermal::horizon_loss_of_life(&r.schedule.magnitudes(), &amb, None, &c.report_params)
            .unwrap()
            .total_lol_percent
    };
    assert!(lol(&b, &on) <= lol(&a, &off));
    assert!(b.operation_cost >= a.operation_cost - 1e-6);
}
