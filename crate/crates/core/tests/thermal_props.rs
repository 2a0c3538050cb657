use assetgrid_core::thermal::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lol(ki: f64, ku: f64, ambient: f64, p: &TransformerThermalParams) -> f64 {
    interval_loss_of_life(
        &IntervalLoading {
            k_initial: ki,
            k_ultimate: ku,
            ambient,
        },
        p,
    )
    .lol_percent
}

/// Central finite differences of the interval loss, step 1e-6.
fn fd_gradient(ki: f64, ku: f64, ambient: f64, p: &TransformerThermalParams) -> (f64, f64) {
    let h = 1e-6;
    (
        (lol(ki + h, ku, ambient, p) - lol(ki - h, ku, ambient, p)) / (2.0 * h),
        (lol(ki, ku + h, ambient, p) - lol(ki, ku - h, ambient, p)) / (2.0 * h),
    )
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

pub fn max_gradient_error(points: usize, seed: u64) -> f64 {
    let p = TransformerThermalParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..points {
        let ki = rng.gen_range(0.05..1.5);
        let ku = rng.gen_range(0.05..1.5);
        let amb = rng.gen_range(-10.0..45.0);
        let g = loss_gradient(
            &IntervalLoading {
                k_initial: ki,
                k_ultimate: ku,
                ambient: amb,
            },
            &p,
        )
        .unwrap();
        let (fi, fu) = fd_gradient(ki, ku, amb, &p);
        worst = worst.max(rel_err(g.d_lol_d_k_initial, fi)).max(rel_err(g.d_lol_d_k_ultimate, fu));
    }
    worst
}

#[test]
fn gradient_matches_finite_differences_on_random_points() {
    let worst = max_gradient_error(1000, 42);
    assert!(worst <= 1e-6, "{worst}");
}

#[test]
fn gradient_at_rated_point_matches_finite_difference() {
    let p = TransformerThermalParams::default();
    let g = loss_gradient(
        &IntervalLoading {
            k_initial: 1.0,
            k_ultimate: 1.0,
            ambient: 30.0,
        },
        &p,
    )
    .unwrap();
    let (fi, fu) = fd_gradient(1.0, 1.0, 30.0, &p);
    assert!(rel_err(g.d_lol_d_k_initial, fi) < 1e-7);
    assert!(rel_err(g.d_lol_d_k_ultimate, fu) < 1e-7);
}

#[test]
fn symmetric_partials_sum_to_constant_load_slope() {
    let p = TransformerThermalParams::default();
    for &k in &[0.2, 0.7, 1.0, 1.3] {
        let g = loss_gradient(
            &IntervalLoading {
                k_initial: k,
                k_ultimate: k,
                ambient: 25.0,
            },
            &p,
        )
        .unwrap();
        let h = 1e-6;
        let slope = (lol(k + h, k + h, 25.0, &p) - lol(k - h, k - h, 25.0, &p)) / (2.0 * h);
        assert!(rel_err(g.d_lol_d_k_initial + g.d_lol_d_k_ultimate, slope) < 1e-7);
    }
}

#[test]
fn cooler_ambient_shrinks_both_partials() {
    let p = TransformerThermalParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let ki = rng.gen_range(0.05..1.5);
        let ku = rng.gen_range(0.05..1.5);
        let amb = rng.gen_range(-10.0..45.0);
        let g = |a: f64| {
            loss_gradient(
                &IntervalLoading {
                    k_initial: ki,
                    k_ultimate: ku,
                    ambient: a,
                },
                &p,
            )
            .unwrap()
        };
        let (hot, cold) = (g(amb), g(amb - 50.0));
        assert!(cold.d_lol_d_k_initial < hot.d_lol_d_k_initial);
        assert!(cold.d_lol_d_k_ultimate < hot.d_lol_d_k_ultimate);
    }
}

#[test]
fn aging_factor_strictly_increasing() {
    let mut prev = aging_acceleration(-40.0);
    let mut t = -40.0;
    while t < 200.0 {
        t += 0.5;
        let f = aging_acceleration(t);
        assert!(f > prev, "{t}");
        prev = f;
    }
}

#[test]
fn interval_loss_increasing_in_each_argument() {
    let p = TransformerThermalParams::default();
    let grid: Vec<f64> = (0..=30).map(|i| i as f64 * 0.05).collect();
    for &a in &[-10.0, 20.0, 40.0] {
        for &k in &grid {
            for w in grid.windows(2) {
                assert!(lol(w[1], k, a, &p) > lol(w[0], k, a, &p));
                assert!(lol(k, w[1], a, &p) > lol(k, w[0], a, &p));
            }
        }
    }
    for &k in &grid {
        for a in -10..45 {
            assert!(lol(k, k, a as f64 + 1.0, &p) > lol(k, k, a as f64, &p));
        }
    }
}

#[test]
fn rated_year_matches_closed_form() {
    let p = TransformerThermalParams::default();
    let loading = vec![10.0; 8760];
    let ambient = vec![30.0; 8760];
    let h = horizon_loss_of_life(&loading, &ambient, None, &p).unwrap();
    let expected = 8760.0 * 100.0 / 180_000.0;
    assert!(rel_err(h.total_lol_percent, expected) <= 1e-9);
    assert!((h.expected_lifetime_years - 20.548).abs() < 1e-3);
}

#[test]
fn idle_year_still_ages() {
    let p = TransformerThermalParams::default();
    let h = horizon_loss_of_life(&vec![0.0; 8760], &vec![30.0; 8760], None, &p).unwrap();
    let per_hour = lol(0.0, 0.0, 30.0, &p);
    assert!(h.total_lol_percent > 0.0);
    assert!(rel_err(h.total_lol_percent, 8760.0 * per_hour) < 1e-9);
}

proptest! {
    #[test]
    fn horizon_is_additive_over_splits(
        loads in prop::collection::vec(0.0f64..15.0, 2..60),
        temps_seed in any::<u64>(),
        cut_frac in 0.0f64..1.0,
        carry in prop::option::of(0.0f64..15.0),
    ) {
        let p = TransformerThermalParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(temps_seed);
        let amb: Vec<f64> = loads.iter().map(|_| rng.gen_range(-10.0..45.0)).collect();
        let cut = 1 + ((loads.len() - 1) as f64 * cut_frac) as usize;
        let cut = cut.min(loads.len() - 1);
        let whole = horizon_loss_of_life(&loads, &amb, carry, &p).unwrap();
        let a = horizon_loss_of_life(&loads[..cut], &amb[..cut], carry, &p).unwrap();
        let b = horizon_loss_of_life(&loads[cut..], &amb[cut..], Some(loads[cut - 1]), &p).unwrap();
        let sum = a.total_lol_percent + b.total_lol_percent;
        prop_assert!((whole.total_lol_percent - sum).abs() <= 1e-12 * whole.total_lol_percent.max(1e-300));
    }

    #[test]
    fn interval_result_invariants(ki in 0.0f64..2.0, ku in 0.0f64..2.0, amb in -40.0f64..50.0) {
        let p = TransformerThermalParams::default();
        let r = interval_loss_of_life(&IntervalLoading { k_initial: ki, k_ultimate: ku, ambient: amb }, &p);
        prop_assert_eq!(r.hotspot_temp, amb + r.top_oil_rise + r.hotspot_rise);
        prop_assert!(r.aging_factor > 0.0);
        prop_assert!(r.lol_percent >= 0.0);
    }
}
