use fracrb::oracle::{minmax_product, GridKind};
use fracrb::specfun::cstar;
use fracrb::verify::BOUND_RTOL;
use fracrb::zolotarev::{r_for_tolerance, snapshot_times, transformed_points, zolotarev_points, SpectralInterval};
use proptest::prelude::*;

const DELTAS: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-6, 1e-8];

#[test]
fn product_bound_and_alternance() {
    for delta in DELTAS {
        let c = cstar(delta).unwrap();
        for r in 1..=30 {
            let p = transformed_points(1.0, 1.0 / delta, r).unwrap();
            let rep = minmax_product(&p, delta, 1.0, 100_000, GridKind::Geometric).unwrap();
            let bound = 2.0 * (-c * r as f64).exp();
            assert!(rep.max <= bound * (1.0 + BOUND_RTOL), "delta {delta}, r {r}: {} > {bound}", rep.max);
            assert!(rep.extremal.len() >= r + 1, "delta {delta}, r {r}: {} clusters", rep.extremal.len());
        }
    }
}

#[test]
fn uniform_grid_agrees_where_resolved() {
    let delta = 1e-2;
    for r in [1, 3, 6] {
        let p = transformed_points(1.0, 1.0 / delta, r).unwrap();
        let geo = minmax_product(&p, delta, 1.0, 100_000, GridKind::Geometric).unwrap();
        let uni = minmax_product(&p, delta, 1.0, 100_000, GridKind::Uniform).unwrap();
        assert!((geo.max - uni.max).abs() < 1e-6 * geo.max);
    }
}

#[test]
fn classical_symmetry() {
    for delta in DELTAS {
        for r in 1..=30 {
            let z = zolotarev_points(delta, r).unwrap();
            for j in 0..r {
                let prod = z[j] * z[r - 1 - j];
                assert!((prod - delta).abs() < 1e-8 * delta, "delta {delta}, r {r}, j {j}");
            }
        }
    }
}

#[test]
fn tolerance_rule_meets_bound() {
    for delta in DELTAS {
        for eps in [1e-2, 1e-6, 1e-10] {
            let r = r_for_tolerance(eps, delta).unwrap();
            assert!(2.0 * (-cstar(delta).unwrap() * r as f64).exp() <= eps);
            if r > 1 {
                assert!(2.0 * (-cstar(delta).unwrap() * (r - 1) as f64).exp() > eps);
            }
        }
    }
}

proptest! {
    #[test]
    fn points_ascending_in_range(log_delta in -10.0f64..-0.05, r in 1usize..40) {
        let delta = 10f64.powf(log_delta);
        let z = zolotarev_points(delta, r).unwrap();
        prop_assert_eq!(z.len(), r);
        prop_assert!(z[0] >= delta * (1.0 - 1e-12));
        prop_assert!(z[r - 1] <= 1.0);
        prop_assert!(z.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn snapshot_times_inside_inverse_interval(lo in 0.1f64..100.0, ratio in 2.0f64..1e6, r in 1usize..25) {
        let interval = SpectralInterval::new(lo, lo * ratio).unwrap();
        let times = snapshot_times(&interval, r).unwrap();
        let t = times.as_slice();
        prop_assert_eq!(t[0], 0.0);
        prop_assert_eq!(times.len(), r + 1);
        let (a, b) = interval.inverse();
        for &tj in &t[1..] {
            prop_assert!(tj * tj >= a * (1.0 - 1e-12) && tj * tj <= b * (1.0 + 1e-12));
        }
    }
}
