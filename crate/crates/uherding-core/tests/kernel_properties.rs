//! Property tests for kernel evaluation and radius adaptation.

use proptest::prelude::*;

use uherding_core::kernel::{adapt_radius, kernel_value, KernelConfig};
use uherding_core::pool::FeatureMatrix;

fn row(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0..50.0f64, dim)
}

fn row_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, f64)> {
    (1usize..6).prop_flat_map(|d| (row(d), row(d), 0.05..10.0f64))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn kernel_is_bitwise_symmetric_and_bounded((a, b, sigma) in row_pair()) {
        let cfg = KernelConfig::gaussian(sigma).unwrap();
        let ab = kernel_value(&a, &b, &cfg).unwrap();
        let ba = kernel_value(&b, &a, &cfg).unwrap();
        prop_assert_eq!(ab.to_bits(), ba.to_bits());
        prop_assert!((0.0..=1.0).contains(&ab));
    }

    #[test]
    fn kernel_satisfies_its_lipschitz_bound((t, t1, sigma) in row_pair(), step in row(1)) {
        // move t2 within distance 1 of t1
        let delta = step[0] / 50.0; // in [-1, 1]
        let mut t2 = t1.clone();
        t2[0] += delta;
        let cfg = KernelConfig::gaussian(sigma).unwrap();
        let k1 = kernel_value(&t, &t1, &cfg).unwrap();
        let k2 = kernel_value(&t, &t2, &cfg).unwrap();
        let dist = delta.abs();
        prop_assert!(
            (k1 - k2).abs() <= cfg.lipschitz_bound() * dist + 1e-9,
            "|{} - {}| > L*{}", k1, k2, dist
        );
    }

    #[test]
    fn norm_bound_dominates_every_row(rows in prop::collection::vec(row(3), 1..20)) {
        let features = FeatureMatrix::from_rows(&rows).unwrap();
        for r in &rows {
            let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!(norm <= features.norm_bound() * (1.0 + 1e-9) + 1e-300);
        }
    }

    #[test]
    fn adapt_radius_is_nonincreasing_under_growth(rows in prop::collection::vec(row(2), 2..12)) {
        // distinct rows so the zero-distance fallback never triggers
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                prop_assume!(rows[i] != rows[j]);
            }
        }
        let features = FeatureMatrix::from_rows(&rows).unwrap();
        let mut last = f64::INFINITY;
        for k in 2..=rows.len() {
            let indices: Vec<usize> = (0..k).collect();
            let radius = adapt_radius(&features, &indices, f64::INFINITY);
            prop_assert!(radius <= last, "radius grew from {last} to {radius}");
            last = radius;
        }
    }
}
