//! Seeded structural checks of the coverage estimators and greedy engine
//! beyond the per-operation unit tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use uherding_core::coverage::{
    marginal_gain, ucoverage, uherding_select, CoverageVector, GreedyStrategy,
};
use uherding_core::kernel::KernelConfig;
use uherding_core::pool::{FeatureMatrix, PoolState};
use uherding_core::uncertainty::UncertaintyProfile;

struct Instance {
    features: FeatureMatrix,
    unc: UncertaintyProfile,
    cfg: KernelConfig,
    state: PoolState,
    eval: Vec<usize>,
}

fn instance(seed: u64, n_range: (usize, usize), labeled: usize) -> Instance {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = rng.random_range(n_range.0..=n_range.1);
    let d = rng.random_range(1..=4);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect())
        .collect();
    let values: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    let features = FeatureMatrix::from_rows(&rows).unwrap();
    let unc = UncertaintyProfile::custom(values).unwrap();
    let cfg = KernelConfig::gaussian(rng.random_range(0.3..2.0)).unwrap();
    let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
    let mut state = PoolState::new(labels, 2).unwrap();
    if labeled > 0 {
        let batch: Vec<usize> = (0..labeled.min(n / 2)).collect();
        state = state.mark_labeled(&batch).unwrap();
    }
    let eval = (0..n).collect();
    Instance {
        features,
        unc,
        cfg,
        state,
        eval,
    }
}

#[test]
fn marginal_gain_equals_coverage_difference_everywhere() {
    for seed in 0..200 {
        let inst = instance(seed, (5, 20), 2);
        let mut rng = ChaCha20Rng::seed_from_u64(10_000 + seed);
        let n = inst.features.len();
        let size = rng.random_range(0..4.min(n));
        let mut selected: Vec<usize> = Vec::new();
        while selected.len() < size {
            let cand = rng.random_range(0..n);
            if !selected.contains(&cand) {
                selected.push(cand);
            }
        }
        selected.sort_unstable();
        let cov = CoverageVector::from_labeled(&inst.features, &inst.cfg, &selected);
        let without =
            ucoverage(&selected, &inst.features, &inst.cfg, &inst.unc, &inst.eval).unwrap();
        for cand in 0..n {
            let direct =
                marginal_gain(cand, &cov, &inst.unc, &inst.features, &inst.cfg, &inst.eval);
            let mut grown = selected.clone();
            grown.push(cand);
            let with = ucoverage(&grown, &inst.features, &inst.cfg, &inst.unc, &inst.eval).unwrap();
            assert!(
                (direct - (with - without)).abs() < 1e-12,
                "seed {seed} cand {cand}: {direct} vs {}",
                with - without
            );
        }
    }
}

#[test]
fn positive_rescaling_never_changes_the_sequence() {
    for seed in 0..100 {
        let inst = instance(seed, (8, 18), 2);
        let mut rng = ChaCha20Rng::seed_from_u64(20_000 + seed);
        let budget = rng.random_range(1..=4).min(inst.state.unlabeled().len());
        let cov = CoverageVector::from_labeled(&inst.features, &inst.cfg, inst.state.labeled());
        let (base, _) = uherding_select(
            &inst.state,
            &inst.features,
            &inst.cfg,
            &inst.unc,
            budget,
            cov.clone(),
            &inst.eval,
            GreedyStrategy::FullScan,
        )
        .unwrap();
        let scale = rng.random_range(0.01..50.0);
        let scaled_values: Vec<f64> = inst.unc.values().iter().map(|v| v * scale).collect();
        let scaled = UncertaintyProfile::custom(scaled_values).unwrap();
        let (rescaled, _) = uherding_select(
            &inst.state,
            &inst.features,
            &inst.cfg,
            &scaled,
            budget,
            cov,
            &inst.eval,
            GreedyStrategy::FullScan,
        )
        .unwrap();
        assert_eq!(base, rescaled, "seed {seed} scale {scale}");
    }
}

#[test]
fn lazy_and_full_scan_agree_from_every_start_state() {
    for seed in 0..60 {
        let labeled = (seed % 4) as usize; // includes the empty labeled set
        let inst = instance(300_000 + seed, (8, 24), labeled);
        let budget = 5.min(inst.state.unlabeled().len());
        let cov = CoverageVector::from_labeled(&inst.features, &inst.cfg, inst.state.labeled());
        let full = uherding_select(
            &inst.state,
            &inst.features,
            &inst.cfg,
            &inst.unc,
            budget,
            cov.clone(),
            &inst.eval,
            GreedyStrategy::FullScan,
        )
        .unwrap();
        let lazy = uherding_select(
            &inst.state,
            &inst.features,
            &inst.cfg,
            &inst.unc,
            budget,
            cov,
            &inst.eval,
            GreedyStrategy::Lazy,
        )
        .unwrap();
        assert_eq!(full, lazy, "seed {seed}");
    }
}

#[test]
fn coverage_vector_only_ever_grows() {
    for seed in 0..40 {
        let inst = instance(500_000 + seed, (8, 20), 2);
        let mut cov = CoverageVector::from_labeled(&inst.features, &inst.cfg, inst.state.labeled());
        for _ in 0..4.min(inst.state.unlabeled().len()) {
            let before = cov.values().to_vec();
            let (picks, next) = uherding_select(
                &inst.state,
                &inst.features,
                &inst.cfg,
                &inst.unc,
                1,
                cov,
                &inst.eval,
                GreedyStrategy::FullScan,
            )
            .unwrap();
            assert_eq!(picks.len(), 1);
            for (a, b) in before.iter().zip(next.values()) {
                assert!(b >= a, "coverage entry fell from {a} to {b} (seed {seed})");
            }
            cov = next;
        }
    }
}

#[test]
fn restricting_evaluation_to_the_unlabeled_set_still_selects_unlabeled_points() {
    for seed in 0..40 {
        let inst = instance(400_000 + seed, (8, 20), 3);
        let eval: Vec<usize> = inst.state.unlabeled().to_vec();
        let budget = 3.min(inst.state.unlabeled().len());
        let cov = CoverageVector::from_labeled(&inst.features, &inst.cfg, inst.state.labeled());
        let (picks, _) = uherding_select(
            &inst.state,
            &inst.features,
            &inst.cfg,
            &inst.unc,
            budget,
            cov,
            &eval,
            GreedyStrategy::FullScan,
        )
        .unwrap();
        assert_eq!(picks.len(), budget);
        for p in &picks {
            assert!(inst.state.unlabeled().contains(p));
        }
    }
}
