//! Conservation properties of the pool bookkeeping.

use proptest::prelude::*;

use uherding_core::pool::PoolState;

fn pool_and_batches() -> impl Strategy<Value = (Vec<usize>, Vec<Vec<usize>>)> {
    (2usize..60).prop_flat_map(|n| {
        let labels = prop::collection::vec(0usize..4, n);
        let batches = prop::collection::vec(prop::collection::vec(0usize..n, 0..8), 0..6);
        (labels, batches)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn mark_labeled_preserves_partition((labels, batches) in pool_and_batches()) {
        let n = labels.len();
        let mut state = PoolState::new(labels, 4).unwrap();
        for batch in batches {
            let next = state.mark_labeled(&batch);
            let Ok(next) = next else {
                // rejected batches must leave nothing half-applied
                continue;
            };
            state = next;
            prop_assert_eq!(state.labeled().len() + state.unlabeled().len(), n);
            // disjoint and jointly exhaustive
            let mut all: Vec<usize> = state
                .labeled()
                .iter()
                .chain(state.unlabeled())
                .copied()
                .collect();
            all.sort_unstable();
            let expected: Vec<usize> = (0..n).collect();
            prop_assert_eq!(all, expected);
            // sorted iteration order
            prop_assert!(state.labeled().windows(2).all(|w| w[0] < w[1]));
            prop_assert!(state.unlabeled().windows(2).all(|w| w[0] < w[1]));
        }
    }
}
