use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trustroute::qrouting::{learning_rate, LearningParams, QTable};
use trustroute::NodeId;

#[test]
fn repeated_updates_close_the_gap_geometrically() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (d, n) = (NodeId(9), NodeId(1));
    for _ in 0..20 {
        let lambda: f64 = rng.random_range(0.01..1.0);
        let r: f64 = rng.random_range(0.0..120.0);
        let q0: f64 = rng.random_range(0.0..120.0);
        let mut t = QTable::new(NodeId(0));
        t.update(d, n, q0, 0.0, 1.0, 1.0).unwrap();
        for k in 1..=30 {
            let q = t.update(d, n, r, 0.0, lambda, 1.0).unwrap();
            let expect = (1.0 - lambda).powi(k) * (q0 - r).abs();
            assert!(((q - r).abs() - expect).abs() <= 1e-12 * 120.0, "k={k}");
        }
    }
}

proptest! {
    #[test]
    fn rate_is_shift_invariant(vi in 5.0..25.0f64, vj in 5.0..25.0f64, shift in 0.0..20.0f64) {
        let p = LearningParams::default();
        let moved = learning_rate(vi + shift, vj + shift, &p);
        prop_assert!((learning_rate(vi, vj, &p) - moved).abs() < 1e-12);
    }

    #[test]
    fn rate_is_bounded(vi in 5.0..45.0f64, vj in 5.0..45.0f64) {
        let r = learning_rate(vi, vj, &LearningParams::default());
        prop_assert!((0.0..=1.0).contains(&r));
    }

    #[test]
    fn q_stays_non_negative(steps in prop::collection::vec((0.0..120.0f64, 0.0..500.0f64, 0.0..=1.0f64), 1..40)) {
        let mut t = QTable::new(NodeId(0));
        for (r, next, lambda) in steps {
            prop_assert!(t.update(NodeId(5), NodeId(1), r, next, lambda, 1.0).unwrap() >= 0.0);
        }
    }
}
