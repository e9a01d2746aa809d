use compensa_core::cantor::{words, CantorCompensation};
use compensa_core::closeness::{
    axioms_check, cantor_continuity_sample, Closeness, DerivedCloseness, MetricCloseness,
};
use compensa_core::compensator::SingleCompensation;
use compensa_core::sample;
use compensa_core::scalar::{ratio, Rational};
use proptest::prelude::*;
use proptest::test_runner::Config as ProptestConfig;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(100))]

    #[test]
    fn metric_closeness_axioms(seed in any::<u64>(), n in 2usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = sample::metric(&mut rng, n, 1000);
        let triples = sample::triples(&mut rng, space.points(), 30);
        let report = axioms_check(&MetricCloseness(&space), &triples);
        prop_assert!(report.passed(), "{:?}", report.violations);
        prop_assert_eq!(report.checked + report.skipped, 30);
    }

    #[test]
    fn derived_closeness_axioms(seed in any::<u64>(), n in 2usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = sample::labels(n);
        let triples = sample::triples(&mut rng, &points, 30);
        let c = DerivedCloseness { points: &points, xi: &SingleCompensation };
        let report = axioms_check::<Rational, _, _>(&c, &triples);
        prop_assert!(report.passed(), "{:?}", report.violations);
    }

    #[test]
    fn cantor_closeness_axioms(seed in any::<u64>(), depth in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = words(depth);
        let triples = sample::triples(&mut rng, &points, 30);
        let c = DerivedCloseness { points: &points, xi: &CantorCompensation };
        let report = axioms_check::<Rational, _, _>(&c, &triples);
        prop_assert!(report.passed(), "{:?}", report.violations);
    }

    #[test]
    fn corrupted_closeness_is_caught(seed in any::<u64>(), n in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = sample::metric(&mut rng, n, 1000);
        let honest = MetricCloseness(&space);
        let flipped = |x: &String, y: &String, z: &String| -> compensa_core::error::Result<Rational> {
            honest.closeness(x, y, z).map(|v: Rational| -v)
        };
        let p = space.points();
        let triples = vec![(p[0].clone(), p[0].clone(), p[1].clone())];
        prop_assert!(!axioms_check(&flipped, &triples).passed());
    }
}

#[test]
fn cantor_closeness_is_locally_constant() {
    for seed in 0..5 {
        let sample = cantor_continuity_sample(6, 20, seed).unwrap();
        assert!(sample.sampled_only);
        assert!(sample.evaluations > 0);
        assert_eq!(sample.max_deviation, ratio(0, 1));
    }
}
