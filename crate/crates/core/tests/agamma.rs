use compensa_core::agamma::{
    agamma_compensate, check_field_compensation, continuity_along_tail, Branch, FiniteField, Site,
};
use compensa_core::measure::AtomicMeasure;
use compensa_core::sample;
use compensa_core::scalar::{Rational, Scalar};
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

fn field(seed: u64, window: u64) -> FiniteField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample::field(&mut rng, window, 100)
}

fn probe(field: &FiniteField) -> Vec<u64> {
    (0..field.window() + 8).collect()
}

proptest! {
    #![proptest_config(config(300))]

    #[test]
    fn pointwise_compensation(seed in any::<u64>(), window in 4u64..=12) {
        let f = field(seed, window);
        let xi = agamma_compensate(&f).unwrap();
        let mut sites: Vec<Site> = probe(&f).into_iter().map(Site::Gamma).collect();
        sites.push(Site::Infinity);
        prop_assert_eq!(check_field_compensation(&f, &xi, &sites), vec![]);
    }

    #[test]
    fn tail_settles_on_the_limit(seed in any::<u64>(), window in 4u64..=12) {
        let f = field(seed, window);
        let xi = agamma_compensate(&f).unwrap();
        let report = continuity_along_tail(&f, &xi, &probe(&f));
        prop_assert!(report.passed(), "{:?}", report.violations);
        prop_assert!(report.checked > 0);
    }

    #[test]
    fn rescaled_points_keep_mass(seed in any::<u64>(), window in 4u64..=12) {
        let f = field(seed, window);
        let xi = agamma_compensate(&f).unwrap();
        let Some(sets) = &xi.sets else { return Ok(()); };
        let at_infinity = xi.xi_infinity.mass_at(&Site::Infinity);
        for &t in &sets.rescaled {
            prop_assert_eq!(sets.branch(Site::Gamma(t)), Branch::Rescaled);
            let ft = f.value_at(Site::Gamma(t));
            prop_assert_eq!(xi.value_at(Site::Gamma(t)).total_mass(), ft.total_mass());
            let off = ft.positive_part().mass_where(|s| match s {
                Site::Gamma(k) => !sets.gamma0.contains(k),
                Site::Infinity => true,
            });
            let factor = at_infinity.clone() / off;
            prop_assert!(!factor.is_negative() && factor <= Rational::one());
        }
    }
}

#[test]
fn generator_covers_every_branch() {
    let (mut b, mut c, mut rescaled, mut negative) = (0, 0, 0, 0);
    for seed in 0..300 {
        let f = field(seed, 8);
        let xi = agamma_compensate(&f).unwrap();
        match &xi.sets {
            None => negative += 1,
            Some(sets) => {
                b += sets.b.len();
                c += sets.c.len();
                rescaled += sets.rescaled.len();
            }
        }
    }
    assert!(b > 0 && c > 0 && rescaled > 0 && negative > 0, "{b} {c} {rescaled} {negative}");
}

#[test]
fn corrupted_tail_is_caught() {
    for seed in 0..50 {
        let f = field(seed, 6);
        let mut xi = agamma_compensate(&f).unwrap();
        let wrong = xi.xi_infinity.total_mass() + Rational::one();
        xi.xi_tail = AtomicMeasure::from_pairs([(Site::Infinity, wrong)]).unwrap();
        assert!(!continuity_along_tail(&f, &xi, &probe(&f)).passed());
    }
}
