use compensa_core::cantor::{compensate_cantor, marginal, CantorCompensation};
use compensa_core::compensator::SingleCompensation;
use compensa_core::measure::{check_compensation, AtomicMeasure, GridFunction};
use compensa_core::quotient::{
    average, averaging_adjoint, dyadic_coarsening, pullback, pushforward, transfer_compensation,
    validate_rao, QuotientSpec, Transferred,
};
use compensa_core::sample;
use compensa_core::scalar::{ratio, Rational, Scalar};
use proptest::prelude::*;
use proptest::test_runner::Config as ProptestConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn transfer_is_a_compensation(seed in any::<u64>(), source in 1usize..=16, target in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = sample::quotient(&mut rng, source, target, 100);
        prop_assert!(validate_rao(&q).is_valid());
        let mu = sample::measure(&mut rng, q.target().len(), 1000);
        let mu = AtomicMeasure::new(q.target().to_vec(), mu.weights().to_vec()).unwrap();
        let nu = transfer_compensation(&q, &SingleCompensation, &mu).unwrap();
        prop_assert_eq!(check_compensation(&nu, &mu), Ok(()));
    }

    #[test]
    fn adjoint_identities(seed in any::<u64>(), source in 1usize..=16, target in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = sample::quotient(&mut rng, source, target, 100);
        let n = q.target().len();
        let mu = AtomicMeasure::new(
            q.target().to_vec(),
            sample::measure(&mut rng, n, 1000).weights().to_vec(),
        ).unwrap();
        let lifted = averaging_adjoint(&q, &mu).unwrap();
        prop_assert_eq!(pushforward(&q, &lifted).unwrap(), mu.clone());
        prop_assert_eq!(lifted.total_mass(), mu.total_mass());
        let pos = mu.positive_part();
        prop_assert!(averaging_adjoint(&q, &pos).unwrap().is_nonnegative());
        // ⟨u*μ, g⟩ = ⟨μ, u g⟩ and u∘C_φ = id
        let g = sample::function(&mut rng, q.source().len(), 100);
        let g = GridFunction::new(q.source().to_vec(), g.values().to_vec()).unwrap();
        prop_assert_eq!(lifted.pairing(&g).unwrap(), mu.pairing(&average(&q, &g).unwrap()).unwrap());
        let h = GridFunction::new(
            q.target().to_vec(),
            sample::function(&mut rng, n, 100).values().to_vec(),
        ).unwrap();
        prop_assert_eq!(average(&q, &pullback(&q, &h).unwrap()).unwrap(), h);
    }

    #[test]
    fn transfer_composes(seed in any::<u64>(), a in 1usize..=16, b in 1usize..=8, c in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q1 = sample::quotient(&mut rng, a, b, 100);
        let b = q1.target().len();
        let q2 = sample::quotient(&mut rng, b, c, 100);
        // relabel q2's source to q1's target
        let phi: Vec<usize> = q2.phi().to_vec();
        let weights: Vec<Rational> = (0..b)
            .map(|t| q2.weight(&q2.target()[phi[t]], &q2.source()[t]))
            .collect();
        let q2 = QuotientSpec::from_fiber_weights(
            q1.target().to_vec(),
            q2.target().to_vec(),
            phi,
            weights,
        ).unwrap();
        let q = q1.then(&q2).unwrap();
        prop_assert!(validate_rao(&q).is_valid());
        let mu = AtomicMeasure::new(
            q2.target().to_vec(),
            sample::measure(&mut rng, q2.target().len(), 1000).weights().to_vec(),
        ).unwrap();
        let inner = Transferred { quotient: &q1, inner: &SingleCompensation };
        prop_assert_eq!(
            transfer_compensation(&q2, &inner, &mu).unwrap(),
            transfer_compensation(&q, &SingleCompensation, &mu).unwrap()
        );
    }

    #[test]
    fn coarsening_agrees_with_direct_compensation(seed in any::<u64>(), n in 1usize..=7, m in 0usize..=6) {
        let m = m.min(n - 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fine = sample::dyadic_nonnegative(&mut rng, n, 1000);
        let coarse = marginal(&fine, m).unwrap();
        let direct = compensate_cantor(&coarse).to_atomic();
        let q = dyadic_coarsening::<Rational>(n, m).unwrap();
        prop_assert_eq!(transfer_compensation(&q, &CantorCompensation, &coarse.to_atomic()).unwrap(), direct.clone());
        let weights: Vec<Rational> = (0..1usize << n).map(|_| ratio(rng.gen_range(0..=5), 1)).collect();
        let mut sums = vec![Rational::zero(); 1 << m];
        for (i, w) in weights.iter().enumerate() {
            sums[i >> (n - m)] = sums[i >> (n - m)].clone() + w.clone();
        }
        let weights: Vec<Rational> = weights
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let s = &sums[i >> (n - m)];
                if s.is_zero() {
                    ratio(1, 1 << (n - m))
                } else {
                    w.clone() / s.clone()
                }
            })
            .collect();
        let q = q.reweighted(weights).unwrap();
        prop_assert!(validate_rao(&q).is_valid());
        prop_assert_eq!(transfer_compensation(&q, &CantorCompensation, &coarse.to_atomic()).unwrap(), direct);
    }
}
