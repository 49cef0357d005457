mod common;

use common::*;
use mstream_core::gen::{random_matroid, random_weight};
use mstream_core::matroid::{greedy_max_independent, span_threshold, swap_threshold, OrderKey};
use mstream_core::{ElementId, ElementSet, Error, Matroid, Rational};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn matroid_and_weights(seed: u64, n: usize) -> (Matroid, Vec<Rational>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = random_matroid(&mut rng, n);
    let w = (0..n).map(|_| random_weight(&mut rng, 9, 3)).collect();
    (m, w)
}

fn set(ids: &[ElementId]) -> ElementSet {
    ids.iter().copied().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn independence_and_rank_match_definitions(seed in any::<u64>(), n in 0usize..=8) {
        let (m, _) = matroid_and_weights(seed, n);
        let ground: Vec<ElementId> = (0..n).collect();
        for s in subsets(&ground) {
            let indep = m.is_independent(&set(&s)).unwrap();
            prop_assert_eq!(indep, naive_independent(&m, &s));
            let r = m.rank(&set(&s)).unwrap();
            prop_assert_eq!(r, naive_rank(&m, &s));
            if indep {
                prop_assert_eq!(r, s.len());
            }
        }
    }

    #[test]
    fn rank_is_monotone_and_submodular(seed in any::<u64>(), n in 0usize..=7) {
        let (m, _) = matroid_and_weights(seed, n);
        let ground: Vec<ElementId> = (0..n).collect();
        let all = subsets(&ground);
        for a in &all {
            for b in &all {
                let sa = set(a);
                let sb = set(b);
                let union: ElementSet = sa.union(&sb).copied().collect();
                let inter: ElementSet = sa.intersection(&sb).copied().collect();
                let (ra, rb) = (m.rank(&sa).unwrap(), m.rank(&sb).unwrap());
                prop_assert!(ra + rb >= m.rank(&union).unwrap() + m.rank(&inter).unwrap());
                if sa.is_subset(&sb) {
                    prop_assert!(ra <= rb);
                }
            }
        }
    }

    #[test]
    fn span_matches_rank_definition(seed in any::<u64>(), n in 1usize..=8) {
        let (m, _) = matroid_and_weights(seed, n);
        let ground: Vec<ElementId> = (0..n).collect();
        for s in subsets(&ground) {
            for e in 0..n {
                prop_assert_eq!(m.in_span(&set(&s), e).unwrap(), naive_spans(&m, &s, e));
            }
        }
    }

    #[test]
    fn greedy_is_optimal(seed in any::<u64>(), n in 0usize..=10) {
        let (m, w) = matroid_and_weights(seed, n);
        let ground: Vec<ElementId> = (0..n).collect();
        let key = |e: ElementId| OrderKey::new(w[e].clone(), e);
        let picked = greedy_max_independent(&m, &ground, &key);
        prop_assert!(naive_independent(&m, &picked));
        prop_assert_eq!(
            weight_of(&picked, |e| w[e].clone()),
            naive_max_independent_weight(&m, &ground, |e| w[e].clone())
        );
        // Every skipped element is spanned by earlier picks.
        let mut order = ground.clone();
        order.sort_by(|&a, &b| key(a).canonical_cmp(&key(b)));
        for (p, &e) in order.iter().enumerate() {
            if !picked.contains(&e) {
                let earlier: Vec<ElementId> = order[..p].iter().copied().filter(|f| picked.contains(f)).collect();
                prop_assert!(naive_spans(&m, &earlier, e));
            }
        }
    }

    #[test]
    fn swap_threshold_matches_span_definition(seed in any::<u64>(), n in 1usize..=9) {
        let (m, w) = matroid_and_weights(seed, n);
        let ground: Vec<ElementId> = (0..n).collect();
        for e in 0..n {
            let rest: Vec<ElementId> = ground.iter().copied().filter(|&f| f != e).collect();
            let t = greedy_max_independent(&m, &rest, &|f| OrderKey::new(w[f].clone(), f));
            let pool: Vec<(ElementId, Rational)> = rest.iter().map(|&f| (f, w[f].clone())).collect();
            let expected = naive_span_threshold(&m, &pool, e);
            match swap_threshold(&m, &t, e, &|f| w[f].clone()) {
                Ok(v) => {
                    prop_assert_eq!(Some(v.clone()), expected);
                    prop_assert_eq!(v, span_threshold(&m, &pool, e));
                }
                Err(Error::Caller(_)) => prop_assert!(expected.is_none()),
                Err(other) => prop_assert!(false, "unexpected error {other:?}"),
            }
        }
    }
}

#[test]
fn documented_examples() {
    let ce = Matroid::partition(4, vec![vec![0, 1], vec![2], vec![3]], vec![1, 1, 1]).unwrap();
    let u2 = Matroid::uniform(4, 2);
    let tri = Matroid::graphic(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
    assert!(!u2.is_independent(&set(&[0, 1, 2])).unwrap());
    assert!(!ce.is_independent(&set(&[0, 1])).unwrap());
    assert!(tri.is_independent(&set(&[0, 2])).unwrap());
    assert_eq!(u2.rank(&set(&[0, 1, 2])).unwrap(), 2);
    assert_eq!(ce.rank(&set(&[0, 1, 2, 3])).unwrap(), naive_rank(&ce, &[0, 1, 2, 3]));
    assert_eq!(ce.rank(&set(&[0, 1, 2, 3])).unwrap(), 3);
    assert_eq!(tri.rank(&set(&[0, 1, 2])).unwrap(), 2);
    assert!(u2.in_span(&set(&[2, 3]), 1).unwrap());
    assert!(ce.in_span(&set(&[0]), 1).unwrap());
    assert!(matches!(u2.rank(&set(&[9])), Err(Error::UnknownElement(9))));

    let eps = q(1, 100);
    let w2 = [q(1, 1), eps.clone(), q(2, 100), q(3, 100)];
    let w1 = [q(1, 1), q(101, 100), eps.clone(), eps.clone()];
    let g2 = greedy_max_independent(&u2, &[0, 1, 2, 3], &|e| OrderKey::new(w2[e].clone(), e));
    assert_eq!(set(&g2), set(&[0, 3]));
    let g1 = greedy_max_independent(&ce, &[0, 1, 2, 3], &|e| OrderKey::new(w1[e].clone(), e));
    assert_eq!(set(&g1), set(&[1, 2, 3]));
    assert!(greedy_max_independent(&ce, &[], &|e| OrderKey::new(w1[e].clone(), e)).is_empty());

    assert_eq!(swap_threshold(&u2, &[], 2, &|e| w2[e].clone()).unwrap(), zero());
    assert_eq!(swap_threshold(&u2, &[0, 1], 2, &|e| w2[e].clone()).unwrap(), eps);
    assert_eq!(swap_threshold(&ce, &[0], 1, &|_| q(1, 1)).unwrap(), q(1, 1));
    assert!(matches!(
        swap_threshold(&u2, &[0, 1], 1, &|e| w2[e].clone()),
        Err(Error::Caller(_))
    ));
}
