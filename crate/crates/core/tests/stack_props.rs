mod common;

use std::collections::HashMap;

use common::*;
use mstream_core::gen::{random_bipartite_graph, random_linear_instance, random_order, random_preferences};
use mstream_core::kernel::{brute_force_kernel, find_kernel, verify_kernel};
use mstream_core::local_ratio::SelectionState;
use mstream_core::matroid::OrderKey;
use mstream_core::{
    extract_solution, greedy_max_independent, run_local_ratio, run_matching_baseline, BipartiteGraph, Decision,
    ElementId, ExactInstance, Matroid, OrderedMatroid, Rational,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance_and_order(seed: u64, max_n: usize) -> (ExactInstance, Vec<ElementId>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (seed % (max_n as u64 + 1)) as usize;
    let inst = random_linear_instance(&mut rng, n, 2);
    let order = random_order(&mut rng, n);
    (inst, order)
}

fn w_i_greedy_weight(state: &SelectionState<Rational>, m: &Matroid, i: usize) -> Rational {
    let ground = state.alive_ids();
    let picked = greedy_max_independent(m, &ground, &|e| state.key(i, e));
    weight_of(&picked, |e| state.entry(e).unwrap().w[i].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Replays the pass one element at a time, checking every threshold
    /// against the span definition over the current stack.
    #[test]
    fn thresholds_and_weights_match_definitions(seed in any::<u64>()) {
        let (inst, order) = instance_and_order(seed, 10);
        let mut state = SelectionState::<Rational>::new(2);
        for (arrival, &e) in order.iter().enumerate() {
            let mut total = zero();
            let mut loop_somewhere = false;
            for (i, m) in inst.matroids.iter().enumerate() {
                let pool: Vec<(ElementId, Rational)> =
                    state.entries().map(|x| (x.element, x.w[i].clone())).collect();
                let expected = naive_span_threshold(m, &pool, e);
                prop_assert_eq!(state.threshold(&inst.matroids, i, e), expected.clone());
                match expected {
                    Some(v) => total += v,
                    None => loop_somewhere = true,
                }
            }
            let w = inst.weight(e).clone();
            let decision = state.process_element(&inst.matroids, e, arrival, w.clone(), &q(1, 1));
            let should_select = !loop_somewhere && w > total;
            prop_assert_eq!(decision.is_selected(), should_select);
            if let Decision::Selected { gain, w: per } = decision {
                prop_assert!(gain > zero());
                prop_assert_eq!(gain.clone(), w.clone() - total.clone());
                // Adding up the per-matroid weights double counts the gain.
                prop_assert_eq!(per[0].clone() + per[1].clone(), w + gain);
            }
        }
    }

    #[test]
    fn greedy_w_i_weight_equals_gain(seed in any::<u64>()) {
        let (inst, order) = instance_and_order(seed, 12);
        let state = run_local_ratio(&inst, &order, &q(1, 1)).unwrap();
        for i in 0..2 {
            prop_assert_eq!(w_i_greedy_weight(&state, &inst.matroids[i], i), state.gain_alive().clone());
        }
        // Best w_i-weight over independent subsets of any prefix is at most
        // the gain of that prefix.
        let ids = state.alive_ids();
        for cut in 0..=ids.len() {
            let prefix = &ids[..cut];
            let g = weight_of(prefix, |e| state.gain(e).clone());
            for i in 0..2 {
                let best = naive_max_independent_weight(&inst.matroids[i], prefix, |e| state.entry(e).unwrap().w[i].clone());
                prop_assert!(best <= g.clone());
            }
        }
    }

    #[test]
    fn gain_is_at_least_half_opt(seed in any::<u64>()) {
        let (inst, order) = instance_and_order(seed, 10);
        let state = run_local_ratio(&inst, &order, &q(1, 1)).unwrap();
        let opt = naive_linear_opt(&inst);
        prop_assert!(state.gain_alive().clone() * q(2, 1) >= opt);
    }

    #[test]
    fn extracted_solution_guarantees(seed in any::<u64>()) {
        let (inst, order) = instance_and_order(seed, 12);
        let state = run_local_ratio(&inst, &order, &q(1, 1)).unwrap();
        let solution: Vec<ElementId> = extract_solution(&state, &inst.matroids).unwrap().into_iter().collect();
        prop_assert!(naive_common_independent(&inst, &solution));
        let recorded = weight_of(&solution, |e| state.selected_weight(e).clone());
        let actual = weight_of(&solution, |e| inst.weight(e).clone());
        prop_assert_eq!(recorded.clone(), actual.clone());
        prop_assert!(actual.clone() >= state.gain_alive().clone());
        prop_assert!(actual * q(2, 1) >= naive_linear_opt(&inst));
    }

    #[test]
    fn kernel_is_verified_and_enumerated(seed in any::<u64>()) {
        let (inst, order) = instance_and_order(seed, 12);
        let state = run_local_ratio(&inst, &order, &q(1, 1)).unwrap();
        let om1 = OrderedMatroid::from_state(&inst.matroids[0], &state, 0);
        let om2 = OrderedMatroid::from_state(&inst.matroids[1], &state, 1);
        let ground = state.alive_ids();
        let found = find_kernel(&om1, &om2, &ground).unwrap();
        let members: Vec<ElementId> = found.kernel.iter().copied().collect();
        prop_assert!(verify_kernel(&om1, &om2, &ground, &members).is_kernel());
        prop_assert!(brute_force_kernel(&om1, &om2, &ground).unwrap().contains(&found.kernel));
    }

    /// Kernels of arbitrary orders, not just those a stack induces.
    #[test]
    fn kernel_of_random_orders(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = (seed % 11) as usize;
        let inst = random_linear_instance(&mut rng, n, 2);
        let ground: Vec<ElementId> = (0..n).collect();
        let ranks: Vec<Vec<ElementId>> = (0..2).map(|_| random_order(&mut rng, n)).collect();
        let oms: Vec<OrderedMatroid<'_, Rational>> = (0..2)
            .map(|i| {
                let keys: HashMap<ElementId, OrderKey<Rational>> = ranks[i]
                    .iter()
                    .enumerate()
                    .map(|(p, &e)| (e, OrderKey::new(q((n - p) as i64, 1), e)))
                    .collect();
                OrderedMatroid::new(&inst.matroids[i], keys)
            })
            .collect();
        let found = find_kernel(&oms[0], &oms[1], &ground).unwrap();
        let all = brute_force_kernel(&oms[0], &oms[1], &ground).unwrap();
        prop_assert!(all.contains(&found.kernel));
        // Domination grows with the dominating set.
        for sub in subsets(&found.kernel.iter().copied().collect::<Vec<_>>()) {
            for om in &oms {
                let small = om.domination_set(&sub, &ground);
                let large: Vec<ElementId> = om.domination_set(&found.kernel.iter().copied().collect::<Vec<_>>(), &ground);
                prop_assert!(small.iter().all(|e| large.contains(e)));
            }
        }
    }

    #[test]
    fn bipartite_stack_matches_vertex_potentials(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let left = 1 + (seed % 4) as usize;
        let right = 1 + (seed / 4 % 4) as usize;
        let edges = (seed / 16 % 13) as usize;
        let graph: BipartiteGraph<Rational> = random_bipartite_graph(&mut rng, left, right, edges);
        let inst = graph.to_instance(&[]).unwrap();
        let order = random_order(&mut rng, edges);
        let state = run_local_ratio(&inst, &order, &q(1, 1)).unwrap();
        let baseline = run_matching_baseline(&graph, &order).unwrap();
        let from_stack: Vec<(usize, Rational)> = state.entries().map(|x| (x.element, x.gain.clone())).collect();
        prop_assert_eq!(from_stack, baseline.stack);
    }

    #[test]
    fn relabelling_elements_preserves_the_run(seed in any::<u64>()) {
        let (inst, order) = instance_and_order(seed, 10);
        let n = inst.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let perm = random_order(&mut rng, n);
        let relabelled = relabel(&inst, &perm);
        let new_order: Vec<ElementId> = order.iter().map(|&e| perm[e]).collect();
        let a = run_local_ratio(&inst, &order, &q(1, 1)).unwrap();
        let b = run_local_ratio(&relabelled, &new_order, &q(1, 1)).unwrap();
        prop_assert_eq!(a.gain_alive(), b.gain_alive());
        let mapped: Vec<ElementId> = a.alive_ids().into_iter().map(|e| perm[e]).collect();
        prop_assert_eq!(mapped, b.alive_ids());
    }
}

/// The same instance with element `e` renamed to `perm[e]`.
fn relabel(inst: &ExactInstance, perm: &[ElementId]) -> ExactInstance {
    let n = inst.len();
    let mut inverse = vec![0; n];
    for (e, &p) in perm.iter().enumerate() {
        inverse[p] = e;
    }
    let elements = (0..n).map(|p| inst.elements[inverse[p]].clone()).collect();
    let matroids = inst
        .matroids
        .iter()
        .map(|m| {
            if let Some((blocks, caps)) = m.as_partition() {
                let blocks = blocks.iter().map(|b| b.iter().map(|&e| perm[e]).collect()).collect();
                Matroid::partition(n, blocks, caps.to_vec()).unwrap()
            } else if let Some(k) = m.as_uniform() {
                Matroid::uniform(n, k)
            } else {
                let (v, edges) = m.as_graphic().unwrap();
                Matroid::graphic(v, (0..n).map(|p| edges[inverse[p]]).collect()).unwrap()
            }
        })
        .collect();
    ExactInstance::linear(elements, matroids).unwrap()
}

#[test]
fn bipartite_equivalence_over_many_orders() {
    let graph = mstream_core::fixtures::figure1_graph();
    let inst = graph.to_instance(&[]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..120 {
        let order = random_order(&mut rng, inst.len());
        let state = run_local_ratio(&inst, &order, &q(1, 1)).unwrap();
        let baseline = run_matching_baseline(&graph, &order).unwrap();
        let from_stack: Vec<(usize, Rational)> = state.entries().map(|x| (x.element, x.gain.clone())).collect();
        assert_eq!(from_stack, baseline.stack);
    }
}

/// On marriage markets encoded as two partition matroids, the kernel from
/// proposer-side proposals is the proposer-optimal stable matching.
#[test]
fn kernel_of_marriage_market_is_gale_shapley() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=5 {
        for _ in 0..40 {
            let prefs = random_preferences(&mut rng, n);
            let edge = |p: usize, r: usize| p * n + r;
            let elements: Vec<ElementId> = (0..n * n).collect();
            let by_proposer = Matroid::partition(
                n * n,
                (0..n).map(|p| (0..n).map(|r| edge(p, r)).collect()).collect(),
                vec![1; n],
            )
            .unwrap();
            let by_receiver = Matroid::partition(
                n * n,
                (0..n).map(|r| (0..n).map(|p| edge(p, r)).collect()).collect(),
                vec![1; n],
            )
            .unwrap();
            let mut k1 = HashMap::new();
            let mut k2 = HashMap::new();
            for p in 0..n {
                for (pos, &r) in prefs.proposers[p].iter().enumerate() {
                    k1.insert(edge(p, r), OrderKey::new(q((n - pos) as i64, 1), edge(p, r)));
                }
            }
            for r in 0..n {
                for (pos, &p) in prefs.receivers[r].iter().enumerate() {
                    k2.insert(edge(p, r), OrderKey::new(q((n - pos) as i64, 1), edge(p, r)));
                }
            }
            let om1 = OrderedMatroid::new(&by_proposer, k1);
            let om2 = OrderedMatroid::new(&by_receiver, k2);
            let found = find_kernel(&om1, &om2, &elements).unwrap();
            let matching = gale_shapley(&prefs.proposers, &prefs.receivers);
            let expected: mstream_core::ElementSet = (0..n).map(|p| edge(p, matching[p])).collect();
            assert_eq!(found.kernel, expected);
        }
    }
}
