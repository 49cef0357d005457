//! Seeded random instances for property tests, acceptance runs and benches.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::instance::{Element, Instance};
use crate::local_ratio::BipartiteGraph;
use crate::matroid::{ElementId, Matroid};
use crate::submodular::Objective;
use crate::Rational;

/// `num / den` with `num` in `0..=max_num` and `den` in `1..=max_den`.
pub fn random_weight<R: Rng + ?Sized>(rng: &mut R, max_num: i64, max_den: i64) -> Rational {
    Rational::new(
        BigInt::from(rng.random_range(0..=max_num)),
        BigInt::from(rng.random_range(1..=max_den)),
    )
}

fn positive_weight<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    Rational::new(
        BigInt::from(rng.random_range(1..=12)),
        BigInt::from(rng.random_range(1..=4)),
    )
}

/// A partition, uniform or graphic matroid on `n` elements. Loops (capacity
/// zero, `k = 0`, self-loop edges) appear occasionally.
pub fn random_matroid<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matroid {
    match rng.random_range(0..3) {
        0 => {
            let block_count = rng.random_range(1..=(n / 2).max(1));
            let mut blocks = vec![Vec::new(); block_count];
            for e in 0..n {
                if !rng.random_bool(0.2) {
                    blocks[rng.random_range(0..block_count)].push(e);
                }
            }
            let capacities = (0..block_count)
                .map(|_| {
                    if rng.random_bool(0.08) {
                        0
                    } else {
                        rng.random_range(1..=2)
                    }
                })
                .collect();
            Matroid::partition(n, blocks, capacities).expect("blocks are disjoint")
        }
        1 => {
            let k = if rng.random_bool(0.05) {
                0
            } else {
                rng.random_range(1..=(2 * n / 3).max(1))
            };
            Matroid::uniform(n, k)
        }
        _ => {
            let vertices = rng.random_range(2..=(n / 2 + 2));
            let edges = (0..n)
                .map(|_| {
                    let u = rng.random_range(0..vertices);
                    if rng.random_bool(0.04) {
                        (u, u)
                    } else {
                        let v = (u + rng.random_range(1..vertices)) % vertices;
                        (u, v)
                    }
                })
                .collect();
            Matroid::graphic(vertices, edges).expect("endpoints in range")
        }
    }
}

fn elements<R: Rng + ?Sized>(rng: &mut R, n: usize, weighted: bool) -> Vec<Element<Rational>> {
    (0..n)
        .map(|i| Element {
            id: format!("e{i}"),
            weight: if weighted {
                random_weight(rng, 12, 4)
            } else {
                Rational::from_integer(0.into())
            },
        })
        .collect()
}

/// `k` random matroids with a linear objective of small rational weights
/// (ties and zeros included).
pub fn random_linear_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Instance<Rational> {
    let matroids = (0..k).map(|_| random_matroid(rng, n)).collect();
    Instance::linear(elements(rng, n, true), matroids).expect("generated instances are valid")
}

/// A uniformly random permutation of `0..n`.
pub fn random_order<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<ElementId> {
    let mut order: Vec<ElementId> = (0..n).collect();
    order.shuffle(rng);
    order
}

/// Two random matroids with a weighted-coverage objective over `items` items.
pub fn random_coverage_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, items: usize) -> Instance<Rational> {
    let sets = (0..n)
        .map(|_| {
            let mut s: Vec<usize> = (0..rng.random_range(1..=3))
                .map(|_| rng.random_range(0..items))
                .collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    let objective = Objective::Coverage {
        sets,
        item_names: (0..items).map(|i| format!("i{i:02}")).collect(),
        item_weights: (0..items).map(|_| positive_weight(rng)).collect(),
    };
    let matroids = (0..2).map(|_| random_matroid(rng, n)).collect();
    Instance::linear(elements(rng, n, false), matroids)
        .and_then(|inst| inst.with_objective(objective))
        .expect("generated instances are valid")
}

/// Two random matroids with a cut objective on `vertices` vertices; each
/// element switches one or two vertices, no vertex belonging to two
/// elements. Needs `vertices >= n`.
pub fn random_cut_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, vertices: usize) -> Instance<Rational> {
    assert!(vertices >= n.max(2), "need at least one vertex per element");
    let pool = random_order(rng, vertices);
    let mut toggles: Vec<Vec<usize>> = pool[..n].iter().map(|&v| vec![v]).collect();
    for &v in &pool[n..] {
        if n > 0 && rng.random_bool(0.5) {
            toggles[rng.random_range(0..n)].push(v);
        }
    }
    for vs in toggles.iter_mut() {
        vs.sort_unstable();
    }
    let edge_count = vertices + vertices / 2;
    let edges = (0..edge_count)
        .map(|_| {
            let u = rng.random_range(0..vertices);
            let v = (u + rng.random_range(1..vertices)) % vertices;
            (u, v, positive_weight(rng))
        })
        .collect();
    let objective = Objective::Cut {
        vertices,
        toggles,
        edges,
    };
    let matroids = (0..2).map(|_| random_matroid(rng, n)).collect();
    Instance::linear(elements(rng, n, false), matroids)
        .and_then(|inst| inst.with_objective(objective))
        .expect("generated instances are valid")
}

/// A bipartite multigraph with `left + right` vertices (left side first) and
/// `edges` random edges.
pub fn random_bipartite_graph<R: Rng + ?Sized>(
    rng: &mut R,
    left: usize,
    right: usize,
    edges: usize,
) -> BipartiteGraph<Rational> {
    let list = (0..edges)
        .map(|_| {
            (
                rng.random_range(0..left),
                left + rng.random_range(0..right),
                random_weight(rng, 12, 3),
            )
        })
        .collect();
    BipartiteGraph::new(left + right, list).expect("two-sided edges")
}

/// Complete preference lists for a one-to-one market of size `n`: entry `p`
/// of `proposers[i]` is the `p`-th choice of proposer `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preferences {
    pub proposers: Vec<Vec<usize>>,
    pub receivers: Vec<Vec<usize>>,
}

pub fn random_preferences<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Preferences {
    let mut lists = |_| random_order(rng, n);
    Preferences {
        proposers: (0..n).map(&mut lists).collect(),
        receivers: (0..n).map(&mut lists).collect(),
    }
}
