//! Bundled instances and small constructors used by tests and the CLI.

use num_bigint::BigInt;
use num_traits::One;

use crate::instance::{Element, Instance};
use crate::io::parse_instance;
use crate::local_ratio::BipartiteGraph;
use crate::matroid::Matroid;
use crate::Rational;

pub const FIGURE1_JSON: &str = include_str!("../fixtures/figure1.json");
pub const COUNTEREXAMPLE_JSON: &str = include_str!("../fixtures/counterexample.json");
pub const THREE_MATROID_JSON: &str = include_str!("../fixtures/three_matroid.json");
pub const COVERAGE_SMALL_JSON: &str = include_str!("../fixtures/coverage_small.json");
pub const CUT_SMALL_JSON: &str = include_str!("../fixtures/cut_small.json");

/// Bundled fixtures by name.
pub const BUNDLED: [(&str, &str); 5] = [
    ("figure1", FIGURE1_JSON),
    ("counterexample", COUNTEREXAMPLE_JSON),
    ("three_matroid", THREE_MATROID_JSON),
    ("coverage_small", COVERAGE_SMALL_JSON),
    ("cut_small", CUT_SMALL_JSON),
];

fn bundled(text: &str) -> Instance<Rational> {
    parse_instance(text.as_bytes()).expect("bundled fixtures are valid")
}

/// Four edges on `L1, L2 | R1, R2`: `e1 = L1R1` (1), `e2 = L2R1` (2),
/// `e3 = L2R2` (2), `e4 = L1R2` (2).
pub fn figure1() -> Instance<Rational> {
    bundled(FIGURE1_JSON)
}

/// The same graph with vertices `L1 = 0, L2 = 1, R1 = 2, R2 = 3`.
pub fn figure1_graph() -> BipartiteGraph<Rational> {
    let w = |n: i64| Rational::from_integer(BigInt::from(n));
    BipartiteGraph::new(4, vec![(0, 2, w(1)), (1, 2, w(2)), (1, 3, w(2)), (0, 3, w(2))]).expect("bipartite")
}

/// `a, b, c, d` with weights `1, 1 + eps, 2 eps, 3 eps`; the first matroid
/// allows one of `{a, b}`, the second any two elements.
pub fn counterexample(eps: &Rational) -> Instance<Rational> {
    let weights = [
        Rational::one(),
        Rational::one() + eps.clone(),
        eps.clone() * Rational::from_integer(2.into()),
        eps.clone() * Rational::from_integer(3.into()),
    ];
    let elements = ["a", "b", "c", "d"]
        .iter()
        .zip(weights)
        .map(|(id, weight)| Element {
            id: id.to_string(),
            weight,
        })
        .collect();
    let m1 = Matroid::partition(4, vec![vec![0, 1], vec![2], vec![3]], vec![1, 1, 1]).expect("valid");
    Instance::linear(elements, vec![m1, Matroid::uniform(4, 2)]).expect("valid")
}

/// The bundled counterexample file (`eps = 1/100`).
pub fn counterexample_file() -> Instance<Rational> {
    bundled(COUNTEREXAMPLE_JSON)
}

/// Five elements `a, x, y, z, b` over three graphic matroids.
pub fn three_matroid() -> Instance<Rational> {
    bundled(THREE_MATROID_JSON)
}

pub fn small_coverage() -> Instance<Rational> {
    bundled(COVERAGE_SMALL_JSON)
}

pub fn small_cut() -> Instance<Rational> {
    bundled(CUT_SMALL_JSON)
}

/// Weights `factor^i`; every element shares one capacity-1 block in the first
/// matroid and the second matroid is `U(1)`.
pub fn geometric_stream(n: usize, factor: u64) -> Instance<Rational> {
    let mut weight = Rational::one();
    let step = Rational::from_integer(BigInt::from(factor));
    let mut elements = Vec::with_capacity(n);
    for i in 0..n {
        elements.push(Element {
            id: format!("g{i}"),
            weight: weight.clone(),
        });
        weight *= step.clone();
    }
    let m1 = Matroid::partition(n, vec![(0..n).collect()], vec![1]).expect("valid");
    Instance::linear(elements, vec![m1, Matroid::uniform(n, 1)]).expect("valid")
}

/// Consecutive runs of `block_len` elements with weights `factor^j`, `j`
/// restarting at each run. Both matroids are the partition into runs with
/// capacity 1, so the rank is the number of runs while the numbers stay
/// small enough for exact arithmetic on long streams.
pub fn geometric_blocks(n: usize, factor: u64, block_len: usize) -> Instance<Rational> {
    assert!(block_len > 0, "blocks need at least one element");
    let step = Rational::from_integer(BigInt::from(factor));
    let mut weight = Rational::one();
    let mut elements = Vec::with_capacity(n);
    for i in 0..n {
        if i % block_len == 0 {
            weight = Rational::one();
        }
        elements.push(Element {
            id: format!("g{i}"),
            weight: weight.clone(),
        });
        weight *= step.clone();
    }
    let blocks: Vec<Vec<usize>> = (0..n)
        .step_by(block_len)
        .map(|s| (s..n.min(s + block_len)).collect())
        .collect();
    let caps = vec![1; blocks.len()];
    let m = Matroid::partition(n, blocks, caps).expect("valid");
    Instance::linear(elements, vec![m.clone(), m]).expect("valid")
}

/// Three unit-weight elements under a single `U(2)`.
pub fn single_matroid() -> Instance<Rational> {
    let elements = (0..3)
        .map(|i| Element {
            id: format!("s{i}"),
            weight: Rational::one(),
        })
        .collect();
    Instance::linear(elements, vec![Matroid::uniform(3, 2)]).expect("valid")
}

/// No elements, two trivial matroids.
pub fn empty() -> Instance<Rational> {
    Instance::linear(Vec::new(), vec![Matroid::uniform(0, 0), Matroid::uniform(0, 0)]).expect("valid")
}
