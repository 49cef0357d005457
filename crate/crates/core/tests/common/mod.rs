//! Independent reference implementations used as test oracles. Nothing here
//! calls into the library's own independence, rank, greedy or search code.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use mstream_core::{ElementId, Instance, Matroid, Rational};
use num_bigint::BigInt;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    q(0, 1)
}

/// Every subset of `items`, as vectors in `items` order.
pub fn subsets(items: &[ElementId]) -> Vec<Vec<ElementId>> {
    assert!(items.len() <= 20);
    (0u32..(1 << items.len()))
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(p, _)| mask >> p & 1 == 1)
                .map(|(_, &e)| e)
                .collect()
        })
        .collect()
}

/// Independence straight from the definition of each matroid family.
pub fn naive_independent(m: &Matroid, set: &[ElementId]) -> bool {
    let distinct: BTreeSet<_> = set.iter().collect();
    if distinct.len() != set.len() {
        return false;
    }
    if let Some((blocks, caps)) = m.as_partition() {
        blocks
            .iter()
            .zip(caps)
            .all(|(block, &cap)| set.iter().filter(|e| block.contains(e)).count() <= cap)
    } else if let Some(k) = m.as_uniform() {
        set.len() <= k
    } else {
        let (vertices, edges) = m.as_graphic().unwrap();
        let mut adj = vec![Vec::new(); vertices];
        let mut touched = BTreeSet::new();
        for &e in set {
            let (u, v) = edges[e];
            if u == v {
                return false;
            }
            adj[u].push(v);
            adj[v].push(u);
            touched.insert(u);
            touched.insert(v);
        }
        let mut seen = vec![false; vertices];
        let mut components = 0;
        for &s in &touched {
            if seen[s] {
                continue;
            }
            components += 1;
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        set.len() == touched.len() - components
    }
}

pub fn naive_common_independent(inst: &Instance<Rational>, set: &[ElementId]) -> bool {
    inst.matroids.iter().all(|m| naive_independent(m, set))
}

pub fn naive_rank(m: &Matroid, set: &[ElementId]) -> usize {
    subsets(set)
        .into_iter()
        .filter(|s| naive_independent(m, s))
        .map(|s| s.len())
        .max()
        .unwrap_or(0)
}

pub fn naive_spans(m: &Matroid, set: &[ElementId], e: ElementId) -> bool {
    if set.contains(&e) {
        return true;
    }
    let mut with = set.to_vec();
    with.push(e);
    naive_rank(m, &with) == naive_rank(m, set)
}

pub fn weight_of(set: &[ElementId], w: impl Fn(ElementId) -> Rational) -> Rational {
    set.iter().fold(zero(), |acc, &e| acc + w(e))
}

/// Maximum of `value` over all sets independent in every matroid.
pub fn naive_opt(
    inst: &Instance<Rational>,
    ground: &[ElementId],
    value: impl Fn(&[ElementId]) -> Rational,
) -> Rational {
    subsets(ground)
        .into_iter()
        .filter(|s| naive_common_independent(inst, s))
        .map(|s| value(&s))
        .max()
        .unwrap_or_else(zero)
}

pub fn naive_linear_opt(inst: &Instance<Rational>) -> Rational {
    let ground: Vec<_> = (0..inst.len()).collect();
    naive_opt(inst, &ground, |s| weight_of(s, |e| inst.weight(e).clone()))
}

/// Maximum weight of an independent subset of `ground` in one matroid.
pub fn naive_max_independent_weight(m: &Matroid, ground: &[ElementId], w: impl Fn(ElementId) -> Rational) -> Rational {
    subsets(ground)
        .into_iter()
        .filter(|s| naive_independent(m, s))
        .map(|s| weight_of(&s, &w))
        .max()
        .unwrap_or_else(zero)
}

/// `max({0} ∪ {θ : e ∈ span{f ∈ pool : w(f) >= θ}})`, `None` for loops.
pub fn naive_span_threshold(m: &Matroid, pool: &[(ElementId, Rational)], e: ElementId) -> Option<Rational> {
    if !naive_independent(m, &[e]) {
        return None;
    }
    let mut best = zero();
    for (_, theta) in pool {
        let heavy: Vec<ElementId> = pool.iter().filter(|(_, w)| w >= theta).map(|(f, _)| *f).collect();
        if naive_spans(m, &heavy, e) && *theta > best {
            best = theta.clone();
        }
    }
    Some(best)
}

/// Proposer-optimal stable matching by textbook Gale–Shapley; `result[p]`
/// is the receiver matched to proposer `p`.
pub fn gale_shapley(proposers: &[Vec<usize>], receivers: &[Vec<usize>]) -> Vec<usize> {
    let n = proposers.len();
    let mut rank = vec![vec![0; n]; n];
    for (r, list) in receivers.iter().enumerate() {
        for (pos, &p) in list.iter().enumerate() {
            rank[r][p] = pos;
        }
    }
    let mut next = vec![0; n];
    let mut holds: Vec<Option<usize>> = vec![None; n];
    let mut free: VecDeque<usize> = (0..n).collect();
    while let Some(p) = free.pop_front() {
        let r = proposers[p][next[p]];
        next[p] += 1;
        match holds[r] {
            None => holds[r] = Some(p),
            Some(cur) if rank[r][p] < rank[r][cur] => {
                holds[r] = Some(p);
                free.push_back(cur);
            }
            Some(_) => free.push_back(p),
        }
    }
    let mut result = vec![usize::MAX; n];
    for (r, p) in holds.iter().enumerate() {
        result[p.expect("complete lists match everyone")] = r;
    }
    result
}
