//! Matroid representations, independence/rank/span oracles and the weighted
//! greedy primitive.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense index of an element in its instance.
pub type ElementId = usize;

/// A set of element ids.
pub type ElementSet = BTreeSet<ElementId>;

/// Partition matroid. Elements outside every block are unconstrained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionMatroid {
    ground: usize,
    blocks: Vec<Vec<ElementId>>,
    capacities: Vec<usize>,
    block_of: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformMatroid {
    ground: usize,
    k: usize,
}

/// Cycle matroid of a multigraph; element `e` is the edge `edges[e]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphicMatroid {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

/// A matroid over the ground set `0..ground_size()`.
///
/// Descriptors are immutable once built; all queries are pure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Matroid {
    Partition(PartitionMatroid),
    Uniform(UniformMatroid),
    Graphic(GraphicMatroid),
}

impl Matroid {
    pub fn partition(ground: usize, blocks: Vec<Vec<ElementId>>, capacities: Vec<usize>) -> Result<Self> {
        if blocks.len() != capacities.len() {
            return Err(Error::Instance(format!(
                "partition matroid has {} blocks but {} capacities",
                blocks.len(),
                capacities.len()
            )));
        }
        let mut block_of = vec![None; ground];
        for (b, block) in blocks.iter().enumerate() {
            for &e in block {
                let slot = block_of.get_mut(e).ok_or(Error::UnknownElement(e))?;
                if slot.is_some() {
                    return Err(Error::Instance(format!("element {e} appears in two partition blocks")));
                }
                *slot = Some(b);
            }
        }
        Ok(Matroid::Partition(PartitionMatroid {
            ground,
            blocks,
            capacities,
            block_of,
        }))
    }

    pub fn uniform(ground: usize, k: usize) -> Self {
        Matroid::Uniform(UniformMatroid { ground, k })
    }

    /// `edges[e]` are the endpoints of element `e`; every element must have an edge.
    pub fn graphic(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertices == 0 {
            return Err(Error::Instance("graphic matroid needs at least one vertex".into()));
        }
        if let Some((e, &(u, v))) = edges
            .iter()
            .enumerate()
            .find(|(_, &(u, v))| u >= vertices || v >= vertices)
        {
            return Err(Error::Instance(format!(
                "edge of element {e} ({u},{v}) has an endpoint outside 0..{vertices}"
            )));
        }
        Ok(Matroid::Graphic(GraphicMatroid { vertices, edges }))
    }

    pub fn ground_size(&self) -> usize {
        match self {
            Matroid::Partition(p) => p.ground,
            Matroid::Uniform(u) => u.ground,
            Matroid::Graphic(g) => g.edges.len(),
        }
    }

    /// Partition blocks and capacities, if this is a partition matroid.
    pub fn as_partition(&self) -> Option<(&[Vec<ElementId>], &[usize])> {
        match self {
            Matroid::Partition(p) => Some((&p.blocks, &p.capacities)),
            _ => None,
        }
    }

    pub fn as_uniform(&self) -> Option<usize> {
        match self {
            Matroid::Uniform(u) => Some(u.k),
            _ => None,
        }
    }

    pub fn as_graphic(&self) -> Option<(usize, &[(usize, usize)])> {
        match self {
            Matroid::Graphic(g) => Some((g.vertices, &g.edges)),
            _ => None,
        }
    }

    fn check_ids(&self, set: &[ElementId]) -> Result<()> {
        let n = self.ground_size();
        match set.iter().find(|&&e| e >= n) {
            Some(&e) => Err(Error::UnknownElement(e)),
            None => Ok(()),
        }
    }

    /// Starts an incremental independence check from the empty set.
    pub fn builder(&self) -> IndependentBuilder<'_> {
        let inner = match self {
            Matroid::Partition(p) => BuilderState::Partition(vec![0; p.capacities.len()]),
            Matroid::Uniform(_) => BuilderState::Uniform(0),
            Matroid::Graphic(g) => BuilderState::Graphic(UnionFind::new(g.vertices)),
        };
        IndependentBuilder { matroid: self, inner }
    }

    /// Independence without id validation. `set` must not repeat ids.
    pub fn independent(&self, set: &[ElementId]) -> bool {
        let mut b = self.builder();
        set.iter().all(|&e| b.try_insert(e))
    }

    /// Rank without id validation. `set` must not repeat ids.
    pub fn rank_of(&self, set: &[ElementId]) -> usize {
        match self {
            Matroid::Uniform(u) => set.len().min(u.k),
            Matroid::Partition(p) => {
                let mut counts = vec![0usize; p.capacities.len()];
                let mut free = 0;
                for &e in set {
                    match p.block_of[e] {
                        Some(b) => counts[b] += 1,
                        None => free += 1,
                    }
                }
                free + counts
                    .iter()
                    .zip(&p.capacities)
                    .map(|(&c, &cap)| c.min(cap))
                    .sum::<usize>()
            }
            Matroid::Graphic(_) => {
                let mut b = self.builder();
                set.iter().filter(|&&e| b.try_insert(e)).count()
            }
        }
    }

    /// Rank of the whole ground set.
    pub fn full_rank(&self) -> usize {
        let all: Vec<ElementId> = (0..self.ground_size()).collect();
        self.rank_of(&all)
    }

    /// Is `e` spanned by `set`? No id validation.
    pub fn spans(&self, set: &[ElementId], e: ElementId) -> bool {
        if set.contains(&e) {
            return true;
        }
        let mut b = self.builder();
        for &f in set {
            b.try_insert(f);
        }
        !b.can_insert(e)
    }

    pub fn is_independent(&self, set: &ElementSet) -> Result<bool> {
        let v: Vec<ElementId> = set.iter().copied().collect();
        self.check_ids(&v)?;
        Ok(self.independent(&v))
    }

    pub fn rank(&self, set: &ElementSet) -> Result<usize> {
        let v: Vec<ElementId> = set.iter().copied().collect();
        self.check_ids(&v)?;
        Ok(self.rank_of(&v))
    }

    /// True iff `rank(set + e) == rank(set)`.
    pub fn in_span(&self, set: &ElementSet, e: ElementId) -> Result<bool> {
        let v: Vec<ElementId> = set.iter().copied().collect();
        self.check_ids(&v)?;
        self.check_ids(&[e])?;
        Ok(self.spans(&v, e))
    }
}

enum BuilderState {
    Partition(Vec<usize>),
    Uniform(usize),
    Graphic(UnionFind<usize>),
}

/// Grows an independent set one element at a time.
pub struct IndependentBuilder<'a> {
    matroid: &'a Matroid,
    inner: BuilderState,
}

impl IndependentBuilder<'_> {
    /// Would adding `e` keep the set independent?
    pub fn can_insert(&self, e: ElementId) -> bool {
        match (&self.inner, self.matroid) {
            (BuilderState::Uniform(n), Matroid::Uniform(u)) => *n < u.k,
            (BuilderState::Partition(counts), Matroid::Partition(p)) => match p.block_of[e] {
                Some(b) => counts[b] < p.capacities[b],
                None => true,
            },
            (BuilderState::Graphic(uf), Matroid::Graphic(g)) => {
                let (u, v) = g.edges[e];
                uf.find(u) != uf.find(v)
            }
            _ => unreachable!("builder state matches its matroid"),
        }
    }

    /// Adds `e` if the result stays independent; returns whether it was added.
    pub fn try_insert(&mut self, e: ElementId) -> bool {
        match (&mut self.inner, self.matroid) {
            (BuilderState::Uniform(n), Matroid::Uniform(u)) => {
                if *n < u.k {
                    *n += 1;
                    true
                } else {
                    false
                }
            }
            (BuilderState::Partition(counts), Matroid::Partition(p)) => match p.block_of[e] {
                Some(b) if counts[b] >= p.capacities[b] => false,
                Some(b) => {
                    counts[b] += 1;
                    true
                }
                None => true,
            },
            (BuilderState::Graphic(uf), Matroid::Graphic(g)) => {
                let (u, v) = g.edges[e];
                uf.union(u, v)
            }
            _ => unreachable!("builder state matches its matroid"),
        }
    }
}

/// Sort key inducing the canonical total order: heavier first, and among equal
/// weights the later arrival first.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderKey<S> {
    pub weight: S,
    pub arrival: usize,
}

impl<S: Scalar> OrderKey<S> {
    pub fn new(weight: S, arrival: usize) -> Self {
        OrderKey { weight, arrival }
    }

    /// `Less` means `self` comes first (is "better").
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        other
            .weight
            .total_cmp(&self.weight)
            .then_with(|| other.arrival.cmp(&self.arrival))
    }

    pub fn precedes(&self, other: &Self) -> bool {
        self.canonical_cmp(other) == Ordering::Less
    }
}

/// Sorts `items` into canonical order.
pub fn canonical_sort<S: Scalar>(items: &mut [ElementId], key: &impl Fn(ElementId) -> OrderKey<S>) {
    items.sort_by(|&a, &b| key(a).canonical_cmp(&key(b)));
}

/// Greedy maximum-weight independent subset of `ground`, scanning in canonical
/// order. The result is listed in scan order.
pub fn greedy_max_independent<S: Scalar>(
    m: &Matroid,
    ground: &[ElementId],
    key: &impl Fn(ElementId) -> OrderKey<S>,
) -> Vec<ElementId> {
    let mut order = ground.to_vec();
    canonical_sort(&mut order, key);
    let mut b = m.builder();
    order.into_iter().filter(|&e| b.try_insert(e)).collect()
}

/// What inserting an element into an independent set requires.
#[derive(Debug, Clone, PartialEq)]
pub enum Swap<S> {
    /// The set stays independent.
    Free,
    /// The cheapest element to evict, with its weight.
    Replace(ElementId, S),
    /// The element is a loop and fits in no independent set.
    Loop,
}

/// Finds the element of independent `t` that inserting `e` would evict: the
/// minimum-weight member of the unique circuit of `t + e` other than `e`,
/// breaking weight ties by taking the one last in canonical order.
pub fn swap_witness<S: Scalar>(
    m: &Matroid,
    t: &[ElementId],
    e: ElementId,
    key: &impl Fn(ElementId) -> OrderKey<S>,
) -> Swap<S> {
    let mut b = m.builder();
    for &f in t {
        b.try_insert(f);
    }
    if b.can_insert(e) {
        return Swap::Free;
    }
    let mut best: Option<(ElementId, OrderKey<S>)> = None;
    let mut swapped = Vec::with_capacity(t.len());
    for &f in t {
        swapped.clear();
        swapped.extend(t.iter().copied().filter(|&x| x != f));
        swapped.push(e);
        if !m.independent(&swapped) {
            continue;
        }
        let k = key(f);
        if best.as_ref().is_none_or(|(_, bk)| bk.precedes(&k)) {
            best = Some((f, k));
        }
    }
    match best {
        Some((f, k)) => Swap::Replace(f, k.weight),
        None => Swap::Loop,
    }
}

/// Cheapest element weight to remove from independent `t` so that `e` fits,
/// or zero when `e` fits already. Loops have no finite threshold and are
/// rejected.
pub fn swap_threshold<S: Scalar>(
    m: &Matroid,
    t: &[ElementId],
    e: ElementId,
    weight: &impl Fn(ElementId) -> S,
) -> Result<S> {
    if t.contains(&e) {
        return Err(Error::Caller(format!("element {e} is already in the independent set")));
    }
    m.check_ids(t)?;
    m.check_ids(&[e])?;
    if !m.independent(t) {
        return Err(Error::Caller("swap threshold needs an independent set".into()));
    }
    let key = |f: ElementId| OrderKey::new(weight(f), 0);
    match swap_witness(m, t, e, &key) {
        Swap::Free => Ok(S::zero()),
        Swap::Replace(_, w) => Ok(w),
        Swap::Loop => Err(Error::Caller(format!("element {e} is a loop"))),
    }
}

/// Largest `theta` such that the elements of `pool` weighing at least `theta`
/// span `e`, or zero if there is none. This is the definition the swap
/// threshold is checked against.
pub fn span_threshold<S: Scalar>(m: &Matroid, pool: &[(ElementId, S)], e: ElementId) -> S {
    let mut levels: Vec<&S> = pool.iter().map(|(_, w)| w).filter(|w| **w > S::zero()).collect();
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup_by(|a, b| a == b);
    for theta in levels {
        let above: Vec<ElementId> = pool.iter().filter(|(_, w)| w >= theta).map(|(f, _)| *f).collect();
        if m.spans(&above, e) {
            return theta.clone();
        }
    }
    S::zero()
}

/// Weight of a set under `weight`.
pub fn set_weight<S: Scalar>(set: impl IntoIterator<Item = ElementId>, weight: impl Fn(ElementId) -> S) -> S {
    set.into_iter().fold(S::zero(), |acc, e| acc + weight(e))
}
