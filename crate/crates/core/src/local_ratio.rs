//! The local-ratio selection stack for matroid intersection, plus the two
//! baselines it is cross-checked against: vertex-potential local ratio on
//! bipartite graphs and reverse-order greedy extraction.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::instance::{Element, Instance};
use crate::matroid::{greedy_max_independent, span_threshold, swap_witness, ElementId, Matroid, OrderKey, Swap};
use crate::scalar::Scalar;

/// Largest alive stack for which debug builds re-derive thresholds and
/// maximum-weight sets from scratch.
const DEBUG_CHECK_LIMIT: usize = 48;

/// One selected element.
#[derive(Debug, Clone, PartialEq)]
pub struct StackEntry<S> {
    pub element: ElementId,
    /// Position of the element in the stream.
    pub arrival: usize,
    /// Weight the element was selected with (its marginal value in submodular runs).
    pub weight: S,
    pub gain: S,
    /// Per-matroid weights `w_i = w*_i + g`.
    pub w: Vec<S>,
    pub alive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunStats<S> {
    pub peak_stack: usize,
    pub total_gain_alive: S,
    pub total_gain_all: S,
    pub deleted_count: usize,
    pub selected_count: usize,
}

impl<S: Scalar> Default for RunStats<S> {
    fn default() -> Self {
        RunStats {
            peak_stack: 0,
            total_gain_alive: S::zero(),
            total_gain_all: S::zero(),
            deleted_count: 0,
            selected_count: 0,
        }
    }
}

/// Outcome of offering one element to the stack.
#[derive(Debug, Clone, PartialEq)]
pub enum Decision<S> {
    Selected { gain: S, w: Vec<S> },
    Rejected,
}

impl<S> Decision<S> {
    pub fn is_selected(&self) -> bool {
        matches!(self, Decision::Selected { .. })
    }
}

/// The stack `S` together with the maintained maximum-weight independent
/// sets `T_i` of its alive entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionState<S> {
    k: usize,
    entries: Vec<StackEntry<S>>,
    position: HashMap<ElementId, usize>,
    t: Vec<Vec<ElementId>>,
    alive: usize,
    pub stats: RunStats<S>,
}

impl<S: Scalar> SelectionState<S> {
    pub fn new(k: usize) -> Self {
        SelectionState {
            k,
            entries: Vec::new(),
            position: HashMap::new(),
            t: vec![Vec::new(); k],
            alive: 0,
            stats: RunStats::default(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Stored entries in push order, including dead ones not yet compacted.
    pub fn stored(&self) -> &[StackEntry<S>] {
        &self.entries
    }

    /// Alive entries in push order.
    pub fn entries(&self) -> impl DoubleEndedIterator<Item = &StackEntry<S>> + '_ {
        self.entries.iter().filter(|e| e.alive)
    }

    pub fn alive_ids(&self) -> Vec<ElementId> {
        self.entries().map(|e| e.element).collect()
    }

    pub fn alive_len(&self) -> usize {
        self.alive
    }

    pub fn is_empty(&self) -> bool {
        self.alive == 0
    }

    pub fn entry(&self, e: ElementId) -> Option<&StackEntry<S>> {
        self.position.get(&e).map(|&p| &self.entries[p]).filter(|x| x.alive)
    }

    pub fn contains(&self, e: ElementId) -> bool {
        self.entry(e).is_some()
    }

    /// Maintained maximum `w_i`-weight independent subset of the alive entries.
    pub fn t(&self, i: usize) -> &[ElementId] {
        &self.t[i]
    }

    pub fn in_any_t(&self, e: ElementId) -> bool {
        self.t.iter().any(|t| t.contains(&e))
    }

    pub fn gain_alive(&self) -> &S {
        &self.stats.total_gain_alive
    }

    pub fn gain_all(&self) -> &S {
        &self.stats.total_gain_all
    }

    /// Order key of a stored element under `<_i`. Panics if `e` is not stored.
    pub fn key(&self, i: usize, e: ElementId) -> OrderKey<S> {
        let entry = &self.entries[self.position[&e]];
        OrderKey::new(entry.w[i].clone(), entry.arrival)
    }

    pub fn gain(&self, e: ElementId) -> &S {
        &self.entries[self.position[&e]].gain
    }

    pub fn selected_weight(&self, e: ElementId) -> &S {
        &self.entries[self.position[&e]].weight
    }

    /// `w*_i(e)` together with the element of `T_i` that `e` would replace;
    /// `None` when `e` is a loop of matroid `i`.
    fn threshold_with_witness(&self, m: &Matroid, i: usize, e: ElementId) -> Option<(S, Option<ElementId>)> {
        let key = |f: ElementId| self.key(i, f);
        let (value, witness) = match swap_witness(m, &self.t[i], e, &key) {
            Swap::Free => (S::zero(), None),
            Swap::Replace(f, w) => (w, Some(f)),
            Swap::Loop => return None,
        };
        if cfg!(debug_assertions) && self.alive <= DEBUG_CHECK_LIMIT {
            let pool: Vec<(ElementId, S)> = self.entries().map(|x| (x.element, x.w[i].clone())).collect();
            debug_assert!(
                span_threshold(m, &pool, e) == value,
                "swap threshold disagrees with the span definition"
            );
        }
        Some((value, witness))
    }

    /// `w*_i(e)`: the largest `theta` for which alive entries of `w_i`-weight at
    /// least `theta` span `e` in matroid `i`, or zero. `None` if `e` is a loop,
    /// whose threshold is unbounded.
    pub fn threshold(&self, matroids: &[Matroid], i: usize, e: ElementId) -> Option<S> {
        self.threshold_with_witness(&matroids[i], i, e).map(|(w, _)| w)
    }

    /// Offers `e` (arriving at stream position `arrival`, with weight `weight`)
    /// to the stack. It is selected iff `weight > alpha * sum_i w*_i(e)`.
    pub fn process_element(
        &mut self,
        matroids: &[Matroid],
        e: ElementId,
        arrival: usize,
        weight: S,
        alpha: &S,
    ) -> Decision<S> {
        match self.evaluate(matroids, e, &weight, alpha) {
            Some(found) => self.push(matroids, e, arrival, weight, found),
            None => Decision::Rejected,
        }
    }

    /// Computes the thresholds of `e` and returns them with their swap
    /// witnesses iff `e` passes the selection test. The state is not touched.
    pub(crate) fn evaluate(
        &self,
        matroids: &[Matroid],
        e: ElementId,
        weight: &S,
        alpha: &S,
    ) -> Option<Vec<(S, Option<ElementId>)>> {
        debug_assert_eq!(matroids.len(), self.k);
        debug_assert!(!self.position.contains_key(&e), "element {e} offered twice");
        let found: Vec<(S, Option<ElementId>)> = matroids
            .iter()
            .enumerate()
            .map(|(i, m)| self.threshold_with_witness(m, i, e))
            .collect::<Option<_>>()?;
        let total = found.iter().fold(S::zero(), |acc, (w, _)| acc + w.clone());
        if *weight <= alpha.clone() * total {
            return None;
        }
        Some(found)
    }

    pub(crate) fn push(
        &mut self,
        matroids: &[Matroid],
        e: ElementId,
        arrival: usize,
        weight: S,
        found: Vec<(S, Option<ElementId>)>,
    ) -> Decision<S> {
        let total = found.iter().fold(S::zero(), |acc, (w, _)| acc + w.clone());
        let gain = weight.clone() - total;
        let w: Vec<S> = found.iter().map(|(ws, _)| ws.clone() + gain.clone()).collect();
        self.entries.push(StackEntry {
            element: e,
            arrival,
            weight,
            gain: gain.clone(),
            w: w.clone(),
            alive: true,
        });
        self.position.insert(e, self.entries.len() - 1);
        self.alive += 1;
        for (i, (_, witness)) in found.into_iter().enumerate() {
            if let Some(f) = witness {
                self.t[i].retain(|&x| x != f);
            }
            self.t[i].push(e);
            self.debug_check_t(&matroids[i], i);
        }
        self.stats.selected_count += 1;
        self.stats.total_gain_alive = self.stats.total_gain_alive.clone() + gain.clone();
        self.stats.total_gain_all = self.stats.total_gain_all.clone() + gain.clone();
        Decision::Selected { gain, w }
    }

    fn debug_check_t(&self, m: &Matroid, i: usize) {
        if cfg!(debug_assertions) && self.alive <= DEBUG_CHECK_LIMIT {
            let mut incremental = self.t[i].clone();
            let mut fresh = greedy_max_independent(m, &self.alive_ids(), &|f| self.key(i, f));
            incremental.sort_unstable();
            fresh.sort_unstable();
            debug_assert_eq!(incremental, fresh, "incremental T_{i} diverged from greedy");
        }
    }

    /// Largest gain among alive entries.
    pub fn max_gain(&self) -> Option<S> {
        self.entries()
            .map(|x| &x.gain)
            .fold(None, |best: Option<&S>, g| match best {
                Some(b) if b >= g => Some(b),
                _ => Some(g),
            })
            .cloned()
    }

    /// Deletes every alive entry with `y * g < g_max` that is in no `T_i`.
    /// Returns the deleted element ids.
    pub fn sweep(&mut self, y: &S) -> Vec<ElementId> {
        let Some(g_max) = self.max_gain() else {
            return Vec::new();
        };
        // For y > 0, `y * g < g_max` iff `g < g_max / y`; one division instead
        // of a product per entry.
        let cutoff = (*y > S::zero()).then(|| g_max.clone() / y.clone());
        let below = |g: &S| match &cutoff {
            Some(c) => g < c,
            None => S::zero() < g_max,
        };
        let mut doomed = Vec::new();
        for (p, x) in self.entries.iter().enumerate() {
            if x.alive && below(&x.gain) && !self.t.iter().any(|t| t.contains(&x.element)) {
                doomed.push(p);
            }
        }
        let mut deleted = Vec::with_capacity(doomed.len());
        for p in doomed {
            let x = &mut self.entries[p];
            x.alive = false;
            self.alive -= 1;
            self.stats.deleted_count += 1;
            self.stats.total_gain_alive = self.stats.total_gain_alive.clone() - x.gain.clone();
            deleted.push(x.element);
        }
        if self.entries.len() > 2 * self.alive {
            self.compact();
        }
        deleted
    }

    /// Drops dead entries from memory.
    fn compact(&mut self) {
        self.entries.retain(|x| x.alive);
        self.position = self.entries.iter().enumerate().map(|(p, x)| (x.element, p)).collect();
    }

    /// Records the current alive count into `peak_stack`.
    pub fn note_size(&mut self) {
        self.stats.peak_stack = self.stats.peak_stack.max(self.alive);
    }
}

fn check_alpha<S: Scalar>(alpha: &S) -> Result<()> {
    if *alpha < S::one() {
        return Err(Error::Parameter(format!("alpha must be at least 1, got {alpha}")));
    }
    Ok(())
}

/// Runs the unbounded-memory local-ratio pass over `order` on a two-matroid
/// instance with a linear objective.
pub fn run_local_ratio<S: Scalar>(inst: &Instance<S>, order: &[ElementId], alpha: &S) -> Result<SelectionState<S>> {
    if inst.k() != 2 {
        return Err(Error::Parameter(format!(
            "the two-matroid pass needs exactly 2 matroids, instance has {}; use the k-matroid variant",
            inst.k()
        )));
    }
    if !inst.is_linear() {
        return Err(Error::Parameter("the local-ratio pass needs a linear objective".into()));
    }
    check_alpha(alpha)?;
    crate::instance::check_permutation(order, inst.len())?;
    let mut state = SelectionState::new(2);
    for (arrival, &e) in order.iter().enumerate() {
        state.process_element(&inst.matroids, e, arrival, inst.weight(e).clone(), alpha);
        state.note_size();
    }
    Ok(state)
}

/// Scans alive entries from the most recently pushed to the first, keeping an
/// element iff the kept set stays independent in every matroid.
pub fn reverse_greedy_baseline<S: Scalar>(state: &SelectionState<S>, matroids: &[Matroid]) -> Vec<ElementId> {
    let mut builders: Vec<_> = matroids.iter().map(Matroid::builder).collect();
    let mut kept = Vec::new();
    for x in state.entries().rev() {
        if builders.iter().all(|b| b.can_insert(x.element)) {
            for b in builders.iter_mut() {
                b.try_insert(x.element);
            }
            kept.push(x.element);
        }
    }
    kept
}

/// A bipartite multigraph with weighted edges.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph<S> {
    vertex_count: usize,
    edges: Vec<(usize, usize, S)>,
    /// `true` for vertices on the first side.
    first_side: Vec<bool>,
}

impl<S: Scalar> BipartiteGraph<S> {
    /// Two-colours the graph; fails if it has an odd cycle (or a self-loop).
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize, S)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); vertex_count];
        for (i, (u, v, w)) in edges.iter().enumerate() {
            if *u >= vertex_count || *v >= vertex_count {
                return Err(Error::Instance(format!(
                    "edge {i} has an endpoint outside 0..{vertex_count}"
                )));
            }
            if w.is_negative_value() {
                return Err(Error::Instance(format!("edge {i} has a negative weight")));
            }
            adj[*u].push(*v);
            adj[*v].push(*u);
        }
        let mut colour: Vec<Option<bool>> = vec![None; vertex_count];
        for start in 0..vertex_count {
            if colour[start].is_some() {
                continue;
            }
            colour[start] = Some(true);
            let mut queue = vec![start];
            while let Some(u) = queue.pop() {
                let cu = colour[u].unwrap();
                for &v in &adj[u] {
                    match colour[v] {
                        None => {
                            colour[v] = Some(!cu);
                            queue.push(v);
                        }
                        Some(cv) if cv == cu => {
                            return Err(Error::Instance("graph is not bipartite".into()));
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(BipartiteGraph {
            vertex_count,
            edges,
            first_side: colour.into_iter().map(|c| c.unwrap_or(true)).collect(),
        })
    }

    pub fn edges(&self) -> &[(usize, usize, S)] {
        &self.edges
    }

    /// Endpoints of edge `e` as (first-side vertex, second-side vertex).
    fn sides(&self, e: usize) -> (usize, usize) {
        let (u, v, _) = self.edges[e];
        if self.first_side[u] {
            (u, v)
        } else {
            (v, u)
        }
    }

    /// Encodes the graph as two partition matroids: one block per vertex, the
    /// first matroid over first-side vertices and the second over the rest.
    pub fn to_instance(&self, names: &[String]) -> Result<Instance<S>> {
        let mut left: Vec<Vec<ElementId>> = vec![Vec::new(); self.vertex_count];
        let mut right: Vec<Vec<ElementId>> = vec![Vec::new(); self.vertex_count];
        for e in 0..self.edges.len() {
            let (u, v) = self.sides(e);
            left[u].push(e);
            right[v].push(e);
        }
        let n = self.edges.len();
        let blocks = |groups: Vec<Vec<ElementId>>| {
            let groups: Vec<_> = groups.into_iter().filter(|g| !g.is_empty()).collect();
            let caps = vec![1; groups.len()];
            Matroid::partition(n, groups, caps)
        };
        let elements = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, (_, _, w))| Element {
                id: names.get(i).cloned().unwrap_or_else(|| format!("e{}", i + 1)),
                weight: w.clone(),
            })
            .collect();
        Instance::linear(elements, vec![blocks(left)?, blocks(right)?])
    }
}

/// Result of the vertex-potential local-ratio pass.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchingRun<S> {
    /// Selected edges in push order, with their gains.
    pub stack: Vec<(usize, S)>,
    pub potentials: Vec<S>,
}

/// Local ratio for weighted matching: keep a potential per vertex, push an
/// edge iff its weight strictly exceeds the sum of its endpoint potentials,
/// and raise both potentials by the gain.
pub fn run_matching_baseline<S: Scalar>(graph: &BipartiteGraph<S>, order: &[usize]) -> Result<MatchingRun<S>> {
    crate::instance::check_permutation(order, graph.edges.len())?;
    let mut potentials = vec![S::zero(); graph.vertex_count];
    let mut stack = Vec::new();
    for &e in order {
        let (u, v, w) = &graph.edges[e];
        let cover = potentials[*u].clone() + potentials[*v].clone();
        if *w > cover {
            let gain = w.clone() - cover;
            potentials[*u] = potentials[*u].clone() + gain.clone();
            potentials[*v] = potentials[*v].clone() + gain.clone();
            stack.push((e, gain));
        }
    }
    Ok(MatchingRun { stack, potentials })
}
