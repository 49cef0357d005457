//! Ordered matroids, domination and two-matroid kernels.
//!
//! A kernel of two ordered matroids is a set independent in both whose
//! domination sets cover the ground set. Kernels are found by matroid
//! deferred acceptance: the first matroid proposes its greedy basis of the
//! not-yet-rejected elements, the second keeps its greedy basis of the
//! proposals, and everything it does not keep is rejected for good.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::local_ratio::SelectionState;
use crate::matroid::{canonical_sort, greedy_max_independent, ElementId, ElementSet, Matroid, OrderKey};
use crate::scalar::Scalar;

/// Largest ground set [`brute_force_kernel`] will enumerate.
pub const BRUTE_FORCE_KERNEL_LIMIT: usize = 20;

/// A matroid together with the total order induced by per-element keys.
#[derive(Debug, Clone)]
pub struct OrderedMatroid<'a, S> {
    pub matroid: &'a Matroid,
    keys: HashMap<ElementId, OrderKey<S>>,
}

impl<'a, S: Scalar> OrderedMatroid<'a, S> {
    pub fn new(matroid: &'a Matroid, keys: HashMap<ElementId, OrderKey<S>>) -> Self {
        OrderedMatroid { matroid, keys }
    }

    /// Orders the alive entries of `state` by their `w_i` values and arrivals.
    pub fn from_state(matroid: &'a Matroid, state: &SelectionState<S>, i: usize) -> Self {
        let keys = state
            .entries()
            .map(|x| (x.element, OrderKey::new(x.w[i].clone(), x.arrival)))
            .collect();
        OrderedMatroid { matroid, keys }
    }

    pub fn key(&self, e: ElementId) -> OrderKey<S> {
        self.keys[&e].clone()
    }

    /// Is `a` strictly before `b` in this order?
    pub fn before(&self, a: ElementId, b: ElementId) -> bool {
        self.keys[&a].precedes(&self.keys[&b])
    }

    /// `e` is in `t`, or is spanned by the members of `t` ordered before it.
    pub fn dominates(&self, t: &[ElementId], e: ElementId) -> bool {
        if t.contains(&e) {
            return true;
        }
        let better: Vec<ElementId> = t.iter().copied().filter(|&c| self.before(c, e)).collect();
        self.matroid.spans(&better, e)
    }

    /// The elements of `ground` dominated by `t`.
    pub fn domination_set(&self, t: &[ElementId], ground: &[ElementId]) -> Vec<ElementId> {
        ground.iter().copied().filter(|&e| self.dominates(t, e)).collect()
    }

    pub fn greedy(&self, ground: &[ElementId]) -> Vec<ElementId> {
        greedy_max_independent(self.matroid, ground, &|e| self.key(e))
    }

    pub fn sort(&self, items: &mut [ElementId]) {
        canonical_sort(items, &|e| self.key(e));
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelResult {
    pub kernel: ElementSet,
    pub rounds: usize,
    /// `(round, element)` for every rejection, in order.
    pub rejected_trace: Vec<(usize, ElementId)>,
}

/// Outcome of checking a candidate kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelReport {
    /// Indices of the matroids in which the candidate is dependent.
    pub dependent_in: Vec<usize>,
    pub undominated: Vec<ElementId>,
}

impl KernelReport {
    pub fn is_kernel(&self) -> bool {
        self.dependent_in.is_empty() && self.undominated.is_empty()
    }
}

/// Checks a candidate against any number of ordered matroids: independent in
/// all of them, and every ground element dominated in at least one.
pub fn verify_kernel_k<S: Scalar>(
    oms: &[OrderedMatroid<'_, S>],
    ground: &[ElementId],
    k: &[ElementId],
) -> KernelReport {
    let dependent_in = oms
        .iter()
        .enumerate()
        .filter(|(_, om)| !om.matroid.independent(k))
        .map(|(i, _)| i)
        .collect();
    let undominated = ground
        .iter()
        .copied()
        .filter(|&e| !oms.iter().any(|om| om.dominates(k, e)))
        .collect();
    KernelReport {
        dependent_in,
        undominated,
    }
}

pub fn verify_kernel<S: Scalar>(
    om1: &OrderedMatroid<'_, S>,
    om2: &OrderedMatroid<'_, S>,
    ground: &[ElementId],
    k: &[ElementId],
) -> KernelReport {
    verify_kernel_k(&[om1.clone(), om2.clone()], ground, k)
}

/// Matroid deferred acceptance. The returned kernel is verified before it is
/// handed back; a failed check is reported as an invariant violation.
pub fn find_kernel<S: Scalar>(
    om1: &OrderedMatroid<'_, S>,
    om2: &OrderedMatroid<'_, S>,
    ground: &[ElementId],
) -> Result<KernelResult> {
    let mut rejected = vec![false; ground.len()];
    let index: HashMap<ElementId, usize> = ground.iter().enumerate().map(|(p, &e)| (e, p)).collect();
    let mut trace = Vec::new();
    let mut rounds = 0;
    let kernel = loop {
        rounds += 1;
        let open: Vec<ElementId> = ground.iter().copied().filter(|e| !rejected[index[e]]).collect();
        let proposed = om1.greedy(&open);
        let mut kept = om2.greedy(&proposed);
        if kept.len() == proposed.len() {
            kept.sort_unstable();
            break kept;
        }
        let mut newly: Vec<ElementId> = proposed.into_iter().filter(|e| !kept.contains(e)).collect();
        om1.sort(&mut newly);
        for e in newly {
            rejected[index[&e]] = true;
            trace.push((rounds, e));
        }
        if rounds > ground.len() + 1 {
            return Err(Error::Invariant("deferred acceptance failed to terminate".into()));
        }
    };
    let report = verify_kernel(om1, om2, ground, &kernel);
    if !report.is_kernel() {
        return Err(Error::Invariant(format!(
            "deferred acceptance produced a non-kernel: dependent in {:?}, undominated {:?}",
            report.dependent_in, report.undominated
        )));
    }
    Ok(KernelResult {
        kernel: kernel.into_iter().collect(),
        rounds,
        rejected_trace: trace,
    })
}

/// Every kernel of the two ordered matroids, by subset enumeration.
pub fn brute_force_kernel<S: Scalar>(
    om1: &OrderedMatroid<'_, S>,
    om2: &OrderedMatroid<'_, S>,
    ground: &[ElementId],
) -> Result<Vec<ElementSet>> {
    if ground.len() > BRUTE_FORCE_KERNEL_LIMIT {
        return Err(Error::Budget(format!(
            "kernel enumeration over {} elements exceeds the limit of {BRUTE_FORCE_KERNEL_LIMIT}",
            ground.len()
        )));
    }
    let mut found = Vec::new();
    for mask in 0u32..(1u32 << ground.len()) {
        let subset: Vec<ElementId> = ground
            .iter()
            .enumerate()
            .filter(|(p, _)| mask >> p & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        if verify_kernel(om1, om2, ground, &subset).is_kernel() {
            found.push(subset.into_iter().collect());
        }
    }
    Ok(found)
}

/// Extracts a common independent subset `T` of the alive stack with
/// `sum of recorded weights over T >= g(S_alive)` via the kernel of the two
/// `w_i`-ordered matroids.
pub fn extract_solution<S: Scalar>(state: &SelectionState<S>, matroids: &[Matroid]) -> Result<ElementSet> {
    if matroids.len() != 2 || state.k() != 2 {
        return Err(Error::Parameter("kernel extraction needs exactly 2 matroids".into()));
    }
    let om1 = OrderedMatroid::from_state(&matroids[0], state, 0);
    let om2 = OrderedMatroid::from_state(&matroids[1], state, 1);
    let ground = state.alive_ids();
    let result = find_kernel(&om1, &om2, &ground)?;
    let weight = result
        .kernel
        .iter()
        .fold(S::zero(), |acc, &e| acc + state.selected_weight(e).clone());
    if weight < *state.gain_alive() {
        return Err(Error::Invariant(format!(
            "kernel weight {weight} is below the alive gain {}",
            state.gain_alive()
        )));
    }
    Ok(result.kernel)
}
