//! Brute-force ground truth for small instances.

use std::fmt;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::kernel::{verify_kernel_k, OrderedMatroid};
use crate::local_ratio::SelectionState;
use crate::matroid::{ElementId, ElementSet};
use crate::scalar::Scalar;
use crate::streaming::{run_streaming_k, StreamParams};
use crate::submodular::{Objective, SetFunction};

/// Environment variable overriding [`OracleBudget::max_elements`].
pub const ORACLE_MAX_ENV: &str = "MSTREAM_ORACLE_MAX";

/// Limits enforced before any exponential enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_elements: usize,
    /// Cap on search-tree nodes visited by a single enumeration.
    pub max_subsets: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_elements: 20,
            max_subsets: 1 << 24,
        }
    }
}

impl OracleBudget {
    /// The default budget with `max_elements` taken from `MSTREAM_ORACLE_MAX`
    /// when it is set.
    pub fn from_env() -> Result<Self> {
        let mut budget = OracleBudget::default();
        if let Ok(raw) = std::env::var(ORACLE_MAX_ENV) {
            budget.max_elements = raw.trim().parse().map_err(|_| {
                Error::Parameter(format!("{ORACLE_MAX_ENV} must be a non-negative integer, got {raw:?}"))
            })?;
        }
        Ok(budget)
    }

    fn admit(&self, n: usize) -> Result<()> {
        if n > self.max_elements {
            return Err(Error::Budget(format!(
                "enumeration over {n} elements exceeds the budget of {}",
                self.max_elements
            )));
        }
        Ok(())
    }
}

/// `opt / achieved`, with the division-by-zero case kept apart.
#[derive(Debug, Clone, PartialEq)]
pub enum ApproxRatio<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> fmt::Display for ApproxRatio<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApproxRatio::Finite(r) => write!(f, "{r}"),
            ApproxRatio::Infinite => f.write_str("inf"),
        }
    }
}

/// `(0, 0)` is ratio 1; `achieved = 0 < opt` is infinite.
pub fn approximation_ratio<S: Scalar>(opt: &S, achieved: &S) -> ApproxRatio<S> {
    if achieved.is_zero() {
        if opt.is_zero() {
            ApproxRatio::Finite(S::one())
        } else {
            ApproxRatio::Infinite
        }
    } else {
        ApproxRatio::Finite(opt.clone() / achieved.clone())
    }
}

struct Search<'a, S> {
    inst: &'a Instance<S>,
    order: Vec<ElementId>,
    /// For linear objectives, `suffix[p]` is the weight of `order[p..]`.
    suffix: Option<Vec<S>>,
    current: Vec<ElementId>,
    best: Vec<ElementId>,
    best_value: S,
    visited: u64,
    budget: OracleBudget,
}

impl<S: Scalar> Search<'_, S> {
    fn value(&self, set: &[ElementId]) -> S {
        self.inst.objective.value(set)
    }

    /// An upper bound on the objective over supersets of `current` drawn from
    /// `order[from..]`: exact suffix sums for linear objectives, the sum of
    /// positive marginals otherwise (valid by submodularity).
    fn bound(&self, from: usize, here: &S) -> S {
        match &self.suffix {
            Some(suffix) => here.clone() + suffix[from].clone(),
            None => self.order[from..].iter().fold(here.clone(), |acc, &e| {
                let m = self.inst.objective.marginal(e, &self.current);
                if m > S::zero() {
                    acc + m
                } else {
                    acc
                }
            }),
        }
    }

    fn explore(&mut self, from: usize) -> Result<()> {
        self.visited += 1;
        if self.visited > self.budget.max_subsets {
            return Err(Error::Budget(format!(
                "enumeration visited more than {} subsets",
                self.budget.max_subsets
            )));
        }
        let here = self.value(&self.current);
        if here > self.best_value {
            self.best_value = here.clone();
            self.best = self.current.clone();
        }
        if from == self.order.len() || self.bound(from, &here) <= self.best_value {
            return Ok(());
        }
        for p in from..self.order.len() {
            let e = self.order[p];
            self.current.push(e);
            if self.inst.common_independent(&self.current) {
                self.explore(p + 1)?;
            }
            self.current.pop();
        }
        Ok(())
    }
}

/// Maximum of the objective over sets drawn from `ground` that are
/// independent in every matroid of `inst`.
pub fn best_common_subset<S: Scalar>(
    inst: &Instance<S>,
    ground: &[ElementId],
    budget: &OracleBudget,
) -> Result<(ElementSet, S)> {
    budget.admit(ground.len())?;
    let mut order = ground.to_vec();
    let suffix = match &inst.objective {
        Objective::Linear(w) => {
            order.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));
            let mut suffix = vec![S::zero(); order.len() + 1];
            for p in (0..order.len()).rev() {
                suffix[p] = suffix[p + 1].clone() + w[order[p]].clone();
            }
            Some(suffix)
        }
        _ => None,
    };
    let empty = inst.objective.value(&[]);
    let mut search = Search {
        inst,
        order,
        suffix,
        current: Vec::new(),
        best: Vec::new(),
        best_value: empty,
        visited: 0,
        budget: *budget,
    };
    search.explore(0)?;
    Ok((search.best.into_iter().collect(), search.best_value))
}

/// The optimum over all common independent sets, by depth-first
/// branch-and-bound.
pub fn brute_force_intersection_opt<S: Scalar>(inst: &Instance<S>, budget: &OracleBudget) -> Result<(ElementSet, S)> {
    let ground: Vec<ElementId> = (0..inst.len()).collect();
    best_common_subset(inst, &ground, budget)
}

/// Outcome of running the k-matroid pass over several orders and comparing
/// the best common independent subset of each final stack with the optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport<S> {
    pub k: usize,
    pub opt: S,
    pub orders_run: usize,
    /// Minimum over orders of `k * best / opt`; `None` when `opt = 0`.
    pub worst_ratio: Option<S>,
    pub worst_order: Option<usize>,
    /// Best common independent subset of the stack in the worst order.
    pub worst_subset: ElementSet,
    pub worst_subset_weight: S,
    /// Orders whose stack has `best < opt / k`.
    pub flagged_orders: Vec<usize>,
}

impl<S> ProbeReport<S> {
    pub fn flagged(&self) -> bool {
        !self.flagged_orders.is_empty()
    }
}

/// Looks for stacks that contain no `k`-approximate common independent set.
pub fn conjecture_probe<S: Scalar>(
    inst: &Instance<S>,
    orders: &[Vec<ElementId>],
    params: &StreamParams<S>,
    budget: &OracleBudget,
) -> Result<ProbeReport<S>> {
    let (_, opt) = brute_force_intersection_opt(inst, budget)?;
    let k = S::from_usize(inst.k());
    let mut report = ProbeReport {
        k: inst.k(),
        opt: opt.clone(),
        orders_run: 0,
        worst_ratio: None,
        worst_order: None,
        worst_subset: ElementSet::new(),
        worst_subset_weight: S::zero(),
        flagged_orders: Vec::new(),
    };
    for (o, order) in orders.iter().enumerate() {
        let run = run_streaming_k(inst, order, params)?;
        let (subset, weight) = best_common_subset(inst, &run.final_state.alive_ids(), budget)?;
        let scaled = k.clone() * weight.clone();
        if scaled < opt {
            report.flagged_orders.push(o);
        }
        report.orders_run += 1;
        let better = match (&report.worst_order, opt.is_zero()) {
            (_, true) => report.worst_order.is_none(),
            (None, false) => true,
            (Some(_), false) => {
                scaled.clone() / opt.clone() < *report.worst_ratio.as_ref().expect("set with the order")
            }
        };
        if better {
            report.worst_ratio = (!opt.is_zero()).then(|| scaled / opt.clone());
            report.worst_order = Some(o);
            report.worst_subset = subset;
            report.worst_subset_weight = weight;
        }
    }
    Ok(report)
}

/// `true` iff no subset of the alive stack is independent in every matroid
/// while the union of its domination sets covers the stack.
pub fn no_kernel_witness<S: Scalar>(
    inst: &Instance<S>,
    state: &SelectionState<S>,
    budget: &OracleBudget,
) -> Result<bool> {
    if state.k() != inst.k() {
        return Err(Error::Caller(format!(
            "state has {} matroids, instance has {}",
            state.k(),
            inst.k()
        )));
    }
    let ground = state.alive_ids();
    budget.admit(ground.len())?;
    let oms: Vec<OrderedMatroid<'_, S>> = inst
        .matroids
        .iter()
        .enumerate()
        .map(|(i, m)| OrderedMatroid::from_state(m, state, i))
        .collect();
    for mask in 0u64..(1u64 << ground.len()) {
        let subset: Vec<ElementId> = ground
            .iter()
            .enumerate()
            .filter(|(p, _)| mask >> p & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        if verify_kernel_k(&oms, &ground, &subset).is_kernel() {
            return Ok(false);
        }
    }
    Ok(true)
}
