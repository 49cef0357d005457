//! Memory-bounded local ratio: selection slack `alpha`, deletion ratio `y`,
//! and the k-matroid generalisation.

use crate::error::{Error, Result};
use crate::instance::{check_permutation, Instance};
use crate::kernel::extract_solution;
use crate::local_ratio::{reverse_greedy_baseline, run_local_ratio, SelectionState};
use crate::matroid::{ElementId, ElementSet};
use crate::oracles::ApproxRatio;
use crate::scalar::{ceil_log, Scalar};
use crate::submodular::SetFunction;

/// Deletion ratio bound. `Infinite` disables deletion.
#[derive(Debug, Clone, PartialEq)]
pub enum YBound<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> YBound<S> {
    pub fn finite(&self) -> Option<&S> {
        match self {
            YBound::Finite(y) => Some(y),
            YBound::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamParams<S> {
    pub alpha: S,
    pub y: YBound<S>,
    /// Accuracy parameter of the default schedule; also the `epsilon` of the
    /// memory bound. Falls back to `alpha - 1` when absent.
    pub epsilon: Option<S>,
}

impl<S: Scalar> StreamParams<S> {
    pub fn new(alpha: S, y: YBound<S>) -> Self {
        StreamParams {
            alpha,
            y,
            epsilon: None,
        }
    }

    /// `alpha = 1`, no deletions: the unbounded-memory pass.
    pub fn exact() -> Self {
        StreamParams::new(S::one(), YBound::Infinite)
    }

    /// `alpha = 1 + eps`, `y = min(ranks) / eps^2`.
    pub fn from_epsilon(eps: S, ranks: &[usize]) -> Result<Self> {
        if eps <= S::zero() {
            return Err(Error::Parameter(format!("epsilon must be positive, got {eps}")));
        }
        let r = ranks.iter().copied().min().unwrap_or(0);
        let y = S::from_usize(r) / (eps.clone() * eps.clone());
        Ok(StreamParams {
            alpha: S::one() + eps.clone(),
            y: YBound::Finite(y),
            epsilon: Some(eps),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha < S::one() {
            return Err(Error::Parameter(format!(
                "alpha must be at least 1, got {}",
                self.alpha
            )));
        }
        if let Some(y) = self.y.finite() {
            if self.alpha <= S::one() {
                return Err(Error::Parameter("alpha must exceed 1 when y is finite".into()));
            }
            if y.is_negative_value() {
                return Err(Error::Parameter(format!("y must be non-negative, got {y}")));
            }
        }
        if let Some(eps) = &self.epsilon {
            if *eps <= S::zero() {
                return Err(Error::Parameter(format!("epsilon must be positive, got {eps}")));
            }
        }
        Ok(())
    }

    fn bound_epsilon(&self) -> S {
        self.epsilon.clone().unwrap_or_else(|| self.alpha.clone() - S::one())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemoryBound {
    Bounded(u64),
    Unbounded,
}

impl MemoryBound {
    pub fn admits(&self, size: usize) -> bool {
        match self {
            MemoryBound::Bounded(b) => size as u64 <= *b,
            MemoryBound::Unbounded => true,
        }
    }
}

/// `sum(ranks) + min(ranks) * ceil(log_alpha(y / eps))`, or unbounded when
/// `y` is infinite.
pub fn memory_bound<S: Scalar>(ranks: &[usize], params: &StreamParams<S>) -> MemoryBound {
    let Some(y) = params.y.finite() else {
        return MemoryBound::Unbounded;
    };
    let eps = params.bound_epsilon();
    if params.alpha <= S::one() || eps <= S::zero() {
        return MemoryBound::Unbounded;
    }
    let total: u64 = ranks.iter().map(|&r| r as u64).sum();
    let min = ranks.iter().copied().min().unwrap_or(0) as u64;
    let levels = ceil_log(&params.alpha, &(y.clone() / eps));
    MemoryBound::Bounded(total + min * levels)
}

/// Everything a streaming run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamReport<S> {
    pub final_state: SelectionState<S>,
    pub solution: ElementSet,
    /// Sum of the recorded selection weights over the solution.
    pub solution_weight: S,
    /// Objective value of the solution (equals `solution_weight` for linear runs).
    pub objective_value: S,
    pub g_alive: S,
    pub g_all: S,
    pub peak_stack: usize,
    pub memory_bound: MemoryBound,
    pub ratio_vs_opt: Option<ApproxRatio<S>>,
    /// Kernel-verified solution (two matroids) rather than a heuristic.
    pub certified: bool,
    pub skipped: usize,
    pub seed: Option<u64>,
}

/// Shared selection loop. `weight_of` gives an element's weight against the
/// current state; `keep` is consulted only for elements that pass the
/// threshold test and returns `false` to skip them.
pub(crate) fn drive<S: Scalar>(
    inst: &Instance<S>,
    order: &[ElementId],
    params: &StreamParams<S>,
    mut weight_of: impl FnMut(&SelectionState<S>, ElementId) -> S,
    mut keep: impl FnMut() -> bool,
) -> (SelectionState<S>, usize) {
    let mut state = SelectionState::new(inst.k());
    let mut skipped = 0;
    for (arrival, &e) in order.iter().enumerate() {
        let weight = weight_of(&state, e);
        if let Some(found) = state.evaluate(&inst.matroids, e, &weight, &params.alpha) {
            if keep() {
                state.push(&inst.matroids, e, arrival, weight, found);
                if let Some(y) = params.y.finite() {
                    state.sweep(y);
                }
            } else {
                skipped += 1;
            }
        }
        state.note_size();
    }
    (state, skipped)
}

/// Builds the report for a finished state: kernel extraction for two
/// matroids, the reverse-greedy heuristic otherwise.
pub(crate) fn finish<S: Scalar>(
    inst: &Instance<S>,
    state: SelectionState<S>,
    params: &StreamParams<S>,
    skipped: usize,
    seed: Option<u64>,
) -> Result<StreamReport<S>> {
    let (solution, certified): (ElementSet, bool) = if inst.k() == 2 {
        (extract_solution(&state, &inst.matroids)?, true)
    } else {
        (
            reverse_greedy_baseline(&state, &inst.matroids).into_iter().collect(),
            false,
        )
    };
    let solution_weight = solution
        .iter()
        .fold(S::zero(), |acc, &e| acc + state.selected_weight(e).clone());
    let members: Vec<ElementId> = solution.iter().copied().collect();
    let objective_value = inst.objective.value(&members);
    Ok(StreamReport {
        solution,
        solution_weight,
        objective_value,
        g_alive: state.gain_alive().clone(),
        g_all: state.gain_all().clone(),
        peak_stack: state.stats.peak_stack,
        memory_bound: memory_bound(&inst.ranks(), params),
        ratio_vs_opt: None,
        certified,
        skipped,
        seed,
        final_state: state,
    })
}

/// The unbounded-memory pass (`alpha = 1`, no deletions) over two matroids
/// with kernel extraction.
pub fn run_exact<S: Scalar>(inst: &Instance<S>, order: &[ElementId]) -> Result<StreamReport<S>> {
    let params = StreamParams::exact();
    let state = run_local_ratio(inst, order, &params.alpha)?;
    finish(inst, state, &params, 0, None)
}

/// The semi-streaming pass over `k >= 2` matroids with a linear objective.
/// For `k >= 3` the solution is an uncertified heuristic.
pub fn run_streaming_k<S: Scalar>(
    inst: &Instance<S>,
    order: &[ElementId],
    params: &StreamParams<S>,
) -> Result<StreamReport<S>> {
    if inst.k() < 2 {
        return Err(Error::Parameter(format!(
            "need at least 2 matroids, instance has {}",
            inst.k()
        )));
    }
    if !inst.is_linear() {
        return Err(Error::Parameter("streaming runs need a linear objective".into()));
    }
    params.validate()?;
    check_permutation(order, inst.len())?;
    let (state, skipped) = drive(inst, order, params, |_, e| inst.weight(e).clone(), || true);
    finish(inst, state, params, skipped, None)
}

/// The semi-streaming pass over exactly two matroids.
pub fn run_streaming<S: Scalar>(
    inst: &Instance<S>,
    order: &[ElementId],
    params: &StreamParams<S>,
) -> Result<StreamReport<S>> {
    if inst.k() != 2 {
        return Err(Error::Parameter(format!(
            "need exactly 2 matroids, instance has {}",
            inst.k()
        )));
    }
    run_streaming_k(inst, order, params)
}
