//! Submodular objectives and the randomized streaming pass that selects by
//! marginal value.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{check_permutation, Instance};
use crate::matroid::ElementId;
use crate::scalar::Scalar;
use crate::streaming::{drive, finish, StreamParams, StreamReport, YBound};
use crate::Rational;

/// A set function over element ids.
pub trait SetFunction<S> {
    fn value(&self, set: &[ElementId]) -> S;

    fn is_monotone(&self) -> bool;

    /// `f(set + e) - f(set)`; `e` must not be in `set`.
    fn marginal(&self, e: ElementId, set: &[ElementId]) -> S
    where
        S: Scalar,
    {
        let mut with = set.to_vec();
        with.push(e);
        self.value(&with) - self.value(set)
    }
}

/// Objective of an instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective<S> {
    /// `f(A) = sum of weights[a]`.
    Linear(Vec<S>),
    /// Weighted coverage: `f(A)` is the weight of the items covered by `A`.
    Coverage {
        sets: Vec<Vec<usize>>,
        item_names: Vec<String>,
        item_weights: Vec<S>,
    },
    /// Cut function: the selected side is the union of the selected
    /// elements' vertex sets, which are pairwise disjoint; `f(A)` is the
    /// weight of edges leaving it.
    Cut {
        vertices: usize,
        toggles: Vec<Vec<usize>>,
        edges: Vec<(usize, usize, S)>,
    },
}

impl<S: Scalar> Objective<S> {
    pub(crate) fn validate(&self, n: usize) -> Result<()> {
        let negative = |w: &S| w.is_negative_value();
        match self {
            Objective::Linear(w) => {
                if w.len() != n {
                    return Err(Error::Instance(format!(
                        "linear objective has {} weights for {n} elements",
                        w.len()
                    )));
                }
                if w.iter().any(negative) {
                    return Err(Error::Instance("linear objective has a negative weight".into()));
                }
            }
            Objective::Coverage {
                sets,
                item_names,
                item_weights,
            } => {
                if sets.len() != n {
                    return Err(Error::Instance(format!(
                        "coverage objective has {} sets for {n} elements",
                        sets.len()
                    )));
                }
                if item_names.len() != item_weights.len() {
                    return Err(Error::Instance(
                        "coverage item names and weights differ in length".into(),
                    ));
                }
                if sets.iter().flatten().any(|&i| i >= item_weights.len()) {
                    return Err(Error::Instance("coverage set refers to an unknown item".into()));
                }
                if item_weights.iter().any(negative) {
                    return Err(Error::Instance("coverage item has a negative weight".into()));
                }
            }
            Objective::Cut {
                vertices,
                toggles,
                edges,
            } => {
                if toggles.len() != n {
                    return Err(Error::Instance(format!(
                        "cut objective has {} toggles for {n} elements",
                        toggles.len()
                    )));
                }
                if toggles.iter().flatten().any(|&v| v >= *vertices)
                    || edges.iter().any(|(u, v, _)| *u >= *vertices || *v >= *vertices)
                {
                    return Err(Error::Instance(format!(
                        "cut objective refers to a vertex outside 0..{vertices}"
                    )));
                }
                if edges.iter().any(|(_, _, w)| negative(w)) {
                    return Err(Error::Instance("cut edge has a negative weight".into()));
                }
                let mut owner = vec![None; *vertices];
                for (e, vs) in toggles.iter().enumerate() {
                    for &v in vs {
                        if let Some(other) = owner[v].replace(e) {
                            if other != e {
                                return Err(Error::Instance(format!(
                                    "elements {other} and {e} both switch vertex {v}; vertex sets must be disjoint"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub(crate) fn map_scalar<T: Scalar>(&self, conv: &impl Fn(&S) -> T) -> Objective<T> {
        match self {
            Objective::Linear(w) => Objective::Linear(w.iter().map(conv).collect()),
            Objective::Coverage {
                sets,
                item_names,
                item_weights,
            } => Objective::Coverage {
                sets: sets.clone(),
                item_names: item_names.clone(),
                item_weights: item_weights.iter().map(conv).collect(),
            },
            Objective::Cut {
                vertices,
                toggles,
                edges,
            } => Objective::Cut {
                vertices: *vertices,
                toggles: toggles.clone(),
                edges: edges.iter().map(|(u, v, w)| (*u, *v, conv(w))).collect(),
            },
        }
    }

    /// Marginal value `f(e | set)`.
    pub fn marginal_value(&self, e: ElementId, set: &[ElementId]) -> Result<S> {
        if set.contains(&e) {
            return Err(Error::Caller(format!("element {e} is already in the set")));
        }
        Ok(self.marginal(e, set))
    }
}

impl<S: Scalar> SetFunction<S> for Objective<S> {
    fn value(&self, set: &[ElementId]) -> S {
        match self {
            Objective::Linear(w) => set.iter().fold(S::zero(), |acc, &e| acc + w[e].clone()),
            Objective::Coverage { sets, item_weights, .. } => {
                let covered: BTreeSet<usize> = set.iter().flat_map(|&e| sets[e].iter().copied()).collect();
                covered
                    .into_iter()
                    .fold(S::zero(), |acc, i| acc + item_weights[i].clone())
            }
            Objective::Cut {
                vertices,
                toggles,
                edges,
            } => {
                let mut side = vec![false; *vertices];
                for &e in set {
                    for &v in &toggles[e] {
                        side[v] = true;
                    }
                }
                edges
                    .iter()
                    .filter(|(u, v, _)| side[*u] != side[*v])
                    .fold(S::zero(), |acc, (_, _, w)| acc + w.clone())
            }
        }
    }

    fn is_monotone(&self) -> bool {
        !matches!(self, Objective::Cut { .. })
    }

    fn marginal(&self, e: ElementId, set: &[ElementId]) -> S {
        match self {
            Objective::Linear(w) => w[e].clone(),
            Objective::Coverage { sets, item_weights, .. } => {
                let covered: BTreeSet<usize> = set.iter().flat_map(|&x| sets[x].iter().copied()).collect();
                sets[e]
                    .iter()
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .filter(|i| !covered.contains(i))
                    .fold(S::zero(), |acc, &i| acc + item_weights[i].clone())
            }
            Objective::Cut { .. } => {
                let mut with = set.to_vec();
                with.push(e);
                self.value(&with) - self.value(set)
            }
        }
    }
}

/// A failed submodularity or monotonicity check.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// The base set `A`.
    pub base: Vec<ElementId>,
    pub element: ElementId,
    /// The extra element `x`, for a diminishing-returns failure
    /// `f(e | A) < f(e | A + x)`; `None` for a monotonicity failure
    /// `f(e | A) < 0`.
    pub extra: Option<ElementId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpotCheckReport {
    pub checks: usize,
    pub exhaustive: bool,
    pub violation: Option<Violation>,
}

impl SpotCheckReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Largest ground set checked exhaustively.
pub const EXHAUSTIVE_CHECK_LIMIT: usize = 10;

fn check_triple<S: Scalar, F: SetFunction<S> + ?Sized>(
    f: &F,
    base: &[ElementId],
    e: ElementId,
    x: Option<ElementId>,
) -> Option<Violation> {
    let here = f.marginal(e, base);
    let failed = match x {
        None => f.is_monotone() && here.is_negative_value(),
        Some(x) => {
            let mut bigger = base.to_vec();
            bigger.push(x);
            here < f.marginal(e, &bigger)
        }
    };
    failed.then(|| Violation {
        base: base.to_vec(),
        element: e,
        extra: x,
    })
}

/// Checks diminishing returns `f(e | A) >= f(e | A + x)` (and `f(e | A) >= 0`
/// for monotone functions): over every `(A, e, x)` when the ground set has at
/// most ten elements, otherwise over `trials` random triples.
pub fn spot_check_submodular<S: Scalar, F: SetFunction<S> + ?Sized>(
    f: &F,
    ground: &[ElementId],
    trials: usize,
    seed: u64,
) -> SpotCheckReport {
    let n = ground.len();
    if n > EXHAUSTIVE_CHECK_LIMIT {
        return sampled_spot_check(f, ground, trials, seed);
    }
    let mut checks = 0;
    for mask in 0u32..(1 << n) {
        let base: Vec<ElementId> = (0..n).filter(|p| mask >> p & 1 == 1).map(|p| ground[p]).collect();
        let outside: Vec<ElementId> = (0..n).filter(|p| mask >> p & 1 == 0).map(|p| ground[p]).collect();
        for &e in &outside {
            let extras = std::iter::once(None).chain(outside.iter().filter(|&&x| x != e).map(|&x| Some(x)));
            for x in extras {
                checks += 1;
                if let Some(v) = check_triple(f, &base, e, x) {
                    return SpotCheckReport {
                        checks,
                        exhaustive: true,
                        violation: Some(v),
                    };
                }
            }
        }
    }
    SpotCheckReport {
        checks,
        exhaustive: true,
        violation: None,
    }
}

/// `trials` random triples `(A, e, x)`, whatever the ground-set size.
pub fn sampled_spot_check<S: Scalar, F: SetFunction<S> + ?Sized>(
    f: &F,
    ground: &[ElementId],
    trials: usize,
    seed: u64,
) -> SpotCheckReport {
    let n = ground.len();
    let mut checks = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..if n < 2 { 0 } else { trials } {
        let e = ground[rng.random_range(0..n)];
        let x = loop {
            let x = ground[rng.random_range(0..n)];
            if x != e {
                break x;
            }
        };
        let base: Vec<ElementId> = ground
            .iter()
            .copied()
            .filter(|&a| a != e && a != x && rng.random_bool(0.5))
            .collect();
        for extra in [None, Some(x)] {
            checks += 1;
            if let Some(v) = check_triple(f, &base, e, extra) {
                return SpotCheckReport {
                    checks,
                    exhaustive: false,
                    violation: Some(v),
                };
            }
        }
    }
    SpotCheckReport {
        checks,
        exhaustive: false,
        violation: None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubmodularParams<S> {
    pub alpha: S,
    /// Probability of keeping an element that passes the threshold test.
    pub q: S,
    pub y: YBound<S>,
    pub delta: S,
    pub seed: u64,
}

impl<S: Scalar> SubmodularParams<S> {
    /// `y = min(ranks) / delta^2`.
    pub fn with_delta(alpha: S, q: S, delta: S, ranks: &[usize], seed: u64) -> Self {
        let r = ranks.iter().copied().min().unwrap_or(0);
        let y = YBound::Finite(S::from_usize(r) / (delta.clone() * delta.clone()));
        SubmodularParams {
            alpha,
            q,
            y,
            delta,
            seed,
        }
    }

    /// `1 / (2 alpha + 1)`, the keep probability for non-monotone objectives.
    pub fn non_monotone_q(alpha: &S) -> S {
        S::one() / (alpha.clone() + alpha.clone() + S::one())
    }

    /// Whether `q` is one of the two values the approximation guarantee covers.
    pub fn guarantee_mode(&self) -> bool {
        self.q == S::one() || self.q == Self::non_monotone_q(&self.alpha)
    }

    pub fn stream_params(&self) -> StreamParams<S> {
        StreamParams {
            alpha: self.alpha.clone(),
            y: self.y.clone(),
            epsilon: Some(self.alpha.clone() - S::one()),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.q <= S::zero() || self.q > S::one() {
            return Err(Error::Parameter(format!("q must lie in (0, 1], got {}", self.q)));
        }
        if self.delta <= S::zero() {
            return Err(Error::Parameter(format!("delta must be positive, got {}", self.delta)));
        }
        if self.alpha < S::one() {
            return Err(Error::Parameter(format!(
                "alpha must be at least 1, got {}",
                self.alpha
            )));
        }
        if self.y.finite().is_some() && self.alpha <= S::one() {
            return Err(Error::Parameter("alpha must exceed 1 when y is finite".into()));
        }
        Ok(())
    }
}

/// `1 + sqrt(n) / d`, truncated to seven decimal places.
fn one_plus_root_over(n: u64, d: u64) -> Rational {
    let scale = BigInt::from(10u64.pow(7));
    let root = (BigInt::from(n) * &scale * &scale).sqrt();
    Rational::one() + Rational::new(root, scale * BigInt::from(d))
}

/// Rational approximation of `1 + 1/sqrt(2)` within `1e-6`.
pub fn monotone_alpha() -> Rational {
    one_plus_root_over(2, 2)
}

/// Rational approximation of `1 + sqrt(3)/2` within `1e-6`.
pub fn non_monotone_alpha() -> Rational {
    one_plus_root_over(3, 2)
}

/// Random triples checked before every submodular run.
const RUN_SPOT_CHECKS: usize = 64;

/// Streaming pass with marginal-value weights: each element weighs
/// `f(e | S_alive)`; an element passing the threshold test is kept with
/// probability `q` (one draw per passing element, in arrival order). With
/// `q = 1` no randomness is drawn.
pub fn run_submodular<S: Scalar>(
    inst: &Instance<S>,
    order: &[ElementId],
    params: &SubmodularParams<S>,
) -> Result<StreamReport<S>> {
    if inst.k() != 2 {
        return Err(Error::Parameter(format!(
            "need exactly 2 matroids, instance has {}",
            inst.k()
        )));
    }
    params.validate()?;
    check_permutation(order, inst.len())?;
    let ground: Vec<ElementId> = (0..inst.len()).collect();
    let check = sampled_spot_check(&inst.objective, &ground, RUN_SPOT_CHECKS, params.seed);
    if let Some(v) = check.violation {
        return Err(Error::Instance(format!("objective is not submodular: {v:?}")));
    }
    let stream = params.stream_params();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let deterministic = params.q == S::one();
    let q = params.q.approx_f64();
    let objective = &inst.objective;
    let (state, skipped) = drive(
        inst,
        order,
        &stream,
        |state, e| objective.marginal(e, &state.alive_ids()),
        || deterministic || rng.random::<f64>() < q,
    );
    let report = finish(inst, state, &stream, skipped, Some(params.seed))?;
    if report.objective_value < report.g_alive {
        return Err(Error::Invariant(format!(
            "f(T) = {} is below the alive gain {}",
            report.objective_value, report.g_alive
        )));
    }
    Ok(report)
}
