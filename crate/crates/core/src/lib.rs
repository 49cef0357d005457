//! Semi-streaming local-ratio algorithms for weighted and submodular matroid
//! intersection, with kernel-based solution extraction and brute-force
//! oracles for checking them on small instances.
//!
//! Every algorithm is generic over a [`Scalar`] weight type. [`Rational`]
//! (exact arbitrary-precision rationals) is the reference choice; `f64` and
//! `f32` work for quick approximate runs.

pub mod error;
pub mod fixtures;
pub mod gen;
pub mod instance;
pub mod io;
pub mod kernel;
pub mod local_ratio;
pub mod matroid;
pub mod oracles;
pub mod scalar;
pub mod streaming;
pub mod submodular;

pub use error::{Error, Result};
pub use instance::{Element, Instance};
pub use kernel::{
    brute_force_kernel, extract_solution, find_kernel, verify_kernel, verify_kernel_k, KernelReport, KernelResult,
    OrderedMatroid,
};
pub use local_ratio::{
    reverse_greedy_baseline, run_local_ratio, run_matching_baseline, BipartiteGraph, Decision, RunStats,
    SelectionState, StackEntry,
};
pub use matroid::{greedy_max_independent, swap_threshold, ElementId, ElementSet, Matroid, OrderKey};
pub use oracles::{
    approximation_ratio, brute_force_intersection_opt, conjecture_probe, no_kernel_witness, ApproxRatio, OracleBudget,
    ProbeReport,
};
pub use scalar::Scalar;
pub use streaming::{
    memory_bound, run_exact, run_streaming, run_streaming_k, MemoryBound, StreamParams, StreamReport, YBound,
};
pub use submodular::{
    run_submodular, spot_check_submodular, Objective, SetFunction, SpotCheckReport, SubmodularParams,
};

/// Exact arbitrary-precision rational.
pub type Rational = num_rational::BigRational;

pub type ExactInstance = Instance<Rational>;
pub type ExactState = SelectionState<Rational>;
pub type ExactReport = StreamReport<Rational>;
pub type ExactStreamParams = StreamParams<Rational>;
pub type ExactSubmodularParams = SubmodularParams<Rational>;

pub type FloatInstance = Instance<f64>;
pub type FloatState = SelectionState<f64>;
pub type FloatReport = StreamReport<f64>;
pub type FloatStreamParams = StreamParams<f64>;

pub type SingleInstance = Instance<f32>;
pub type SingleReport = StreamReport<f32>;
