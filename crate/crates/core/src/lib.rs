//! Retrospective attribution of a continuous outcome to multiple correlated
//! binary causes.
//!
//! Given observational data, a declared topological order of binary causes,
//! and observed evidence (a cause pattern plus an outcome event), the crate
//! estimates posterior causal quantities: the expected outcome change under a
//! joint intervention, per-cause total/direct/indirect decompositions, and
//! per-unit treatment effects. Identification rests on quantile matching
//! between cause strata (rank preservation) and on product formulas for the
//! cross-world distribution of downstream causes (monotonicity); both are
//! estimated nonparametrically from stratum frequencies.
//!
//! A structural-causal-model simulator doubles as a brute-force oracle: it
//! draws coupled potential outcomes from explicit structural functions and
//! evaluates estimand definitions directly, which is how the estimators are
//! validated end to end.
//!
//! The `parallel` feature (on by default) runs bootstrap replicates, data
//! generation, Monte-Carlo oracle draws, and per-unit map evaluations on a
//! rayon pool; disabling it falls back to identical sequential code paths
//! with bit-identical results.

#![forbid(unsafe_code)]

pub mod counterfactual;
pub mod domain;
pub mod ecdf;
pub mod error;
pub mod estimands;
mod exec;
pub mod inference;
pub mod io;
pub mod monotone;
pub mod simulate;

pub use counterfactual::{
    ite, map_for_evidence, map_gridsearch, map_plugin, CounterfactualMap, IteRecord, MapEvaluator,
    MapMethod,
};
pub use domain::{
    enumerate_geq, enumerate_leq, partial_order_leq, stratum_outcomes, stratum_rows, CausalGraph,
    CauseVector, Dataset, Evidence, Interval, OutcomeEvent, Stratum, StratumKey,
};
pub use ecdf::{DensityEstimate, EmpiricalCdf, Support};
pub use error::{Error, Result};
pub use estimands::{
    attribution_table, ite_summary, nested_expectation, post_ice, post_mediation, EstimandKind,
    EstimandResult, EstimandTarget, EstimatorConfig, MediationEffects, NestedExpectation,
};
pub use inference::{
    analytic_map_variance, bootstrap, bootstrap_vec, covariance_kernel, BootstrapConfig,
    BootstrapSummary, MapVariance,
};
pub use monotone::{
    cross_world_dist, falsify_monotonicity, ratio_r0, ratio_r1, CrossWorldDist,
    FalsificationConfig, MonotonicityCheck, MonotonicityReport, RatioTerm,
};
pub use simulate::{
    generate, true_estimand, NoiseKind, OracleEstimate, OracleRequest, OutcomeLink,
    PotentialOutcomeTable, ScmSpec,
};
