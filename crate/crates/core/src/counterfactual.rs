//! Counterfactual outcome mappings between cause strata.
//!
//! Two estimators of the same quantile-matching target are provided and kept
//! deliberately independent of each other:
//!
//! * plug-in: the generalized inverse of the target CDF evaluated at the
//!   source CDF value, `F_target^{-1}(F_source(y))`;
//! * grid search: the minimizer over the target support of the convex
//!   objective `rho(t; y) = mean[sign(Y - y) | source] * t
//!   + mean[|Y - t| | target]`, whose derivative between target sample points
//!   is `2 {F_target(t) - F_source(y)}`. The objective is piecewise linear in
//!   `t` with kinks only at target sample values, so a grid of those values
//!   plus the support bounds contains a global minimizer; ties pick the
//!   smallest.
//!
//! Outputs are always inside the target sample support, which realizes the
//! clamped continuous extension at the boundary.

use crate::domain::{stratum_outcomes, stratum_rows, CausalGraph, CauseVector, Dataset, StratumKey};
use crate::ecdf::{EmpiricalCdf, Support};
use crate::error::{Error, Result};
use crate::exec;

/// Which estimator evaluates the counterfactual mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapMethod {
    PlugIn,
    GridSearch,
}

impl Default for MapMethod {
    fn default() -> Self {
        MapMethod::PlugIn
    }
}

/// An estimated mapping, evaluated at the requested outcome values.
#[derive(Debug, Clone)]
pub struct CounterfactualMap {
    pub source: StratumKey,
    pub target: StratumKey,
    pub method: MapMethod,
    /// (y, phi(y)) pairs sorted by y.
    pub pairs: Vec<(f64, f64)>,
}

/// Per-unit individual treatment effect estimate for a pair of interventions.
#[derive(Debug, Clone)]
pub struct IteRecord {
    pub unit: usize,
    pub x_prime: CauseVector,
    pub x_star: CauseVector,
    pub delta: f64,
}

/// Plug-in quantile match: `quantile(target, F_source(y))`.
pub fn map_plugin(source: &EmpiricalCdf, target: &EmpiricalCdf, y: f64) -> f64 {
    let u = source.eval(y);
    // u is always in [0, 1]; u = 0 (y below the source support) yields the
    // target minimum, the clamped extension
    target.quantile(u).expect("cdf value is a valid level")
}

/// Grid-search minimizer of the empirical objective over `bounds`.
pub fn map_gridsearch(
    source: &EmpiricalCdf,
    target: &EmpiricalCdf,
    y: f64,
    bounds: Support,
) -> f64 {
    let eval = MapEvaluator::new(source.clone(), target.clone(), MapMethod::GridSearch)
        .with_bounds(bounds);
    eval.map(y)
}

/// Reusable evaluator for one (source, target) stratum pair.
#[derive(Debug, Clone)]
pub struct MapEvaluator {
    source: EmpiricalCdf,
    target: EmpiricalCdf,
    method: MapMethod,
    grid: Vec<f64>,
    /// #{target <= grid[j]} for each grid point.
    grid_ranks: Vec<usize>,
    /// prefix[c] = sum of the c smallest target values.
    prefix: Vec<f64>,
}

impl MapEvaluator {
    pub fn new(source: EmpiricalCdf, target: EmpiricalCdf, method: MapMethod) -> Self {
        let bounds = target.support();
        Self::build(source, target, method, bounds)
    }

    pub fn with_bounds(self, bounds: Support) -> Self {
        Self::build(self.source, self.target, self.method, bounds)
    }

    fn build(source: EmpiricalCdf, target: EmpiricalCdf, method: MapMethod, bounds: Support) -> Self {
        let (grid, grid_ranks, prefix) = if method == MapMethod::GridSearch {
            let mut grid: Vec<f64> = target
                .values()
                .iter()
                .copied()
                .filter(|&v| v >= bounds.lo && v <= bounds.hi)
                .collect();
            grid.push(bounds.lo);
            grid.push(bounds.hi);
            grid.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
            grid.dedup();
            let ranks = grid.iter().map(|&t| target.rank_count(t)).collect();
            let mut prefix = Vec::with_capacity(target.n() + 1);
            prefix.push(0.0);
            let mut acc = 0.0;
            for &v in target.values() {
                acc += v;
                prefix.push(acc);
            }
            (grid, ranks, prefix)
        } else {
            (Vec::new(), Vec::new(), Vec::new())
        };
        MapEvaluator {
            source,
            target,
            method,
            grid,
            grid_ranks,
            prefix,
        }
    }

    pub fn target_support(&self) -> Support {
        self.target.support()
    }

    pub fn map(&self, y: f64) -> f64 {
        match self.method {
            MapMethod::PlugIn => map_plugin(&self.source, &self.target, y),
            MapMethod::GridSearch => self.grid_argmin(y),
        }
    }

    /// The empirical objective at `t` for source value `y`.
    pub fn objective(&self, t: f64, y: f64) -> f64 {
        let sbar = 1.0 - 2.0 * self.source.eval(y);
        sbar * t + self.mean_abs_dev(t)
    }

    fn mean_abs_dev_at(&self, t: f64, rank: usize) -> f64 {
        let m = self.target.n() as f64;
        let total = self.prefix[self.target.n()];
        (t * (2.0 * rank as f64 - m) + total - 2.0 * self.prefix[rank]) / m
    }

    fn mean_abs_dev(&self, t: f64) -> f64 {
        self.mean_abs_dev_at(t, self.target.rank_count(t))
    }

    fn grid_argmin(&self, y: f64) -> f64 {
        let sbar = 1.0 - 2.0 * self.source.eval(y);
        let mut best = f64::INFINITY;
        let mut best_t = self.grid[0];
        for (j, &t) in self.grid.iter().enumerate() {
            let value = sbar * t + self.mean_abs_dev_at(t, self.grid_ranks[j]);
            if value < best {
                best = value;
                best_t = t;
            }
        }
        best_t
    }
}

/// Stratum key used for mapping: the outcome-parent projection when a graph is
/// supplied, otherwise the full pattern.
pub fn map_stratum_key(graph: Option<&CausalGraph>, x: &CauseVector) -> StratumKey {
    match graph {
        Some(g) => StratumKey::projection(x, g.parents_of_outcome()),
        None => StratumKey::Full(x.clone()),
    }
}

/// Fits the outcome CDF of the stratum selected by `key`; empty strata are a
/// positivity failure.
pub fn fit_stratum_cdf(data: &Dataset, key: &StratumKey) -> Result<EmpiricalCdf> {
    let stratum = stratum_rows(data, key, None);
    if stratum.rows.is_empty() {
        return Err(Error::EmptyStratum {
            key: key.describe(data.cause_names()),
        });
    }
    EmpiricalCdf::fit(&stratum_outcomes(data, &stratum))
}

/// Estimates the mapping from the stratum of `x` to the stratum of `x_prime`
/// and evaluates it at every unit outcome in the source stratum.
pub fn map_for_evidence(
    data: &Dataset,
    graph: Option<&CausalGraph>,
    x: &CauseVector,
    x_prime: &CauseVector,
    method: MapMethod,
) -> Result<CounterfactualMap> {
    let source_key = map_stratum_key(graph, x);
    let target_key = map_stratum_key(graph, x_prime);
    let source_stratum = stratum_rows(data, &source_key, None);
    if source_stratum.rows.is_empty() {
        return Err(Error::EmptyStratum {
            key: source_key.describe(data.cause_names()),
        });
    }
    let source_y = stratum_outcomes(data, &source_stratum);
    let source = EmpiricalCdf::fit(&source_y)?;
    let target = fit_stratum_cdf(data, &target_key)?;
    let evaluator = MapEvaluator::new(source, target, method);
    let mut pairs: Vec<(f64, f64)> =
        exec::map_range(source_y.len(), |i| (source_y[i], evaluator.map(source_y[i])));
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(CounterfactualMap {
        source: source_key,
        target: target_key,
        method,
        pairs,
    })
}

/// Individual treatment effect of unit `i` for interventions (x_prime, x_star):
/// `phi_{x -> x_prime}(Y_i) - phi_{x -> x_star}(Y_i)` with x the observed
/// pattern of the unit.
pub fn ite(
    data: &Dataset,
    graph: Option<&CausalGraph>,
    unit: usize,
    x_prime: &CauseVector,
    x_star: &CauseVector,
    method: MapMethod,
) -> Result<IteRecord> {
    if unit >= data.n() {
        return Err(Error::IndexOutOfRange {
            what: "unit",
            index: unit,
            len: data.n(),
        });
    }
    let x = CauseVector::new(data.row(unit).to_vec())?;
    let y = data.outcome(unit);
    let source = fit_stratum_cdf(data, &map_stratum_key(graph, &x))?;
    let to_prime = MapEvaluator::new(
        source.clone(),
        fit_stratum_cdf(data, &map_stratum_key(graph, x_prime))?,
        method,
    );
    let to_star = MapEvaluator::new(
        source,
        fit_stratum_cdf(data, &map_stratum_key(graph, x_star))?,
        method,
    );
    Ok(IteRecord {
        unit,
        x_prime: x_prime.clone(),
        x_star: x_star.clone(),
        delta: to_prime.map(y) - to_star.map(y),
    })
}
