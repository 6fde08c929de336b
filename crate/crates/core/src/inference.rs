//! Uncertainty quantification: stratified nonparametric bootstrap for any
//! estimand closure, and the asymptotic plug-in variance of the counterfactual
//! mapping for cross-checks.
//!
//! Resampling happens within each observed cause-pattern stratum, preserving
//! the stratum proportions that enter the asymptotic variance and keeping
//! moderate-sample replicates from emptying strata. Replicate seeds are drawn
//! up front from the master seed and replicate outputs are reduced in sorted
//! order, so results are bit-identical across thread counts and with the
//! sequential fallback.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::counterfactual::map_plugin;
use crate::domain::{stratum_rows, CauseVector, Dataset, StratumKey};
use crate::ecdf::{DensityEstimate, EmpiricalCdf};
use crate::error::{Error, Result};
use crate::exec;

/// Minimum usable density when converting the variance to a standard error.
pub const MIN_DENSITY: f64 = 1e-8;

#[derive(Debug, Clone, Copy)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub seed: u64,
    /// Two-sided confidence level for the percentile interval.
    pub level: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            replicates: 500,
            seed: 0,
            level: 0.95,
        }
    }
}

/// Point estimate with bootstrap standard error and percentile interval.
#[derive(Debug, Clone, Copy)]
pub struct BootstrapSummary {
    pub point: f64,
    pub se: f64,
    pub ci: (f64, f64),
    pub used: usize,
    pub dropped: usize,
}

/// Bootstraps a scalar estimand.
pub fn bootstrap<F>(data: &Dataset, config: &BootstrapConfig, estimand: F) -> Result<BootstrapSummary>
where
    F: Fn(&Dataset) -> Result<f64> + Sync,
{
    let summaries = bootstrap_vec(data, config, |d| estimand(d).map(|v| vec![v]))?;
    Ok(summaries[0])
}

/// Bootstraps a vector-valued estimand in one resampling pass; component `j`
/// of every replicate feeds summary `j`.
pub fn bootstrap_vec<F>(
    data: &Dataset,
    config: &BootstrapConfig,
    estimand: F,
) -> Result<Vec<BootstrapSummary>>
where
    F: Fn(&Dataset) -> Result<Vec<f64>> + Sync,
{
    if config.replicates == 0 {
        return Err(Error::InvalidSpec("bootstrap needs at least 1 replicate".into()));
    }
    if !(config.level > 0.0 && config.level < 1.0) {
        return Err(Error::InvalidSpec(format!(
            "confidence level {} outside (0, 1)",
            config.level
        )));
    }
    let points = estimand(data)?;
    let dim = points.len();

    let strata: Vec<Vec<usize>> = data.pattern_index().into_values().collect();
    let mut seed_rng = ChaCha8Rng::seed_from_u64(config.seed);
    let seeds: Vec<u64> = (0..config.replicates).map(|_| seed_rng.random()).collect();

    let replicate = |seed: u64| -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut indices = Vec::with_capacity(data.n());
        for rows in &strata {
            for _ in 0..rows.len() {
                indices.push(rows[rng.random_range(0..rows.len())]);
            }
        }
        estimand(&data.subset(&indices))
    };
    let outcomes: Vec<Result<Vec<f64>>> = exec::map_range(seeds.len(), |r| replicate(seeds[r]));

    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(outcomes.len());
    let mut dropped = 0usize;
    for res in outcomes {
        match res {
            Ok(v) => {
                debug_assert_eq!(v.len(), dim);
                kept.push(v);
            }
            Err(_) => dropped += 1,
        }
    }
    if 5 * dropped > config.replicates {
        return Err(Error::UnstableBootstrap {
            dropped,
            total: config.replicates,
        });
    }
    let used = kept.len();
    let alpha = 1.0 - config.level;

    let mut summaries = Vec::with_capacity(dim);
    for (j, &point) in points.iter().enumerate() {
        let mut values: Vec<f64> = kept.iter().map(|v| v[j]).collect();
        values.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        let se = if used > 1 {
            let m = values.iter().sum::<f64>() / used as f64;
            (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (used - 1) as f64).sqrt()
        } else {
            0.0
        };
        let cdf = EmpiricalCdf::fit(&values)?;
        let ci = (cdf.quantile(alpha / 2.0)?, cdf.quantile(1.0 - alpha / 2.0)?);
        summaries.push(BootstrapSummary {
            point,
            se,
            ci,
            used,
            dropped,
        });
    }
    Ok(summaries)
}

/// Plug-in asymptotic variance of the mapped outcome at one point.
#[derive(Debug, Clone, Copy)]
pub struct MapVariance {
    pub y: f64,
    pub mapped: f64,
    pub sigma_sq: f64,
    pub density_at_mapped: f64,
    /// sqrt(sigma_sq) / (sqrt(n) * density), the standard error of phi(y).
    pub se: f64,
}

fn full_stratum_cdf(data: &Dataset, x: &CauseVector) -> Result<(EmpiricalCdf, f64)> {
    let key = StratumKey::Full(x.clone());
    let stratum = stratum_rows(data, &key, None);
    if stratum.rows.is_empty() {
        return Err(Error::EmptyStratum {
            key: key.describe(data.cause_names()),
        });
    }
    let values: Vec<f64> = stratum.rows.iter().map(|&i| data.outcome(i)).collect();
    let share = values.len() as f64 / data.n() as f64;
    Ok((EmpiricalCdf::fit(&values)?, share))
}

/// Variance kernel evaluated at (s, t); the diagonal s = t is the pointwise
/// asymptotic variance. Exposed for completeness; intervals in this crate come
/// from the bootstrap.
pub fn covariance_kernel(
    data: &Dataset,
    x: &CauseVector,
    x_prime: &CauseVector,
    s: f64,
    t: f64,
) -> Result<f64> {
    let (s, t) = if s <= t { (s, t) } else { (t, s) };
    let (source, p_source) = full_stratum_cdf(data, x)?;
    let (target, p_target) = full_stratum_cdf(data, x_prime)?;
    let phi_s = map_plugin(&source, &target, s);
    let phi_t = map_plugin(&source, &target, t);
    let a_s = target.eval(phi_s);
    let a_t = target.eval(phi_t);
    let b_s = source.eval(s);
    let b_t = source.eval(t);
    Ok(a_s * (1.0 - a_t) / p_target + b_s * (1.0 - b_t) / p_source)
}

/// Pointwise asymptotic variance and implied standard error of the mapped
/// outcome at `y`, which must lie strictly inside the source sample support.
pub fn analytic_map_variance(
    data: &Dataset,
    x: &CauseVector,
    x_prime: &CauseVector,
    y: f64,
) -> Result<MapVariance> {
    let (source, p_source) = full_stratum_cdf(data, x)?;
    let (target, p_target) = full_stratum_cdf(data, x_prime)?;
    let support = source.support();
    if !support.contains_interior(y) {
        return Err(Error::OutsideSupport {
            y,
            lo: support.lo,
            hi: support.hi,
        });
    }
    let mapped = map_plugin(&source, &target, y);
    let a = target.eval(mapped);
    let b = source.eval(y);
    let sigma_sq = a * (1.0 - a) / p_target + b * (1.0 - b) / p_source;
    let density = DensityEstimate::fit(target.values())?.density_at(mapped);
    if density < MIN_DENSITY {
        return Err(Error::DensityTooSmall {
            value: density,
            min: MIN_DENSITY,
        });
    }
    let se = sigma_sq.sqrt() / ((data.n() as f64).sqrt() * density);
    Ok(MapVariance {
        y,
        mapped,
        sigma_sq,
        density_at_mapped: density,
        se,
    })
}
