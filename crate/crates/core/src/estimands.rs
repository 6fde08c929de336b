//! Posterior causal estimands assembled from counterfactual mappings and
//! cross-world distributions.
//!
//! Every estimand is a mean over the evidence units of per-unit contrasts of
//! mapped outcomes. The direct, indirect, and total effects of one cause are
//! accumulated termwise from one cross-world distribution and one set of
//! mapped-outcome arrays, so the decomposition `tce = nde + nie` holds to
//! floating-point roundoff and contrasts between identical strata vanish
//! exactly (zero rows for causes with no path into the outcome parents).
//!
//! Zero-probability cross-world terms are skipped without touching the data,
//! so strata that are never realized cannot raise positivity errors.

use std::collections::BTreeMap;
use std::rc::Rc;

use crate::counterfactual::{fit_stratum_cdf, map_stratum_key, MapEvaluator, MapMethod};
use crate::domain::{stratum_rows, CausalGraph, CauseVector, Dataset, Evidence, StratumKey};
use crate::ecdf::EmpiricalCdf;
use crate::error::{Error, Result};
use crate::exec;
use crate::monotone::cross_world_dist;

/// Evidence strata smaller than this carry a low-support warning.
pub const LOW_SUPPORT_THRESHOLD: usize = 5;

/// Estimation knobs shared by all estimand functions.
#[derive(Debug, Clone, Copy, Default)]
pub struct EstimatorConfig {
    pub method: MapMethod,
    /// Add-alpha smoothing for conditional-rate cells (None = off).
    pub smoothing: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimandKind {
    PostIce,
    PostNde,
    PostNie,
    PostTce,
    IteSummary,
}

impl EstimandKind {
    pub fn label(&self) -> &'static str {
        match self {
            EstimandKind::PostIce => "PostICE",
            EstimandKind::PostNde => "PostNDE",
            EstimandKind::PostNie => "PostNIE",
            EstimandKind::PostTce => "PostTCE",
            EstimandKind::IteSummary => "ITE",
        }
    }
}

/// What the estimand contrasts: a joint intervention, a single cause, or a
/// pair of interventions.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimandTarget {
    Intervention(CauseVector),
    Cause(usize),
    Pair(CauseVector, CauseVector),
}

#[derive(Debug, Clone)]
pub struct EstimandResult {
    pub kind: EstimandKind,
    pub evidence: Evidence,
    pub target: EstimandTarget,
    pub estimate: f64,
    pub se: Option<f64>,
    pub ci: Option<(f64, f64)>,
    pub evidence_n: usize,
    pub low_support: bool,
}

/// Direct, indirect, and total effect of one cause under the evidence.
#[derive(Debug, Clone)]
pub struct MediationEffects {
    pub cause: usize,
    pub nde: f64,
    pub nie: f64,
    pub tce: f64,
    pub evidence_n: usize,
    pub low_support: bool,
    /// Number of ratio terms clamped while building the cross-world weights.
    pub clamped_ratios: usize,
}

/// One identified nested expectation E(Y under the intervention | evidence).
#[derive(Debug, Clone)]
pub struct NestedExpectation {
    pub evidence: Evidence,
    pub intervention: CauseVector,
    pub value: f64,
}

/// Rows of the evidence stratum. With a graph the stratum is keyed by the
/// outcome parents of x (the estimand depends on x only through them);
/// otherwise by the full pattern.
fn evidence_units(
    data: &Dataset,
    graph: Option<&CausalGraph>,
    evidence: &Evidence,
) -> Result<(StratumKey, Vec<usize>)> {
    if evidence.x.len() != data.p() {
        return Err(Error::LengthMismatch {
            left: evidence.x.len(),
            right: data.p(),
        });
    }
    let key = map_stratum_key(graph, &evidence.x);
    let stratum = stratum_rows(data, &key, Some(&evidence.event));
    if stratum.rows.is_empty() {
        return Err(Error::EmptyStratum {
            key: format!(
                "evidence {} with outcome in {}",
                key.describe(data.cause_names()),
                evidence.event
            ),
        });
    }
    Ok((key, stratum.rows))
}

/// Mapped-outcome arrays for the evidence units, memoized per target stratum.
struct MapCache<'d> {
    data: &'d Dataset,
    graph: Option<&'d CausalGraph>,
    method: MapMethod,
    source: EmpiricalCdf,
    eval_points: Vec<f64>,
    memo: BTreeMap<StratumKey, Rc<Vec<f64>>>,
}

impl<'d> MapCache<'d> {
    fn new(
        data: &'d Dataset,
        graph: Option<&'d CausalGraph>,
        cfg: &EstimatorConfig,
        evidence: &Evidence,
    ) -> Result<(Self, Vec<usize>)> {
        let (key, rows) = evidence_units(data, graph, evidence)?;
        // the mapping is fit on the whole source stratum, not just the rows
        // selected by the event
        let source = fit_stratum_cdf(data, &key)?;
        let eval_points: Vec<f64> = rows.iter().map(|&i| data.outcome(i)).collect();
        Ok((
            MapCache {
                data,
                graph,
                method: cfg.method,
                source,
                eval_points,
                memo: BTreeMap::new(),
            },
            rows,
        ))
    }

    fn len(&self) -> usize {
        self.eval_points.len()
    }

    fn outcomes(&self) -> &[f64] {
        &self.eval_points
    }

    fn mapped(&mut self, intervention: &CauseVector) -> Result<Rc<Vec<f64>>> {
        let key = map_stratum_key(self.graph, intervention);
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let target = fit_stratum_cdf(self.data, &key)?;
        let evaluator = MapEvaluator::new(self.source.clone(), target, self.method);
        let points = &self.eval_points;
        let values = exec::map_range(points.len(), |i| evaluator.map(points[i]));
        let rc = Rc::new(values);
        self.memo.insert(key, rc.clone());
        Ok(rc)
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Expected outcome change among the evidence units under the joint
/// intervention `x_prime`.
pub fn post_ice(
    data: &Dataset,
    graph: Option<&CausalGraph>,
    cfg: &EstimatorConfig,
    evidence: &Evidence,
    x_prime: &CauseVector,
) -> Result<EstimandResult> {
    let (mut cache, _rows) = MapCache::new(data, graph, cfg, evidence)?;
    let mapped = cache.mapped(x_prime)?;
    let deltas: Vec<f64> = mapped
        .iter()
        .zip(cache.outcomes())
        .map(|(phi, y)| phi - y)
        .collect();
    let n = cache.len();
    Ok(EstimandResult {
        kind: EstimandKind::PostIce,
        evidence: evidence.clone(),
        target: EstimandTarget::Intervention(x_prime.clone()),
        estimate: mean(&deltas),
        se: None,
        ci: None,
        evidence_n: n,
        low_support: n < LOW_SUPPORT_THRESHOLD,
    })
}

/// Mean of ITE(x_prime, x_star) over the evidence units.
pub fn ite_summary(
    data: &Dataset,
    graph: Option<&CausalGraph>,
    cfg: &EstimatorConfig,
    evidence: &Evidence,
    x_prime: &CauseVector,
    x_star: &CauseVector,
) -> Result<EstimandResult> {
    let (mut cache, _rows) = MapCache::new(data, graph, cfg, evidence)?;
    let to_prime = cache.mapped(x_prime)?;
    let to_star = cache.mapped(x_star)?;
    let deltas: Vec<f64> = to_prime
        .iter()
        .zip(to_star.iter())
        .map(|(a, b)| a - b)
        .collect();
    let n = cache.len();
    Ok(EstimandResult {
        kind: EstimandKind::IteSummary,
        evidence: evidence.clone(),
        target: EstimandTarget::Pair(x_prime.clone(), x_star.clone()),
        estimate: mean(&deltas),
        se: None,
        ci: None,
        evidence_n: n,
        low_support: n < LOW_SUPPORT_THRESHOLD,
    })
}

/// E(Y under (a_k, xk_star, d_star) | evidence), identified by mapping every
/// evidence outcome into the intervened stratum.
pub fn nested_expectation(
    data: &Dataset,
    graph: Option<&CausalGraph>,
    cfg: &EstimatorConfig,
    evidence: &Evidence,
    k: usize,
    xk_star: u8,
    d_star: &[u8],
) -> Result<NestedExpectation> {
    let p = data.p();
    if k >= p {
        return Err(Error::IndexOutOfRange {
            what: "pivot cause",
            index: k,
            len: p,
        });
    }
    if d_star.len() != p - k - 1 {
        return Err(Error::LengthMismatch {
            left: d_star.len(),
            right: p - k - 1,
        });
    }
    let (mut cache, _rows) = MapCache::new(data, graph, cfg, evidence)?;
    let intervention = evidence.x.with_pivot_and_suffix(k, xk_star, d_star);
    let mapped = cache.mapped(&intervention)?;
    Ok(NestedExpectation {
        evidence: evidence.clone(),
        intervention,
        value: mean(&mapped),
    })
}

/// Direct/indirect/total decomposition for cause `k` under the evidence.
pub fn post_mediation(
    data: &Dataset,
    graph: Option<&CausalGraph>,
    cfg: &EstimatorConfig,
    evidence: &Evidence,
    k: usize,
) -> Result<MediationEffects> {
    let p = data.p();
    if k >= p {
        return Err(Error::IndexOutOfRange {
            what: "pivot cause",
            index: k,
            len: p,
        });
    }
    let (mut cache, _rows) = MapCache::new(data, graph, cfg, evidence)?;
    let m = cache.len();
    let x = &evidence.x;
    let xk = x.bit(k);
    let flipped = 1 - xk;
    let dist = cross_world_dist(data, graph, cfg.smoothing, x, k, flipped)?;
    let clamped_ratios = dist.clamp_events.len();
    let ys = cache.outcomes().to_vec();

    let mut nde = vec![0.0f64; m];
    let mut nie = vec![0.0f64; m];
    let mut tce = vec![0.0f64; m];

    if xk == 1 {
        // switch 1 -> 0: weights over suffixes below the observed one
        for (d_star, pr) in dist.entries() {
            if *pr == 0.0 {
                continue;
            }
            let phi1 = cache.mapped(&x.with_pivot_and_suffix(k, 1, d_star))?;
            let phi0 = cache.mapped(&x.with_pivot_and_suffix(k, 0, d_star))?;
            for i in 0..m {
                nde[i] += pr * (phi1[i] - phi0[i]);
                nie[i] += pr * (ys[i] - phi1[i]);
                tce[i] += pr * (ys[i] - phi0[i]);
            }
        }
    } else {
        // switch 0 -> 1: weights over suffixes above the observed one
        let phi1_dk = cache.mapped(&x.with_pivot_and_suffix(k, 1, x.suffix(k)))?;
        for i in 0..m {
            nde[i] = phi1_dk[i] - ys[i];
        }
        for (d_star, pr) in dist.entries() {
            if *pr == 0.0 {
                continue;
            }
            let phi1 = cache.mapped(&x.with_pivot_and_suffix(k, 1, d_star))?;
            for i in 0..m {
                nie[i] += pr * (phi1[i] - phi1_dk[i]);
                tce[i] += pr * (phi1[i] - ys[i]);
            }
        }
    }

    Ok(MediationEffects {
        cause: k,
        nde: mean(&nde),
        nie: mean(&nie),
        tce: mean(&tce),
        evidence_n: m,
        low_support: m < LOW_SUPPORT_THRESHOLD,
        clamped_ratios,
    })
}

/// The full per-cause decomposition table, rows ordered by cause index; causes
/// with no path into the outcome parents keep their exact zero rows.
pub fn attribution_table(
    data: &Dataset,
    graph: Option<&CausalGraph>,
    cfg: &EstimatorConfig,
    evidence: &Evidence,
) -> Result<Vec<EstimandResult>> {
    let per_cause: Vec<Result<MediationEffects>> = exec::map_range(data.p(), |k| {
        post_mediation(data, graph, cfg, evidence, k)
    });
    let mut out = Vec::with_capacity(3 * data.p());
    for effects in per_cause {
        let effects = effects?;
        let k = effects.cause;
        for (kind, value) in [
            (EstimandKind::PostNde, effects.nde),
            (EstimandKind::PostNie, effects.nie),
            (EstimandKind::PostTce, effects.tce),
        ] {
            out.push(EstimandResult {
                kind,
                evidence: evidence.clone(),
                target: EstimandTarget::Cause(k),
                estimate: value,
                se: None,
                ci: None,
                evidence_n: effects.evidence_n,
                low_support: effects.low_support,
            });
        }
    }
    Ok(out)
}
