//! Cross-world mediator distributions and the monotonicity falsification
//! check.
//!
//! For evidence x = (a_k, x_k, d_k) and an intervention flipping the pivot
//! cause, the distribution of the downstream causes D_k under the intervened
//! world is a product over coordinates s > k. Each factor is built from a
//! ratio of conditional frequencies:
//!
//! * pivot 1 -> 0, candidate d* below d_k:
//!   factor_s = (1 - d*_s) + (2 d*_s - 1) x_s R0_s with
//!   R0_s = pr(X_s=1 | a_k, 0, d*-prefix) / pr(X_s=1 | a_k, 1, observed prefix);
//! * pivot 0 -> 1, candidate d* above d_k:
//!   factor_s = d*_s + (1 - 2 d*_s)(1 - x_s) R1_s with
//!   R1_s = pr(X_s=0 | a_k, 1, d*-prefix) / pr(X_s=0 | a_k, 0, observed prefix).
//!
//! With a known graph the conditioning strata shrink to each cause's parent
//! set; the ratios are built from the same conditional rates so that they
//! coincide cell-for-cell with the saturated version when the parent sets are
//! the full-order defaults. Raw ratios above 1 (possible in finite samples
//! even when monotonicity holds) are clamped to 1 and recorded, which keeps
//! every per-coordinate factor pair summing to one and the whole product
//! telescoping to a proper distribution.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::domain::{stratum_rows, CausalGraph, CauseVector, Dataset, StratumKey};
use crate::error::{Error, Result};

/// One estimated frequency cell pr(X_s = value | stratum).
#[derive(Debug, Clone)]
pub struct CellCount {
    pub key: StratumKey,
    pub hits: usize,
    pub total: usize,
}

/// A single ratio term of the product formula.
#[derive(Debug, Clone)]
pub struct RatioTerm {
    /// Coordinate s the term belongs to (0-based).
    pub index: usize,
    pub raw: f64,
    /// Raw value clamped to [0, 1].
    pub value: f64,
    pub clamped: bool,
    pub numerator: CellCount,
    pub denominator: CellCount,
}

/// Distribution of the downstream suffix under the flipped pivot, restricted
/// to the partial-order cone of the observed suffix.
#[derive(Debug, Clone)]
pub struct CrossWorldDist {
    pub anchor: CauseVector,
    pub pivot: usize,
    pub intervened: u8,
    /// (suffix, probability) in lexicographic suffix order.
    entries: Vec<(Vec<u8>, f64)>,
    /// Ratio terms whose raw value exceeded 1 before clamping.
    pub clamp_events: Vec<RatioTerm>,
}

impl CrossWorldDist {
    pub fn entries(&self) -> &[(Vec<u8>, f64)] {
        &self.entries
    }

    /// Probability of a suffix; exactly 0 outside the support cone.
    pub fn prob(&self, suffix: &[u8]) -> f64 {
        self.entries
            .binary_search_by(|(s, _)| s.as_slice().cmp(suffix))
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }
}

fn conditional_rate(
    data: &Dataset,
    key: &StratumKey,
    s: usize,
    value: u8,
    smoothing: Option<f64>,
) -> Result<(f64, CellCount)> {
    let stratum = stratum_rows(data, key, None);
    let total = stratum.rows.len();
    if total == 0 && smoothing.is_none() {
        return Err(Error::EmptyStratum {
            key: key.describe(data.cause_names()),
        });
    }
    let hits = stratum
        .rows
        .iter()
        .filter(|&&i| data.row(i)[s] == value)
        .count();
    let alpha = smoothing.unwrap_or(0.0);
    let rate = (hits as f64 + alpha) / (total as f64 + 2.0 * alpha);
    Ok((
        rate,
        CellCount {
            key: key.clone(),
            hits,
            total,
        },
    ))
}

/// Conditioning key for coordinate `s` given an assignment of all coordinates
/// before it; reduced to Pa_s when a graph is supplied.
fn world_key(graph: Option<&CausalGraph>, assignment: &[u8], s: usize) -> StratumKey {
    match graph {
        Some(g) => StratumKey::partial(
            g.parents_of_cause(s)
                .iter()
                .map(|&j| (j, assignment[j]))
                .collect(),
        ),
        None => StratumKey::partial((0..s).map(|j| (j, assignment[j])).collect()),
    }
}

fn ratio_term(
    data: &Dataset,
    graph: Option<&CausalGraph>,
    smoothing: Option<f64>,
    x: &CauseVector,
    k: usize,
    s: usize,
    candidate_prefix: &[u8],
    pivot_to: u8,
    rate_of: u8,
) -> Result<RatioTerm> {
    debug_assert_eq!(candidate_prefix.len(), s - k - 1);
    // counterfactual world: observed prefix, flipped pivot, candidate values
    let mut star = x.bits()[..s].to_vec();
    star[k] = pivot_to;
    star[k + 1..s].copy_from_slice(candidate_prefix);
    let num_key = world_key(graph, &star, s);
    let den_key = world_key(graph, x.bits(), s);

    let (num_rate, numerator) = conditional_rate(data, &num_key, s, rate_of, smoothing)?;
    let (den_rate, denominator) = conditional_rate(data, &den_key, s, rate_of, smoothing)?;
    if den_rate == 0.0 {
        return Err(Error::Positivity {
            cell: format!(
                "pr({}={} | {})",
                data.cause_names()[s],
                rate_of,
                den_key.describe(data.cause_names())
            ),
        });
    }
    let raw = num_rate / den_rate;
    let clamped = raw > 1.0;
    Ok(RatioTerm {
        index: s,
        raw,
        value: raw.min(1.0),
        clamped,
        numerator,
        denominator,
    })
}

/// R0_s for the pivot-to-0 product (rates of X_s = 1).
pub fn ratio_r0(
    data: &Dataset,
    graph: Option<&CausalGraph>,
    smoothing: Option<f64>,
    x: &CauseVector,
    k: usize,
    s: usize,
    candidate_prefix: &[u8],
) -> Result<RatioTerm> {
    ratio_term(data, graph, smoothing, x, k, s, candidate_prefix, 0, 1)
}

/// R1_s for the pivot-to-1 product (rates of X_s = 0).
pub fn ratio_r1(
    data: &Dataset,
    graph: Option<&CausalGraph>,
    smoothing: Option<f64>,
    x: &CauseVector,
    k: usize,
    s: usize,
    candidate_prefix: &[u8],
) -> Result<RatioTerm> {
    ratio_term(data, graph, smoothing, x, k, s, candidate_prefix, 1, 0)
}

/// Distribution of D_k under pivot value `xk_prime`, given evidence pattern x.
/// Flipping to the observed value is a point mass at the observed suffix.
pub fn cross_world_dist(
    data: &Dataset,
    graph: Option<&CausalGraph>,
    smoothing: Option<f64>,
    x: &CauseVector,
    k: usize,
    xk_prime: u8,
) -> Result<CrossWorldDist> {
    let p = x.len();
    if k >= p {
        return Err(Error::IndexOutOfRange {
            what: "pivot cause",
            index: k,
            len: p,
        });
    }
    if xk_prime > 1 {
        return Err(Error::NonBinaryBit { value: xk_prime });
    }
    let suffix_len = p - k - 1;
    if suffix_len > crate::domain::MAX_SUFFIX_LEN {
        return Err(Error::SuffixTooLong {
            len: suffix_len,
            max: crate::domain::MAX_SUFFIX_LEN,
        });
    }
    let xk = x.bit(k);
    if xk_prime == xk {
        return Ok(CrossWorldDist {
            anchor: x.clone(),
            pivot: k,
            intervened: xk_prime,
            entries: vec![(x.suffix(k).to_vec(), 1.0)],
            clamp_events: Vec::new(),
        });
    }

    let mut entries = Vec::new();
    let mut clamp_events = Vec::new();
    let mut candidate = Vec::with_capacity(suffix_len);
    descend(
        data,
        graph,
        smoothing,
        x,
        k,
        xk_prime,
        k + 1,
        1.0,
        &mut candidate,
        &mut entries,
        &mut clamp_events,
    )?;
    Ok(CrossWorldDist {
        anchor: x.clone(),
        pivot: k,
        intervened: xk_prime,
        entries,
        clamp_events,
    })
}

#[allow(clippy::too_many_arguments)]
fn descend(
    data: &Dataset,
    graph: Option<&CausalGraph>,
    smoothing: Option<f64>,
    x: &CauseVector,
    k: usize,
    xk_prime: u8,
    s: usize,
    prob: f64,
    candidate: &mut Vec<u8>,
    entries: &mut Vec<(Vec<u8>, f64)>,
    clamp_events: &mut Vec<RatioTerm>,
) -> Result<()> {
    if s == x.len() {
        entries.push((candidate.clone(), prob));
        return Ok(());
    }
    let xs = x.bit(s);
    // fixed coordinate: the cone pins it to the observed value with factor 1
    let fixed = (xk_prime == 0 && xs == 0) || (xk_prime == 1 && xs == 1);
    if fixed {
        candidate.push(xs);
        descend(
            data, graph, smoothing, x, k, xk_prime, s + 1, prob, candidate, entries, clamp_events,
        )?;
        candidate.pop();
        return Ok(());
    }
    // free coordinate: probability of following the observed value is the
    // (clamped) ratio; zero-probability branches are extended without touching
    // the data so dead cells cannot raise spurious positivity errors
    let ratio = if prob > 0.0 {
        let term = if xk_prime == 0 {
            ratio_r0(data, graph, smoothing, x, k, s, candidate)?
        } else {
            ratio_r1(data, graph, smoothing, x, k, s, candidate)?
        };
        let value = term.value;
        if term.clamped {
            clamp_events.push(term);
        }
        value
    } else {
        0.0
    };
    // lexicographic order: 0-branch first
    let (prob_zero, prob_one) = if xk_prime == 0 {
        (prob * (1.0 - ratio), prob * ratio)
    } else {
        (prob * ratio, prob * (1.0 - ratio))
    };
    for (bit, branch_prob) in [(0u8, prob_zero), (1u8, prob_one)] {
        candidate.push(bit);
        descend(
            data,
            graph,
            smoothing,
            x,
            k,
            xk_prime,
            s + 1,
            branch_prob,
            candidate,
            entries,
            clamp_events,
        )?;
        candidate.pop();
    }
    Ok(())
}

/// Configuration for the monotonicity falsification check.
#[derive(Debug, Clone)]
pub struct FalsificationConfig {
    pub bootstrap_replicates: usize,
    pub seed: u64,
    pub z_threshold: f64,
}

impl Default for FalsificationConfig {
    fn default() -> Self {
        FalsificationConfig {
            bootstrap_replicates: 200,
            seed: 0,
            z_threshold: 3.0,
        }
    }
}

/// One comparable stratum pair for one cause.
#[derive(Debug, Clone)]
pub struct MonotonicityCheck {
    pub cause: usize,
    pub lower_key: StratumKey,
    pub upper_key: StratumKey,
    pub lower_rate: f64,
    pub upper_rate: f64,
    /// upper_rate - lower_rate; negative values run against monotonicity.
    pub diff: f64,
    pub se: f64,
    pub z: f64,
    pub violation: bool,
}

/// All comparable pairs with their z-scores.
#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    pub checks: Vec<MonotonicityCheck>,
    pub z_threshold: f64,
}

impl MonotonicityReport {
    pub fn negative_pairs(&self) -> Vec<&MonotonicityCheck> {
        self.checks.iter().filter(|c| c.diff < 0.0).collect()
    }

    pub fn violations(&self) -> Vec<&MonotonicityCheck> {
        self.checks.iter().filter(|c| c.violation).collect()
    }

    pub fn is_clean(&self) -> bool {
        self.checks.iter().all(|c| !c.violation)
    }
}

/// Tests the observable restriction that the rate of each cause never
/// decreases when its conditioning pattern moves up the partial order. The
/// pairs compared are the observed conditioning patterns (full prefixes, or
/// parent sets when a graph is supplied).
pub fn falsify_monotonicity(
    data: &Dataset,
    graph: Option<&CausalGraph>,
    config: &FalsificationConfig,
) -> MonotonicityReport {
    let p = data.p();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut checks = Vec::new();
    for s in 0..p {
        let cond: Vec<usize> = match graph {
            Some(g) => g.parents_of_cause(s).to_vec(),
            None => (0..s).collect(),
        };
        if cond.is_empty() {
            continue;
        }
        // bucket rows by conditioning pattern
        let mut buckets: BTreeMap<Vec<u8>, (usize, usize)> = BTreeMap::new();
        for i in 0..data.n() {
            let row = data.row(i);
            let pattern: Vec<u8> = cond.iter().map(|&j| row[j]).collect();
            let entry = buckets.entry(pattern).or_insert((0, 0));
            entry.0 += usize::from(row[s] == 1);
            entry.1 += 1;
        }
        let patterns: Vec<(&Vec<u8>, &(usize, usize))> = buckets.iter().collect();
        for (lo_pat, &(lo_hits, lo_n)) in &patterns {
            for (hi_pat, &(hi_hits, hi_n)) in &patterns {
                if lo_pat == hi_pat || !crate::domain::slice_leq(lo_pat, hi_pat) {
                    continue;
                }
                let lower_rate = lo_hits as f64 / lo_n as f64;
                let upper_rate = hi_hits as f64 / hi_n as f64;
                let diff = upper_rate - lower_rate;
                let se = pair_bootstrap_se(
                    &mut rng,
                    lower_rate,
                    lo_n,
                    upper_rate,
                    hi_n,
                    config.bootstrap_replicates,
                );
                let z = if se > 0.0 {
                    diff / se
                } else if diff == 0.0 {
                    0.0
                } else {
                    diff.signum() * f64::INFINITY
                };
                let key = |pat: &[u8]| {
                    StratumKey::partial(cond.iter().copied().zip(pat.iter().copied()).collect())
                };
                checks.push(MonotonicityCheck {
                    cause: s,
                    lower_key: key(lo_pat),
                    upper_key: key(hi_pat),
                    lower_rate,
                    upper_rate,
                    diff,
                    se,
                    z,
                    violation: z < -config.z_threshold,
                });
            }
        }
    }
    MonotonicityReport {
        checks,
        z_threshold: config.z_threshold,
    }
}

fn pair_bootstrap_se(
    rng: &mut ChaCha8Rng,
    lower_rate: f64,
    lower_n: usize,
    upper_rate: f64,
    upper_n: usize,
    replicates: usize,
) -> f64 {
    // resampling indicator vectors within each stratum is a binomial draw
    let lo = Binomial::new(lower_n as u64, lower_rate).expect("valid rate");
    let hi = Binomial::new(upper_n as u64, upper_rate).expect("valid rate");
    let diffs: Vec<f64> = (0..replicates)
        .map(|_| {
            let a = hi.sample(rng) as f64 / upper_n as f64;
            let b = lo.sample(rng) as f64 / lower_n as f64;
            a - b
        })
        .collect();
    let mean = diffs.iter().sum::<f64>() / replicates as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>()
        / (replicates.saturating_sub(1)) as f64;
    var.sqrt()
}
