//! Structural-causal-model workbench: generates observational data satisfying
//! the generative assumptions by construction and computes ground-truth
//! estimand values by brute-force evaluation of potential outcomes.
//!
//! Each unit carries one uniform noise per cause and one shared outcome noise.
//! Cause potential outcomes are realized by thresholding the unit's uniform
//! against the conditional probability of its parents, which couples the
//! counterfactual worlds: raising any ancestor assignment can only raise the
//! realized cause. The outcome is a location-scale transform of the shared
//! noise, so outcome ranks are preserved across all interventions.
//!
//! The oracle here is a parallel implementation straight from the definitions;
//! it never touches the estimation modules, which makes it usable as an
//! independent reference in tests.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::domain::{CausalGraph, CauseVector, Dataset, Evidence};
use crate::error::{Error, Result};
use crate::exec;

/// Distribution of the shared outcome noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    /// Standard normal.
    Normal,
    /// Uniform on (0, 1).
    Uniform,
    /// Standard exponential.
    Exponential,
}

impl NoiseKind {
    pub fn label(&self) -> &'static str {
        match self {
            NoiseKind::Normal => "normal",
            NoiseKind::Uniform => "uniform",
            NoiseKind::Exponential => "exponential",
        }
    }
}

/// Outcome link: location and scale per outcome-parent pattern. Patterns are
/// indexed in binary order with the first listed parent as the most
/// significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeLink {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl OutcomeLink {
    /// A purely additive link with constant unit scale.
    pub fn additive(mean: Vec<f64>) -> Self {
        let scale = vec![1.0; mean.len()];
        OutcomeLink { mean, scale }
    }
}

/// Full generative specification of the simulator.
#[derive(Debug, Clone, PartialEq)]
pub struct ScmSpec {
    name: String,
    cause_names: Vec<String>,
    outcome_name: String,
    graph: CausalGraph,
    /// cpts[k][pattern] = pr(X_k = 1 | parent pattern).
    cpts: Vec<Vec<f64>>,
    link: OutcomeLink,
    noise: NoiseKind,
    allow_nonmonotone: bool,
}

fn pattern_index(values: &[u8]) -> usize {
    values.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
}

impl ScmSpec {
    /// Builds and validates a spec; conditional probability tables must be
    /// nondecreasing in every parent.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: &str,
        cause_names: Vec<String>,
        outcome_name: &str,
        graph: CausalGraph,
        cpts: Vec<Vec<f64>>,
        link: OutcomeLink,
        noise: NoiseKind,
    ) -> Result<Self> {
        Self::build(name, cause_names, outcome_name, graph, cpts, link, noise, false)
    }

    /// Same as `new` but allows non-monotone tables, for experiments that
    /// deliberately plant a violation.
    #[allow(clippy::too_many_arguments)]
    pub fn new_allowing_nonmonotone(
        name: &str,
        cause_names: Vec<String>,
        outcome_name: &str,
        graph: CausalGraph,
        cpts: Vec<Vec<f64>>,
        link: OutcomeLink,
        noise: NoiseKind,
    ) -> Result<Self> {
        Self::build(name, cause_names, outcome_name, graph, cpts, link, noise, true)
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        name: &str,
        cause_names: Vec<String>,
        outcome_name: &str,
        graph: CausalGraph,
        cpts: Vec<Vec<f64>>,
        link: OutcomeLink,
        noise: NoiseKind,
        allow_nonmonotone: bool,
    ) -> Result<Self> {
        let p = cause_names.len();
        if graph.p() != p {
            return Err(Error::InvalidSpec(format!(
                "graph covers {} causes, spec names {p}",
                graph.p()
            )));
        }
        if cpts.len() != p {
            return Err(Error::InvalidSpec(format!(
                "expected {p} conditional tables, got {}",
                cpts.len()
            )));
        }
        for (k, table) in cpts.iter().enumerate() {
            let arity = graph.parents_of_cause(k).len();
            if table.len() != 1 << arity {
                return Err(Error::InvalidSpec(format!(
                    "cause {} table has {} entries, expected {}",
                    cause_names[k],
                    table.len(),
                    1 << arity
                )));
            }
            if table.iter().any(|&q| !(0.0..=1.0).contains(&q)) {
                return Err(Error::InvalidSpec(format!(
                    "cause {} has probabilities outside [0, 1]",
                    cause_names[k]
                )));
            }
            if !allow_nonmonotone && !table_is_monotone(table, arity) {
                return Err(Error::InvalidSpec(format!(
                    "conditional table of {} decreases in a parent",
                    cause_names[k]
                )));
            }
        }
        let outcome_patterns = 1 << graph.parents_of_outcome().len();
        if link.mean.len() != outcome_patterns || link.scale.len() != outcome_patterns {
            return Err(Error::InvalidSpec(format!(
                "outcome link needs {outcome_patterns} mean/scale entries"
            )));
        }
        if link.mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidSpec("outcome means must be finite".into()));
        }
        if link.scale.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidSpec("outcome scales must be positive".into()));
        }
        Ok(ScmSpec {
            name: name.to_string(),
            cause_names,
            outcome_name: outcome_name.to_string(),
            graph,
            cpts,
            link,
            noise,
            allow_nonmonotone,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn p(&self) -> usize {
        self.cause_names.len()
    }

    pub fn cause_names(&self) -> &[String] {
        &self.cause_names
    }

    pub fn outcome_name(&self) -> &str {
        &self.outcome_name
    }

    pub fn graph(&self) -> &CausalGraph {
        &self.graph
    }

    pub fn cpts(&self) -> &[Vec<f64>] {
        &self.cpts
    }

    pub fn link(&self) -> &OutcomeLink {
        &self.link
    }

    pub fn noise(&self) -> NoiseKind {
        self.noise
    }

    pub fn allows_nonmonotone(&self) -> bool {
        self.allow_nonmonotone
    }

    /// pr(X_k = 1 | assignment); only the parents of k are read.
    pub fn cause_prob(&self, k: usize, assignment: &[u8]) -> f64 {
        let pattern: Vec<u8> = self
            .graph
            .parents_of_cause(k)
            .iter()
            .map(|&j| assignment[j])
            .collect();
        self.cpts[k][pattern_index(&pattern)]
    }

    fn outcome_pattern(&self, x: &[u8]) -> usize {
        let pattern: Vec<u8> = self
            .graph
            .parents_of_outcome()
            .iter()
            .map(|&j| x[j])
            .collect();
        pattern_index(&pattern)
    }

    pub fn outcome_mean(&self, x: &[u8]) -> f64 {
        self.link.mean[self.outcome_pattern(x)]
    }

    pub fn outcome_scale(&self, x: &[u8]) -> f64 {
        self.link.scale[self.outcome_pattern(x)]
    }

    /// Outcome value at assignment x for a unit with noise `eps`.
    pub fn outcome_value(&self, x: &[u8], eps: f64) -> f64 {
        self.outcome_mean(x) + self.outcome_scale(x) * eps
    }

    /// Five-cause network shaped like the blood-pressure example: exercise
    /// and diet drive heart disease, diet drives heartburn, heartburn and
    /// heart disease drive chest pain, and the outcome depends on exercise
    /// and heart disease only.
    pub fn hypertension_like() -> Self {
        let names = ["E", "D", "Hb", "HD", "CP"];
        ScmSpec::new(
            "hypertension-like",
            names.iter().map(|s| s.to_string()).collect(),
            "BP",
            CausalGraph::new(
                5,
                vec![vec![], vec![], vec![1], vec![0, 1], vec![2, 3]],
                vec![0, 3],
            )
            .expect("valid demo graph"),
            vec![
                vec![0.45],
                vec![0.5],
                vec![0.25, 0.55],
                vec![0.15, 0.35, 0.4, 0.7],
                vec![0.2, 0.5, 0.45, 0.8],
            ],
            OutcomeLink {
                mean: vec![120.0, 135.0, 128.0, 143.0],
                scale: vec![10.0; 4],
            },
            NoiseKind::Normal,
        )
        .expect("valid demo spec")
    }

    /// Three-cause toxicology-style network: sex and dose drive organ
    /// pathology; body weight depends on sex and pathology.
    pub fn ntp_like() -> Self {
        let names = ["Sex", "Dose", "Path"];
        ScmSpec::new(
            "ntp-like",
            names.iter().map(|s| s.to_string()).collect(),
            "Weight",
            CausalGraph::new(3, vec![vec![], vec![], vec![0, 1]], vec![0, 2])
                .expect("valid demo graph"),
            vec![vec![0.5], vec![0.5], vec![0.15, 0.5, 0.25, 0.7]],
            OutcomeLink {
                mean: vec![30.0, 24.0, 36.0, 30.0],
                scale: vec![3.0; 4],
            },
            NoiseKind::Normal,
        )
        .expect("valid demo spec")
    }

    /// Two causes in a chain with a direct edge: X1 -> X2 -> Y and X1 -> Y.
    pub fn chain_mediation() -> Self {
        ScmSpec::new(
            "chain-mediation",
            vec!["X1".into(), "X2".into()],
            "Y",
            CausalGraph::new(2, vec![vec![], vec![0]], vec![0, 1]).expect("valid demo graph"),
            vec![vec![0.5], vec![0.3, 0.7]],
            OutcomeLink {
                mean: vec![20.0, 26.0, 24.0, 30.0],
                scale: vec![2.5; 4],
            },
            NoiseKind::Normal,
        )
        .expect("valid demo spec")
    }

    /// Two independent causes with no effect on the outcome at all.
    pub fn null_model() -> Self {
        ScmSpec::new(
            "null",
            vec!["X1".into(), "X2".into()],
            "Y",
            CausalGraph::new(2, vec![vec![], vec![]], vec![0, 1]).expect("valid demo graph"),
            vec![vec![0.5], vec![0.5]],
            OutcomeLink::additive(vec![0.0; 4]),
            NoiseKind::Normal,
        )
        .expect("valid demo spec")
    }
}

fn table_is_monotone(table: &[f64], arity: usize) -> bool {
    for pattern in 0..table.len() {
        for bit in 0..arity {
            let mask = 1 << (arity - 1 - bit);
            if pattern & mask == 0 && table[pattern] > table[pattern | mask] {
                return false;
            }
        }
    }
    true
}

/// Exogenous noises of one simulated unit.
#[derive(Debug, Clone)]
struct UnitNoise {
    u: Vec<f64>,
    eps: f64,
}

/// Per-unit access to every potential outcome of the generated sample.
#[derive(Debug, Clone)]
pub struct PotentialOutcomeTable {
    spec: ScmSpec,
    units: Vec<UnitNoise>,
    realized_x: Vec<Vec<u8>>,
    realized_y: Vec<f64>,
}

impl PotentialOutcomeTable {
    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn spec(&self) -> &ScmSpec {
        &self.spec
    }

    pub fn observed_causes(&self, unit: usize) -> &[u8] {
        &self.realized_x[unit]
    }

    pub fn observed_outcome(&self, unit: usize) -> f64 {
        self.realized_y[unit]
    }

    /// Potential value of cause k under an assignment of its predecessors.
    pub fn cause_po(&self, unit: usize, k: usize, assignment: &[u8]) -> u8 {
        u8::from(self.units[unit].u[k] <= self.spec.cause_prob(k, assignment))
    }

    /// Completes a prefix assignment by realizing the remaining causes from
    /// the unit's noises.
    pub fn realize_from(&self, unit: usize, prefix: &[u8]) -> Vec<u8> {
        let mut x = prefix.to_vec();
        for k in prefix.len()..self.spec.p() {
            let bit = self.cause_po(unit, k, &x);
            x.push(bit);
        }
        x
    }

    /// D_k(prefix, pivot): downstream causes when the pivot cause is held at
    /// `pivot` and everything before it at `prefix`.
    pub fn downstream_po(&self, unit: usize, k: usize, prefix: &[u8], pivot: u8) -> Vec<u8> {
        let mut start = prefix[..k].to_vec();
        start.push(pivot);
        self.realize_from(unit, &start)[k + 1..].to_vec()
    }

    /// Y_x for this unit.
    pub fn outcome_po(&self, unit: usize, x: &[u8]) -> f64 {
        self.spec.outcome_value(x, self.units[unit].eps)
    }
}

fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ (index.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const GEN_CHUNK: usize = 1024;

fn draw_unit(spec: &ScmSpec, rng: &mut ChaCha8Rng) -> UnitNoise {
    let u: Vec<f64> = (0..spec.p()).map(|_| rng.random::<f64>()).collect();
    let eps = match spec.noise {
        NoiseKind::Normal => StandardNormal.sample(rng),
        NoiseKind::Uniform => rng.random::<f64>(),
        NoiseKind::Exponential => Exp1.sample(rng),
    };
    UnitNoise { u, eps }
}

fn realize(spec: &ScmSpec, unit: &UnitNoise) -> (Vec<u8>, f64) {
    let mut x = Vec::with_capacity(spec.p());
    for k in 0..spec.p() {
        x.push(u8::from(unit.u[k] <= spec.cause_prob(k, &x)));
    }
    let y = spec.outcome_value(&x, unit.eps);
    (x, y)
}

/// Simulates `n` units; chunked per-seed generation keeps the output
/// identical across thread counts.
pub fn generate(spec: &ScmSpec, n: usize, seed: u64) -> Result<(Dataset, PotentialOutcomeTable)> {
    if n == 0 {
        return Err(Error::InvalidSpec("cannot generate an empty sample".into()));
    }
    let chunks = n.div_ceil(GEN_CHUNK);
    let parts: Vec<Vec<UnitNoise>> = exec::map_range(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, c as u64));
        let count = GEN_CHUNK.min(n - c * GEN_CHUNK);
        (0..count).map(|_| draw_unit(spec, &mut rng)).collect()
    });
    let units: Vec<UnitNoise> = parts.into_iter().flatten().collect();
    let mut realized_x = Vec::with_capacity(n);
    let mut realized_y = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    for unit in &units {
        let (x, y) = realize(spec, unit);
        rows.push((x.clone(), y));
        realized_x.push(x);
        realized_y.push(y);
    }
    let data = Dataset::new(
        spec.cause_names.to_vec(),
        spec.outcome_name.clone(),
        rows,
    )?;
    Ok((
        data,
        PotentialOutcomeTable {
            spec: spec.clone(),
            units,
            realized_x,
            realized_y,
        },
    ))
}

/// Which ground-truth quantity the oracle evaluates.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleRequest {
    PostIce { x_prime: CauseVector },
    PostTce { cause: usize },
    PostNde { cause: usize },
    PostNie { cause: usize },
}

/// Monte-Carlo estimate of a ground-truth estimand value.
#[derive(Debug, Clone, Copy)]
pub struct OracleEstimate {
    pub value: f64,
    pub mc_se: f64,
    pub draws: usize,
    pub retained: usize,
}

/// Guard against conditioning on essentially impossible evidence.
pub const MIN_EVIDENCE_PROB: f64 = 1e-4;

#[derive(Clone, Copy, Default)]
struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

const ORACLE_CHUNK: usize = 4096;

/// Evaluates the defining conditional expectation of an estimand by filtering
/// joint potential-outcome draws on the evidence and composing the unit's
/// structural functions. No identification formulas are involved.
pub fn true_estimand(
    spec: &ScmSpec,
    request: &OracleRequest,
    evidence: &Evidence,
    draws: usize,
    seed: u64,
) -> Result<OracleEstimate> {
    let p = spec.p();
    if evidence.x.len() != p {
        return Err(Error::LengthMismatch {
            left: evidence.x.len(),
            right: p,
        });
    }
    match request {
        OracleRequest::PostIce { x_prime } => {
            if x_prime.len() != p {
                return Err(Error::LengthMismatch {
                    left: x_prime.len(),
                    right: p,
                });
            }
        }
        OracleRequest::PostTce { cause }
        | OracleRequest::PostNde { cause }
        | OracleRequest::PostNie { cause } => {
            if *cause >= p {
                return Err(Error::IndexOutOfRange {
                    what: "pivot cause",
                    index: *cause,
                    len: p,
                });
            }
        }
    }

    let chunks = draws.div_ceil(ORACLE_CHUNK);
    let partials: Vec<(KahanSum, KahanSum, usize)> = exec::map_range(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, c as u64));
        let count = ORACLE_CHUNK.min(draws - c * ORACLE_CHUNK);
        let mut sum = KahanSum::default();
        let mut sumsq = KahanSum::default();
        let mut retained = 0usize;
        for _ in 0..count {
            let unit = draw_unit(spec, &mut rng);
            let (x, y) = realize(spec, &unit);
            if x != evidence.x.bits() || !evidence.event.contains(y) {
                continue;
            }
            let delta = unit_contrast(spec, request, &unit, &x, y);
            sum.add(delta);
            sumsq.add(delta * delta);
            retained += 1;
        }
        (sum, sumsq, retained)
    });

    let mut sum = KahanSum::default();
    let mut sumsq = KahanSum::default();
    let mut retained = 0usize;
    for (s, sq, r) in partials {
        sum.add(s.value());
        sumsq.add(sq.value());
        retained += r;
    }
    let prob = retained as f64 / draws as f64;
    if prob < MIN_EVIDENCE_PROB {
        return Err(Error::UnreliableOracle {
            prob,
            min: MIN_EVIDENCE_PROB,
        });
    }
    let mean = sum.value() / retained as f64;
    let var = if retained > 1 {
        ((sumsq.value() - retained as f64 * mean * mean) / (retained as f64 - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(OracleEstimate {
        value: mean,
        mc_se: (var / retained as f64).sqrt(),
        draws,
        retained,
    })
}

/// Per-unit potential-outcome contrast for one retained draw.
fn unit_contrast(
    spec: &ScmSpec,
    request: &OracleRequest,
    unit: &UnitNoise,
    x: &[u8],
    y: f64,
) -> f64 {
    let downstream = |k: usize, pivot: u8| -> Vec<u8> {
        let mut world = x[..k].to_vec();
        world.push(pivot);
        for s in k + 1..spec.p() {
            world.push(u8::from(unit.u[s] <= spec.cause_prob(s, &world)));
        }
        world
    };
    match request {
        OracleRequest::PostIce { x_prime } => spec.outcome_value(x_prime.bits(), unit.eps) - y,
        OracleRequest::PostTce { cause } => {
            let hi = downstream(*cause, 1);
            let lo = downstream(*cause, 0);
            spec.outcome_value(&hi, unit.eps) - spec.outcome_value(&lo, unit.eps)
        }
        OracleRequest::PostNde { cause } => {
            let mut lo = downstream(*cause, 0);
            let y_lo = spec.outcome_value(&lo, unit.eps);
            lo[*cause] = 1;
            spec.outcome_value(&lo, unit.eps) - y_lo
        }
        OracleRequest::PostNie { cause } => {
            let hi = downstream(*cause, 1);
            let mut lo = downstream(*cause, 0);
            lo[*cause] = 1;
            spec.outcome_value(&hi, unit.eps) - spec.outcome_value(&lo, unit.eps)
        }
    }
}
