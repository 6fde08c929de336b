//! Estimators checked against quantities read directly off the simulator's
//! potential-outcome tables: the same generated units, but with cross-world
//! information the estimators never see.

use std::collections::BTreeMap;

use postcause::{
    cross_world_dist, generate, nested_expectation, post_mediation, ratio_r0, true_estimand,
    CausalGraph, CauseVector, Dataset, EstimatorConfig, Evidence, OracleRequest, OutcomeEvent,
    OutcomeLink, ScmSpec, StratumKey,
};

fn cv(bits: &[u8]) -> CauseVector {
    CauseVector::new(bits.to_vec()).unwrap()
}

#[test]
fn ratio_estimate_matches_the_generating_tables() {
    // three causes in a chain; the saturated R0 at s=2 given evidence (1,1,1)
    // reduces to pr(X3=1 | X1=1, X2 candidate) ratios, read off the tables
    let spec = ScmSpec::new(
        "chain3",
        vec!["X1".into(), "X2".into(), "X3".into()],
        "Y",
        CausalGraph::new(3, vec![vec![], vec![0], vec![1]], vec![2]).unwrap(),
        vec![vec![0.5], vec![0.3, 0.6], vec![0.35, 0.65]],
        OutcomeLink::additive(vec![0.0, 1.0]),
        postcause::NoiseKind::Normal,
    )
    .unwrap();
    let (data, _) = generate(&spec, 20_000, 101).unwrap();
    let x = cv(&[1, 1, 1]);

    // eq-style reduction with the true graph: R0 for s=3 conditions on X2 only
    let term = ratio_r0(&data, Some(spec.graph()), None, &x, 0, 2, &[1]).unwrap();
    // candidate world keeps X2=1, observed world has X2=1: true ratio is 1
    assert!((term.raw - 1.0).abs() < 0.02, "raw = {}", term.raw);

    let term = ratio_r0(&data, Some(spec.graph()), None, &x, 0, 2, &[0]).unwrap();
    // candidate world sets X2=0: true ratio 0.35 / 0.65
    assert!(
        (term.raw - 0.35 / 0.65).abs() < 0.02,
        "raw = {}",
        term.raw
    );

    // saturated version for s=2: pr(X2=1 | X1=0) / pr(X2=1 | X1=1) = 0.3/0.6
    let term = ratio_r0(&data, None, None, &x, 0, 1, &[]).unwrap();
    assert!((term.raw - 0.5).abs() < 0.02, "raw = {}", term.raw);
}

#[test]
fn cross_world_distribution_matches_brute_force_enumeration() {
    let spec = ScmSpec::hypertension_like();
    let (data, table) = generate(&spec, 50_000, 202).unwrap();
    let x = cv(&[1, 1, 1, 1, 1]);
    let k = 0;

    // brute force: among units with X = x, realize D_k(a_k, 0) from each
    // unit's structural functions and tabulate
    let mut counts: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    let mut stratum = 0usize;
    for i in 0..table.len() {
        if table.observed_causes(i) != x.bits() {
            continue;
        }
        stratum += 1;
        let d = table.downstream_po(i, k, x.bits(), 0);
        *counts.entry(d).or_default() += 1;
    }
    assert!(stratum > 2_000, "evidence stratum too small: {stratum}");

    // the parent-set reduction estimates one ratio per free coordinate; the
    // saturated product stacks four estimated ratios, so its sampling error
    // at this n is a few times larger
    for (graph, tol) in [(Some(spec.graph()), 0.01), (None, 0.05)] {
        let dist = cross_world_dist(&data, graph, None, &x, k, 0).unwrap();
        for (suffix, prob) in dist.entries() {
            let brute = counts.get(suffix).copied().unwrap_or(0) as f64 / stratum as f64;
            assert!(
                (prob - brute).abs() < tol,
                "graph={} suffix {suffix:?}: est {prob} vs brute {brute}",
                graph.is_some()
            );
        }
    }
}

#[test]
fn nested_expectation_matches_the_potential_outcome_mean() {
    let spec = ScmSpec::chain_mediation();
    let (data, table) = generate(&spec, 40_000, 303).unwrap();
    let evidence = Evidence::new(cv(&[1, 1]), OutcomeEvent::greater_than(27.0));
    let cfg = EstimatorConfig::default();

    // estimator: mean of mapped outcomes for the intervention (X1=1, X2=0)
    let ne = nested_expectation(&data, None, &cfg, &evidence, 0, 1, &[0]).unwrap();

    // brute force: E(Y_{(1,0)} | X=(1,1), Y > 27) from the tables
    let mut sum = 0.0;
    let mut m = 0usize;
    for i in 0..table.len() {
        if table.observed_causes(i) == [1, 1] && table.observed_outcome(i) > 27.0 {
            sum += table.outcome_po(i, &[1, 0]);
            m += 1;
        }
    }
    let brute = sum / m as f64;
    let sd = 2.5;
    assert!(
        (ne.value - brute).abs() < 0.05 * sd,
        "estimate {} vs brute {brute}",
        ne.value
    );
}

#[test]
fn mediation_tracks_the_oracle_on_the_chain_model() {
    let spec = ScmSpec::chain_mediation();
    let (data, _) = generate(&spec, 40_000, 404).unwrap();
    let evidence = Evidence::new(cv(&[1, 1]), OutcomeEvent::greater_than(27.0));
    let cfg = EstimatorConfig::default();
    for k in 0..2 {
        let med = post_mediation(&data, None, &cfg, &evidence, k).unwrap();
        for (label, est, request) in [
            ("nde", med.nde, OracleRequest::PostNde { cause: k }),
            ("nie", med.nie, OracleRequest::PostNie { cause: k }),
            ("tce", med.tce, OracleRequest::PostTce { cause: k }),
        ] {
            let truth = true_estimand(&spec, &request, &evidence, 400_000, 505 + k as u64).unwrap();
            assert!(
                (est - truth.value).abs() < 0.15 + 3.0 * truth.mc_se,
                "k={k} {label}: est {est} vs truth {}",
                truth.value
            );
        }
    }
}

#[test]
fn evidence_strata_follow_corollary_style_projection() {
    // with a graph, evidence patterns sharing the outcome-parent projection
    // give identical estimates
    let spec = ScmSpec::hypertension_like();
    let (data, _) = generate(&spec, 30_000, 606).unwrap();
    let cfg = EstimatorConfig::default();
    let event = OutcomeEvent::greater_than(140.0);
    let a = Evidence::new(cv(&[1, 1, 1, 1, 1]), event.clone());
    let b = Evidence::new(cv(&[1, 0, 0, 1, 0]), event.clone());
    let x_prime = cv(&[0, 0, 0, 0, 0]);
    let ra = postcause::post_ice(&data, Some(spec.graph()), &cfg, &a, &x_prime).unwrap();
    let rb = postcause::post_ice(&data, Some(spec.graph()), &cfg, &b, &x_prime).unwrap();
    assert_eq!(ra.estimate.to_bits(), rb.estimate.to_bits());
    assert_eq!(ra.evidence_n, rb.evidence_n);

    // sanity: the projected stratum is what the estimate conditions on
    let key = StratumKey::projection(&a.x, spec.graph().parents_of_outcome());
    let rows = postcause::stratum_rows(&data, &key, Some(&event));
    assert_eq!(ra.evidence_n, rows.rows.len());
}

#[test]
fn plugin_and_gridsearch_agree_on_generated_data() {
    let spec = ScmSpec::ntp_like();
    let (data, _) = generate(&spec, 4_000, 707).unwrap();
    let x = cv(&[1, 1, 1]);
    let x_prime = cv(&[0, 1, 0]);
    let plug = postcause::map_for_evidence(
        &data,
        Some(spec.graph()),
        &x,
        &x_prime,
        postcause::MapMethod::PlugIn,
    )
    .unwrap();
    let grid = postcause::map_for_evidence(
        &data,
        Some(spec.graph()),
        &x,
        &x_prime,
        postcause::MapMethod::GridSearch,
    )
    .unwrap();
    let target_rows = postcause::stratum_rows(&data, &grid.target, None);
    let mut target_y: Vec<f64> = target_rows.rows.iter().map(|&i| data.outcome(i)).collect();
    target_y.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let max_gap = target_y
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    for (p, g) in plug.pairs.iter().zip(grid.pairs.iter()) {
        assert_eq!(p.0, g.0);
        assert!((p.1 - g.1).abs() <= max_gap + 1e-12);
    }
}

#[test]
fn bootstrap_dropped_replicates_are_counted() {
    // a tiny evidence stratum empties in some stratified resamples; the
    // summary keeps track without failing outright
    let spec = ScmSpec::chain_mediation();
    let (data, _) = generate(&spec, 400, 808).unwrap();
    let stratum = postcause::stratum_rows(
        &data,
        &StratumKey::Full(cv(&[1, 1])),
        None,
    );
    let mut ys: Vec<f64> = stratum.rows.iter().map(|&i| data.outcome(i)).collect();
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // threshold keeps ~8 units so most replicates retain at least one
    let threshold = ys[ys.len() - 8];
    let evidence = Evidence::new(cv(&[1, 1]), OutcomeEvent::greater_than(threshold));
    let cfg = EstimatorConfig::default();
    let boot = postcause::BootstrapConfig {
        replicates: 100,
        seed: 9,
        level: 0.95,
    };
    let summary = postcause::bootstrap(&data, &boot, |d: &Dataset| {
        postcause::post_ice(d, None, &cfg, &evidence, &cv(&[0, 0])).map(|r| r.estimate)
    })
    .unwrap();
    assert_eq!(summary.used + summary.dropped, 100);
    assert!(summary.se > 0.0);
}
