//! Acceptance suite: every release criterion as one test printing a pass/fail
//! line (run with `--nocapture` to see the lines for passing criteria).

use postcause::{
    analytic_map_variance, attribution_table, bootstrap, bootstrap_vec, cross_world_dist,
    falsify_monotonicity, generate, map_for_evidence, map_plugin, post_ice, post_mediation,
    stratum_rows, BootstrapConfig, CausalGraph, CauseVector, Dataset, EmpiricalCdf,
    EstimatorConfig, Evidence, FalsificationConfig, MapMethod, OracleRequest, OutcomeEvent,
    OutcomeLink, ScmSpec, StratumKey,
};

fn cv(bits: &[u8]) -> CauseVector {
    CauseVector::new(bits.to_vec()).unwrap()
}

fn verdict(name: &str, pass: bool, detail: &str) {
    println!(
        "acceptance [{name}]: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion '{name}' failed: {detail}");
}

/// Demo setups: spec, whether estimation uses the graph, two evidence
/// patterns and the shared event.
fn demo_setups() -> Vec<(ScmSpec, bool, Vec<Vec<u8>>, OutcomeEvent)> {
    vec![
        (
            ScmSpec::hypertension_like(),
            true,
            vec![vec![1, 1, 1, 1, 1], vec![1, 1, 1, 0, 1]],
            OutcomeEvent::greater_than(140.0),
        ),
        (
            ScmSpec::ntp_like(),
            true,
            vec![vec![1, 1, 1], vec![0, 1, 1]],
            OutcomeEvent::less_than(27.0),
        ),
        (
            ScmSpec::chain_mediation(),
            false,
            vec![vec![1, 1], vec![0, 1]],
            OutcomeEvent::greater_than(27.0),
        ),
    ]
}

/// Two independent causes with an additive outcome: intervening
/// (1,1) -> (0,0) shifts every unit by exactly -12.
fn location_shift_spec() -> ScmSpec {
    ScmSpec::new(
        "location-shift",
        vec!["X1".into(), "X2".into()],
        "Y",
        CausalGraph::new(2, vec![vec![], vec![]], vec![0, 1]).unwrap(),
        vec![vec![0.5], vec![0.5]],
        OutcomeLink {
            mean: vec![100.0, 107.0, 105.0, 112.0],
            scale: vec![10.0; 4],
        },
        postcause::NoiseKind::Normal,
    )
    .unwrap()
}

#[test]
fn criterion_01_decomposition_identity() {
    let cfg = EstimatorConfig::default();
    let mut worst = 0.0f64;
    for (spec, use_graph, evidences, event) in demo_setups() {
        let (data, _) = generate(&spec, 5_000, 11).unwrap();
        let graph = use_graph.then(|| spec.graph());
        for bits in evidences {
            let evidence = Evidence::new(cv(&bits), event.clone());
            for k in 0..spec.p() {
                let med = post_mediation(&data, graph, &cfg, &evidence, k).unwrap();
                worst = worst.max((med.tce - med.nde - med.nie).abs());
            }
        }
    }
    verdict(
        "decomposition identity",
        worst <= 1e-10,
        &format!("max |tce - nde - nie| = {worst:.3e}"),
    );
}

#[test]
fn criterion_02_post_ice_oracle_and_coverage() {
    let spec = location_shift_spec();
    let truth = -12.0;
    let cfg = EstimatorConfig::default();
    let event = OutcomeEvent::greater_than(110.0);
    let evidence = Evidence::new(cv(&[1, 1]), event);
    let x_prime = cv(&[0, 0]);

    // point accuracy at ~5000 per stratum
    let (data, _) = generate(&spec, 20_000, 21).unwrap();
    let point = post_ice(&data, None, &cfg, &evidence, &x_prime)
        .unwrap()
        .estimate;
    let point_ok = (point - truth).abs() <= 0.05 * truth.abs();

    // interval coverage across fresh datasets at n = 2000
    let mut covered = 0;
    let reps = 100;
    for rep in 0..reps {
        let (data, _) = generate(&spec, 2_000, 3_000 + rep).unwrap();
        let boot = BootstrapConfig {
            replicates: 500,
            seed: 7_000 + rep,
            level: 0.95,
        };
        let summary = bootstrap(&data, &boot, |d: &Dataset| {
            post_ice(d, None, &cfg, &evidence, &x_prime).map(|r| r.estimate)
        })
        .unwrap();
        if summary.ci.0 <= truth && truth <= summary.ci.1 {
            covered += 1;
        }
    }
    verdict(
        "post-ice oracle equivalence",
        point_ok && covered >= 90,
        &format!("point {point:.3} vs {truth} ; coverage {covered}/{reps}"),
    );
}

#[test]
fn criterion_03_mediation_oracle_equivalence() {
    let cfg = EstimatorConfig::default();
    let boot_base = BootstrapConfig {
        replicates: 200,
        seed: 0,
        level: 0.95,
    };
    let mut worst_ratio = 0.0f64;
    let mut detail = String::new();
    let setups = [
        (ScmSpec::chain_mediation(), false, vec![vec![1, 1], vec![0, 1]],
         OutcomeEvent::greater_than(27.0)),
        (ScmSpec::hypertension_like(), true,
         vec![vec![1, 1, 1, 1, 1], vec![1, 1, 1, 0, 1]],
         OutcomeEvent::greater_than(140.0)),
    ];
    for (si, (spec, use_graph, evidences, event)) in setups.into_iter().enumerate() {
        let (data, _) = generate(&spec, 40_000, 31 + si as u64).unwrap();
        let graph = use_graph.then(|| spec.graph());
        for (ei, bits) in evidences.into_iter().enumerate() {
            let evidence = Evidence::new(cv(&bits), event.clone());
            let boot = BootstrapConfig {
                seed: 100 * si as u64 + ei as u64,
                ..boot_base
            };
            let summaries = bootstrap_vec(&data, &boot, |d: &Dataset| {
                attribution_table(d, graph, &cfg, &evidence)
                    .map(|rows| rows.iter().map(|r| r.estimate).collect())
            })
            .unwrap();
            for k in 0..spec.p() {
                let requests = [
                    OracleRequest::PostNde { cause: k },
                    OracleRequest::PostNie { cause: k },
                    OracleRequest::PostTce { cause: k },
                ];
                for (j, request) in requests.iter().enumerate() {
                    let summary = &summaries[3 * k + j];
                    let truth = postcause::true_estimand(
                        &spec,
                        request,
                        &evidence,
                        1_000_000,
                        9_000 + (si * 100 + ei * 10 + k * 3 + j) as u64,
                    )
                    .unwrap();
                    let gap = (summary.point - truth.value).abs();
                    let band = 3.0 * summary.se + 3.0 * truth.mc_se;
                    if gap > 0.0 {
                        let ratio = if band > 0.0 { gap / band } else { f64::INFINITY };
                        if ratio > worst_ratio {
                            worst_ratio = ratio;
                            detail = format!(
                                "{} ev{} k{} {:?}: est {:.3} truth {:.3} band {:.3}",
                                spec.name(), ei, k, request, summary.point, truth.value, band
                            );
                        }
                    } else if band == 0.0 && gap > 0.0 {
                        worst_ratio = f64::INFINITY;
                    }
                }
            }
        }
    }
    verdict(
        "mediation oracle equivalence",
        worst_ratio <= 1.0,
        &format!("worst |gap|/band = {worst_ratio:.2} at {detail}"),
    );
}

#[test]
fn criterion_04_map_consistency_rate() {
    // additive single-cause model; phi(y) = y + 2
    let spec = ScmSpec::new(
        "additive",
        vec!["X1".into()],
        "Y",
        CausalGraph::new(1, vec![vec![]], vec![0]).unwrap(),
        vec![vec![0.5]],
        OutcomeLink {
            mean: vec![0.0, 2.0],
            scale: vec![1.0, 1.0],
        },
        postcause::NoiseKind::Normal,
    )
    .unwrap();
    let sizes = [500usize, 2_000, 8_000];
    let reps = 20;
    let mut mean_sup = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let mut total = 0.0;
        for rep in 0..reps {
            let (data, _) = generate(&spec, n, 41 + (i * reps + rep) as u64).unwrap();
            let map = map_for_evidence(&data, None, &cv(&[0]), &cv(&[1]), MapMethod::PlugIn)
                .unwrap();
            // sup over the inner 90% of the source support, located by the
            // true cdf of the source stratum (standard normal)
            let sup = map
                .pairs
                .iter()
                .filter(|(y, _)| {
                    let u = normal_cdf(*y);
                    (0.05..=0.95).contains(&u)
                })
                .map(|(y, phi)| (phi - (y + 2.0)).abs())
                .fold(0.0f64, f64::max);
            total += sup;
        }
        mean_sup.push(total / reps as f64);
    }
    // least-squares slope of log(err) on log(n)
    let xs: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = mean_sup.iter().map(|e| e.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / xs.len() as f64;
    let ybar = ys.iter().sum::<f64>() / ys.len() as f64;
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum::<f64>()
        / xs.iter().map(|x| (x - xbar).powi(2)).sum::<f64>();
    verdict(
        "map consistency rate",
        (slope - (-0.5)).abs() <= 0.15,
        &format!("fitted log-log slope {slope:.3}, sup-errors {mean_sup:?}"),
    );
}

fn normal_cdf(z: f64) -> f64 {
    // Abramowitz-Stegun style erf approximation, plenty for locating the
    // inner 90% band
    let t = 1.0 / (1.0 + 0.2316419 * z.abs());
    let poly = t
        * (0.319381530
            + t * (-0.356563782 + t * (1.781477937 + t * (-1.821255978 + t * 1.330274429))));
    let tail = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt() * poly;
    if z >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

#[test]
fn criterion_05_method_agreement() {
    let mut worst = 0.0f64;
    for (spec, use_graph, evidences, _) in demo_setups() {
        let (data, _) = generate(&spec, 2_000, 51).unwrap();
        let graph = use_graph.then(|| spec.graph());
        for bits in &evidences {
            let x = cv(bits);
            for other in &evidences {
                let x_prime = cv(other);
                let plug = map_for_evidence(&data, graph, &x, &x_prime, MapMethod::PlugIn).unwrap();
                let grid =
                    map_for_evidence(&data, graph, &x, &x_prime, MapMethod::GridSearch).unwrap();
                let rows = stratum_rows(&data, &plug.target, None);
                let mut target_y: Vec<f64> =
                    rows.rows.iter().map(|&i| data.outcome(i)).collect();
                target_y.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let max_gap = target_y
                    .windows(2)
                    .map(|w| w[1] - w[0])
                    .fold(0.0f64, f64::max);
                for ((y1, p), (y2, g)) in plug.pairs.iter().zip(grid.pairs.iter()) {
                    assert_eq!(y1, y2);
                    let excess = (p - g).abs() - max_gap;
                    worst = worst.max(excess);
                }
            }
        }
    }
    verdict(
        "method agreement",
        worst <= 1e-12,
        &format!("max excess over largest target gap = {worst:.3e}"),
    );
}

#[test]
fn criterion_06_cross_world_normalization_and_support() {
    use rand::Rng;
    use rand::SeedableRng;
    let mut master = rand_chacha::ChaCha8Rng::seed_from_u64(61);
    let mut worst_total = 0.0f64;
    for config in 0..1_000u64 {
        let p = 2 + (config % 3) as usize;
        // random monotone saturated tables bounded away from 0 and 1
        let mut cpts = Vec::with_capacity(p);
        for k in 0..p {
            let base: f64 = 0.25 + 0.25 * master.random::<f64>();
            let coefs: Vec<f64> = (0..k)
                .map(|_| master.random::<f64>() * 0.25 / k.max(1) as f64)
                .collect();
            let table: Vec<f64> = (0..(1usize << k))
                .map(|pattern| {
                    let mut q = base;
                    for (j, coef) in coefs.iter().enumerate() {
                        if pattern >> (k - 1 - j) & 1 == 1 {
                            q += coef;
                        }
                    }
                    q.min(0.75)
                })
                .collect();
            cpts.push(table);
        }
        let spec = ScmSpec::new(
            "random",
            (0..p).map(|k| format!("X{}", k + 1)).collect(),
            "Y",
            CausalGraph::full_order(p),
            cpts,
            OutcomeLink::additive(vec![0.0; 1 << p]),
            postcause::NoiseKind::Normal,
        )
        .unwrap();
        let (data, _) = generate(&spec, 3_000, 71 + config).unwrap();
        for (x_bits, flip_to) in [(vec![1u8; p], 0u8), (vec![0u8; p], 1u8)] {
            let x = cv(&x_bits);
            for k in 0..p {
                let dist = cross_world_dist(&data, None, None, &x, k, flip_to).unwrap();
                worst_total = worst_total.max((dist.total() - 1.0).abs());
                // the support enumerates exactly the cone; everything else is 0
                let m = p - k - 1;
                assert_eq!(dist.entries().len(), 1 << m);
                for code in 0..(1usize << m) {
                    let probe: Vec<u8> = (0..m).map(|j| (code >> (m - 1 - j) & 1) as u8).collect();
                    let inside = dist.entries().iter().any(|(s, _)| s == &probe);
                    if !inside {
                        assert_eq!(dist.prob(&probe), 0.0);
                    }
                }
            }
        }
    }
    verdict(
        "cross-world normalization",
        worst_total <= 1e-12,
        &format!("max |sum - 1| = {worst_total:.3e} over 1000 random tables"),
    );
}

#[test]
fn criterion_07_analytic_vs_bootstrap_se() {
    let spec = ScmSpec::new(
        "additive",
        vec!["X1".into()],
        "Y",
        CausalGraph::new(1, vec![vec![]], vec![0]).unwrap(),
        vec![vec![0.5]],
        OutcomeLink {
            mean: vec![0.0, 2.0],
            scale: vec![1.0, 1.0],
        },
        postcause::NoiseKind::Normal,
    )
    .unwrap();
    let (data, _) = generate(&spec, 10_000, 81).unwrap();
    let x = cv(&[0]);
    let x_prime = cv(&[1]);
    let source_rows = stratum_rows(&data, &StratumKey::Full(x.clone()), None);
    let source_y: Vec<f64> = source_rows.rows.iter().map(|&i| data.outcome(i)).collect();
    let y = EmpiricalCdf::fit(&source_y).unwrap().quantile(0.5).unwrap();

    let analytic = analytic_map_variance(&data, &x, &x_prime, y).unwrap().se;
    let boot = BootstrapConfig {
        replicates: 500,
        seed: 82,
        level: 0.95,
    };
    let summary = bootstrap(&data, &boot, |d: &Dataset| {
        let src = stratum_rows(d, &StratumKey::Full(x.clone()), None);
        let tgt = stratum_rows(d, &StratumKey::Full(x_prime.clone()), None);
        let fs = EmpiricalCdf::fit(&src.rows.iter().map(|&i| d.outcome(i)).collect::<Vec<_>>())?;
        let ft = EmpiricalCdf::fit(&tgt.rows.iter().map(|&i| d.outcome(i)).collect::<Vec<_>>())?;
        Ok(map_plugin(&fs, &ft, y))
    })
    .unwrap();
    let rel = (analytic - summary.se).abs() / summary.se;
    verdict(
        "analytic vs bootstrap se",
        rel <= 0.25,
        &format!("analytic {analytic:.4} vs bootstrap {:.4} (rel {rel:.2})", summary.se),
    );
}

#[test]
fn criterion_08_falsification_power_and_level() {
    // power: a planted 0.2 inversion must be flagged at z < -3
    let planted = ScmSpec::new_allowing_nonmonotone(
        "planted",
        vec!["X1".into(), "X2".into()],
        "Y",
        CausalGraph::new(2, vec![vec![], vec![0]], vec![0, 1]).unwrap(),
        vec![vec![0.5], vec![0.5, 0.3]],
        OutcomeLink::additive(vec![0.0; 4]),
        postcause::NoiseKind::Normal,
    )
    .unwrap();
    let (data, _) = generate(&planted, 20_000, 91).unwrap();
    let report = falsify_monotonicity(&data, None, &FalsificationConfig::default());
    let power_ok = report.violations().iter().any(|c| c.z < -3.0);

    // level: a genuinely monotone model should essentially never flag
    let clean_spec = ScmSpec::chain_mediation();
    let mut clean_runs = 0;
    for rep in 0..100u64 {
        let (data, _) = generate(&clean_spec, 20_000, 500 + rep).unwrap();
        let config = FalsificationConfig {
            seed: rep,
            ..FalsificationConfig::default()
        };
        if falsify_monotonicity(&data, None, &config).is_clean() {
            clean_runs += 1;
        }
    }
    verdict(
        "falsification power and level",
        power_ok && clean_runs >= 95,
        &format!("planted flagged: {power_ok}; clean runs {clean_runs}/100"),
    );
}

#[test]
fn criterion_09_structural_zeros() {
    let spec = ScmSpec::hypertension_like();
    let (data, _) = generate(&spec, 20_000, 101).unwrap();
    let cfg = EstimatorConfig::default();
    let graph = spec.graph();
    // Hb (index 2) and CP (index 4) have no path into Pa_Y = {E, HD}
    let non_ancestors = [2usize, 4];
    let mut all_zero = true;
    let mut detail = String::new();
    for bits in [vec![1, 1, 1, 1, 1], vec![1, 1, 1, 0, 1]] {
        let evidence = Evidence::new(cv(&bits), OutcomeEvent::greater_than(140.0));
        let table = attribution_table(&data, Some(graph), &cfg, &evidence).unwrap();
        for &k in &non_ancestors {
            for j in 0..3 {
                let est = table[3 * k + j].estimate;
                if est != 0.0 {
                    all_zero = false;
                    detail = format!("cause {k} row {j} = {est:e}");
                }
            }
        }
    }
    verdict(
        "structural zeros",
        all_zero,
        if detail.is_empty() { "all non-ancestor rows exactly 0" } else { &detail },
    );
}

#[test]
fn criterion_10_trivial_identities() {
    let cfg = EstimatorConfig::default();
    let mut ok = true;
    let mut detail = String::new();
    for (spec, use_graph, evidences, event) in demo_setups() {
        let (data, _) = generate(&spec, 5_000, 111).unwrap();
        let graph = use_graph.then(|| spec.graph());
        for bits in &evidences {
            let evidence = Evidence::new(cv(bits), event.clone());
            // diagonal intervention changes nothing
            let diag = post_ice(&data, graph, &cfg, &evidence, &evidence.x).unwrap();
            if diag.estimate != 0.0 {
                ok = false;
                detail = format!("{} diagonal = {:e}", spec.name(), diag.estimate);
            }
            // the last cause has an empty mediator suffix
            let k = spec.p() - 1;
            let med = post_mediation(&data, graph, &cfg, &evidence, k).unwrap();
            if med.nie != 0.0 || med.tce != med.nde {
                ok = false;
                detail = format!("{} last-cause nie = {:e}", spec.name(), med.nie);
            }
            // unchanged pivot: point mass on the observed suffix
            let xk = evidence.x.bit(0);
            let dist = cross_world_dist(&data, graph, None, &evidence.x, 0, xk).unwrap();
            if dist.entries() != [(evidence.x.suffix(0).to_vec(), 1.0)] {
                ok = false;
                detail = format!("{} consistency point mass broken", spec.name());
            }
        }
    }
    verdict(
        "trivial identities",
        ok,
        if detail.is_empty() { "diagonal, empty-suffix, and consistency all exact" } else { &detail },
    );
}
