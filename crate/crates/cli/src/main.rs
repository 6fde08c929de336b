//! Command-line surface: estimate attribution tables and intervention
//! matrices from CSV data, check the monotonicity restriction, and drive the
//! simulator (data generation and ground-truth evaluation).
//!
//! Exit codes: 0 success, 1 configuration/validation problem, 2 runtime
//! estimation failure (empty stratum, positivity, unstable bootstrap).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use postcause::io::{
    load_csv, parse_event, parse_graph, parse_scm, render_attribution, render_ice_matrix,
    render_monotonicity, render_oracle, write_dataset, write_truth, OutputFormat, ReportOptions,
};
use postcause::{
    attribution_table, bootstrap_vec, falsify_monotonicity, generate, post_ice, true_estimand,
    BootstrapConfig, CausalGraph, CauseVector, Dataset, Error, EstimandResult, EstimatorConfig,
    Evidence, FalsificationConfig, MapMethod, OracleRequest, OutcomeEvent,
};

#[derive(Parser)]
#[command(
    name = "postcause",
    about = "Retrospective attribution of a continuous outcome to binary causes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-cause direct/indirect/total attribution tables for each evidence
    Estimate(EstimateArgs),
    /// Matrix of expected outcome changes: interventions by evidences
    IceTable(IceArgs),
    /// Falsification check of the monotonicity restriction
    CheckMonotonicity(CheckArgs),
    /// Generate a dataset (and optional per-unit truth file) from a config
    Simulate(SimulateArgs),
    /// Ground-truth estimand values for a simulator config
    Oracle(OracleArgs),
}

#[derive(Args)]
struct DataArgs {
    /// CSV dataset with a header row
    #[arg(long)]
    data: PathBuf,
    /// Cause column names in topological order (comma separated)
    #[arg(long, value_delimiter = ',', required = true)]
    causes: Vec<String>,
    /// Outcome column name
    #[arg(long)]
    outcome: String,
    /// Optional graph file; default is the saturated full-order graph
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Args)]
struct EstimatorArgs {
    /// Counterfactual mapping estimator
    #[arg(long, value_enum, default_value_t = MethodArg::Plugin)]
    method: MethodArg,
    /// Add-alpha smoothing for conditional rates (bare flag uses 0.5)
    #[arg(long, num_args = 0..=1, default_missing_value = "0.5")]
    smoothing: Option<f64>,
    /// Bootstrap replicates; 0 disables interval estimation
    #[arg(long, value_name = "B", default_value_t = 0)]
    bootstrap: usize,
    /// Confidence level for bootstrap percentile intervals
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Master seed for all randomness
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Evidence cause pattern like 1,1,0,1,1 (repeatable)
    #[arg(long, required = true)]
    evidence: Vec<String>,
    /// Outcome event, e.g. "Y > 140"
    #[arg(long)]
    event: String,
    /// Also report the intervention matrix for these patterns (repeatable)
    #[arg(long)]
    intervene: Vec<String>,
    #[command(flatten)]
    estimator: EstimatorArgs,
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
}

#[derive(Args)]
struct IceArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, required = true)]
    evidence: Vec<String>,
    #[arg(long)]
    event: String,
    /// Intervention patterns; defaults to all outcome-parent patterns with a
    /// graph, or all 2^p patterns when p <= 6
    #[arg(long)]
    intervene: Vec<String>,
    #[command(flatten)]
    estimator: EstimatorArgs,
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Bootstrap replicates behind each pair's standard error
    #[arg(long, value_name = "B", default_value_t = 200)]
    bootstrap: usize,
    /// Flag pairs with z below minus this threshold
    #[arg(long, default_value_t = 3.0)]
    z_threshold: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
}

#[derive(Args)]
struct SimulateArgs {
    /// Simulator config file
    #[arg(long)]
    spec: PathBuf,
    /// Number of units
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
    /// Optional per-unit potential-outcome truth CSV
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Simulator config file
    #[arg(long)]
    spec: PathBuf,
    /// Evidence cause pattern like 1,1,1
    #[arg(long)]
    evidence: String,
    /// Outcome event, e.g. "Y < 27"
    #[arg(long)]
    event: String,
    /// Joint interventions to evaluate (repeatable)
    #[arg(long)]
    intervene: Vec<String>,
    /// Monte-Carlo draws per estimand
    #[arg(long, default_value_t = 1_000_000)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Plugin,
    Grid,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Csv,
    Json,
}

impl From<FormatArg> for ReportOptions {
    fn from(f: FormatArg) -> Self {
        ReportOptions {
            format: match f {
                FormatArg::Table => OutputFormat::Table,
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
            },
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::EmptyStratum { .. }
        | Error::Positivity { .. }
        | Error::UnstableBootstrap { .. }
        | Error::UnreliableOracle { .. }
        | Error::DensityTooSmall { .. }
        | Error::OutsideSupport { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successes, anything else is a
            // configuration problem
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Estimate(args) => run_estimate(args),
        Command::IceTable(args) => run_ice_table(args),
        Command::CheckMonotonicity(args) => run_check(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Oracle(args) => run_oracle(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn parse_pattern(text: &str, p: usize) -> Result<CauseVector, Error> {
    let bits: Vec<u8> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match s {
            "0" => Ok(0u8),
            "1" => Ok(1u8),
            other => Err(Error::InvalidData(format!(
                "pattern value '{other}' is not 0/1"
            ))),
        })
        .collect::<Result<_, _>>()?;
    if bits.len() != p {
        return Err(Error::InvalidData(format!(
            "pattern '{text}' has {} values, expected {p}",
            bits.len()
        )));
    }
    CauseVector::new(bits)
}

fn load_inputs(args: &DataArgs) -> Result<(Dataset, Option<CausalGraph>), Error> {
    let data = load_csv(&args.data, &args.causes, &args.outcome)?;
    let graph = match &args.graph {
        None => None,
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let (names, graph) = parse_graph(&text)?;
            if names != args.causes {
                return Err(Error::InvalidGraph(format!(
                    "graph causes [{}] do not match --causes [{}]",
                    names.join(", "),
                    args.causes.join(", ")
                )));
            }
            Some(graph)
        }
    };
    Ok((data, graph))
}

fn estimator_config(args: &EstimatorArgs) -> EstimatorConfig {
    EstimatorConfig {
        method: match args.method {
            MethodArg::Plugin => MapMethod::PlugIn,
            MethodArg::Grid => MapMethod::GridSearch,
        },
        smoothing: args.smoothing,
    }
}

fn evidence_label(data: &Dataset, evidence: &Evidence) -> String {
    let bits: Vec<String> = data
        .cause_names()
        .iter()
        .zip(evidence.x.bits())
        .map(|(n, b)| format!("{n}={b}"))
        .collect();
    format!("{}; Y in {}", bits.join(","), evidence.event)
}

fn run_estimate(args: EstimateArgs) -> Result<(), Error> {
    let (data, graph) = load_inputs(&args.data)?;
    let event = parse_event(&args.event)?;
    let cfg = estimator_config(&args.estimator);
    let opts: ReportOptions = args.format.into();
    let graph_ref = graph.as_ref();

    let mut blocks = Vec::new();
    for (i, pattern) in args.evidence.iter().enumerate() {
        let x = parse_pattern(pattern, data.p())?;
        let evidence = Evidence::new(x, event.clone());
        let mut rows = attribution_table(&data, graph_ref, &cfg, &evidence)?;
        if args.estimator.bootstrap > 0 {
            let boot = BootstrapConfig {
                replicates: args.estimator.bootstrap,
                seed: args.estimator.seed.wrapping_add(i as u64),
                level: args.estimator.level,
            };
            let summaries = bootstrap_vec(&data, &boot, |d: &Dataset| {
                attribution_table(d, graph_ref, &cfg, &evidence)
                    .map(|rows| rows.iter().map(|r| r.estimate).collect())
            })?;
            for (row, summary) in rows.iter_mut().zip(&summaries) {
                row.se = Some(summary.se);
                row.ci = Some(summary.ci);
            }
        }
        let label = evidence_label(&data, &evidence);
        blocks.push(render_attribution(data.cause_names(), &label, &rows, &opts));
    }
    print!("{}", blocks.join("\n"));

    if !args.intervene.is_empty() {
        println!();
        print_ice_matrix(
            &data,
            graph_ref,
            &cfg,
            &args.estimator,
            &args.evidence,
            &args.intervene,
            &event,
            &opts,
        )?;
    }
    Ok(())
}

fn intervention_rows(
    data: &Dataset,
    graph: Option<&CausalGraph>,
    requested: &[String],
) -> Result<Vec<(String, CauseVector)>, Error> {
    if !requested.is_empty() {
        return requested
            .iter()
            .map(|text| Ok((text.clone(), parse_pattern(text, data.p())?)))
            .collect();
    }
    match graph {
        Some(g) => {
            let pa = g.parents_of_outcome();
            let names: Vec<&str> = pa.iter().map(|&j| data.cause_names()[j].as_str()).collect();
            let mut rows = Vec::new();
            for code in 0..(1usize << pa.len()) {
                let mut bits = vec![0u8; data.p()];
                let mut parts = Vec::new();
                for (j, &idx) in pa.iter().enumerate() {
                    let bit = ((code >> (pa.len() - 1 - j)) & 1) as u8;
                    bits[idx] = bit;
                    parts.push(bit.to_string());
                }
                rows.push((
                    format!("({})=({})", names.join(","), parts.join(",")),
                    CauseVector::new(bits)?,
                ));
            }
            Ok(rows)
        }
        None => {
            if data.p() > 6 {
                return Err(Error::InvalidData(
                    "without a graph, pass --intervene patterns explicitly for p > 6".into(),
                ));
            }
            let mut rows = Vec::new();
            for code in 0..(1usize << data.p()) {
                let bits: Vec<u8> = (0..data.p())
                    .map(|j| ((code >> (data.p() - 1 - j)) & 1) as u8)
                    .collect();
                let label = bits
                    .iter()
                    .map(|b| b.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                rows.push((format!("({label})"), CauseVector::new(bits)?));
            }
            Ok(rows)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn print_ice_matrix(
    data: &Dataset,
    graph: Option<&CausalGraph>,
    cfg: &EstimatorConfig,
    estimator: &EstimatorArgs,
    evidences: &[String],
    interventions: &[String],
    event: &OutcomeEvent,
    opts: &ReportOptions,
) -> Result<(), Error> {
    let rows = intervention_rows(data, graph, interventions)?;
    let mut col_labels = Vec::new();
    let mut evidence_list = Vec::new();
    for pattern in evidences {
        let x = parse_pattern(pattern, data.p())?;
        let evidence = Evidence::new(x, event.clone());
        col_labels.push(evidence_label(data, &evidence));
        evidence_list.push(evidence);
    }

    let mut cells: Vec<Vec<EstimandResult>> = Vec::with_capacity(rows.len());
    for (_, x_prime) in &rows {
        let mut row = Vec::with_capacity(evidence_list.len());
        for evidence in &evidence_list {
            row.push(post_ice(data, graph, cfg, evidence, x_prime)?);
        }
        cells.push(row);
    }
    if estimator.bootstrap > 0 {
        let boot = BootstrapConfig {
            replicates: estimator.bootstrap,
            seed: estimator.seed,
            level: estimator.level,
        };
        let summaries = bootstrap_vec(data, &boot, |d: &Dataset| {
            let mut flat = Vec::new();
            for (_, x_prime) in &rows {
                for evidence in &evidence_list {
                    flat.push(post_ice(d, graph, cfg, evidence, x_prime)?.estimate);
                }
            }
            Ok(flat)
        })?;
        for (i, row) in cells.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let summary = &summaries[i * evidence_list.len() + j];
                cell.se = Some(summary.se);
                cell.ci = Some(summary.ci);
            }
        }
    }
    let row_labels: Vec<String> = rows.into_iter().map(|(label, _)| label).collect();
    print!("{}", render_ice_matrix(&row_labels, &col_labels, &cells, opts));
    Ok(())
}

fn run_ice_table(args: IceArgs) -> Result<(), Error> {
    let (data, graph) = load_inputs(&args.data)?;
    let event = parse_event(&args.event)?;
    let cfg = estimator_config(&args.estimator);
    let opts: ReportOptions = args.format.into();
    print_ice_matrix(
        &data,
        graph.as_ref(),
        &cfg,
        &args.estimator,
        &args.evidence,
        &args.intervene,
        &event,
        &opts,
    )
}

fn run_check(args: CheckArgs) -> Result<(), Error> {
    let (data, graph) = load_inputs(&args.data)?;
    let config = FalsificationConfig {
        bootstrap_replicates: args.bootstrap,
        seed: args.seed,
        z_threshold: args.z_threshold,
    };
    let report = falsify_monotonicity(&data, graph.as_ref(), &config);
    let opts: ReportOptions = args.format.into();
    print!("{}", render_monotonicity(&report, data.cause_names(), &opts));
    Ok(())
}

fn run_simulate(args: SimulateArgs) -> Result<(), Error> {
    let text = std::fs::read_to_string(&args.spec)
        .map_err(|e| Error::Io(format!("{}: {e}", args.spec.display())))?;
    let spec = parse_scm(&text)?;
    let (data, table) = generate(&spec, args.n, args.seed)?;
    write_dataset(&data, &args.out)?;
    eprintln!(
        "wrote {} rows x {} causes to {}",
        data.n(),
        data.p(),
        args.out.display()
    );
    if let Some(truth_path) = &args.truth {
        write_truth(&table, truth_path)?;
        eprintln!("wrote potential-outcome truth to {}", truth_path.display());
    }
    Ok(())
}

fn run_oracle(args: OracleArgs) -> Result<(), Error> {
    let text = std::fs::read_to_string(&args.spec)
        .map_err(|e| Error::Io(format!("{}: {e}", args.spec.display())))?;
    let spec = parse_scm(&text)?;
    let event = parse_event(&args.event)?;
    let x = parse_pattern(&args.evidence, spec.p())?;
    let evidence = Evidence::new(x, event);

    let mut requests: Vec<(String, OracleRequest)> = Vec::new();
    for pattern in &args.intervene {
        let x_prime = parse_pattern(pattern, spec.p())?;
        requests.push((
            format!("PostICE x'=({pattern})"),
            OracleRequest::PostIce { x_prime },
        ));
    }
    for k in 0..spec.p() {
        let name = &spec.cause_names()[k];
        requests.push((format!("PostNDE {name}"), OracleRequest::PostNde { cause: k }));
        requests.push((format!("PostNIE {name}"), OracleRequest::PostNie { cause: k }));
        requests.push((format!("PostTCE {name}"), OracleRequest::PostTce { cause: k }));
    }

    let mut rows = Vec::with_capacity(requests.len());
    for (i, (label, request)) in requests.into_iter().enumerate() {
        let estimate = true_estimand(
            &spec,
            &request,
            &evidence,
            args.draws,
            args.seed.wrapping_add(i as u64),
        )?;
        rows.push((label, estimate));
    }
    let opts: ReportOptions = args.format.into();
    print!("{}", render_oracle(&rows, &opts));
    Ok(())
}
