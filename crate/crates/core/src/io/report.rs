//! Report rendering: aligned text tables with two decimals, CSV and JSON
//! variants at full precision.

use serde_json::json;

use crate::estimands::{EstimandResult, EstimandTarget};
use crate::monotone::MonotonicityReport;
use crate::simulate::OracleEstimate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ReportOptions {
    pub format: OutputFormat,
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line(fields: &[String]) -> String {
    fields
        .iter()
        .map(|f| csv_field(f))
        .collect::<Vec<_>>()
        .join(",")
}

fn aligned(rows: &[Vec<String>]) -> String {
    if rows.is_empty() {
        return String::new();
    }
    let cols = rows.iter().map(|r| r.len()).max().unwrap();
    let mut widths = vec![0usize; cols];
    for row in rows {
        for (j, cell) in row.iter().enumerate() {
            widths[j] = widths[j].max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (j, cell) in row.iter().enumerate() {
            if j > 0 {
                line.push_str("  ");
            }
            let pad = widths[j] - cell.chars().count();
            if j == 0 {
                line.push_str(cell);
                line.push_str(&" ".repeat(pad));
            } else {
                line.push_str(&" ".repeat(pad));
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn point_cell(est: f64, se: Option<f64>) -> String {
    match se {
        Some(se) => format!("{est:.2} ({se:.2})"),
        None => format!("{est:.2}"),
    }
}

fn opt_string(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Attribution table: one row per estimand kind, one column per cause.
pub fn render_attribution(
    cause_names: &[String],
    evidence_label: &str,
    results: &[EstimandResult],
    opts: &ReportOptions,
) -> String {
    match opts.format {
        OutputFormat::Table => {
            let p = cause_names.len();
            let n = results.first().map_or(0, |r| r.evidence_n);
            let low = results.iter().any(|r| r.low_support);
            let mut rows: Vec<Vec<String>> = Vec::new();
            let mut header = vec![String::new()];
            header.extend(cause_names.iter().cloned());
            rows.push(header);
            for kind in ["PostNDE", "PostNIE", "PostTCE"] {
                let mut row = vec![kind.to_string()];
                for k in 0..p {
                    let cell = results
                        .iter()
                        .find(|r| {
                            r.kind.label() == kind
                                && matches!(r.target, EstimandTarget::Cause(c) if c == k)
                        })
                        .map(|r| point_cell(r.estimate, r.se))
                        .unwrap_or_default();
                    row.push(cell);
                }
                rows.push(row);
            }
            let mut out = format!("evidence: {evidence_label}  (n = {n})\n");
            if low {
                out.push_str("warning: evidence stratum has low support\n");
            }
            out.push_str(&aligned(&rows));
            out
        }
        OutputFormat::Csv => {
            let mut out = csv_line(&[
                "evidence".into(),
                "kind".into(),
                "cause".into(),
                "estimate".into(),
                "se".into(),
                "ci_lo".into(),
                "ci_hi".into(),
                "evidence_n".into(),
                "low_support".into(),
            ]);
            out.push('\n');
            for r in results {
                let cause = match r.target {
                    EstimandTarget::Cause(k) => cause_names[k].clone(),
                    _ => String::new(),
                };
                out.push_str(&csv_line(&[
                    evidence_label.to_string(),
                    r.kind.label().to_string(),
                    cause,
                    r.estimate.to_string(),
                    opt_string(r.se),
                    opt_string(r.ci.map(|c| c.0)),
                    opt_string(r.ci.map(|c| c.1)),
                    r.evidence_n.to_string(),
                    r.low_support.to_string(),
                ]));
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = results
                .iter()
                .map(|r| {
                    let cause = match r.target {
                        EstimandTarget::Cause(k) => Some(cause_names[k].clone()),
                        _ => None,
                    };
                    json!({
                        "kind": r.kind.label(),
                        "cause": cause,
                        "estimate": r.estimate,
                        "se": r.se,
                        "ci": r.ci.map(|c| vec![c.0, c.1]),
                        "evidence_n": r.evidence_n,
                        "low_support": r.low_support,
                    })
                })
                .collect();
            let doc = json!({ "evidence": evidence_label, "rows": rows });
            format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
        }
    }
}

/// Intervention-by-evidence matrix of expected outcome changes.
pub fn render_ice_matrix(
    row_labels: &[String],
    col_labels: &[String],
    cells: &[Vec<EstimandResult>],
    opts: &ReportOptions,
) -> String {
    match opts.format {
        OutputFormat::Table => {
            let mut rows: Vec<Vec<String>> = Vec::new();
            let mut header = vec!["intervention".to_string()];
            header.extend(col_labels.iter().cloned());
            rows.push(header);
            for (i, label) in row_labels.iter().enumerate() {
                let mut row = vec![label.clone()];
                for cell in &cells[i] {
                    row.push(point_cell(cell.estimate, cell.se));
                }
                rows.push(row);
            }
            aligned(&rows)
        }
        OutputFormat::Csv => {
            let mut out = csv_line(&[
                "intervention".into(),
                "evidence".into(),
                "estimate".into(),
                "se".into(),
                "ci_lo".into(),
                "ci_hi".into(),
                "evidence_n".into(),
            ]);
            out.push('\n');
            for (i, label) in row_labels.iter().enumerate() {
                for (j, cell) in cells[i].iter().enumerate() {
                    out.push_str(&csv_line(&[
                        label.clone(),
                        col_labels[j].clone(),
                        cell.estimate.to_string(),
                        opt_string(cell.se),
                        opt_string(cell.ci.map(|c| c.0)),
                        opt_string(cell.ci.map(|c| c.1)),
                        cell.evidence_n.to_string(),
                    ]));
                    out.push('\n');
                }
            }
            out
        }
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = row_labels
                .iter()
                .enumerate()
                .map(|(i, label)| {
                    let entries: Vec<serde_json::Value> = cells[i]
                        .iter()
                        .enumerate()
                        .map(|(j, cell)| {
                            json!({
                                "evidence": col_labels[j],
                                "estimate": cell.estimate,
                                "se": cell.se,
                                "ci": cell.ci.map(|c| vec![c.0, c.1]),
                                "evidence_n": cell.evidence_n,
                            })
                        })
                        .collect();
                    json!({ "intervention": label, "cells": entries })
                })
                .collect();
            format!(
                "{}\n",
                serde_json::to_string_pretty(&json!({ "matrix": rows })).unwrap()
            )
        }
    }
}

/// Falsification report: every comparable pair with its z-score.
pub fn render_monotonicity(
    report: &MonotonicityReport,
    cause_names: &[String],
    opts: &ReportOptions,
) -> String {
    let fmt_z = |z: f64| {
        if z.is_infinite() {
            format!("{}inf", if z < 0.0 { "-" } else { "" })
        } else {
            format!("{z:.2}")
        }
    };
    match opts.format {
        OutputFormat::Table => {
            let mut rows: Vec<Vec<String>> = vec![vec![
                "cause".into(),
                "lower stratum".into(),
                "upper stratum".into(),
                "diff".into(),
                "se".into(),
                "z".into(),
                "flag".into(),
            ]];
            for c in &report.checks {
                rows.push(vec![
                    cause_names[c.cause].clone(),
                    c.lower_key.describe(cause_names),
                    c.upper_key.describe(cause_names),
                    format!("{:.3}", c.diff),
                    format!("{:.3}", c.se),
                    fmt_z(c.z),
                    if c.violation { "VIOLATION".into() } else { String::new() },
                ]);
            }
            let mut out = aligned(&rows);
            out.push_str(&format!(
                "pairs: {}  negative: {}  violations (z < -{}): {}\n",
                report.checks.len(),
                report.negative_pairs().len(),
                report.z_threshold,
                report.violations().len()
            ));
            out
        }
        OutputFormat::Csv => {
            let mut out = csv_line(&[
                "cause".into(),
                "lower".into(),
                "upper".into(),
                "lower_rate".into(),
                "upper_rate".into(),
                "diff".into(),
                "se".into(),
                "z".into(),
                "violation".into(),
            ]);
            out.push('\n');
            for c in &report.checks {
                out.push_str(&csv_line(&[
                    cause_names[c.cause].clone(),
                    c.lower_key.describe(cause_names),
                    c.upper_key.describe(cause_names),
                    c.lower_rate.to_string(),
                    c.upper_rate.to_string(),
                    c.diff.to_string(),
                    c.se.to_string(),
                    c.z.to_string(),
                    c.violation.to_string(),
                ]));
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = report
                .checks
                .iter()
                .map(|c| {
                    json!({
                        "cause": cause_names[c.cause],
                        "lower": c.lower_key.describe(cause_names),
                        "upper": c.upper_key.describe(cause_names),
                        "lower_rate": c.lower_rate,
                        "upper_rate": c.upper_rate,
                        "diff": c.diff,
                        "se": c.se,
                        "z": if c.z.is_finite() { json!(c.z) } else { json!(null) },
                        "violation": c.violation,
                    })
                })
                .collect();
            let doc = json!({
                "z_threshold": report.z_threshold,
                "checks": rows,
                "clean": report.is_clean(),
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
        }
    }
}

/// Ground-truth values computed by the simulator oracle.
pub fn render_oracle(rows: &[(String, OracleEstimate)], opts: &ReportOptions) -> String {
    match opts.format {
        OutputFormat::Table => {
            let mut table: Vec<Vec<String>> = vec![vec![
                "estimand".into(),
                "truth".into(),
                "mc_se".into(),
                "retained".into(),
            ]];
            for (label, est) in rows {
                table.push(vec![
                    label.clone(),
                    format!("{:.2}", est.value),
                    format!("{:.4}", est.mc_se),
                    format!("{}/{}", est.retained, est.draws),
                ]);
            }
            aligned(&table)
        }
        OutputFormat::Csv => {
            let mut out = csv_line(&[
                "estimand".into(),
                "truth".into(),
                "mc_se".into(),
                "retained".into(),
                "draws".into(),
            ]);
            out.push('\n');
            for (label, est) in rows {
                out.push_str(&csv_line(&[
                    label.clone(),
                    est.value.to_string(),
                    est.mc_se.to_string(),
                    est.retained.to_string(),
                    est.draws.to_string(),
                ]));
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            let entries: Vec<serde_json::Value> = rows
                .iter()
                .map(|(label, est)| {
                    json!({
                        "estimand": label,
                        "truth": est.value,
                        "mc_se": est.mc_se,
                        "retained": est.retained,
                        "draws": est.draws,
                    })
                })
                .collect();
            format!(
                "{}\n",
                serde_json::to_string_pretty(&json!({ "oracle": entries })).unwrap()
            )
        }
    }
}
