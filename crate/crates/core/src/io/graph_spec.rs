//! Declarative graph files: causes listed in topological order, a parent set
//! per cause, and the outcome's parent set.
//!
//! ```text
//! # blood-pressure network
//! causes: [E, D, Hb, HD, CP]
//! parents Hb: [D]
//! parents HD: [E, D]
//! parents CP: [Hb, HD]
//! outcome_parents: [E, HD]
//! ```
//!
//! Causes without a `parents` line are roots.

use crate::domain::CausalGraph;
use crate::error::{Error, Result};

fn parse_err(line_no: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position: line_no,
        message: message.into(),
    }
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

pub(crate) fn parse_name_list(value: &str, line_no: usize) -> Result<Vec<String>> {
    let trimmed = value.trim();
    let inner = trimmed
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| parse_err(line_no, "expected a bracketed list like [A, B]"))?;
    Ok(inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect())
}

fn resolve(names: &[String], name: &str, line_no: usize) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| parse_err(line_no, format!("unknown cause '{name}'")))
}

/// Parses a graph file into (cause names, graph).
pub fn parse_graph(text: &str) -> Result<(Vec<String>, CausalGraph)> {
    let mut names: Option<Vec<String>> = None;
    let mut parent_lines: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut outcome_parents: Option<(usize, Vec<String>)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| parse_err(line_no, "expected 'key: value'"))?;
        let key = key.trim();
        if key == "causes" {
            if names.is_some() {
                return Err(parse_err(line_no, "duplicate 'causes' line"));
            }
            let list = parse_name_list(value, line_no)?;
            if list.is_empty() {
                return Err(parse_err(line_no, "cause list is empty"));
            }
            names = Some(list);
        } else if let Some(cause) = key.strip_prefix("parents ") {
            parent_lines.push((line_no, cause.trim().to_string(), parse_name_list(value, line_no)?));
        } else if key == "outcome_parents" {
            outcome_parents = Some((line_no, parse_name_list(value, line_no)?));
        } else {
            return Err(parse_err(line_no, format!("unknown key '{key}'")));
        }
    }

    let names = names.ok_or_else(|| parse_err(0, "missing 'causes' line"))?;
    {
        let mut seen = names.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != names.len() {
            return Err(parse_err(0, "duplicate cause names"));
        }
    }
    let p = names.len();
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); p];
    for (line_no, cause, list) in parent_lines {
        let k = resolve(&names, &cause, line_no)?;
        parents[k] = list
            .iter()
            .map(|n| resolve(&names, n, line_no))
            .collect::<Result<_>>()?;
    }
    let (line_no, list) =
        outcome_parents.ok_or_else(|| parse_err(0, "missing 'outcome_parents' line"))?;
    let outcome: Vec<usize> = list
        .iter()
        .map(|n| resolve(&names, n, line_no))
        .collect::<Result<_>>()?;
    let graph = CausalGraph::new(p, parents, outcome)?;
    Ok((names, graph))
}

/// Serializes a graph back into the file format.
pub fn write_graph(names: &[String], graph: &CausalGraph) -> String {
    let mut out = String::new();
    out.push_str(&format!("causes: [{}]\n", names.join(", ")));
    for k in 0..graph.p() {
        let pars = graph.parents_of_cause(k);
        if !pars.is_empty() {
            let list: Vec<&str> = pars.iter().map(|&j| names[j].as_str()).collect();
            out.push_str(&format!("parents {}: [{}]\n", names[k], list.join(", ")));
        }
    }
    let outs: Vec<&str> = graph
        .parents_of_outcome()
        .iter()
        .map(|&j| names[j].as_str())
        .collect();
    out.push_str(&format!("outcome_parents: [{}]\n", outs.join(", ")));
    out
}
