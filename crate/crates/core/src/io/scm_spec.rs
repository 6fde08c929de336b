//! Simulator config files: the graph format plus conditional probability
//! tables, the outcome link, and the noise family.
//!
//! ```text
//! name: chain-mediation
//! causes: [X1, X2]
//! parents X2: [X1]
//! outcome_parents: [X1, X2]
//! outcome: Y
//! cpt X1: 0.5
//! cpt X2: 0.3, 0.7
//! outcome_mean: 20, 26, 24, 30
//! outcome_scale: 2.5
//! noise: normal
//! ```
//!
//! Table entries follow binary pattern order with the first listed parent as
//! the most significant bit. A single `outcome_scale` value broadcasts to all
//! patterns.

use crate::domain::CausalGraph;
use crate::error::{Error, Result};
use crate::simulate::{NoiseKind, OutcomeLink, ScmSpec};

use super::graph_spec::{parse_name_list, strip_comment};

fn parse_err(line_no: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position: line_no,
        message: message.into(),
    }
}

fn parse_numbers(value: &str, line_no: usize) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| parse_err(line_no, format!("bad number '{s}'")))
        })
        .collect()
}

/// Parses a simulator config file.
pub fn parse_scm(text: &str) -> Result<ScmSpec> {
    let mut name = "scm".to_string();
    let mut outcome_name = "Y".to_string();
    let mut causes: Option<Vec<String>> = None;
    let mut parent_lines: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut outcome_parents: Option<(usize, Vec<String>)> = None;
    let mut cpt_lines: Vec<(usize, String, Vec<f64>)> = Vec::new();
    let mut mean: Option<Vec<f64>> = None;
    let mut scale: Option<Vec<f64>> = None;
    let mut noise = NoiseKind::Normal;
    let mut allow_nonmonotone = false;

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
        match key {
            "name" => name = value.trim().to_string(),
            "outcome" => outcome_name = value.trim().to_string(),
            "causes" => {
                let list = parse_name_list(value, line_no)?;
                if list.is_empty() {
                    return Err(parse_err(line_no, "cause list is empty"));
                }
                causes = Some(list);
            }
            "outcome_parents" => {
                outcome_parents = Some((line_no, parse_name_list(value, line_no)?));
            }
            "outcome_mean" => mean = Some(parse_numbers(value, line_no)?),
            "outcome_scale" => scale = Some(parse_numbers(value, line_no)?),
            "noise" => {
                noise = match value.trim() {
                    "normal" => NoiseKind::Normal,
                    "uniform" => NoiseKind::Uniform,
                    "exponential" => NoiseKind::Exponential,
                    other => {
                        return Err(parse_err(line_no, format!("unknown noise '{other}'")));
                    }
                };
            }
            "allow_nonmonotone" => {
                allow_nonmonotone = match value.trim() {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(parse_err(line_no, format!("expected true/false, got '{other}'")));
                    }
                };
            }
            _ if key.starts_with("parents ") => {
                let cause = key["parents ".len()..].trim().to_string();
                parent_lines.push((line_no, cause, parse_name_list(value, line_no)?));
            }
            _ if key.starts_with("cpt ") => {
                let cause = key["cpt ".len()..].trim().to_string();
                cpt_lines.push((line_no, cause, parse_numbers(value, line_no)?));
            }
            _ => return Err(parse_err(line_no, format!("unknown key '{key}'"))),
        }
    }

    let names = causes.ok_or_else(|| parse_err(0, "missing 'causes' line"))?;
    let p = names.len();
    let resolve = |n: &str, line_no: usize| -> Result<usize> {
        names
            .iter()
            .position(|x| x == n)
            .ok_or_else(|| parse_err(line_no, format!("unknown cause '{n}'")))
    };

    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); p];
    for (line_no, cause, list) in parent_lines {
        let k = resolve(&cause, line_no)?;
        parents[k] = list
            .iter()
            .map(|n| resolve(n, line_no))
            .collect::<Result<_>>()?;
    }
    let (op_line, op_list) =
        outcome_parents.ok_or_else(|| parse_err(0, "missing 'outcome_parents' line"))?;
    let outcome: Vec<usize> = op_list
        .iter()
        .map(|n| resolve(n, op_line))
        .collect::<Result<_>>()?;
    let graph = CausalGraph::new(p, parents, outcome)?;

    let mut cpts: Vec<Option<Vec<f64>>> = vec![None; p];
    for (line_no, cause, numbers) in cpt_lines {
        let k = resolve(&cause, line_no)?;
        cpts[k] = Some(numbers);
    }
    let cpts: Vec<Vec<f64>> = cpts
        .into_iter()
        .enumerate()
        .map(|(k, t)| t.ok_or_else(|| parse_err(0, format!("missing 'cpt {}' line", names[k]))))
        .collect::<Result<_>>()?;

    let mean = mean.ok_or_else(|| parse_err(0, "missing 'outcome_mean' line"))?;
    let patterns = 1usize << graph.parents_of_outcome().len();
    let scale = match scale {
        None => vec![1.0; patterns],
        Some(s) if s.len() == 1 => vec![s[0]; patterns],
        Some(s) => s,
    };

    let build = if allow_nonmonotone {
        ScmSpec::new_allowing_nonmonotone
    } else {
        ScmSpec::new
    };
    build(
        &name,
        names,
        &outcome_name,
        graph,
        cpts,
        OutcomeLink { mean, scale },
        noise,
    )
}

/// Serializes a spec into the config format; parsing it back reproduces the
/// spec exactly.
pub fn write_scm(spec: &ScmSpec) -> String {
    let names = spec.cause_names();
    let mut out = String::new();
    out.push_str(&format!("name: {}\n", spec.name()));
    out.push_str(&format!("causes: [{}]\n", names.join(", ")));
    for k in 0..spec.p() {
        let pars = spec.graph().parents_of_cause(k);
        if !pars.is_empty() {
            let list: Vec<&str> = pars.iter().map(|&j| names[j].as_str()).collect();
            out.push_str(&format!("parents {}: [{}]\n", names[k], list.join(", ")));
        }
    }
    let outs: Vec<&str> = spec
        .graph()
        .parents_of_outcome()
        .iter()
        .map(|&j| names[j].as_str())
        .collect();
    out.push_str(&format!("outcome_parents: [{}]\n", outs.join(", ")));
    out.push_str(&format!("outcome: {}\n", spec.outcome_name()));
    let join = |v: &[f64]| {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    for k in 0..spec.p() {
        out.push_str(&format!("cpt {}: {}\n", names[k], join(&spec.cpts()[k])));
    }
    out.push_str(&format!("outcome_mean: {}\n", join(&spec.link().mean)));
    out.push_str(&format!("outcome_scale: {}\n", join(&spec.link().scale)));
    out.push_str(&format!("noise: {}\n", spec.noise().label()));
    if spec.allows_nonmonotone() {
        out.push_str("allow_nonmonotone: true\n");
    }
    out
}
