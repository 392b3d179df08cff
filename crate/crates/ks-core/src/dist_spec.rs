//! Distribution spec mini-language for the CLI.
//!
//! Three forms, all `family:key=value,...`:
//!
//! ```text
//! pmf:1=0.1,3=0.9
//! leaf351:q=0.005,p=0.5
//! poisson:mean=2,cutoff=20
//! ```
//!
//! Parse errors name the offending token.

use crate::degree::{DegreeDistribution, DegreeError};

pub fn parse_dist_spec(spec: &str) -> Result<DegreeDistribution, DegreeError> {
    let spec = spec.trim();
    let (family, body) = spec.split_once(':').ok_or_else(|| DegreeError::Parse {
        token: spec.to_string(),
        reason: "expected `family:key=value,...`",
    })?;
    match family {
        "pmf" => parse_pmf(body),
        "leaf351" => {
            let kv = parse_pairs(body, &["q", "p"])?;
            DegreeDistribution::leaf351(kv[0], kv[1])
        }
        "poisson" => {
            let kv = parse_pairs(body, &["mean", "cutoff"])?;
            let cutoff = kv[1];
            if cutoff < 0.0 || cutoff.fract() != 0.0 {
                return Err(DegreeError::Parse {
                    token: format!("cutoff={cutoff}"),
                    reason: "cutoff must be a non-negative integer",
                });
            }
            DegreeDistribution::truncated_poisson(kv[0], cutoff as usize)
        }
        other => Err(DegreeError::Parse {
            token: other.to_string(),
            reason: "unknown family (expected pmf, leaf351, or poisson)",
        }),
    }
}

fn parse_pmf(body: &str) -> Result<DegreeDistribution, DegreeError> {
    let mut entries = Vec::new();
    for token in body.split(',') {
        let (k, p) = token.split_once('=').ok_or_else(|| DegreeError::Parse {
            token: token.to_string(),
            reason: "expected `degree=probability`",
        })?;
        let degree: usize = k.trim().parse().map_err(|_| DegreeError::Parse {
            token: k.to_string(),
            reason: "degree must be a non-negative integer",
        })?;
        let probability: f64 = p.trim().parse().map_err(|_| DegreeError::Parse {
            token: p.to_string(),
            reason: "probability must be a number",
        })?;
        entries.push((degree, probability));
    }
    DegreeDistribution::from_entries(&entries)
}

/// Parses `key=value` pairs in the fixed order given by `keys`.
fn parse_pairs(body: &str, keys: &[&'static str]) -> Result<Vec<f64>, DegreeError> {
    let mut values = vec![None; keys.len()];
    for token in body.split(',') {
        let (k, v) = token.split_once('=').ok_or_else(|| DegreeError::Parse {
            token: token.to_string(),
            reason: "expected `key=value`",
        })?;
        let idx = keys
            .iter()
            .position(|&key| key == k.trim())
            .ok_or_else(|| DegreeError::Parse {
                token: k.to_string(),
                reason: "unknown parameter for this family",
            })?;
        let value: f64 = v.trim().parse().map_err(|_| DegreeError::Parse {
            token: v.to_string(),
            reason: "value must be a number",
        })?;
        if values[idx].replace(value).is_some() {
            return Err(DegreeError::Parse {
                token: k.to_string(),
                reason: "parameter given twice",
            });
        }
    }
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or(DegreeError::Parse {
                token: keys[i].to_string(),
                reason: "missing parameter",
            })
        })
        .collect()
}
