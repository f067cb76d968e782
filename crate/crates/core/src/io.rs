//! JSON network files.
//!
//! ```json
//! { "n": 3, "subsystems": [ { "A": [[2,1]], "B": [[1,1]] }, { "A": [[3,2]], "B": [] } ] }
//! ```
//!
//! Positions are 1-based `[row, col]`. The input count `m` of a subsystem is the
//! largest column in `B`, unless an explicit `"m"` is given (needed for
//! trailing all-zero input columns). An optional `"label"` names the subsystem.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SparsityPattern, StructuredPair, TemporalNetwork};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    n: usize,
    subsystems: Vec<SubsystemFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubsystemFile {
    #[serde(rename = "A")]
    a: Vec<[usize; 2]>,
    #[serde(rename = "B")]
    b: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

fn to_zero_based(
    subsystem: usize,
    name: &str,
    entries: &[[usize; 2]],
    rows: usize,
    cols: usize,
) -> Result<SparsityPattern> {
    let mut positions = Vec::with_capacity(entries.len());
    for &[r, c] in entries {
        if r == 0 || c == 0 || r > rows || c > cols {
            return Err(Error::Parse(format!(
                "subsystem {subsystem}: {name} entry [{r}, {c}] outside 1..={rows} x 1..={cols}"
            )));
        }
        positions.push((r - 1, c - 1));
    }
    SparsityPattern::new(rows, cols, positions)
}

/// Parses and validates a network file.
pub fn parse_network(text: &str) -> Result<TemporalNetwork> {
    let file: NetworkFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let n = file.n;
    let mut pairs = Vec::with_capacity(file.subsystems.len());
    let mut labels = Vec::with_capacity(file.subsystems.len());
    for (i, sub) in file.subsystems.iter().enumerate() {
        let inferred = sub.b.iter().map(|e| e[1]).max().unwrap_or(0);
        let m = match sub.m {
            Some(m) if m < inferred => {
                return Err(Error::Parse(format!(
                    "subsystem {}: m = {m} but B uses column {inferred}",
                    i + 1
                )))
            }
            Some(m) => m,
            None => inferred,
        };
        let a = to_zero_based(i + 1, "A", &sub.a, n, n)?;
        let b = to_zero_based(i + 1, "B", &sub.b, n, m)?;
        pairs.push(StructuredPair::new(a, b)?);
        labels.push(sub.label.clone());
    }
    Ok(TemporalNetwork::new(n, pairs)?.with_labels(labels))
}

fn one_based(p: &SparsityPattern) -> Vec<[usize; 2]> {
    p.iter().map(|(r, c)| [r + 1, c + 1]).collect()
}

fn to_file(net: &TemporalNetwork) -> NetworkFile {
    let subsystems = net
        .pairs()
        .iter()
        .zip(net.labels())
        .map(|(pair, label)| {
            let b = one_based(pair.b());
            let inferred = b.iter().map(|e| e[1]).max().unwrap_or(0);
            SubsystemFile {
                a: one_based(pair.a()),
                m: (pair.m() != inferred).then_some(pair.m()),
                b,
                label: label.clone(),
            }
        })
        .collect();
    NetworkFile {
        n: net.n(),
        subsystems,
    }
}

/// Serializes a network in the file format (compact).
pub fn network_to_json(net: &TemporalNetwork) -> String {
    serde_json::to_string(&to_file(net)).expect("network serialization")
}

/// Serializes a network in the file format (indented).
pub fn network_to_json_pretty(net: &TemporalNetwork) -> String {
    serde_json::to_string_pretty(&to_file(net)).expect("network serialization")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn example_file_round_trips_byte_for_byte() {
        let text = r#"{"n":3,"subsystems":[{"A":[[2,1]],"B":[[1,1]]},{"A":[[3,2]],"B":[]}]}"#;
        let net = parse_network(text).unwrap();
        assert_eq!(net, fixtures::ex1());
        assert_eq!(network_to_json(&net), text);
    }

    #[test]
    fn explicit_m_keeps_empty_columns() {
        let text = r#"{"n":2,"subsystems":[{"A":[],"B":[[1,1]],"m":3,"label":"first"}]}"#;
        let net = parse_network(text).unwrap();
        assert_eq!(net.pair(0).m(), 3);
        assert_eq!(net.labels()[0].as_deref(), Some("first"));
        assert_eq!(network_to_json(&net), text);
    }

    #[test]
    fn rejects_bad_files() {
        for text in [
            "{",
            r#"{"n":2,"subsystems":[]}"#,
            r#"{"n":2,"subsystems":[{"A":[[0,1]],"B":[]}]}"#,
            r#"{"n":2,"subsystems":[{"A":[[3,1]],"B":[]}]}"#,
            r#"{"n":2,"subsystems":[{"A":[],"B":[[1,2]],"m":1}]}"#,
            r#"{"n":2,"subsystems":[{"A":[],"B":[],"C":[]}]}"#,
        ] {
            assert!(parse_network(text).is_err(), "{text}");
        }
    }
}
