use std::collections::BTreeMap;
use std::path::Path;

use super::Configuration;
use crate::error::{Error, Result};

/// Parses whitespace edge-list text, one `from to` pair per line.
///
/// Labels are remapped to `0..n`: numerically when every label is an
/// integer, lexicographically otherwise. Blank lines and `#` comments are
/// ignored. Out-degrees are whatever the list implies.
pub fn parse_edge_list(text: &str) -> Result<Configuration> {
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => edges.push((a.to_string(), b.to_string())),
            _ => return Err(Error::Parse(format!("line {}: expected `from to`", lineno + 1))),
        }
    }
    let mut labels: Vec<&String> = edges.iter().flat_map(|(a, b)| [a, b]).collect();
    labels.sort();
    labels.dedup();
    if labels.iter().all(|l| l.parse::<i64>().is_ok()) {
        labels.sort_by_key(|l| l.parse::<i64>().unwrap_or_default());
    }
    let index: BTreeMap<&String, usize> = labels.iter().enumerate().map(|(k, &l)| (l, k)).collect();
    let n = labels.len();
    let mut out = vec![Vec::new(); n];
    for (a, b) in &edges {
        out[index[a]].push(index[b]);
    }
    Configuration::new(n, out)
}

/// Reads a configuration from JSON (`{"n":..,"out":..}`) or edge-list text.
pub fn read_configuration(path: &Path) -> Result<Configuration> {
    let text = std::fs::read_to_string(path)?;
    if text.trim_start().starts_with('{') {
        Configuration::from_json(&text)
    } else {
        parse_edge_list(&text)
    }
}
