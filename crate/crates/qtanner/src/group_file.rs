//! Group specifications: `cyclic:<n>` or a multiplication-table file.
//!
//! A table file lists one row of the Cayley table per line, entries separated
//! by whitespace. An optional `names <label> ...` line gives element names.
//! Blank lines and `#` comments are ignored.

use std::path::Path;

use anyhow::{bail, Context, Result};
use qtanner_core::complex::FiniteGroup;

pub fn parse_group_table(label: &str, text: &str) -> Result<FiniteGroup> {
    let mut names = None;
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("names") {
            names = Some(rest.split_whitespace().map(str::to_string).collect::<Vec<_>>());
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("line {}: expected element indices", i + 1))?;
        rows.push(row);
    }
    if let Some(n) = &names {
        if n.len() != rows.len() {
            bail!("{} names for a table of order {}", n.len(), rows.len());
        }
    }
    Ok(FiniteGroup::from_table(label, &rows, names)?)
}

/// Resolves `cyclic:<n>` directly; any other value is read as a table file.
pub fn resolve_group(spec: &str) -> Result<FiniteGroup> {
    if let Some(n) = spec.strip_prefix("cyclic:") {
        let n: usize = n.parse().with_context(|| format!("bad cyclic order in `{spec}`"))?;
        return Ok(FiniteGroup::cyclic(n)?);
    }
    let path = Path::new(spec);
    let text = std::fs::read_to_string(path).with_context(|| format!("reading group table {spec}"))?;
    let label = format!(
        "table:{}",
        path.file_stem().and_then(|s| s.to_str()).unwrap_or("group")
    );
    parse_group_table(&label, &text)
}
