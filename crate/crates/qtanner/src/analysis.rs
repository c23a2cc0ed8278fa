//! Decimal-log gains of a LEAD run over a baseline run.

use std::collections::BTreeMap;

use qtanner_core::stats::delta_log;
use serde::Serialize;

use crate::harness::PointRecord;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum AnalysisError {
    #[error("grids differ: {0}")]
    GridMismatch(String),
    #[error("{0} has several records for code `{1}` at p={2}; filter by decoder")]
    Ambiguous(&'static str, String, f64),
    #[error("{0} has no records")]
    Empty(&'static str),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GainRecord {
    pub code: String,
    pub p: f64,
    pub baseline_ler: f64,
    pub lead_ler: f64,
    /// `None` when either LER is zero.
    pub delta_log: Option<f64>,
    pub subcode_fer: Option<f64>,
}

impl GainRecord {
    pub fn verdict(&self) -> &'static str {
        match self.delta_log {
            None => "undetermined (zero failures)",
            Some(d) if d > 0.0 => "lead better",
            Some(d) if d < 0.0 => "lead worse",
            Some(_) => "equal",
        }
    }
}

type Index<'a> = BTreeMap<(String, u64), &'a PointRecord>;

fn index<'a>(
    label: &'static str,
    records: &'a [PointRecord],
    decoder: Option<&str>,
) -> Result<Index<'a>, AnalysisError> {
    let mut map = BTreeMap::new();
    for r in records.iter().filter(|r| decoder.is_none_or(|d| r.decoder == d)) {
        if map.insert((r.code.clone(), r.p.to_bits()), r).is_some() {
            return Err(AnalysisError::Ambiguous(label, r.code.clone(), r.p));
        }
    }
    if map.is_empty() {
        return Err(AnalysisError::Empty(label));
    }
    Ok(map)
}

/// Pairs records by `(code, p)`. Both sides must cover exactly the same
/// points. Optional decoder filters pick one decoder out of a shared file.
pub fn gains(
    baseline: &[PointRecord],
    lead: &[PointRecord],
    baseline_decoder: Option<&str>,
    lead_decoder: Option<&str>,
) -> Result<Vec<GainRecord>, AnalysisError> {
    let base = index("baseline", baseline, baseline_decoder)?;
    let lead = index("lead", lead, lead_decoder)?;
    if let Some((code, p)) = base.keys().find(|k| !lead.contains_key(*k)) {
        return Err(AnalysisError::GridMismatch(format!(
            "baseline point ({code}, p={}) missing from lead",
            f64::from_bits(*p)
        )));
    }
    if let Some((code, p)) = lead.keys().find(|k| !base.contains_key(*k)) {
        return Err(AnalysisError::GridMismatch(format!(
            "lead point ({code}, p={}) missing from baseline",
            f64::from_bits(*p)
        )));
    }
    let mut out: Vec<GainRecord> = base
        .iter()
        .map(|(key, b)| {
            let l = lead[key];
            GainRecord {
                code: b.code.clone(),
                p: b.p,
                baseline_ler: b.ler,
                lead_ler: l.ler,
                delta_log: delta_log(b.ler, l.ler),
                subcode_fer: l.subcode_fer,
            }
        })
        .collect();
    out.sort_by(|a, b| a.code.cmp(&b.code).then(a.p.total_cmp(&b.p)));
    Ok(out)
}

/// `p,delta_log,subcode_fer` rows; undefined gains are written as `inf?`.
pub fn gains_to_csv(gains: &[GainRecord]) -> String {
    let mut out = String::from("p,delta_log,subcode_fer\n");
    for g in gains {
        let d = g.delta_log.map_or_else(|| "inf?".to_string(), |d| d.to_string());
        let s = g.subcode_fer.map(|s| s.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{}\n", g.p, d, s));
    }
    out
}
