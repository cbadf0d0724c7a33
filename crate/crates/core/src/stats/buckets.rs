use std::collections::BTreeMap;

use super::brt::BrtValue;
use super::tally::{rates, RateSet, Selector, Stratum, TallyTable};
use super::StatsError;

/// Pooled and per-pitcher statistics for a set of pitchers.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub pitchers: Vec<String>,
    pub pooled: RateSet,
    pub cumulative: Result<BrtValue, StatsError>,
    pub individual: Vec<(String, BrtValue)>,
    pub mean: Option<f64>,
    /// Sample standard deviation; 0 for a single pitcher.
    pub stddev: Option<f64>,
    /// Pitchers left out of mean/stddev because a cell was empty.
    pub excluded: Vec<String>,
}

pub fn mean_and_stddev(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Some((mean, 0.0));
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    Some((mean, (ss / (n - 1.0)).sqrt()))
}

pub fn group_summary(
    table: &TallyTable,
    pitchers: &[String],
    outs: u8,
    stratum: Stratum,
) -> Result<GroupSummary, StatsError> {
    if pitchers.is_empty() {
        return Err(StatsError::EmptyBucket);
    }
    let pooled = rates(table, &Selector::for_pitchers(outs, stratum, pitchers.iter().cloned()));
    let mut individual = Vec::new();
    let mut excluded = Vec::new();
    for p in pitchers {
        match rates(table, &Selector::for_pitchers(outs, stratum, [p.clone()])).brt() {
            Ok(v) => individual.push((p.clone(), v)),
            Err(_) => excluded.push(p.clone()),
        }
    }
    let values: Vec<f64> = individual.iter().map(|(_, v)| v.brt).collect();
    let moments = mean_and_stddev(&values);
    Ok(GroupSummary {
        pitchers: pitchers.to_vec(),
        cumulative: pooled.brt(),
        pooled,
        individual,
        mean: moments.map(|m| m.0),
        stddev: moments.map(|m| m.1),
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BucketRow {
    pub lower: u64,
    pub upper: Option<u64>,
    pub summary: Result<GroupSummary, StatsError>,
}

impl BucketRow {
    pub fn label(&self) -> String {
        match self.upper {
            Some(u) => format!("[{},{})", self.lower, u),
            None => format!("{}+", self.lower),
        }
    }
}

/// Groups pitchers by career high-leverage innings into half-open ranges
/// `[b_k, b_{k+1})`, the last one unbounded. Pitchers below the first
/// boundary fall in no bucket.
pub fn bucket_report(
    table: &TallyTable,
    career_innings: &BTreeMap<String, u64>,
    boundaries: &[u64],
    outs: u8,
    stratum: Stratum,
) -> Vec<BucketRow> {
    boundaries
        .iter()
        .enumerate()
        .map(|(k, &lower)| {
            let upper = boundaries.get(k + 1).copied();
            let members: Vec<String> = career_innings
                .iter()
                .filter(|(_, &n)| n >= lower && upper.is_none_or(|u| n < u))
                .map(|(p, _)| p.clone())
                .collect();
            BucketRow { lower, upper, summary: group_summary(table, &members, outs, stratum) }
        })
        .collect()
}
