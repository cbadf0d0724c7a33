use std::collections::BTreeMap;

use crate::stats::{
    all_career_high_leverage_innings, bucket_report, compute_brt, decide, group_summary, rates, round3, BrtValue,
    Decision, GroupSummary, Rate, RateSet, Selector, SituationObservation, Stratum, TallyTable,
};

use super::config::{OutputFormat, RunConfig};
use super::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Table { headers: headers.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.headers).expect("in-memory write");
                for row in &self.rows {
                    w.write_record(row).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
            }
            OutputFormat::Text => {
                let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
                for row in &self.rows {
                    for (w, cell) in widths.iter_mut().zip(row) {
                        *w = (*w).max(cell.chars().count());
                    }
                }
                let line = |cells: &[String]| {
                    let parts: Vec<String> = cells
                        .iter()
                        .zip(&widths)
                        .enumerate()
                        .map(|(i, (c, &w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                        .collect();
                    parts.join("  ").trim_end().to_string()
                };
                let mut out = line(&self.headers);
                out.push('\n');
                out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1)));
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&line(row));
                    out.push('\n');
                }
                out
            }
        }
    }
}

fn rate_cell(r: &Rate) -> String {
    r.value().map(round3).unwrap_or_default()
}

fn opt3(v: Option<f64>) -> String {
    v.map(round3).unwrap_or_default()
}

/// Applies the year range and cohort filter to a tally.
pub fn prepare(tally: &TallyTable, config: &RunConfig) -> TallyTable {
    let mut t = match &config.years {
        Some(y) => tally.restrict_seasons(y),
        None => tally.clone(),
    };
    if config.cohort.is_active() {
        let spans: BTreeMap<String, (u16, u16)> =
            t.pitchers().into_iter().filter_map(|p| t.season_span(p).map(|s| (p.to_string(), s))).collect();
        let cohort = config.cohort;
        t.retain_pitchers(|p| spans.get(p).is_some_and(|&(a, b)| cohort.admits(a, b)));
        if let Some(last) = cohort.active_through {
            t = t.restrict_seasons(&(0..=last));
        }
    }
    t
}

pub fn table1(tally: &TallyTable) -> Table {
    let mut t = Table::new(["stratum", "outs", "T", "S", "F", "BRT", "clamped", "n_T", "n_S", "n_F"]);
    for stratum in [Stratum::All, Stratum::HighLeverage] {
        for outs in [1u8, 0] {
            let r = rates(tally, &Selector::aggregate(outs, stratum));
            let brt = r.brt().ok();
            t.push(vec![
                stratum.name().to_string(),
                outs.to_string(),
                rate_cell(&r.t),
                rate_cell(&r.s),
                rate_cell(&r.f),
                brt.map(|b| round3(b.brt)).unwrap_or_default(),
                brt.map(|b| b.clamped.to_string()).unwrap_or_default(),
                r.t.denominator.to_string(),
                r.s.denominator.to_string(),
                r.f.denominator.to_string(),
            ]);
        }
    }
    t
}

fn summary_row(outs: u8, label: &str, g: &Result<GroupSummary, crate::stats::StatsError>) -> Vec<String> {
    match g {
        Ok(g) => vec![
            outs.to_string(),
            label.to_string(),
            g.pitchers.len().to_string(),
            g.cumulative.as_ref().map(|b| round3(b.brt)).unwrap_or_default(),
            opt3(g.mean),
            opt3(g.stddev),
            g.excluded.len().to_string(),
        ],
        Err(_) => vec![
            outs.to_string(),
            label.to_string(),
            "0".into(),
            String::new(),
            String::new(),
            String::new(),
            "0".into(),
        ],
    }
}

pub fn table2(tally: &TallyTable, config: &RunConfig) -> Table {
    let career = all_career_high_leverage_innings(tally);
    let stratum = config.stratum();
    let everyone: Vec<String> = career.keys().cloned().collect();
    let mut t = Table::new(["outs", "group", "pitchers", "cumulative", "mean", "stddev", "excluded"]);
    for outs in [1u8, 0] {
        for row in bucket_report(tally, &career, &config.buckets, outs, stratum) {
            t.push(summary_row(outs, &row.label(), &row.summary));
        }
        if !config.save_leaders.is_empty() {
            t.push(summary_row(outs, "save leaders", &group_summary(tally, &config.save_leaders, outs, stratum)));
        }
        t.push(summary_row(outs, "all", &group_summary(tally, &everyone, outs, stratum)));
    }
    t
}

/// `pitcher_id,era` rows; lines whose second cell is not a number (such as
/// a header) are skipped.
pub fn read_era(text: &str) -> Result<BTreeMap<String, f64>, CliError> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
    let mut out = BTreeMap::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::Data(format!("era file: {e}")))?;
        if let (Some(id), Some(era)) = (rec.get(0), rec.get(1).and_then(|v| v.trim().parse::<f64>().ok())) {
            out.insert(id.trim().to_string(), era);
        }
    }
    Ok(out)
}

pub struct PitcherRow {
    pub pitcher_id: String,
    pub rates: RateSet,
    pub brt: BrtValue,
    pub high_leverage_innings: u64,
}

/// Pitchers with enough high-leverage innings and no empty cell, ascending
/// by threshold.
pub fn pitcher_rows(tally: &TallyTable, config: &RunConfig) -> Vec<PitcherRow> {
    let career = all_career_high_leverage_innings(tally);
    let mut rows: Vec<PitcherRow> = career
        .into_iter()
        .filter(|(_, n)| *n >= config.min_appearances)
        .filter_map(|(p, n)| {
            let r = rates(tally, &Selector::for_pitchers(config.outs, config.stratum(), [p.clone()]));
            let brt = r.brt().ok()?;
            Some(PitcherRow { pitcher_id: p, rates: r, brt, high_leverage_innings: n })
        })
        .collect();
    rows.sort_by(|a, b| a.brt.brt.total_cmp(&b.brt.brt).then_with(|| a.pitcher_id.cmp(&b.pitcher_id)));
    rows
}

pub fn table3(
    tally: &TallyTable,
    config: &RunConfig,
    era: &BTreeMap<String, f64>,
    names: &BTreeMap<String, String>,
) -> Table {
    let i = config.outs;
    let mut t = Table::new([
        "pitcher_id".to_string(),
        "name".into(),
        format!("T{i}"),
        format!("S{i}"),
        format!("F{i}"),
        format!("BRT{i}"),
        "ERA".into(),
        "hl_innings".into(),
        "n_T".into(),
        "n_S".into(),
        "n_F".into(),
    ]);
    let rows = pitcher_rows(tally, config);
    let mut sums = [0.0f64; 4];
    let mut era_sum = (0.0f64, 0usize);
    for r in &rows {
        let (tv, sv, fv) = (r.brt.t, r.brt.s, r.brt.f);
        for (acc, v) in sums.iter_mut().zip([tv, sv, fv, r.brt.brt]) {
            *acc += v;
        }
        let e = era.get(&r.pitcher_id).copied();
        if let Some(e) = e {
            era_sum.0 += e;
            era_sum.1 += 1;
        }
        t.push(vec![
            r.pitcher_id.clone(),
            names.get(&r.pitcher_id).cloned().unwrap_or_default(),
            round3(tv),
            round3(sv),
            round3(fv),
            round3(r.brt.brt),
            e.map(|e| format!("{e:.2}")).unwrap_or_default(),
            r.high_leverage_innings.to_string(),
            r.rates.t.denominator.to_string(),
            r.rates.s.denominator.to_string(),
            r.rates.f.denominator.to_string(),
        ]);
    }
    if !rows.is_empty() {
        let n = rows.len() as f64;
        let mut mean = vec!["mean".to_string(), String::new()];
        mean.extend(sums.iter().map(|s| round3(s / n)));
        mean.push(if era_sum.1 > 0 { format!("{:.2}", era_sum.0 / era_sum.1 as f64) } else { String::new() });
        mean.extend(std::iter::repeat_n(String::new(), 4));
        t.push(mean);
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub enum BrtSource {
    Explicit { t: f64, s: f64, f: f64 },
    Pitcher(String),
    Aggregate,
}

pub struct DecideOutcome {
    pub source: String,
    pub brt: BrtValue,
    pub decision: Decision,
    pub margin: f64,
}

pub fn decide_with(
    tally: Option<&TallyTable>,
    source: &BrtSource,
    p: f64,
    config: &RunConfig,
) -> Result<DecideOutcome, CliError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(CliError::Usage(format!("probability {p} outside [0,1]")));
    }
    let (label, brt) = match source {
        BrtSource::Explicit { t, s, f } => ("explicit".to_string(), compute_brt(*t, *s, *f)),
        BrtSource::Pitcher(id) => {
            let tally = tally.ok_or_else(|| CliError::Usage("a pitcher source needs inputs or a cache".into()))?;
            if !tally.pitchers().contains(id.as_str()) {
                return Err(CliError::Data(format!("unknown pitcher `{id}`")));
            }
            let r = rates(tally, &Selector::for_pitchers(config.outs, config.stratum(), [id.clone()]));
            let brt = r.brt().map_err(|e| CliError::Data(format!("pitcher `{id}`: {e}")))?;
            (format!("pitcher {id} ({})", config.stratum().name()), brt)
        }
        BrtSource::Aggregate => {
            let tally = tally.ok_or_else(|| CliError::Usage("an aggregate source needs inputs or a cache".into()))?;
            let r = rates(tally, &Selector::aggregate(config.outs, config.stratum()));
            let brt = r.brt().map_err(|e| CliError::Data(format!("aggregate: {e}")))?;
            (format!("aggregate ({})", config.stratum().name()), brt)
        }
    };
    Ok(DecideOutcome { source: label, decision: decide(p, &brt), margin: p - brt.brt, brt })
}

pub fn decide_table(o: &DecideOutcome, p: f64) -> Table {
    let mut t = Table::new(["source", "T", "S", "F", "BRT", "p", "decision", "margin"]);
    t.push(vec![
        o.source.clone(),
        round3(o.brt.t),
        round3(o.brt.s),
        round3(o.brt.f),
        round3(o.brt.brt),
        round3(p),
        o.decision.to_string(),
        round3(o.margin),
    ]);
    t
}

pub fn query_table(matches: &[SituationObservation]) -> Table {
    let mut t = Table::new(["game_id", "inning", "half", "pitcher_id", "score_diff", "scored_later"]);
    for o in matches {
        t.push(vec![
            o.key.game_id.clone(),
            o.inning.to_string(),
            if o.key.half.code() == 0 { "top".into() } else { "bottom".into() },
            o.pitcher_id.clone(),
            o.score_diff_abs.to_string(),
            o.scored_later.to_string(),
        ]);
    }
    t
}
