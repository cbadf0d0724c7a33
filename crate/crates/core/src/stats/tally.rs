use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;

use super::brt::{compute_brt, BrtValue};
use super::situation::{extract_observations, is_high_leverage, CountingMode, SituationClass, SituationObservation};
use super::StatsError;
use crate::state::StateTimeline;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stratum {
    All,
    HighLeverage,
}

impl Stratum {
    pub fn name(self) -> &'static str {
        match self {
            Stratum::All => "all",
            Stratum::HighLeverage => "hl",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "all" => Some(Stratum::All),
            "hl" => Some(Stratum::HighLeverage),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellKey {
    pub pitcher_id: String,
    pub season: u16,
    pub class: SituationClass,
    pub stratum: Stratum,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AppearanceKey {
    pub pitcher_id: String,
    pub season: u16,
    pub stratum: Stratum,
}

/// Numerator/denominator pair. For situation cells the numerator counts
/// half-innings that scored later; for appearance cells it counts distinct
/// half-innings and the denominator counts credited snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Cell {
    pub numerator: u64,
    pub denominator: u64,
}

impl Cell {
    fn add(&mut self, other: Cell) {
        self.numerator += other.numerator;
        self.denominator += other.denominator;
    }
}

/// Mergeable counters keyed by pitcher, season, class and stratum.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TallyTable {
    pub cells: BTreeMap<CellKey, Cell>,
    pub appearances: BTreeMap<AppearanceKey, Cell>,
}

impl TallyTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty() && self.appearances.is_empty()
    }

    pub fn add_cell(&mut self, key: CellKey, cell: Cell) {
        self.cells.entry(key).or_default().add(cell);
    }

    pub fn add_appearance(&mut self, key: AppearanceKey, cell: Cell) {
        self.appearances.entry(key).or_default().add(cell);
    }

    pub fn add_observation(&mut self, obs: &SituationObservation) {
        let cell = Cell { numerator: obs.scored_later as u64, denominator: 1 };
        let mut key =
            CellKey { pitcher_id: obs.pitcher_id.clone(), season: obs.season, class: obs.class, stratum: Stratum::All };
        if obs.high_leverage {
            let mut hl = key.clone();
            hl.stratum = Stratum::HighLeverage;
            self.add_cell(hl, cell);
        }
        key.stratum = Stratum::All;
        self.add_cell(key, cell);
    }

    /// Adds a timeline's observations and its per-pitcher appearance counts.
    /// Returns the number of observations added.
    pub fn record_timeline(&mut self, timeline: &StateTimeline, mode: CountingMode) -> usize {
        if !timeline.is_usable() {
            return 0;
        }
        let observations = extract_observations(timeline, mode);
        for obs in &observations {
            self.add_observation(obs);
        }
        let mut per_pitcher: BTreeMap<(&str, Stratum), u64> = BTreeMap::new();
        for snap in &timeline.snapshots {
            *per_pitcher.entry((&snap.pitcher_id, Stratum::All)).or_default() += 1;
            if timeline.score_known && is_high_leverage(snap.inning, snap.score_diff_abs()) {
                *per_pitcher.entry((&snap.pitcher_id, Stratum::HighLeverage)).or_default() += 1;
            }
        }
        for ((pitcher, stratum), snapshots) in per_pitcher {
            let key = AppearanceKey { pitcher_id: pitcher.to_string(), season: timeline.season, stratum };
            self.add_appearance(key, Cell { numerator: 1, denominator: snapshots });
        }
        observations.len()
    }

    pub fn pitchers(&self) -> BTreeSet<&str> {
        self.appearances.keys().map(|k| k.pitcher_id.as_str()).collect()
    }

    /// First and last season in which the pitcher was credited with a play.
    pub fn season_span(&self, pitcher_id: &str) -> Option<(u16, u16)> {
        let seasons = self
            .appearances
            .keys()
            .filter(|k| k.pitcher_id == pitcher_id && k.stratum == Stratum::All)
            .map(|k| k.season);
        seasons.fold(None, |acc, s| match acc {
            None => Some((s, s)),
            Some((lo, hi)) => Some((lo.min(s), hi.max(s))),
        })
    }

    /// Keeps only rows whose season lies in `seasons`.
    pub fn restrict_seasons(&self, seasons: &RangeInclusive<u16>) -> TallyTable {
        TallyTable {
            cells: self
                .cells
                .iter()
                .filter(|(k, _)| seasons.contains(&k.season))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
            appearances: self
                .appearances
                .iter()
                .filter(|(k, _)| seasons.contains(&k.season))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        }
    }

    pub fn retain_pitchers(&mut self, keep: impl Fn(&str) -> bool) {
        self.cells.retain(|k, _| keep(&k.pitcher_id));
        self.appearances.retain(|k, _| keep(&k.pitcher_id));
    }
}

/// Cellwise sum.
pub fn merge(a: &TallyTable, b: &TallyTable) -> TallyTable {
    let mut out = a.clone();
    out.merge_from(b);
    out
}

impl TallyTable {
    pub fn merge_from(&mut self, other: &TallyTable) {
        for (k, v) in &other.cells {
            self.add_cell(k.clone(), *v);
        }
        for (k, v) in &other.appearances {
            self.add_appearance(k.clone(), *v);
        }
    }
}

/// Which cells to pool when computing rates.
#[derive(Debug, Clone)]
pub struct Selector {
    pub outs: u8,
    pub stratum: Stratum,
    pub pitchers: Option<BTreeSet<String>>,
    pub seasons: Option<RangeInclusive<u16>>,
}

impl Selector {
    pub fn aggregate(outs: u8, stratum: Stratum) -> Self {
        Selector { outs, stratum, pitchers: None, seasons: None }
    }

    pub fn for_pitchers<I, S>(outs: u8, stratum: Stratum, pitchers: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Selector { outs, stratum, pitchers: Some(pitchers.into_iter().map(Into::into).collect()), seasons: None }
    }

    fn matches(&self, key: &CellKey) -> bool {
        key.stratum == self.stratum
            && self.pitchers.as_ref().is_none_or(|p| p.contains(&key.pitcher_id))
            && self.seasons.as_ref().is_none_or(|s| s.contains(&key.season))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rate {
    pub class: SituationClass,
    pub numerator: u64,
    pub denominator: u64,
}

impl Rate {
    pub fn value(&self) -> Result<f64, StatsError> {
        if self.denominator == 0 {
            Err(StatsError::EmptyCell(self.class))
        } else {
            Ok(self.numerator as f64 / self.denominator as f64)
        }
    }
}

/// T, S and F for one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RateSet {
    pub outs: u8,
    pub t: Rate,
    pub s: Rate,
    pub f: Rate,
}

impl RateSet {
    pub fn brt(&self) -> Result<BrtValue, StatsError> {
        let mut v = compute_brt(self.t.value()?, self.s.value()?, self.f.value()?);
        v.sample_sizes = Some((self.t.denominator, self.s.denominator, self.f.denominator));
        Ok(v)
    }

    pub fn has_empty_cell(&self) -> bool {
        [self.t, self.s, self.f].iter().any(|r| r.denominator == 0)
    }
}

pub fn rates(table: &TallyTable, selector: &Selector) -> RateSet {
    let [tc, sc, fc] = SituationClass::for_threshold(selector.outs);
    let mut acc = [tc, sc, fc].map(|class| Rate { class, numerator: 0, denominator: 0 });
    for (key, cell) in &table.cells {
        if !selector.matches(key) {
            continue;
        }
        if let Some(rate) = acc.iter_mut().find(|r| r.class == key.class) {
            rate.numerator += cell.numerator;
            rate.denominator += cell.denominator;
        }
    }
    let [t, s, f] = acc;
    RateSet { outs: selector.outs, t, s, f }
}

/// Distinct half-innings in which the pitcher was responsible for at least
/// one high-leverage snapshot.
pub fn career_high_leverage_innings(pitcher_id: &str, table: &TallyTable) -> u64 {
    table
        .appearances
        .iter()
        .filter(|(k, _)| k.pitcher_id == pitcher_id && k.stratum == Stratum::HighLeverage)
        .map(|(_, c)| c.numerator)
        .sum()
}

/// Career high-leverage innings for every pitcher in the table.
pub fn all_career_high_leverage_innings(table: &TallyTable) -> BTreeMap<String, u64> {
    let mut out: BTreeMap<String, u64> = table.pitchers().into_iter().map(|p| (p.to_string(), 0)).collect();
    for (k, c) in &table.appearances {
        if k.stratum == Stratum::HighLeverage {
            *out.entry(k.pitcher_id.clone()).or_default() += c.numerator;
        }
    }
    out
}
