use std::fmt;
use std::str::FromStr;

use crate::state::{BaseState, HalfInningKey, StateTimeline};

/// The three base/out situations behind T, S and F. The payload is the
/// number of outs in the situation itself, so `FirstOnly(j)` feeds the
/// (j-1)-out statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SituationClass {
    ThirdOccupied(u8),
    SecondNoThird(u8),
    FirstOnly(u8),
}

impl SituationClass {
    pub fn outs(self) -> u8 {
        match self {
            Self::ThirdOccupied(o) | Self::SecondNoThird(o) | Self::FirstOnly(o) => o,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::ThirdOccupied(_) => "third",
            Self::SecondNoThird(_) => "second",
            Self::FirstOnly(_) => "first",
        }
    }

    pub fn from_parts(name: &str, outs: u8) -> Option<Self> {
        let class = match name {
            "third" => Self::ThirdOccupied(outs),
            "second" => Self::SecondNoThird(outs),
            "first" => Self::FirstOnly(outs),
            _ => return None,
        };
        class.is_valid().then_some(class)
    }

    fn is_valid(self) -> bool {
        match self {
            Self::ThirdOccupied(o) | Self::SecondNoThird(o) => o <= 1,
            Self::FirstOnly(o) => (1..=2).contains(&o),
        }
    }

    /// The T, S and F classes contributing to the `outs`-out threshold.
    pub fn for_threshold(outs: u8) -> [SituationClass; 3] {
        [Self::ThirdOccupied(outs), Self::SecondNoThird(outs), Self::FirstOnly(outs + 1)]
    }
}

impl fmt::Display for SituationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name(), self.outs())
    }
}

impl FromStr for SituationClass {
    type Err = String;

    /// Accepts `third/1`, `second/0`, `first/2`, or the short forms `T1`,
    /// `S0`, `F2` where the digit is the situation's own out count.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parsed = if let Some((name, outs)) = s.split_once('/') {
            outs.parse().ok().and_then(|o| Self::from_parts(name, o))
        } else {
            let mut chars = s.chars();
            let name = match chars.next() {
                Some('T' | 't') => "third",
                Some('S' | 's') => "second",
                Some('F' | 'f') => "first",
                _ => return Err(format!("unknown situation class `{s}`")),
            };
            chars.as_str().parse().ok().and_then(|o| Self::from_parts(name, o))
        };
        parsed.ok_or_else(|| format!("unknown situation class `{s}`"))
    }
}

pub fn classify_state(bases: &BaseState, outs: u8) -> Option<SituationClass> {
    let (first, second, third) = (bases.first.is_some(), bases.second.is_some(), bases.third.is_some());
    if third && outs <= 1 {
        Some(SituationClass::ThirdOccupied(outs))
    } else if second && !third && outs <= 1 {
        Some(SituationClass::SecondNoThird(outs))
    } else if first && !second && !third && (1..=2).contains(&outs) {
        Some(SituationClass::FirstOnly(outs))
    } else {
        None
    }
}

/// Whether runs scored on the snapshot's own play count as "later".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum CountingMode {
    #[default]
    IncludingPlay,
    ExcludingPlay,
}

impl CountingMode {
    pub fn name(self) -> &'static str {
        match self {
            CountingMode::IncludingPlay => "including",
            CountingMode::ExcludingPlay => "excluding",
        }
    }
}

impl FromStr for CountingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "including" | "include" => Ok(Self::IncludingPlay),
            "excluding" | "exclude" => Ok(Self::ExcludingPlay),
            _ => Err(format!("unknown counting mode `{s}` (expected including|excluding)")),
        }
    }
}

pub fn is_high_leverage(inning: u32, score_diff_abs: u32) -> bool {
    (inning == 8 || inning == 9) && score_diff_abs <= 1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SituationObservation {
    pub key: HalfInningKey,
    pub pitcher_id: String,
    pub class: SituationClass,
    pub scored_later: bool,
    pub high_leverage: bool,
    pub leverage_known: bool,
    pub season: u16,
    pub score_diff_abs: u32,
    pub inning: u32,
    pub play_index: usize,
}

/// One observation per class, taken at the class's first snapshot in the
/// half-inning. Excluded timelines yield nothing.
pub fn extract_observations(timeline: &StateTimeline, mode: CountingMode) -> Vec<SituationObservation> {
    if !timeline.is_usable() {
        return Vec::new();
    }
    let mut seen: Vec<SituationClass> = Vec::with_capacity(6);
    let mut out = Vec::new();
    for (i, snap) in timeline.snapshots.iter().enumerate() {
        let Some(class) = classify_state(&snap.bases, snap.outs) else { continue };
        if seen.contains(&class) {
            continue;
        }
        seen.push(class);
        let diff = snap.score_diff_abs();
        out.push(SituationObservation {
            key: timeline.key.clone(),
            pitcher_id: snap.pitcher_id.clone(),
            class,
            scored_later: timeline.runs_later(i, mode == CountingMode::IncludingPlay) >= 1,
            high_leverage: timeline.score_known && is_high_leverage(snap.inning, diff),
            leverage_known: timeline.score_known,
            season: timeline.season,
            score_diff_abs: diff,
            inning: snap.inning,
            play_index: snap.play_index,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::Half;
    use crate::state::{initial_snapshot, Snapshot};

    fn bases(first: bool, second: bool, third: bool) -> BaseState {
        BaseState {
            first: first.then(|| "a".into()),
            second: second.then(|| "b".into()),
            third: third.then(|| "c".into()),
        }
    }

    #[test]
    fn classification() {
        assert_eq!(classify_state(&bases(true, false, true), 1), Some(SituationClass::ThirdOccupied(1)));
        assert_eq!(classify_state(&bases(false, true, false), 0), Some(SituationClass::SecondNoThird(0)));
        assert_eq!(classify_state(&bases(true, true, false), 1), Some(SituationClass::SecondNoThird(1)));
        assert_eq!(classify_state(&bases(true, false, false), 2), Some(SituationClass::FirstOnly(2)));
        assert_eq!(classify_state(&bases(true, false, false), 0), None);
        assert_eq!(classify_state(&bases(false, false, true), 2), None);
        assert_eq!(classify_state(&bases(false, false, false), 1), None);
    }

    #[test]
    fn classes_are_exclusive_and_cover_spec() {
        for mask in 0u8..8 {
            for outs in 0..3 {
                let b = bases(mask & 1 != 0, mask & 2 != 0, mask & 4 != 0);
                let predicates =
                    [mask & 4 != 0 && outs <= 1, mask & 2 != 0 && mask & 4 == 0 && outs <= 1, mask == 1 && outs >= 1];
                assert!(predicates.iter().filter(|p| **p).count() <= 1);
                assert_eq!(classify_state(&b, outs).is_some(), predicates.iter().any(|p| *p));
            }
        }
    }

    #[test]
    fn class_parsing() {
        assert_eq!("F2".parse(), Ok(SituationClass::FirstOnly(2)));
        assert_eq!("third/0".parse(), Ok(SituationClass::ThirdOccupied(0)));
        assert!("F0".parse::<SituationClass>().is_err());
        assert!("T2".parse::<SituationClass>().is_err());
    }

    fn timeline(inning: u32, score: (u32, u32), states: &[(BaseState, u8)], runs: &[u8]) -> StateTimeline {
        let snapshots: Vec<Snapshot> = states
            .iter()
            .enumerate()
            .map(|(i, (b, o))| {
                let mut s = initial_snapshot(inning, Half::Bottom, score, "p");
                s.bases = b.clone();
                s.outs = *o;
                s.play_index = i;
                s
            })
            .collect();
        let mut runs_after = vec![0u32; runs.len()];
        let mut acc = 0;
        for i in (0..runs.len()).rev() {
            acc += u32::from(runs[i]);
            runs_after[i] = acc;
        }
        StateTimeline {
            key: crate::state::HalfInningKey { game_id: "G".into(), inning, half: Half::Bottom },
            season: 2003,
            snapshots,
            runs_on_play: runs.to_vec(),
            runs_after,
            complete: true,
            excluded: None,
            score_known: true,
        }
    }

    #[test]
    fn dedup_keeps_first_occurrence() {
        let t = timeline(
            5,
            (0, 0),
            &[
                (bases(false, false, true), 1),
                (bases(false, false, false), 1),
                (bases(false, false, true), 1),
                (bases(false, false, true), 2),
            ],
            &[0, 0, 1, 0],
        );
        let obs = extract_observations(&t, CountingMode::IncludingPlay);
        assert_eq!(obs.len(), 1);
        assert_eq!(obs[0].class, SituationClass::ThirdOccupied(1));
        assert_eq!(obs[0].play_index, 0);
        assert!(obs[0].scored_later);
        assert!(!obs[0].high_leverage);
    }

    #[test]
    fn high_leverage_first_two_outs_no_score() {
        let t = timeline(9, (2, 2), &[(bases(true, false, false), 2)], &[0]);
        let obs = extract_observations(&t, CountingMode::IncludingPlay);
        assert_eq!(obs.len(), 1);
        assert_eq!(obs[0].class, SituationClass::FirstOnly(2));
        assert!(!obs[0].scored_later);
        assert!(obs[0].high_leverage);
    }

    #[test]
    fn counting_mode_on_own_play() {
        let t = timeline(3, (0, 0), &[(bases(false, false, true), 0)], &[1]);
        assert!(extract_observations(&t, CountingMode::IncludingPlay)[0].scored_later);
        assert!(!extract_observations(&t, CountingMode::ExcludingPlay)[0].scored_later);
    }

    #[test]
    fn leverage_boundaries() {
        assert!(is_high_leverage(8, 1));
        assert!(is_high_leverage(9, 0));
        assert!(!is_high_leverage(9, 2));
        assert!(!is_high_leverage(10, 0));
        assert!(!is_high_leverage(5, 0));
    }

    #[test]
    fn excluded_timeline_has_no_observations() {
        let mut t = timeline(3, (0, 0), &[(bases(false, false, true), 0)], &[1]);
        t.excluded = Some("bad".into());
        assert!(extract_observations(&t, CountingMode::IncludingPlay).is_empty());
    }
}
