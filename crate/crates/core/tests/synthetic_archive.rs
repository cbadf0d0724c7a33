use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use brt::cli::ingest::ingest;
use brt::event::{parse_event_file, TimedEntry};
use brt::oracle::{
    emit_event_file, generate_season, high_leverage_appearances, OutcomeModel, PitcherChange, SeasonConfig,
    SyntheticGame,
};
use brt::state::replay_game;
use brt::stats::{all_career_high_leverage_innings, CountingMode, SituationClass, Stratum, TallyTable};

fn season(games: usize, seed: u64) -> Vec<SyntheticGame> {
    let config = SeasonConfig {
        games,
        seed,
        pitcher_change: Some(PitcherChange { inning: 8, after_outs: 0 }),
        ..SeasonConfig::default()
    };
    generate_season(&OutcomeModel::default(), &config).unwrap()
}

fn tally_text(text: &str, mode: CountingMode) -> TallyTable {
    let assembled = parse_event_file(text);
    assert!(assembled.diagnostics.is_empty(), "{:?}", assembled.diagnostics);
    let mut t = TallyTable::new();
    for game in &assembled.games {
        for timeline in replay_game(game) {
            t.record_timeline(&timeline, mode);
        }
    }
    t
}

fn class_of(mask: u8, outs: u8) -> Option<SituationClass> {
    match (mask, outs) {
        (m, o) if o < 2 && m & 0b100 != 0 => Some(SituationClass::ThirdOccupied(o)),
        (m, o) if o < 2 && m & 0b110 == 0b010 => Some(SituationClass::SecondNoThird(o)),
        (0b001, o) if (1..=2).contains(&o) => Some(SituationClass::FirstOnly(o)),
        _ => None,
    }
}

type Expected = BTreeMap<(String, SituationClass, Stratum), (u64, u64)>;

/// Tallies counted straight from the generator's play traces.
fn expected_cells(games: &[SyntheticGame], include_own_play: bool) -> Expected {
    let mut cells = Expected::new();
    for g in games {
        let mut halves: BTreeMap<(u32, u8), Vec<usize>> = BTreeMap::new();
        for (i, p) in g.plays.iter().enumerate() {
            halves.entry((p.inning, p.half.code())).or_default().push(i);
        }
        for plays in halves.values() {
            let mut seen = Vec::new();
            for (k, &i) in plays.iter().enumerate() {
                let p = &g.plays[i];
                let mask = p.bases_before.mask();
                let Some(class) = class_of(mask, p.outs_before) else { continue };
                if seen.contains(&class) {
                    continue;
                }
                seen.push(class);
                let skip = if include_own_play { 0 } else { 1 };
                let later: u32 = plays[k + skip..].iter().map(|&j| u32::from(g.plays[j].runs)).sum();
                let scored = u64::from(later > 0);
                let hl = (8..=9).contains(&p.inning) && p.score_batting.abs_diff(p.score_fielding) <= 1;
                let strata: &[Stratum] = if hl { &[Stratum::All, Stratum::HighLeverage] } else { &[Stratum::All] };
                for &stratum in strata {
                    let c = cells.entry((p.pitcher_id.clone(), class, stratum)).or_default();
                    c.0 += scored;
                    c.1 += 1;
                }
            }
        }
    }
    cells
}

fn observed_cells(t: &TallyTable) -> Expected {
    let mut cells = Expected::new();
    for (k, c) in &t.cells {
        let e = cells.entry((k.pitcher_id.clone(), k.class, k.stratum)).or_default();
        e.0 += c.numerator;
        e.1 += c.denominator;
    }
    cells
}

#[test]
fn emitted_games_parse_back_to_their_plays() {
    let games = season(100, 11);
    assert!(games.iter().all(|g| g.diagnostics.is_empty()));
    let assembled = parse_event_file(&emit_event_file(&games));
    assert!(assembled.diagnostics.is_empty(), "{:?}", assembled.diagnostics);
    assert_eq!(assembled.games.len(), games.len());
    for (g, acc) in games.iter().zip(&assembled.games) {
        assert_eq!(acc.game_id, g.game_id);
        assert_eq!(acc.season(), Some(2003));
        assert_eq!(acc.starters, g.starters);
        let lines: Vec<_> = acc.plays().collect();
        assert_eq!(lines.len(), g.plays.len(), "{}", g.game_id);
        for (line, p) in lines.iter().zip(&g.plays) {
            assert_eq!(
                (line.inning, line.half, &line.batter_id, &line.event_text),
                (p.inning, p.half, &p.batter_id, &p.token)
            );
        }
        let subs: Vec<_> = acc
            .events
            .iter()
            .filter_map(|e| match e {
                TimedEntry::Substitution(s) => Some(s.clone()),
                TimedEntry::Play(_) => None,
            })
            .collect();
        let expected: Vec<_> = g.plays.iter().filter_map(|p| p.substitution.clone()).collect();
        assert_eq!(subs, expected);
    }
}

#[test]
fn replayed_states_match_generator_traces() {
    let games = season(100, 12);
    let assembled = parse_event_file(&emit_event_file(&games));
    for (g, acc) in games.iter().zip(&assembled.games) {
        let timelines = replay_game(acc);
        assert!(
            timelines.iter().all(|t| t.is_usable()),
            "{}: {:?}",
            g.game_id,
            timelines.iter().find_map(|t| t.excluded.clone())
        );
        let snaps: Vec<_> = timelines.iter().flat_map(|t| &t.snapshots).collect();
        assert_eq!(snaps.len(), g.plays.len(), "{}", g.game_id);
        for (s, p) in snaps.iter().zip(&g.plays) {
            assert_eq!(s.bases, p.bases_before, "{} inning {}", g.game_id, p.inning);
            assert_eq!(s.outs, p.outs_before);
            assert_eq!((s.score_batting, s.score_fielding), (p.score_batting, p.score_fielding));
            assert_eq!(s.pitcher_id, p.pitcher_id);
            assert_eq!((s.inning, s.half), (p.inning, p.half));
        }
        let runs: u32 = timelines.iter().map(|t| t.total_runs()).sum();
        assert_eq!(runs, g.final_score.iter().sum::<u32>());
    }
}

#[test]
fn tallies_match_counts_from_traces() {
    let games = season(150, 13);
    let text = emit_event_file(&games);
    assert_eq!(observed_cells(&tally_text(&text, CountingMode::IncludingPlay)), expected_cells(&games, true));
    assert_eq!(observed_cells(&tally_text(&text, CountingMode::ExcludingPlay)), expected_cells(&games, false));
}

#[test]
fn relievers_are_credited_after_the_change() {
    let games = season(60, 14);
    let t = tally_text(&emit_event_file(&games), CountingMode::IncludingPlay);
    let late = games.iter().flat_map(|g| &g.plays).filter(|p| p.inning >= 8);
    assert!(late.clone().all(|p| p.pitcher_id.contains("rel")));
    let hl_pitchers: Vec<_> =
        t.cells.keys().filter(|k| k.stratum == Stratum::HighLeverage).map(|k| k.pitcher_id.as_str()).collect();
    assert!(!hl_pitchers.is_empty());
    assert!(hl_pitchers.iter().all(|p| *p == "visrel01" || *p == "homrel01"), "{hl_pitchers:?}");
}

#[test]
fn career_leverage_innings_match_generator() {
    let games = season(200, 15);
    let t = tally_text(&emit_event_file(&games), CountingMode::IncludingPlay);
    let truth: BTreeMap<_, _> = high_leverage_appearances(&games).into_iter().filter(|(_, n)| *n > 0).collect();
    let seen: BTreeMap<_, _> = all_career_high_leverage_innings(&t).into_iter().filter(|(_, n)| *n > 0).collect();
    assert!(!truth.is_empty());
    assert_eq!(seen, truth);
}

#[test]
fn parallel_file_ingest_equals_sequential_tally() {
    let games = season(120, 16);
    let dir = tempfile::tempdir().unwrap();
    let mut paths: Vec<PathBuf> = Vec::new();
    for (i, chunk) in games.chunks(17).enumerate() {
        let p = dir.path().join(format!("2003P{i:02}.EVN"));
        fs::write(&p, emit_event_file(chunk)).unwrap();
        paths.push(p);
    }
    let whole = tally_text(&emit_event_file(&games), CountingMode::IncludingPlay);
    let from_dir = ingest(&[dir.path().to_path_buf()], CountingMode::IncludingPlay).unwrap();
    assert_eq!(from_dir.tally, whole);
    assert_eq!(from_dir.report.games(), games.len());
    assert_eq!(from_dir.report.quarantined(), 0);
    paths.reverse();
    let reversed = ingest(&paths, CountingMode::IncludingPlay).unwrap();
    assert_eq!(reversed.tally, whole);
    assert_eq!(reversed.fingerprint, from_dir.fingerprint);
}
