use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use chrono::{Datelike, Days, NaiveDate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::chain::{resolve, Dest, LiveState, RunnerMove};
use super::model::{ModelError, Outcome, OutcomeModel};
use super::sim::{OutcomeSampler, PA_CAP};
use crate::event::{Half, LineupEntry, Side};
use crate::state::BaseState;

pub const VISITOR: &str = "VIS";
pub const HOME: &str = "HOM";

/// Brings in a reliever for each team in `inning` once the fielding side has
/// `after_outs` outs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PitcherChange {
    pub inning: u32,
    pub after_outs: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeasonConfig {
    pub games: usize,
    pub seed: u64,
    pub start_year: u16,
    /// Starters rotate through this many pitchers per team.
    pub pitchers_per_team: usize,
    pub pitcher_change: Option<PitcherChange>,
    /// Games tied after this many innings end as ties.
    pub max_innings: u32,
}

impl Default for SeasonConfig {
    fn default() -> Self {
        SeasonConfig {
            games: 100,
            seed: 1,
            start_year: 2003,
            pitchers_per_team: 5,
            pitcher_change: None,
            max_innings: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticPlay {
    pub inning: u32,
    pub half: Half,
    pub batter_id: String,
    pub pitcher_id: String,
    pub bases_before: BaseState,
    pub outs_before: u8,
    pub score_batting: u32,
    pub score_fielding: u32,
    pub outcome: Outcome,
    pub moves: Vec<RunnerMove>,
    pub runs: u8,
    pub token: String,
    /// Pitching change entered just before this play.
    pub substitution: Option<LineupEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticGame {
    pub game_id: String,
    pub date: NaiveDate,
    pub starters: Vec<LineupEntry>,
    pub plays: Vec<SyntheticPlay>,
    /// Indexed by `Side::code()`.
    pub final_score: [u32; 2],
    pub diagnostics: Vec<String>,
}

fn team_prefix(side: Side) -> &'static str {
    match side {
        Side::Visitor => "vis",
        Side::Home => "hom",
    }
}

fn team_name(side: Side) -> &'static str {
    match side {
        Side::Visitor => "Visitor",
        Side::Home => "Home",
    }
}

pub fn batter_id(side: Side, slot: u8) -> String {
    format!("{}bat{slot:02}", team_prefix(side))
}

pub fn starter_id(side: Side, n: usize) -> String {
    format!("{}pit{:02}", team_prefix(side), n + 1)
}

pub fn reliever_id(side: Side) -> String {
    format!("{}rel01", team_prefix(side))
}

fn lineup(side: Side, starter: usize) -> Vec<LineupEntry> {
    let mut out: Vec<LineupEntry> = (1..=9u8)
        .map(|slot| LineupEntry {
            player_id: batter_id(side, slot),
            name: format!("{} Batter {slot}", team_name(side)),
            side,
            batting_pos: slot,
            fielding_pos: slot + 1,
        })
        .collect();
    out.push(LineupEntry {
        player_id: starter_id(side, starter),
        name: format!("{} Pitcher {}", team_name(side), starter + 1),
        side,
        batting_pos: 0,
        fielding_pos: 1,
    });
    out
}

fn game_date(start_year: u16, index: usize) -> NaiveDate {
    let start = NaiveDate::from_ymd_opt(i32::from(start_year), 1, 1).expect("valid year");
    start + Days::new((index / 10) as u64)
}

fn base_accessor(bases: &mut BaseState, base: u8) -> &mut Option<String> {
    match base {
        1 => &mut bases.first,
        2 => &mut bases.second,
        _ => &mut bases.third,
    }
}

fn mask_of(bases: &BaseState) -> u8 {
    (bases.first.is_some() as u8) | (bases.second.is_some() as u8) << 1 | (bases.third.is_some() as u8) << 2
}

/// Play token with every runner movement written out. Holding runners and
/// the batter's own base are left to the event's implied meaning.
pub fn play_token(outcome: Outcome, moves: &[RunnerMove]) -> String {
    let event = match outcome {
        Outcome::Out => "63/G",
        Outcome::Strikeout => "K",
        Outcome::Walk => "W",
        Outcome::Single => "S8",
        Outcome::Double => "D7",
        Outcome::Triple => "T9",
        Outcome::HomeRun => "HR/F",
        Outcome::DoublePlay if moves.iter().any(|m| m.from == 1 && m.to == Dest::Out) => "64(1)3/GDP",
        Outcome::DoublePlay => "63/G",
    };
    let advances: Vec<String> = moves
        .iter()
        .filter(|m| m.from != 0)
        .filter_map(|m| match m.to {
            Dest::Base(b) if b != m.from => Some(format!("{}-{}", m.from, b)),
            Dest::Home => Some(format!("{}-H", m.from)),
            _ => None,
        })
        .collect();
    if advances.is_empty() {
        event.to_string()
    } else {
        format!("{event}.{}", advances.join(";"))
    }
}

struct GameState {
    score: [u32; 2],
    next_slot: [u8; 2],
    pitcher: [String; 2],
    changed: [bool; 2],
}

fn play_game(model: &OutcomeModel, sampler: &OutcomeSampler, config: &SeasonConfig, index: usize) -> SyntheticGame {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let date = game_date(config.start_year, index);
    let game_id = format!("{HOME}{:04}{:02}{:02}{}", date.year(), date.month(), date.day(), index % 10);
    let rotation = index % config.pitchers_per_team.max(1);
    let mut starters = lineup(Side::Visitor, rotation);
    starters.extend(lineup(Side::Home, rotation));
    let mut g = GameState {
        score: [0, 0],
        next_slot: [1, 1],
        pitcher: [starter_id(Side::Visitor, rotation), starter_id(Side::Home, rotation)],
        changed: [false, false],
    };
    let mut plays = Vec::new();
    let mut diagnostics = Vec::new();

    'game: for inning in 1..=config.max_innings {
        for half in [Half::Top, Half::Bottom] {
            let (bat, field) = (half.batting(), half.fielding());
            if half == Half::Bottom
                && inning >= 9
                && g.score[Side::Home.code() as usize] > g.score[Side::Visitor.code() as usize]
            {
                break 'game;
            }
            let mut bases = BaseState::default();
            let mut outs = 0u8;
            let mut pas = 0usize;
            while outs < 3 {
                if pas == PA_CAP {
                    diagnostics
                        .push(format!("{game_id} inning {inning} {half:?}: stopped at {PA_CAP} plate appearances"));
                    break;
                }
                pas += 1;
                let mut substitution = None;
                if let Some(change) = config.pitcher_change {
                    let f = field.code() as usize;
                    if inning == change.inning && outs >= change.after_outs && !g.changed[f] {
                        g.changed[f] = true;
                        g.pitcher[f] = reliever_id(field);
                        substitution = Some(LineupEntry {
                            player_id: g.pitcher[f].clone(),
                            name: format!("{} Reliever", team_name(field)),
                            side: field,
                            batting_pos: 0,
                            fielding_pos: 1,
                        });
                    }
                }
                let b = bat.code() as usize;
                let slot = g.next_slot[b];
                g.next_slot[b] = slot % 9 + 1;
                let batter = batter_id(bat, slot);
                let state = LiveState { mask: mask_of(&bases), outs };
                let outcome = sampler.sample(state, &mut rng);
                let r = resolve(model, state, outcome);
                let before = bases.clone();
                let mut after = BaseState::default();
                for m in &r.moves {
                    let runner =
                        if m.from == 0 { Some(batter.clone()) } else { base_accessor(&mut bases, m.from).take() };
                    if let Dest::Base(to) = m.to {
                        *base_accessor(&mut after, to) = runner;
                    }
                }
                bases = after;
                plays.push(SyntheticPlay {
                    inning,
                    half,
                    batter_id: batter,
                    pitcher_id: g.pitcher[field.code() as usize].clone(),
                    bases_before: before,
                    outs_before: outs,
                    score_batting: g.score[b],
                    score_fielding: g.score[field.code() as usize],
                    outcome,
                    token: play_token(outcome, &r.moves),
                    moves: r.moves,
                    runs: r.runs,
                    substitution,
                });
                outs += r.outs_added;
                g.score[b] += u32::from(r.runs);
                if half == Half::Bottom && inning >= 9 && g.score[b] > g.score[field.code() as usize] {
                    break 'game;
                }
            }
            if half == Half::Bottom && inning >= 9 && g.score[0] != g.score[1] {
                break 'game;
            }
        }
    }
    SyntheticGame { game_id, date, starters, plays, final_score: g.score, diagnostics }
}

/// Generates a season. Game `k` draws from its own ChaCha stream, so the
/// output does not depend on thread count.
pub fn generate_season(model: &OutcomeModel, config: &SeasonConfig) -> Result<Vec<SyntheticGame>, ModelError> {
    let sampler = OutcomeSampler::new(model)?;
    Ok((0..config.games).into_par_iter().map(|k| play_game(model, &sampler, config, k)).collect())
}

fn quote(name: &str) -> String {
    format!("\"{name}\"")
}

fn lineup_line(kind: &str, e: &LineupEntry) -> String {
    format!("{kind},{},{},{},{},{}", e.player_id, quote(&e.name), e.side.code(), e.batting_pos, e.fielding_pos)
}

pub fn emit_game(game: &SyntheticGame, out: &mut String) {
    let _ = writeln!(out, "id,{}", game.game_id);
    let _ = writeln!(out, "version,2");
    let _ = writeln!(out, "info,visteam,{VISITOR}");
    let _ = writeln!(out, "info,hometeam,{HOME}");
    let _ = writeln!(out, "info,date,{}", game.date.format("%Y/%m/%d"));
    let _ = writeln!(out, "info,number,0");
    for e in &game.starters {
        let _ = writeln!(out, "{}", lineup_line("start", e));
    }
    for p in &game.plays {
        if let Some(sub) = &p.substitution {
            let _ = writeln!(out, "{}", lineup_line("sub", sub));
        }
        let _ = writeln!(out, "play,{},{},{},??,,{}", p.inning, p.half.code(), p.batter_id, p.token);
    }
}

pub fn emit_event_file(games: &[SyntheticGame]) -> String {
    let mut out = String::new();
    for g in games {
        emit_game(g, &mut out);
    }
    out
}

/// Distinct half-innings in which each pitcher faced a batter in the 8th or
/// 9th inning with the score within one run. Every pitcher used appears.
pub fn high_leverage_appearances(games: &[SyntheticGame]) -> BTreeMap<String, u64> {
    let mut innings: BTreeMap<String, BTreeSet<(String, u32, u8)>> = BTreeMap::new();
    for g in games {
        for p in &g.plays {
            let entry = innings.entry(p.pitcher_id.clone()).or_default();
            let close = p.score_batting.abs_diff(p.score_fielding) <= 1;
            if (p.inning == 8 || p.inning == 9) && close {
                entry.insert((g.game_id.clone(), p.inning, p.half.code()));
            }
        }
    }
    innings.into_iter().map(|(k, v)| (k, v.len() as u64)).collect()
}
