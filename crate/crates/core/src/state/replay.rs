use std::collections::HashMap;

use super::{apply_play, initial_snapshot, Snapshot};
use crate::event::{parse_play_token, GameAccount, Half, PlayKind, Side, TimedEntry};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInningKey {
    pub game_id: String,
    pub inning: u32,
    pub half: Half,
}

/// Ordered pre-play snapshots of one half-inning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateTimeline {
    pub key: HalfInningKey,
    pub season: u16,
    pub snapshots: Vec<Snapshot>,
    /// Runs scored on the play taken from each snapshot.
    pub runs_on_play: Vec<u8>,
    /// Runs scored from each snapshot's play through the end of the half.
    pub runs_after: Vec<u32>,
    pub complete: bool,
    /// Reason this half-inning is excluded from statistics.
    pub excluded: Option<String>,
    /// False once an earlier half-inning of the game was excluded, since the
    /// game score is then unknown.
    pub score_known: bool,
}

impl StateTimeline {
    pub fn is_usable(&self) -> bool {
        self.excluded.is_none()
    }

    /// Runs scored after snapshot `i`, optionally counting the runs of the
    /// snapshot's own play.
    pub fn runs_later(&self, i: usize, include_own_play: bool) -> u32 {
        if include_own_play {
            self.runs_after[i]
        } else {
            self.runs_after[i] - u32::from(self.runs_on_play[i])
        }
    }

    pub fn total_runs(&self) -> u32 {
        self.runs_after.first().copied().unwrap_or(0)
    }
}

/// Game-level state carried across half-innings.
#[derive(Debug, Clone)]
pub struct GameContext {
    pub game_id: String,
    pub season: u16,
    /// Visitor and home runs.
    pub score: [u32; 2],
    pub pitchers: [String; 2],
    lineup: HashMap<(Side, u8), String>,
    pub score_known: bool,
}

impl GameContext {
    pub fn new(game: &GameAccount) -> Self {
        let mut lineup = HashMap::new();
        for s in &game.starters {
            lineup.insert((s.side, s.batting_pos), s.player_id.clone());
        }
        let pitcher = |side| game.starting_pitcher(side).unwrap_or_default().to_string();
        GameContext {
            game_id: game.game_id.clone(),
            season: game.season().unwrap_or(0),
            score: [0, 0],
            pitchers: [pitcher(Side::Visitor), pitcher(Side::Home)],
            lineup,
            score_known: true,
        }
    }

    fn runs(&self, side: Side) -> u32 {
        self.score[side.code() as usize]
    }
}

/// Replays the entries of one half-inning. `ends_game` marks the final
/// half-inning of the account, which may end with fewer than three outs.
pub fn replay_half_inning(entries: &[TimedEntry], ctx: &mut GameContext, ends_game: bool) -> StateTimeline {
    let (inning, half) = entries
        .iter()
        .find_map(|e| match e {
            TimedEntry::Play(p) => Some((p.inning, p.half)),
            TimedEntry::Substitution(_) => None,
        })
        .unwrap_or((1, Half::Top));
    let batting = half.batting();
    let fielding = half.fielding();
    let mut timeline = StateTimeline {
        key: HalfInningKey { game_id: ctx.game_id.clone(), inning, half },
        season: ctx.season,
        snapshots: Vec::new(),
        runs_on_play: Vec::new(),
        runs_after: Vec::new(),
        complete: false,
        excluded: None,
        score_known: ctx.score_known,
    };
    let mut snap = initial_snapshot(
        inning,
        half,
        (ctx.runs(batting), ctx.runs(fielding)),
        &ctx.pitchers[fielding.code() as usize],
    );

    for entry in entries {
        match entry {
            TimedEntry::Substitution(sub) => {
                if sub.is_pitcher() {
                    ctx.pitchers[sub.side.code() as usize] = sub.player_id.clone();
                    if sub.side == fielding {
                        snap.pitcher_id = sub.player_id.clone();
                    }
                }
                let previous = ctx.lineup.insert((sub.side, sub.batting_pos), sub.player_id.clone());
                if sub.side == batting {
                    if let Some(old) = previous {
                        snap.bases.replace_runner(&old, &sub.player_id);
                    }
                }
            }
            TimedEntry::Play(line) => {
                if timeline.excluded.is_some() {
                    continue;
                }
                if (line.inning, line.half) != (inning, half) {
                    timeline.excluded = Some(format!("play for {} {:?} inside this half", line.inning, line.half));
                    continue;
                }
                let play = match parse_play_token(&line.event_text) {
                    Ok(p) => p,
                    Err(e) => {
                        timeline.excluded = Some(e.to_string());
                        continue;
                    }
                };
                if play.kind == PlayKind::NoPlay {
                    continue;
                }
                if snap.outs >= 3 {
                    timeline.excluded = Some(format!("`{}` after the third out", line.event_text));
                    continue;
                }
                match apply_play(&snap, &line.batter_id, &play) {
                    Ok(effects) => {
                        timeline.snapshots.push(snap.clone());
                        timeline.runs_on_play.push(effects.runs_scored);
                        snap.bases = effects.new_bases;
                        snap.outs += effects.outs_recorded;
                        snap.score_batting += u32::from(effects.runs_scored);
                        snap.play_index += 1;
                    }
                    Err(e) => timeline.excluded = Some(format!("`{}`: {e}", line.event_text)),
                }
            }
        }
    }

    timeline.complete = snap.outs == 3 || ends_game;
    if timeline.excluded.is_none() && !timeline.complete {
        timeline.excluded = Some(format!("half-inning ended with {} outs", snap.outs));
    }
    let mut acc = 0u32;
    timeline.runs_after = vec![0; timeline.runs_on_play.len()];
    for (i, r) in timeline.runs_on_play.iter().enumerate().rev() {
        acc += u32::from(*r);
        timeline.runs_after[i] = acc;
    }
    if timeline.excluded.is_some() {
        ctx.score_known = false;
    } else {
        ctx.score[batting.code() as usize] = snap.score_batting;
    }
    timeline
}

/// Groups a game's entries into half-innings (substitutions attach to the
/// next play) and replays each in order.
pub fn replay_game(game: &GameAccount) -> Vec<StateTimeline> {
    let mut groups: Vec<Vec<TimedEntry>> = Vec::new();
    let mut current_key = None;
    let mut pending: Vec<TimedEntry> = Vec::new();
    for entry in &game.events {
        match entry {
            TimedEntry::Substitution(_) => pending.push(entry.clone()),
            TimedEntry::Play(p) => {
                let key = (p.inning, p.half);
                if current_key != Some(key) {
                    groups.push(Vec::new());
                    current_key = Some(key);
                }
                let group = groups.last_mut().expect("pushed above");
                group.append(&mut pending);
                group.push(entry.clone());
            }
        }
    }
    if let Some(last) = groups.last_mut() {
        last.append(&mut pending);
    }

    let mut ctx = GameContext::new(game);
    let n = groups.len();
    let mut previous: Option<(u32, Half)> = None;
    groups
        .iter()
        .enumerate()
        .map(|(i, entries)| {
            let mut timeline = replay_half_inning(entries, &mut ctx, i + 1 == n);
            let key = (timeline.key.inning, timeline.key.half);
            if previous.is_some_and(|p| p >= key) && timeline.excluded.is_none() {
                timeline.excluded = Some("half-inning out of order".into());
                ctx.score_known = false;
            }
            previous = Some(key);
            timeline
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::parse_event_file;

    fn game(plays: &str) -> GameAccount {
        let text = format!(
            "id,HOM202401010\ninfo,visteam,VIS\ninfo,hometeam,HOM\ninfo,date,2024/01/01\n\
             start,v1,\"V One\",0,1,8\nstart,v2,\"V Two\",0,2,6\nstart,v3,\"V Three\",0,3,5\n\
             start,vp,\"V Pitch\",0,0,1\n\
             start,h1,\"H One\",1,1,8\nstart,h2,\"H Two\",1,2,6\nstart,hp,\"H Pitch\",1,0,1\n{plays}"
        );
        let a = parse_event_file(&text);
        assert!(a.diagnostics.is_empty(), "{:?}", a.diagnostics);
        a.games.into_iter().next().unwrap()
    }

    #[test]
    fn hand_replayed_half_inning() {
        let g = game(
            "play,1,0,v1,??,,W\nplay,1,0,v2,??,,S8/G.1-3\nplay,1,0,v3,??,,K\nplay,1,0,v1,??,,K\nplay,1,0,v2,??,,63\n",
        );
        let t = &replay_game(&g)[0];
        assert!(t.is_usable() && t.complete);
        assert_eq!(t.snapshots.len(), 5);
        assert_eq!(t.snapshots[2].bases.mask(), 0b101);
        assert_eq!(t.snapshots[2].bases.third.as_deref(), Some("v1"));
        assert!(t.runs_after.iter().all(|&r| r == 0));
        assert!(t.snapshots.iter().all(|s| s.pitcher_id == "hp"));
    }

    #[test]
    fn walk_off_is_complete_with_fewer_outs() {
        let mut plays = String::new();
        for inning in 1..=9 {
            plays += &format!("play,{inning},0,v1,??,,K\nplay,{inning},0,v2,??,,K\nplay,{inning},0,v3,??,,K\n");
            if inning < 9 {
                plays += &format!("play,{inning},1,h1,??,,K\nplay,{inning},1,h2,??,,K\nplay,{inning},1,h1,??,,K\n");
            }
        }
        plays += "play,9,1,h1,??,,D7\nplay,9,1,h2,??,,S8.2-H\n";
        let ts = replay_game(&game(&plays));
        let last = ts.last().unwrap();
        assert!(last.complete && last.is_usable());
        assert_eq!(last.runs_after, vec![1, 1]);
        assert_eq!(last.runs_on_play, vec![0, 1]);
        assert_eq!(last.runs_later(0, false), 1);
        assert_eq!(last.runs_later(1, false), 0);
    }

    #[test]
    fn runs_after_suffix_sums_and_scores_carry() {
        let g = game(
            "play,1,0,v1,??,,HR\nplay,1,0,v2,??,,S8\nplay,1,0,v3,??,,HR.1-H\nplay,1,0,v1,??,,K\nplay,1,0,v2,??,,K\nplay,1,0,v3,??,,K\n\
             play,1,1,h1,??,,K\nplay,1,1,h2,??,,K\nplay,1,1,h1,??,,K\n",
        );
        let ts = replay_game(&g);
        assert_eq!(ts[0].runs_after, vec![3, 2, 2, 0, 0, 0]);
        assert_eq!(ts[1].snapshots[0].score_batting, 0);
        assert_eq!(ts[1].snapshots[0].score_fielding, 3);
        assert_eq!(ts[0].snapshots[5].score_batting, 3);
    }

    #[test]
    fn pitching_change_and_pinch_runner() {
        let g = game(
            "play,1,0,v1,??,,S8\nsub,hq,\"H Relief\",1,0,1\nsub,v9,\"V Runner\",0,1,12\n\
             play,1,0,v2,??,,K\nplay,1,0,v3,??,,K\nplay,1,0,v1,??,,K\n",
        );
        let t = &replay_game(&g)[0];
        assert_eq!(t.snapshots[0].pitcher_id, "hp");
        assert_eq!(t.snapshots[1].pitcher_id, "hq");
        assert_eq!(t.snapshots[1].bases.first.as_deref(), Some("v9"));
    }

    #[test]
    fn no_play_takes_no_snapshot() {
        let g = game("play,1,0,v1,??,,NP\nplay,1,0,v1,??,,K\nplay,1,0,v2,??,,K\nplay,1,0,v3,??,,K\n");
        assert_eq!(replay_game(&g)[0].snapshots.len(), 3);
    }

    #[test]
    fn quarantine_is_local_but_taints_score() {
        let g = game(
            "play,1,0,v1,??,,SB2\nplay,1,0,v1,??,,K\nplay,1,0,v2,??,,K\nplay,1,0,v3,??,,K\n\
             play,1,1,h1,??,,K\nplay,1,1,h2,??,,K\nplay,1,1,h1,??,,ZZZ\n\
             play,2,0,v1,??,,K\nplay,2,0,v2,??,,K\nplay,2,0,v3,??,,K\n",
        );
        let ts = replay_game(&g);
        assert!(ts[0].excluded.as_deref().unwrap().contains("illegal"));
        assert!(ts[1].excluded.as_deref().unwrap().contains("unparseable"));
        assert!(ts[2].is_usable());
        assert!(!ts[2].score_known);
    }

    #[test]
    fn short_half_mid_game_is_excluded() {
        let g = game("play,1,0,v1,??,,K\nplay,1,1,h1,??,,K\nplay,1,1,h2,??,,K\nplay,1,1,h1,??,,K\n");
        let ts = replay_game(&g);
        assert!(!ts[0].complete);
        assert!(ts[0].excluded.is_some());
    }
}
