use std::collections::{BTreeMap, HashSet};

use super::record::{RawRecord, RecordKind};
use super::EventFileError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Half {
    Top,
    Bottom,
}

impl Half {
    pub fn from_cell(cell: &str) -> Option<Half> {
        match cell.trim() {
            "0" => Some(Half::Top),
            "1" => Some(Half::Bottom),
            _ => None,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Half::Top => 0,
            Half::Bottom => 1,
        }
    }

    /// The side batting in this half.
    pub fn batting(self) -> Side {
        match self {
            Half::Top => Side::Visitor,
            Half::Bottom => Side::Home,
        }
    }

    pub fn fielding(self) -> Side {
        self.batting().other()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Visitor,
    Home,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Visitor => Side::Home,
            Side::Home => Side::Visitor,
        }
    }

    pub fn from_cell(cell: &str) -> Option<Side> {
        match cell.trim() {
            "0" => Some(Side::Visitor),
            "1" => Some(Side::Home),
            _ => None,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Side::Visitor => 0,
            Side::Home => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Count {
    pub balls: u8,
    pub strikes: u8,
}

/// A `start` or `sub` record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineupEntry {
    pub player_id: String,
    pub name: String,
    pub side: Side,
    pub batting_pos: u8,
    pub fielding_pos: u8,
}

impl LineupEntry {
    pub fn is_pitcher(&self) -> bool {
        self.fielding_pos == 1
    }

    pub fn is_pinch_runner(&self) -> bool {
        self.fielding_pos == 12
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayLine {
    pub inning: u32,
    pub half: Half,
    pub batter_id: String,
    pub count: Option<Count>,
    pub pitch_seq: Option<String>,
    pub event_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TimedEntry {
    Play(PlayLine),
    Substitution(LineupEntry),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameAccount {
    pub game_id: String,
    pub info: BTreeMap<String, String>,
    pub starters: Vec<LineupEntry>,
    pub events: Vec<TimedEntry>,
    /// `data,er,<player>,<runs>` rows.
    pub earned_run_data: Vec<(String, u32)>,
}

impl GameAccount {
    /// Season year from the `date` info (`YYYY/MM/DD`), falling back to the
    /// game id's date digits.
    pub fn season(&self) -> Option<u16> {
        self.info.get("date").and_then(|d| d.get(0..4)).or_else(|| self.game_id.get(3..7)).and_then(|y| y.parse().ok())
    }

    pub fn starting_pitcher(&self, side: Side) -> Option<&str> {
        self.starters.iter().find(|e| e.side == side && e.is_pitcher()).map(|e| e.player_id.as_str())
    }

    pub fn plays(&self) -> impl Iterator<Item = &PlayLine> {
        self.events.iter().filter_map(|e| match e {
            TimedEntry::Play(p) => Some(p),
            TimedEntry::Substitution(_) => None,
        })
    }
}

#[derive(Debug, Default)]
pub struct Assembled {
    pub games: Vec<GameAccount>,
    pub diagnostics: Vec<EventFileError>,
}

fn parse_lineup(rec: &RawRecord) -> Result<LineupEntry, EventFileError> {
    let bad = || EventFileError::MalformedRecord { line_no: rec.line_no, kind: rec.kind };
    let [id, name, side, bat, field, ..] = rec.fields.as_slice() else {
        return Err(bad());
    };
    Ok(LineupEntry {
        player_id: id.trim().to_string(),
        name: name.clone(),
        side: Side::from_cell(side).ok_or_else(bad)?,
        batting_pos: bat.trim().parse().map_err(|_| bad())?,
        fielding_pos: field.trim().parse().map_err(|_| bad())?,
    })
}

fn parse_count(cell: &str) -> Option<Count> {
    let b = cell.as_bytes();
    match b {
        [balls, strikes] if balls.is_ascii_digit() && strikes.is_ascii_digit() => {
            Some(Count { balls: balls - b'0', strikes: strikes - b'0' })
        }
        _ => None,
    }
}

fn parse_play(rec: &RawRecord) -> Result<PlayLine, EventFileError> {
    let bad = || EventFileError::MalformedRecord { line_no: rec.line_no, kind: rec.kind };
    let [inning, half, batter, count, seq, event, ..] = rec.fields.as_slice() else {
        return Err(bad());
    };
    let inning: u32 = inning.trim().parse().map_err(|_| bad())?;
    if inning == 0 {
        return Err(bad());
    }
    let event_text = event.trim().to_string();
    if event_text.is_empty() {
        return Err(bad());
    }
    Ok(PlayLine {
        inning,
        half: Half::from_cell(half).ok_or_else(bad)?,
        batter_id: batter.trim().to_string(),
        count: parse_count(count.trim()),
        pitch_seq: Some(seq.trim().to_string()).filter(|s| !s.is_empty()),
        event_text,
    })
}

struct Builder {
    account: GameAccount,
    line_no: usize,
    error: Option<EventFileError>,
}

impl Builder {
    fn new(game_id: String, line_no: usize) -> Self {
        Builder {
            account: GameAccount {
                game_id,
                info: BTreeMap::new(),
                starters: Vec::new(),
                events: Vec::new(),
                earned_run_data: Vec::new(),
            },
            line_no,
            error: None,
        }
    }

    fn fail(&mut self, err: EventFileError) {
        if self.error.is_none() {
            self.error = Some(err);
        }
    }

    fn push(&mut self, rec: &RawRecord) {
        if self.error.is_some() {
            return;
        }
        match rec.kind {
            RecordKind::Info => {
                if let [key, value, ..] = rec.fields.as_slice() {
                    self.account.info.insert(key.trim().to_string(), value.clone());
                } else if let [key] = rec.fields.as_slice() {
                    self.account.info.insert(key.trim().to_string(), String::new());
                }
            }
            RecordKind::Start => match parse_lineup(rec) {
                Ok(e) => self.account.starters.push(e),
                Err(e) => self.fail(e),
            },
            RecordKind::Sub => match parse_lineup(rec) {
                Ok(e) => self.account.events.push(TimedEntry::Substitution(e)),
                Err(e) => self.fail(e),
            },
            RecordKind::Play => match parse_play(rec) {
                Ok(p) => self.account.events.push(TimedEntry::Play(p)),
                Err(e) => self.fail(e),
            },
            RecordKind::Data => {
                if let [kind, player, runs, ..] = rec.fields.as_slice() {
                    if kind.trim() == "er" {
                        if let Ok(r) = runs.trim().parse() {
                            self.account.earned_run_data.push((player.trim().to_string(), r));
                        }
                    }
                }
            }
            RecordKind::Id
            | RecordKind::Version
            | RecordKind::Com
            | RecordKind::Badj
            | RecordKind::Padj
            | RecordKind::Ladj => {}
        }
    }

    fn finish(self) -> Result<GameAccount, EventFileError> {
        if let Some(e) = self.error {
            return Err(e);
        }
        let g = self.account;
        if g.game_id.len() != 12 || !g.game_id.is_ascii() {
            return Err(EventFileError::InvalidGameId { line_no: self.line_no, game_id: g.game_id });
        }
        for key in ["visteam", "hometeam", "date"] {
            if !g.info.contains_key(key) {
                return Err(EventFileError::MissingInfo { game_id: g.game_id, key });
            }
        }
        let mut known: HashSet<&str> = g.starters.iter().map(|e| e.player_id.as_str()).collect();
        for entry in &g.events {
            match entry {
                TimedEntry::Substitution(s) => {
                    known.insert(&s.player_id);
                }
                TimedEntry::Play(p) => {
                    if !known.contains(p.batter_id.as_str()) {
                        return Err(EventFileError::UnknownPlayer {
                            game_id: g.game_id.clone(),
                            player_id: p.batter_id.clone(),
                        });
                    }
                }
            }
        }
        Ok(g)
    }
}

/// Splits a record stream into game accounts at `id` boundaries. Accounts
/// that fail validation are dropped with a diagnostic.
pub fn assemble_games(records: &[RawRecord]) -> Assembled {
    let mut out = Assembled::default();
    let mut current: Option<Builder> = None;
    let finish = |b: Builder, out: &mut Assembled| match b.finish() {
        Ok(g) => out.games.push(g),
        Err(e) => out.diagnostics.push(e),
    };
    for rec in records {
        if rec.kind == RecordKind::Id {
            if let Some(b) = current.take() {
                finish(b, &mut out);
            }
            let id = rec.fields.first().map(|s| s.trim().to_string()).unwrap_or_default();
            current = Some(Builder::new(id, rec.line_no));
            continue;
        }
        match current.as_mut() {
            Some(b) => b.push(rec),
            None => out.diagnostics.push(EventFileError::OrphanRecord { line_no: rec.line_no }),
        }
    }
    if let Some(b) = current.take() {
        finish(b, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::tokenize_event_file;

    const GAME_A: &str = "id,NYA200309180
version,2
info,visteam,TOR
info,hometeam,NYA
info,date,2003/09/18
start,jeted001,\"Derek Jeter\",1,2,6
start,riverm001,\"Mariano Rivera\",1,0,1
start,wellv001,\"Vernon Wells\",0,3,8
start,hallr001,\"Roy Halladay\",0,0,1
play,1,0,wellv001,12,BCX,S8/G
play,1,1,jeted001,??,,HR
sub,posaj001,\"Jorge Posada\",1,2,11
play,1,1,posaj001,00,,K
data,er,riverm001,0
";

    fn assemble(text: &str) -> Assembled {
        assemble_games(&tokenize_event_file(text).records)
    }

    #[test]
    fn splits_at_id_boundaries() {
        let text = format!("{GAME_A}{}", GAME_A.replace("NYA200309180", "NYA200309190"));
        let a = assemble(&text);
        assert!(a.diagnostics.is_empty(), "{:?}", a.diagnostics);
        let ids: Vec<_> = a.games.iter().map(|g| g.game_id.as_str()).collect();
        assert_eq!(ids, ["NYA200309180", "NYA200309190"]);
        let g = &a.games[0];
        assert_eq!(g.season(), Some(2003));
        assert_eq!(g.starting_pitcher(Side::Home), Some("riverm001"));
        assert_eq!(g.events.len(), 4);
        assert_eq!(g.earned_run_data, vec![("riverm001".to_string(), 0)]);
        let first = g.plays().next().unwrap();
        assert_eq!(first.count, Some(Count { balls: 1, strikes: 2 }));
        assert_eq!(first.pitch_seq.as_deref(), Some("BCX"));
        assert_eq!(g.plays().nth(1).unwrap().count, None);
    }

    #[test]
    fn orphan_records() {
        let a = assemble("play,1,0,x,??,,K\n");
        assert!(a.games.is_empty());
        assert_eq!(a.diagnostics, vec![EventFileError::OrphanRecord { line_no: 1 }]);
    }

    #[test]
    fn missing_info_skips_account() {
        let text = GAME_A.replace("info,date,2003/09/18\n", "");
        let a = assemble(&text);
        assert!(a.games.is_empty());
        assert!(matches!(a.diagnostics[0], EventFileError::MissingInfo { key: "date", .. }));
    }

    #[test]
    fn unknown_batter_skips_account() {
        let text = GAME_A.replace("play,1,1,jeted001", "play,1,1,nobody01");
        let a = assemble(&text);
        assert!(a.games.is_empty());
        assert!(matches!(a.diagnostics[0], EventFileError::UnknownPlayer { .. }));
    }

    #[test]
    fn malformed_play_skips_account_only() {
        let bad = GAME_A.replace("play,1,0,wellv001,12,BCX,S8/G", "play,x,0,wellv001,12,BCX,S8/G");
        let text = format!("{bad}{}", GAME_A.replace("NYA200309180", "NYA200309190"));
        let a = assemble(&text);
        assert_eq!(a.games.len(), 1);
        assert_eq!(a.diagnostics.len(), 1);
    }
}
