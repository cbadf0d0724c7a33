//! Retrosheet event files: records, game accounts and play tokens.

mod game;
mod play;
mod record;

pub use game::{assemble_games, Assembled, Count, GameAccount, Half, LineupEntry, PlayLine, Side, TimedEntry};
pub use play::{parse_advances, parse_play_token, Advance, Base, Credit, Origin, ParsedPlay, PlayError, PlayKind};
pub use record::{decode_latin1, tokenize_event_file, RawRecord, RecordKind, Tokenized};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EventFileError {
    #[error("line {line_no}: unreadable line")]
    UnreadableLine { line_no: usize },
    #[error("line {line_no}: unknown record kind `{keyword}`")]
    UnknownRecord { line_no: usize, keyword: String },
    #[error("line {line_no}: record before the first id")]
    OrphanRecord { line_no: usize },
    #[error("line {line_no}: malformed {kind} record")]
    MalformedRecord { line_no: usize, kind: RecordKind },
    #[error("line {line_no}: invalid game id `{game_id}`")]
    InvalidGameId { line_no: usize, game_id: String },
    #[error("{game_id}: missing info `{key}`")]
    MissingInfo { game_id: String, key: &'static str },
    #[error("{game_id}: player `{player_id}` bats before appearing in a lineup")]
    UnknownPlayer { game_id: String, player_id: String },
}

impl EventFileError {
    /// Diagnostics that cost data (as opposed to informational ones).
    pub fn is_fatal_for_account(&self) -> bool {
        !matches!(self, EventFileError::UnknownRecord { .. })
    }
}

/// Tokenizes and assembles one file's text.
pub fn parse_event_file(text: &str) -> Assembled {
    let tokenized = tokenize_event_file(text);
    let mut assembled = assemble_games(&tokenized.records);
    let mut diagnostics = tokenized.diagnostics;
    diagnostics.append(&mut assembled.diagnostics);
    assembled.diagnostics = diagnostics;
    assembled
}
