//! Baserunning risk threshold (BRT) analytics over Retrosheet play-by-play.

pub mod cli;
pub mod event;
pub mod oracle;
pub mod state;
pub mod stats;
