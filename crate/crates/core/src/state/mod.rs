//! Base/out/score replay of half-innings.

mod replay;

pub use replay::{replay_game, replay_half_inning, GameContext, HalfInningKey, StateTimeline};

use crate::event::{Base, Half, Origin, ParsedPlay, PlayKind};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("illegal state: {0}")]
    IllegalState(String),
}

fn illegal(msg: impl Into<String>) -> StateError {
    StateError::IllegalState(msg.into())
}

/// Runner ids on first, second and third.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BaseState {
    pub first: Option<String>,
    pub second: Option<String>,
    pub third: Option<String>,
}

impl BaseState {
    pub fn get(&self, origin: Origin) -> Option<&String> {
        match origin {
            Origin::Batter => None,
            Origin::First => self.first.as_ref(),
            Origin::Second => self.second.as_ref(),
            Origin::Third => self.third.as_ref(),
        }
    }

    fn slot_mut(&mut self, base: Base) -> Option<&mut Option<String>> {
        match base {
            Base::First => Some(&mut self.first),
            Base::Second => Some(&mut self.second),
            Base::Third => Some(&mut self.third),
            Base::Home => None,
        }
    }

    /// Occupancy bit mask: bit 0 first, bit 1 second, bit 2 third.
    pub fn mask(&self) -> u8 {
        self.first.is_some() as u8 | (self.second.is_some() as u8) << 1 | (self.third.is_some() as u8) << 2
    }

    pub fn runner_count(&self) -> u8 {
        self.mask().count_ones() as u8
    }

    pub fn is_occupied(&self, origin: Origin) -> bool {
        self.get(origin).is_some()
    }

    /// Replaces `old` with `new` wherever `old` is standing. Returns whether
    /// a runner was replaced.
    pub fn replace_runner(&mut self, old: &str, new: &str) -> bool {
        for slot in [&mut self.first, &mut self.second, &mut self.third] {
            if slot.as_deref() == Some(old) {
                *slot = Some(new.to_string());
                return true;
            }
        }
        false
    }
}

/// Pre-play state of one plate appearance or baserunning event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub bases: BaseState,
    pub outs: u8,
    pub score_batting: u32,
    pub score_fielding: u32,
    pub pitcher_id: String,
    pub inning: u32,
    pub half: Half,
    pub play_index: usize,
}

impl Snapshot {
    pub fn score_diff_abs(&self) -> u32 {
        self.score_batting.abs_diff(self.score_fielding)
    }
}

pub fn initial_snapshot(inning: u32, half: Half, scores: (u32, u32), starting_pitcher: &str) -> Snapshot {
    Snapshot {
        bases: BaseState::default(),
        outs: 0,
        score_batting: scores.0,
        score_fielding: scores.1,
        pitcher_id: starting_pitcher.to_string(),
        inning,
        half,
        play_index: 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Destination {
    Safe(Base),
    Out,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayEffects {
    pub outs_recorded: u8,
    pub runs_scored: u8,
    pub new_bases: BaseState,
    /// `None` when the batter's plate appearance did not end on this play.
    pub batter_final: Option<Destination>,
}

type Plan = [Option<Destination>; 4];

fn set(plan: &mut Plan, origin: Origin, dest: Destination) {
    plan[origin.index() as usize] = Some(dest);
}

fn force_runners(bases: &BaseState, plan: &mut Plan) {
    set(plan, Origin::Batter, Destination::Safe(Base::First));
    if bases.first.is_some() {
        set(plan, Origin::First, Destination::Safe(Base::Second));
        if bases.second.is_some() {
            set(plan, Origin::Second, Destination::Safe(Base::Third));
            if bases.third.is_some() {
                set(plan, Origin::Third, Destination::Safe(Base::Home));
            }
        }
    }
}

fn occupied_origin(bases: &BaseState, origin: Origin) -> Result<Origin, StateError> {
    if bases.is_occupied(origin) {
        Ok(origin)
    } else {
        Err(illegal(format!("no runner on {origin:?}")))
    }
}

fn implicit_effects(kind: &PlayKind, bases: &BaseState, plan: &mut Plan) -> Result<(), StateError> {
    use Destination::{Out, Safe};
    match kind {
        PlayKind::Single(_) => set(plan, Origin::Batter, Safe(Base::First)),
        PlayKind::Double(_) | PlayKind::GroundRuleDouble => set(plan, Origin::Batter, Safe(Base::Second)),
        PlayKind::Triple(_) => set(plan, Origin::Batter, Safe(Base::Third)),
        PlayKind::HomeRun => {
            for origin in Origin::ALL {
                if origin == Origin::Batter || bases.is_occupied(origin) {
                    set(plan, origin, Safe(Base::Home));
                }
            }
        }
        PlayKind::Walk(chained) | PlayKind::IntentionalWalk(chained) => {
            force_runners(bases, plan);
            if let Some(c) = chained {
                implicit_effects(c, bases, plan)?;
            }
        }
        PlayKind::HitByPitch | PlayKind::CatcherInterference => force_runners(bases, plan),
        PlayKind::Error(_) | PlayKind::FieldersChoice(_) => set(plan, Origin::Batter, Safe(Base::First)),
        PlayKind::Strikeout(chained) => {
            set(plan, Origin::Batter, Out);
            if let Some(c) = chained {
                implicit_effects(c, bases, plan)?;
            }
        }
        PlayKind::FieldedOut(credits) => {
            let outs = PlayKind::fielded_outs(credits);
            for origin in &outs {
                if *origin != Origin::Batter {
                    occupied_origin(bases, *origin)?;
                }
                set(plan, *origin, Out);
            }
            if !outs.contains(&Origin::Batter) {
                set(plan, Origin::Batter, Safe(Base::First));
            }
        }
        PlayKind::StolenBase(stolen) => {
            for base in stolen {
                let origin = occupied_origin(bases, base.previous())?;
                set(plan, origin, Safe(*base));
            }
        }
        PlayKind::CaughtStealing { base, negated, .. } | PlayKind::PickoffCaughtStealing { base, negated } => {
            let origin = occupied_origin(bases, base.previous())?;
            set(plan, origin, if *negated { Safe(*base) } else { Out });
        }
        PlayKind::Pickoff { base, negated } => {
            let origin = Origin::from_base(*base).ok_or_else(|| illegal("pickoff at home"))?;
            occupied_origin(bases, origin)?;
            if !negated {
                set(plan, origin, Out);
            }
        }
        PlayKind::WildPitch
        | PlayKind::PassedBall
        | PlayKind::Balk
        | PlayKind::DefensiveIndifference
        | PlayKind::OtherAdvance
        | PlayKind::FoulError(_)
        | PlayKind::NoPlay => {}
    }
    Ok(())
}

/// Resolves one play against the pre-play snapshot. Explicit advances
/// override the play kind's implied movements.
pub fn apply_play(snap: &Snapshot, batter_id: &str, play: &ParsedPlay) -> Result<PlayEffects, StateError> {
    if snap.outs > 2 {
        return Err(illegal("play with three outs"));
    }
    let bases = &snap.bases;
    let mut plan: Plan = [None; 4];
    implicit_effects(&play.kind, bases, &mut plan)?;
    for adv in &play.advances {
        if adv.from != Origin::Batter && !bases.is_occupied(adv.from) {
            return Err(illegal(format!("advance {adv} from an empty base")));
        }
        let dest = if adv.is_safe() { Destination::Safe(adv.to) } else { Destination::Out };
        set(&mut plan, adv.from, dest);
    }

    let mut new_bases = BaseState::default();
    let mut outs = 0u8;
    let mut runs = 0u8;
    // walking from the lead runner back, no safe runner may reach or pass
    // the base held by the runner ahead of him
    let mut limit = Base::Home.index() + 1;
    for origin in [Origin::Third, Origin::Second, Origin::First, Origin::Batter] {
        let (runner, stay) = match origin {
            Origin::Batter => (plan[0].map(|_| batter_id.to_string()), None),
            Origin::First => (bases.first.clone(), Some(Base::First)),
            Origin::Second => (bases.second.clone(), Some(Base::Second)),
            Origin::Third => (bases.third.clone(), Some(Base::Third)),
        };
        let Some(runner) = runner else { continue };
        let dest = plan[origin.index() as usize].or(stay.map(Destination::Safe));
        match dest {
            Some(Destination::Out) => outs += 1,
            Some(Destination::Safe(base)) => {
                if base.index() < origin.index() {
                    return Err(illegal(format!("runner {runner} moves backward")));
                }
                if base.index() >= limit || (base == Base::Home && limit <= Base::Home.index()) {
                    return Err(illegal(format!("runner {runner} passes or shares a base")));
                }
                match new_bases.slot_mut(base) {
                    Some(slot) => {
                        *slot = Some(runner);
                        limit = base.index();
                    }
                    None => runs += 1,
                }
            }
            None => unreachable!("runners always have a destination"),
        }
    }
    if snap.outs + outs > 3 {
        return Err(illegal(format!("{} outs recorded with {} already", outs, snap.outs)));
    }
    Ok(PlayEffects { outs_recorded: outs, runs_scored: runs, new_bases, batter_final: plan[0] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::parse_play_token;

    fn snap(first: bool, second: bool, third: bool, outs: u8) -> Snapshot {
        let mut s = initial_snapshot(9, Half::Top, (3, 3), "p001");
        s.bases.first = first.then(|| "r1".into());
        s.bases.second = second.then(|| "r2".into());
        s.bases.third = third.then(|| "r3".into());
        s.outs = outs;
        s
    }

    fn apply(s: &Snapshot, token: &str) -> Result<PlayEffects, StateError> {
        apply_play(s, "bat", &parse_play_token(token).unwrap())
    }

    #[test]
    fn initial_snapshot_fields() {
        let s = initial_snapshot(9, Half::Top, (3, 3), "p001");
        assert_eq!(s.bases, BaseState::default());
        assert_eq!((s.outs, s.score_batting, s.score_fielding, s.play_index), (0, 3, 3, 0));
        assert_eq!(s.pitcher_id, "p001");
        let s = initial_snapshot(1, Half::Bottom, (0, 0), "p002");
        assert_eq!((s.outs, s.bases.mask()), (0, 0));
    }

    #[test]
    fn two_run_homer() {
        let e = apply(&snap(true, false, false, 1), "HR.1-H").unwrap();
        assert_eq!((e.outs_recorded, e.runs_scored), (0, 2));
        assert_eq!(e.new_bases, BaseState::default());
        let e = apply(&snap(true, true, true, 0), "HR").unwrap();
        assert_eq!(e.runs_scored, 4);
    }

    #[test]
    fn double_play_clears_first() {
        let e = apply(&snap(true, false, false, 1), "64(1)3/GDP").unwrap();
        assert_eq!((e.outs_recorded, e.runs_scored), (2, 0));
        assert_eq!(e.new_bases, BaseState::default());
    }

    #[test]
    fn strikeout_leaves_runners() {
        let s = snap(true, true, false, 0);
        let e = apply(&s, "K").unwrap();
        assert_eq!(e.outs_recorded, 1);
        assert_eq!(e.new_bases, s.bases);
        let e = apply(&snap(false, false, false, 2), "K.B-1").unwrap();
        assert_eq!(e.outs_recorded, 0);
        assert_eq!(e.new_bases.first.as_deref(), Some("bat"));
    }

    #[test]
    fn walk_forces_only_forced_runners() {
        let e = apply(&snap(true, false, true, 0), "W").unwrap();
        assert_eq!(e.new_bases.mask(), 0b111);
        assert_eq!(e.runs_scored, 0);
        let e = apply(&snap(true, true, true, 0), "W").unwrap();
        assert_eq!(e.runs_scored, 1);
        let e = apply(&snap(false, true, false, 0), "HP").unwrap();
        assert_eq!(e.new_bases.mask(), 0b011);
    }

    #[test]
    fn single_with_explicit_advances() {
        let e = apply(&snap(true, false, false, 0), "S8/G.1-3").unwrap();
        assert_eq!(e.new_bases.first.as_deref(), Some("bat"));
        assert_eq!(e.new_bases.third.as_deref(), Some("r1"));
        assert_eq!(e.batter_final, Some(Destination::Safe(Base::First)));
    }

    #[test]
    fn fielders_choice_out_at_home() {
        let e = apply(&snap(false, true, false, 0), "FC5.2XH(52)").unwrap();
        assert_eq!((e.outs_recorded, e.runs_scored), (1, 0));
        assert_eq!(e.new_bases.mask(), 0b001);
    }

    #[test]
    fn error_negated_out_is_safe() {
        let e = apply(&snap(false, true, false, 0), "S7.2X3(E5)").unwrap();
        assert_eq!(e.outs_recorded, 0);
        assert_eq!(e.new_bases.mask(), 0b101);
    }

    #[test]
    fn baserunning_plays() {
        let e = apply(&snap(true, false, false, 0), "SB2").unwrap();
        assert_eq!(e.new_bases.second.as_deref(), Some("r1"));
        assert_eq!(e.batter_final, None);
        let e = apply(&snap(true, false, false, 0), "CS2(26)").unwrap();
        assert_eq!((e.outs_recorded, e.new_bases.mask()), (1, 0));
        let e = apply(&snap(true, false, false, 0), "PO1(13)").unwrap();
        assert_eq!(e.outs_recorded, 1);
        let e = apply(&snap(false, false, true, 1), "WP.3-H").unwrap();
        assert_eq!(e.runs_scored, 1);
        let e = apply(&snap(true, false, false, 1), "K+SB2").unwrap();
        assert_eq!((e.outs_recorded, e.new_bases.mask()), (1, 0b010));
        let e = apply(&snap(true, false, false, 0), "54(1)/FO").unwrap();
        assert_eq!((e.outs_recorded, e.new_bases.first.as_deref()), (1, Some("bat")));
    }

    #[test]
    fn illegal_states() {
        assert!(apply(&snap(false, false, false, 0), "SB2").is_err());
        assert!(apply(&snap(false, false, false, 0), "S8.1-3").is_err());
        assert!(apply(&snap(true, true, false, 1), "64(1)3").is_ok());
        assert!(apply(&snap(true, true, false, 2), "64(1)3").is_err());
        // runner from first passes the runner held at second
        assert!(apply(&snap(true, true, false, 0), "S8.1-3").is_err());
        assert!(apply(&snap(false, false, false, 3), "K").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        const TOKENS: &[&str] = &[
            "S8",
            "S8.1-2",
            "S8.1-3;2-H",
            "D7.1-3",
            "D7.1-H;2-H;3-H",
            "T9.1-H;2-H;3-H",
            "HR",
            "W",
            "HP",
            "K",
            "8",
            "63",
            "64(1)3/GDP",
            "FC6.1X2(64)",
            "E5",
            "SB2",
            "SB3",
            "CS2(26)",
            "WP.3-H;2-3;1-2",
            "PO1(13)",
            "S9.3-H",
            "K.B-1",
            "E6.1-3",
        ];

        fn any_snapshot() -> impl Strategy<Value = Snapshot> {
            (any::<bool>(), any::<bool>(), any::<bool>(), 0u8..3).prop_map(|(a, b, c, o)| snap(a, b, c, o))
        }

        proptest! {
            #[test]
            fn occupancy_and_conservation(s in any_snapshot(), idx in 0..TOKENS.len()) {
                let play = parse_play_token(TOKENS[idx]).unwrap();
                if let Ok(e) = apply_play(&s, "bat", &play) {
                    let ids: Vec<&String> = [&e.new_bases.first, &e.new_bases.second, &e.new_bases.third]
                        .into_iter().flatten().collect();
                    let mut dedup = ids.clone();
                    dedup.sort();
                    dedup.dedup();
                    prop_assert_eq!(dedup.len(), ids.len());
                    prop_assert!(s.outs + e.outs_recorded <= 3);
                    let batter_reached = matches!(e.batter_final, Some(Destination::Safe(_))) as u8;
                    prop_assert_eq!(
                        s.bases.runner_count() + batter_reached,
                        e.new_bases.runner_count() + e.runs_scored
                            + e.outs_recorded - matches!(e.batter_final, Some(Destination::Out)) as u8
                    );
                }
            }
        }
    }
}
