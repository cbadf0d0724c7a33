//! The play-description mini-language: `event/modifiers.advances`.

use std::fmt;

use thiserror::Error;

/// Where a runner starts a play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Batter,
    First,
    Second,
    Third,
}

impl Origin {
    pub const ALL: [Origin; 4] = [Origin::Batter, Origin::First, Origin::Second, Origin::Third];

    /// 0 for the batter, otherwise the base number.
    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn from_base(base: Base) -> Option<Origin> {
        match base {
            Base::First => Some(Origin::First),
            Base::Second => Some(Origin::Second),
            Base::Third => Some(Origin::Third),
            Base::Home => None,
        }
    }

    fn from_char(c: char) -> Option<Origin> {
        match c {
            'B' => Some(Origin::Batter),
            '1' => Some(Origin::First),
            '2' => Some(Origin::Second),
            '3' => Some(Origin::Third),
            _ => None,
        }
    }

    pub fn code(self) -> char {
        match self {
            Origin::Batter => 'B',
            Origin::First => '1',
            Origin::Second => '2',
            Origin::Third => '3',
        }
    }
}

/// Where a runner is headed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Base {
    First = 1,
    Second = 2,
    Third = 3,
    Home = 4,
}

impl Base {
    pub fn index(self) -> u8 {
        self as u8
    }

    /// The base after this one; `Home` is terminal.
    pub fn next(self) -> Base {
        match self {
            Base::First => Base::Second,
            Base::Second => Base::Third,
            Base::Third | Base::Home => Base::Home,
        }
    }

    /// The base a runner stealing or caught stealing this base started from.
    pub fn previous(self) -> Origin {
        match self {
            Base::First => Origin::Batter,
            Base::Second => Origin::First,
            Base::Third => Origin::Second,
            Base::Home => Origin::Third,
        }
    }

    fn from_char(c: char) -> Option<Base> {
        match c {
            '1' => Some(Base::First),
            '2' => Some(Base::Second),
            '3' => Some(Base::Third),
            'H' => Some(Base::Home),
            _ => None,
        }
    }

    pub fn code(self) -> char {
        match self {
            Base::First => '1',
            Base::Second => '2',
            Base::Third => '3',
            Base::Home => 'H',
        }
    }
}

/// One fielding group of a fielded out, e.g. `64(1)`: the fielders handling
/// the ball and, if present, the runner retired by that group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Credit {
    pub fielders: Vec<u8>,
    pub retired: Option<Origin>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlayKind {
    Single(Vec<u8>),
    Double(Vec<u8>),
    Triple(Vec<u8>),
    HomeRun,
    Walk(Option<Box<PlayKind>>),
    IntentionalWalk(Option<Box<PlayKind>>),
    HitByPitch,
    Strikeout(Option<Box<PlayKind>>),
    FieldersChoice(Option<u8>),
    Error(u8),
    CatcherInterference,
    GroundRuleDouble,
    FieldedOut(Vec<Credit>),
    StolenBase(Vec<Base>),
    CaughtStealing { base: Base, fielders: Vec<u8>, negated: bool },
    Pickoff { base: Base, negated: bool },
    PickoffCaughtStealing { base: Base, negated: bool },
    WildPitch,
    PassedBall,
    Balk,
    DefensiveIndifference,
    OtherAdvance,
    FoulError(u8),
    NoPlay,
}

impl PlayKind {
    /// Runners retired by the fielding credits of a fielded out. The batter
    /// is out when named with `(B)` or when the last group has no base
    /// reference.
    pub fn fielded_outs(credits: &[Credit]) -> Vec<Origin> {
        let mut out: Vec<Origin> = credits.iter().filter_map(|c| c.retired).collect();
        if credits.last().is_some_and(|c| c.retired.is_none()) && !out.contains(&Origin::Batter) {
            out.push(Origin::Batter);
        }
        out
    }

    /// True when the play is a plate-appearance event rather than a
    /// baserunning event between pitches.
    pub fn is_batter_event(&self) -> bool {
        !matches!(
            self,
            PlayKind::StolenBase(_)
                | PlayKind::CaughtStealing { .. }
                | PlayKind::Pickoff { .. }
                | PlayKind::PickoffCaughtStealing { .. }
                | PlayKind::WildPitch
                | PlayKind::PassedBall
                | PlayKind::Balk
                | PlayKind::DefensiveIndifference
                | PlayKind::OtherAdvance
                | PlayKind::FoulError(_)
                | PlayKind::NoPlay
        )
    }
}

/// A runner movement from the advance section, e.g. `2XH(82)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Advance {
    pub from: Origin,
    pub to: Base,
    pub is_out: bool,
    pub negated_by_error: bool,
    pub annotations: Vec<String>,
}

impl Advance {
    pub fn is_safe(&self) -> bool {
        !self.is_out || self.negated_by_error
    }
}

impl fmt::Display for Advance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.is_out { 'X' } else { '-' };
        write!(f, "{}{}{}", self.from.code(), sep, self.to.code())?;
        for a in &self.annotations {
            write!(f, "({a})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedPlay {
    pub kind: PlayKind,
    pub modifiers: Vec<String>,
    pub advances: Vec<Advance>,
    /// Uncertainty and exceptional-play markers (`#`, `?`, `!`) stripped
    /// from the token, in source order.
    pub markers: Vec<char>,
}

impl ParsedPlay {
    pub fn advance_from(&self, origin: Origin) -> Option<&Advance> {
        self.advances.iter().find(|a| a.from == origin)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlayError {
    #[error("unparseable event `{text}`: {reason}")]
    UnparseableEvent { text: String, reason: String },
    #[error("malformed advance `{0}`")]
    MalformedAdvance(String),
    #[error("duplicate advance from {0:?}")]
    DuplicateAdvance(Origin),
}

fn unparseable(text: &str, reason: impl Into<String>) -> PlayError {
    PlayError::UnparseableEvent { text: text.to_string(), reason: reason.into() }
}

/// Splits on `sep` outside parentheses.
fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn split_once_top_level(s: &str, sep: char) -> (&str, Option<&str>) {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => return (&s[..i], Some(&s[i + c.len_utf8()..])),
            _ => {}
        }
    }
    (s, None)
}

/// Parses trailing `(...)` groups; returns `None` if anything else remains or
/// parentheses are unbalanced.
fn paren_groups(mut s: &str) -> Option<Vec<String>> {
    let mut groups = Vec::new();
    while !s.is_empty() {
        let rest = s.strip_prefix('(')?;
        let close = rest.find(')')?;
        let inner = &rest[..close];
        if inner.contains('(') {
            return None;
        }
        groups.push(inner.to_string());
        s = &rest[close + 1..];
    }
    Some(groups)
}

fn digits(s: &str) -> Option<Vec<u8>> {
    s.chars().map(|c| c.to_digit(10).map(|d| d as u8)).collect()
}

fn has_error_credit(group: &str) -> bool {
    let b = group.as_bytes();
    b.windows(2).any(|w| w[0] == b'E' && w[1].is_ascii_digit())
}

pub fn parse_advances(text: &str) -> Result<Vec<Advance>, PlayError> {
    let mut out: Vec<Advance> = Vec::new();
    for token in split_top_level(text, ';') {
        let adv = parse_advance(token)?;
        if out.iter().any(|a| a.from == adv.from) {
            return Err(PlayError::DuplicateAdvance(adv.from));
        }
        out.push(adv);
    }
    Ok(out)
}

fn parse_advance(token: &str) -> Result<Advance, PlayError> {
    let bad = || PlayError::MalformedAdvance(token.to_string());
    let mut chars = token.chars();
    let from = chars.next().and_then(Origin::from_char).ok_or_else(bad)?;
    let is_out = match chars.next() {
        Some('-') => false,
        Some('X') => true,
        _ => return Err(bad()),
    };
    let to = chars.next().and_then(Base::from_char).ok_or_else(bad)?;
    let annotations = paren_groups(chars.as_str()).ok_or_else(bad)?;
    let negated_by_error = is_out && annotations.iter().any(|g| has_error_credit(g));
    if !is_out && to.index() <= from.index() {
        return Err(bad());
    }
    Ok(Advance { from, to, is_out, negated_by_error, annotations })
}

/// Parses one play token. Never panics; any input outside the grammar yields
/// an error.
pub fn parse_play_token(event_text: &str) -> Result<ParsedPlay, PlayError> {
    let mut markers = Vec::new();
    let cleaned: String = event_text
        .trim()
        .chars()
        .filter(|&c| {
            let marker = matches!(c, '#' | '?' | '!');
            if marker {
                markers.push(c);
            }
            !marker
        })
        .collect();
    if cleaned.is_empty() {
        return Err(unparseable(event_text, "empty token"));
    }
    let (head, adv_text) = split_once_top_level(&cleaned, '.');
    let mut sections = split_top_level(head, '/').into_iter();
    let event = sections.next().unwrap_or_default();
    let modifiers: Vec<String> = sections.filter(|m| !m.is_empty()).map(str::to_string).collect();
    let kind = parse_event(event).map_err(|reason| unparseable(event_text, reason))?;
    let advances = match adv_text {
        Some(t) if !t.is_empty() => parse_advances(t).map_err(|e| unparseable(event_text, e.to_string()))?,
        Some(_) => return Err(unparseable(event_text, "empty advance section")),
        None => Vec::new(),
    };
    Ok(ParsedPlay { kind, modifiers, advances, markers })
}

fn parse_event(s: &str) -> Result<PlayKind, String> {
    if let (primary, Some(chained)) = split_once_top_level(s, '+') {
        let chained = Box::new(parse_chained(chained)?);
        return match parse_simple(primary)? {
            PlayKind::Strikeout(None) => Ok(PlayKind::Strikeout(Some(chained))),
            PlayKind::Walk(None) => Ok(PlayKind::Walk(Some(chained))),
            PlayKind::IntentionalWalk(None) => Ok(PlayKind::IntentionalWalk(Some(chained))),
            other => Err(format!("{other:?} cannot carry a chained event")),
        };
    }
    parse_simple(s)
}

fn parse_chained(s: &str) -> Result<PlayKind, String> {
    let kind = parse_simple(s)?;
    match kind {
        PlayKind::StolenBase(_)
        | PlayKind::CaughtStealing { .. }
        | PlayKind::Pickoff { .. }
        | PlayKind::PickoffCaughtStealing { .. }
        | PlayKind::WildPitch
        | PlayKind::PassedBall
        | PlayKind::DefensiveIndifference
        | PlayKind::OtherAdvance
        | PlayKind::Error(_) => Ok(kind),
        other => Err(format!("{other:?} cannot be chained")),
    }
}

fn exact(s: &str, word: &str, kind: PlayKind) -> Option<Result<PlayKind, String>> {
    (s == word).then_some(Ok(kind))
}

/// `2`, `3`, `H` followed by optional fielding groups.
fn base_with_groups(rest: &str) -> Result<(Base, Vec<String>), String> {
    let mut chars = rest.chars();
    let base = chars.next().and_then(Base::from_char).ok_or("missing base")?;
    let groups = paren_groups(chars.as_str()).ok_or("malformed fielding group")?;
    Ok((base, groups))
}

fn parse_simple(s: &str) -> Result<PlayKind, String> {
    let fixed = [
        ("NP", PlayKind::NoPlay),
        ("WP", PlayKind::WildPitch),
        ("PB", PlayKind::PassedBall),
        ("BK", PlayKind::Balk),
        ("DI", PlayKind::DefensiveIndifference),
        ("OA", PlayKind::OtherAdvance),
        ("HP", PlayKind::HitByPitch),
        ("IW", PlayKind::IntentionalWalk(None)),
        ("I", PlayKind::IntentionalWalk(None)),
        ("W", PlayKind::Walk(None)),
        ("C", PlayKind::CatcherInterference),
        ("FC", PlayKind::FieldersChoice(None)),
    ];
    for (word, kind) in fixed {
        if let Some(k) = exact(s, word, kind) {
            return k;
        }
    }
    if let Some(rest) = s.strip_prefix("DGR") {
        digits(rest).ok_or("trailing text after DGR")?;
        return Ok(PlayKind::GroundRuleDouble);
    }
    if let Some(rest) = s.strip_prefix("POCS") {
        let (base, groups) = base_with_groups(rest)?;
        let negated = groups.iter().any(|g| has_error_credit(g));
        return Ok(PlayKind::PickoffCaughtStealing { base, negated });
    }
    if let Some(rest) = s.strip_prefix("PO") {
        let (base, groups) = base_with_groups(rest)?;
        if base == Base::Home {
            return Err("pickoff at home".into());
        }
        let negated = groups.iter().any(|g| has_error_credit(g));
        return Ok(PlayKind::Pickoff { base, negated });
    }
    if s.starts_with("SB") {
        let bases = split_top_level(s, ';')
            .into_iter()
            .map(|part| {
                let b = part.strip_prefix("SB").ok_or("mixed stolen-base list")?;
                let (base, groups) = base_with_groups(b)?;
                if base == Base::First {
                    return Err("steal of first".to_string());
                }
                // (UR) and similar annotations may follow a steal of home
                let _ = groups;
                Ok(base)
            })
            .collect::<Result<Vec<_>, String>>()?;
        let mut sorted = bases.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != bases.len() {
            return Err("duplicate stolen base".into());
        }
        return Ok(PlayKind::StolenBase(bases));
    }
    if let Some(rest) = s.strip_prefix("CS") {
        let (base, groups) = base_with_groups(rest)?;
        if base == Base::First {
            return Err("caught stealing first".into());
        }
        let negated = groups.iter().any(|g| has_error_credit(g));
        let fielders = groups.iter().find_map(|g| digits(g)).unwrap_or_default();
        return Ok(PlayKind::CaughtStealing { base, fielders, negated });
    }
    if let Some(rest) = s.strip_prefix("FLE") {
        return single_position(rest).map(PlayKind::FoulError);
    }
    if let Some(rest) = s.strip_prefix("FC") {
        return single_position(rest).map(|p| PlayKind::FieldersChoice(Some(p)));
    }
    if let Some(rest) = s.strip_prefix("HR").or_else(|| s.strip_prefix('H')) {
        digits(rest).ok_or("trailing text after home run")?;
        return Ok(PlayKind::HomeRun);
    }
    if let Some(rest) = s.strip_prefix('K') {
        digits(rest).ok_or("trailing text after strikeout")?;
        return Ok(PlayKind::Strikeout(None));
    }
    if let Some(rest) = s.strip_prefix('E') {
        return single_position(rest).map(PlayKind::Error);
    }
    for (prefix, ctor) in
        [('S', PlayKind::Single as fn(Vec<u8>) -> PlayKind), ('D', PlayKind::Double), ('T', PlayKind::Triple)]
    {
        if let Some(rest) = s.strip_prefix(prefix) {
            return digits(rest).map(ctor).ok_or_else(|| format!("bad fielders after {prefix}"));
        }
    }
    if s.starts_with(|c: char| c.is_ascii_digit()) {
        return parse_fielded_out(s);
    }
    Err(format!("unknown event `{s}`"))
}

fn single_position(rest: &str) -> Result<u8, String> {
    match digits(rest).as_deref() {
        Some([p]) if (1..=9).contains(p) => Ok(*p),
        _ => Err(format!("expected one fielder position, got `{rest}`")),
    }
}

fn parse_fielded_out(s: &str) -> Result<PlayKind, String> {
    let mut credits = Vec::new();
    let mut rest = s;
    while !rest.is_empty() {
        let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        if end == 0 {
            return Err(format!("expected fielder digits at `{rest}`"));
        }
        let fielders = digits(&rest[..end]).ok_or("bad fielders")?;
        rest = &rest[end..];
        let mut retired = None;
        if let Some(inner) = rest.strip_prefix('(') {
            let close = inner.find(')').ok_or("unclosed base reference")?;
            let mut c = inner[..close].chars();
            retired = match (c.next().and_then(Origin::from_char), c.next()) {
                (Some(o), None) => Some(o),
                _ => return Err(format!("bad base reference `{}`", &inner[..close])),
            };
            rest = &inner[close + 1..];
        }
        credits.push(Credit { fielders, retired });
    }
    let outs = PlayKind::fielded_outs(&credits);
    let mut dedup = outs.clone();
    dedup.sort();
    dedup.dedup();
    if dedup.len() != outs.len() || outs.len() > 3 {
        return Err("inconsistent out credits".into());
    }
    Ok(PlayKind::FieldedOut(credits))
}
