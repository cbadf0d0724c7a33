use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Out,
    Strikeout,
    Walk,
    Single,
    Double,
    Triple,
    HomeRun,
    DoublePlay,
}

impl Outcome {
    pub const ALL: [Outcome; 8] = [
        Outcome::Out,
        Outcome::Strikeout,
        Outcome::Walk,
        Outcome::Single,
        Outcome::Double,
        Outcome::Triple,
        Outcome::HomeRun,
        Outcome::DoublePlay,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Outcome::Out => "out",
            Outcome::Strikeout => "strikeout",
            Outcome::Walk => "walk",
            Outcome::Single => "single",
            Outcome::Double => "double",
            Outcome::Triple => "triple",
            Outcome::HomeRun => "home_run",
            Outcome::DoublePlay => "gdp",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Destination base (2, 3, or 4 for home) of the runner starting on each
/// base when a hit of this kind occurs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdvancePolicy {
    pub first: u8,
    pub second: u8,
    pub third: u8,
}

impl AdvancePolicy {
    pub const ALL_SCORE: AdvancePolicy = AdvancePolicy { first: 4, second: 4, third: 4 };

    pub fn destination(&self, base: u8) -> u8 {
        match base {
            1 => self.first,
            2 => self.second,
            _ => self.third,
        }
    }

    /// Runners may not pass each other, share a base, or move backwards.
    fn validate(&self, batter_dest: u8, name: &str) -> Result<(), ModelError> {
        let chain = [batter_dest, self.first, self.second, self.third];
        for (base, &d) in chain.iter().enumerate().skip(1) {
            if d <= base as u8 || d > 4 {
                return Err(ModelError::InvalidModel(format!("{name}: runner from {base} cannot go to {d}")));
            }
        }
        for w in chain.windows(2) {
            if !(w[0] < w[1] || (w[0] == 4 && w[1] == 4)) {
                return Err(ModelError::InvalidModel(format!(
                    "{name}: advance policy lets runners pass or share a base"
                )));
            }
        }
        Ok(())
    }
}

/// Plate-appearance outcome probabilities plus hit advance policies. The
/// double-play probability applies only with first occupied and fewer than
/// two outs; elsewhere it counts as an ordinary out.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeModel {
    pub out: f64,
    pub strikeout: f64,
    pub walk: f64,
    pub single: f64,
    pub double: f64,
    pub triple: f64,
    pub home_run: f64,
    pub gdp: f64,
    pub single_policy: AdvancePolicy,
    pub double_policy: AdvancePolicy,
}

impl Default for OutcomeModel {
    fn default() -> Self {
        OutcomeModel {
            out: 0.44,
            strikeout: 0.20,
            walk: 0.085,
            single: 0.155,
            double: 0.045,
            triple: 0.005,
            home_run: 0.03,
            gdp: 0.04,
            single_policy: AdvancePolicy { first: 2, second: 3, third: 4 },
            double_policy: AdvancePolicy { first: 3, second: 4, third: 4 },
        }
    }
}

impl OutcomeModel {
    /// Out with probability `q`, home run otherwise.
    pub fn two_outcome(q: f64) -> Self {
        OutcomeModel {
            out: q,
            strikeout: 0.0,
            walk: 0.0,
            single: 0.0,
            double: 0.0,
            triple: 0.0,
            home_run: 1.0 - q,
            gdp: 0.0,
            ..OutcomeModel::default()
        }
    }

    /// No walks or double plays, and singles move every runner one base.
    /// Scoring chances then depend only on the lead runner, so each
    /// situation class has a single scoring probability.
    pub fn station_to_station() -> Self {
        OutcomeModel {
            out: 0.46,
            strikeout: 0.22,
            walk: 0.0,
            single: 0.20,
            double: 0.07,
            triple: 0.01,
            home_run: 0.04,
            gdp: 0.0,
            single_policy: AdvancePolicy { first: 2, second: 3, third: 4 },
            double_policy: AdvancePolicy { first: 3, second: 4, third: 4 },
        }
    }

    pub fn probability(&self, outcome: Outcome) -> f64 {
        match outcome {
            Outcome::Out => self.out,
            Outcome::Strikeout => self.strikeout,
            Outcome::Walk => self.walk,
            Outcome::Single => self.single,
            Outcome::Double => self.double,
            Outcome::Triple => self.triple,
            Outcome::HomeRun => self.home_run,
            Outcome::DoublePlay => self.gdp,
        }
    }

    fn probability_mut(&mut self, outcome: Outcome) -> &mut f64 {
        match outcome {
            Outcome::Out => &mut self.out,
            Outcome::Strikeout => &mut self.strikeout,
            Outcome::Walk => &mut self.walk,
            Outcome::Single => &mut self.single,
            Outcome::Double => &mut self.double,
            Outcome::Triple => &mut self.triple,
            Outcome::HomeRun => &mut self.home_run,
            Outcome::DoublePlay => &mut self.gdp,
        }
    }

    /// Outcome probabilities in a given state, with the double play folded
    /// into the plain out when it cannot happen.
    pub fn effective(&self, first_occupied: bool, outs: u8) -> [(Outcome, f64); 8] {
        let gdp_ok = first_occupied && outs < 2;
        Outcome::ALL.map(|o| {
            let p = match o {
                Outcome::Out if !gdp_ok => self.out + self.gdp,
                Outcome::DoublePlay if !gdp_ok => 0.0,
                _ => self.probability(o),
            };
            (o, p)
        })
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let mut total = 0.0;
        for o in Outcome::ALL {
            let p = self.probability(o);
            if !(0.0..=1.0).contains(&p) {
                return Err(ModelError::InvalidModel(format!("{o} probability {p} outside [0,1]")));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(ModelError::InvalidModel(format!("probabilities sum to {total}, not 1")));
        }
        self.single_policy.validate(1, "single")?;
        self.double_policy.validate(2, "double")?;
        Ok(())
    }

    /// Parses `key=value` lines. Unlisted probabilities are 0 and unlisted
    /// policies keep their defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let mut model = OutcomeModel::default();
        for o in Outcome::ALL {
            *model.probability_mut(o) = 0.0;
        }
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ModelError::Parse { line: line_no, message };
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected key=value, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if let Some((hit, base)) = key.split_once('.') {
                let policy = match hit {
                    "single" => &mut model.single_policy,
                    "double" => &mut model.double_policy,
                    _ => return Err(err(format!("no advance policy for `{hit}`"))),
                };
                let dest = match value {
                    "2" => 2,
                    "3" => 3,
                    "H" | "h" | "4" | "home" => 4,
                    _ => return Err(err(format!("bad destination `{value}`"))),
                };
                match base {
                    "first" | "1" => policy.first = dest,
                    "second" | "2" => policy.second = dest,
                    "third" | "3" => policy.third = dest,
                    _ => return Err(err(format!("bad base `{base}`"))),
                }
                continue;
            }
            let key = if key == "hr" { "home_run" } else { key };
            let outcome =
                Outcome::ALL.into_iter().find(|o| o.key() == key).ok_or_else(|| err(format!("unknown key `{key}`")))?;
            let p: f64 = value.parse().map_err(|_| err(format!("bad probability `{value}`")))?;
            *model.probability_mut(outcome) = p;
        }
        model.validate()?;
        Ok(model)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for o in Outcome::ALL {
            out.push_str(&format!("{}={}\n", o.key(), self.probability(o)));
        }
        for (name, p) in [("single", self.single_policy), ("double", self.double_policy)] {
            for (base, d) in [("first", p.first), ("second", p.second), ("third", p.third)] {
                let d = if d == 4 { "H".to_string() } else { d.to_string() };
                out.push_str(&format!("{name}.{base}={d}\n"));
            }
        }
        out
    }
}
