use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::str::FromStr;

use crate::stats::{CountingMode, Stratum};

use super::CliError;

pub const DEFAULT_BUCKETS: [u64; 6] = [100, 150, 200, 250, 300, 350];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    Csv,
    #[default]
    Text,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "text" | "aligned-text" => Ok(OutputFormat::Text),
            _ => Err(format!("unknown format `{s}` (expected csv|text)")),
        }
    }
}

/// Keeps pitchers whose careers, as seen in the archive, end no earlier
/// than `retired_since` and begin no later than `active_through`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Cohort {
    pub retired_since: Option<u16>,
    pub active_through: Option<u16>,
}

impl Cohort {
    pub fn is_active(&self) -> bool {
        self.retired_since.is_some() || self.active_through.is_some()
    }

    pub fn admits(&self, first: u16, last: u16) -> bool {
        self.retired_since.is_none_or(|y| last >= y) && self.active_through.is_none_or(|y| first <= y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub cache: Option<PathBuf>,
    pub years: Option<RangeInclusive<u16>>,
    pub mode: CountingMode,
    /// Per-pitcher reports and queries use the high-leverage stratum.
    pub leverage: bool,
    pub cohort: Cohort,
    pub buckets: Vec<u64>,
    pub format: OutputFormat,
    pub era: Option<PathBuf>,
    pub save_leaders: Vec<String>,
    pub min_appearances: u64,
    pub outs: u8,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: Vec::new(),
            cache: None,
            years: None,
            mode: CountingMode::IncludingPlay,
            leverage: true,
            cohort: Cohort::default(),
            buckets: DEFAULT_BUCKETS.to_vec(),
            format: OutputFormat::Text,
            era: None,
            save_leaders: Vec::new(),
            min_appearances: 350,
            outs: 1,
        }
    }
}

impl RunConfig {
    pub fn stratum(&self) -> Stratum {
        if self.leverage {
            Stratum::HighLeverage
        } else {
            Stratum::All
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(y) = &self.years {
            if y.is_empty() {
                return Err(CliError::Usage(format!("empty year range {}-{}", y.start(), y.end())));
            }
        }
        if self.buckets.is_empty() || self.buckets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Usage("bucket boundaries must be non-empty and strictly increasing".into()));
        }
        if self.outs > 1 {
            return Err(CliError::Usage(format!("outs must be 0 or 1, not {}", self.outs)));
        }
        Ok(())
    }

    /// Applies one `key=value` setting, as found in a config file.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "inputs" | "input" => self.inputs = split_list(value).map(PathBuf::from).collect(),
            "cache" => self.cache = Some(PathBuf::from(value)),
            "years" => self.years = Some(parse_years(value)?),
            "mode" | "counting_mode" => self.mode = value.parse()?,
            "leverage" => self.leverage = parse_switch(value)?,
            "retired_since" => self.cohort.retired_since = Some(parse_num(key, value)?),
            "active_through" => self.cohort.active_through = Some(parse_num(key, value)?),
            "buckets" => self.buckets = parse_buckets(value)?,
            "format" => self.format = value.parse()?,
            "era" => self.era = Some(PathBuf::from(value)),
            "save_leaders" => self.save_leaders = split_list(value).map(String::from).collect(),
            "min_appearances" => self.min_appearances = parse_num(key, value)?,
            "outs" => self.outs = parse_num(key, value)?,
            _ => return Err(format!("unknown setting `{key}`")),
        }
        Ok(())
    }

    pub fn apply_file(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
            let key = key.trim().replace('-', "_");
            self.set(&key, value.trim()).map_err(|e| CliError::Usage(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(())
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("bad value `{value}` for {key}"))
}

pub fn parse_switch(value: &str) -> Result<bool, String> {
    match value {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected on|off, got `{value}`")),
    }
}

/// `1984-2011` or a single year.
pub fn parse_years(value: &str) -> Result<RangeInclusive<u16>, String> {
    let bad = || format!("bad year range `{value}`");
    let (a, b) = value.split_once('-').unwrap_or((value, value));
    let a: u16 = a.trim().parse().map_err(|_| bad())?;
    let b: u16 = b.trim().parse().map_err(|_| bad())?;
    Ok(a..=b)
}

pub fn parse_buckets(value: &str) -> Result<Vec<u64>, String> {
    split_list(value)
        .filter(|s| *s != "inf")
        .map(|s| s.parse().map_err(|_| format!("bad bucket boundary `{s}`")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file() {
        let mut c = RunConfig::default();
        c.apply_file(
            "# comment\nyears = 1984-2011\nmode=excluding\nleverage=off\nbuckets=100,200,inf\nsave-leaders=a,b\n",
        )
        .unwrap();
        assert_eq!(c.years, Some(1984..=2011));
        assert_eq!(c.mode, CountingMode::ExcludingPlay);
        assert!(!c.leverage);
        assert_eq!(c.buckets, vec![100, 200]);
        assert_eq!(c.save_leaders, vec!["a", "b"]);
        c.validate().unwrap();
        assert!(c.apply_file("nonsense").is_err());
        assert!(c.apply_file("color=blue").is_err());
    }

    #[test]
    fn invariants() {
        let c = RunConfig { buckets: vec![100, 100], ..RunConfig::default() };
        assert!(c.validate().is_err());
        let c = RunConfig { years: Some(parse_years("2011-1984").unwrap()), ..RunConfig::default() };
        assert!(c.validate().is_err());
        assert_eq!(parse_years("2003").unwrap(), 2003..=2003);
    }

    #[test]
    fn cohort() {
        let c = Cohort { retired_since: Some(1984), active_through: Some(2011) };
        assert!(c.admits(1980, 1990));
        assert!(!c.admits(1970, 1983));
        assert!(!c.admits(2012, 2015));
        assert!(Cohort::default().admits(1900, 1901));
    }
}
