//! Command-line front end: ingest, reports, decisions, queries and the
//! synthetic season generator.

pub mod cache;
pub mod config;
pub mod ingest;
pub mod report;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::oracle::{
    emit_game, exact_class_rates, exact_tsf, generate_season, high_leverage_appearances, OutcomeModel, PitcherChange,
    SeasonConfig,
};
use crate::stats::{compute_brt, round3, SituationClass, Stratum, TallyTable};

use cache::{read_cache, write_cache, CacheManifest};
use config::{parse_buckets, parse_switch, parse_years, OutputFormat, RunConfig};
use report::{BrtSource, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    /// The reader of stdout went away; not reported.
    #[error("output closed")]
    Closed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Closed => 0,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "brt", version, about = "Baserunning risk threshold statistics from Retrosheet event files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Default)]
struct Common {
    /// Event files or directories of event files.
    inputs: Vec<PathBuf>,
    /// key=value settings file; flags given here take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Season range such as 1984-2011.
    #[arg(long)]
    years: Option<String>,
    /// including|excluding runs scored on the observed play.
    #[arg(long)]
    mode: Option<String>,
    /// on|off: use high-leverage cells for per-pitcher reports.
    #[arg(long)]
    leverage: Option<String>,
    #[arg(long)]
    retired_since: Option<u16>,
    #[arg(long)]
    active_through: Option<u16>,
    /// Comma-separated career high-leverage inning boundaries.
    #[arg(long)]
    buckets: Option<String>,
    /// csv|text
    #[arg(long)]
    format: Option<String>,
    /// CSV of pitcher_id,era.
    #[arg(long)]
    era: Option<PathBuf>,
    /// Comma-separated pitcher ids reported as an extra group.
    #[arg(long)]
    save_leaders: Option<String>,
    #[arg(long)]
    min_appearances: Option<u64>,
    /// Outs for the threshold (0 or 1).
    #[arg(long)]
    outs: Option<u8>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse event files and write a stats cache.
    Ingest {
        #[command(flatten)]
        common: Common,
        /// Cache file to write.
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Aggregate T, S, F and BRT for both thresholds and strata.
    Table1 {
        #[command(flatten)]
        common: Common,
    },
    /// Pitchers grouped by career high-leverage innings.
    Table2 {
        #[command(flatten)]
        common: Common,
    },
    /// Per-pitcher rates, sorted by threshold.
    Table3 {
        #[command(flatten)]
        common: Common,
    },
    /// Compare a hit probability against a threshold.
    Decide {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        p: f64,
        #[arg(long, conflicts_with = "tsf")]
        pitcher: Option<String>,
        /// Explicit t,s,f.
        #[arg(long)]
        tsf: Option<String>,
    },
    /// List half-innings where a pitcher faced a situation.
    Query {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        pitcher: Option<String>,
        /// Situation class: T0, T1, S0, S1, F1 or F2.
        #[arg(long)]
        class: String,
    },
    /// Generate a synthetic season and print its exact rates.
    Simulate {
        /// Outcome model file (key=value); the built-in model if absent.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        games: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 2003)]
        start_year: u16,
        #[arg(long, default_value_t = 5)]
        pitchers_per_team: usize,
        /// Reliever entry as inning:outs, e.g. 8:0.
        #[arg(long)]
        pitcher_change: Option<String>,
        /// Directory for the emitted event files.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// CSV of pitcher_id,high-leverage half-innings from the generator.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
    },
}

fn build_config(common: &Common) -> Result<RunConfig, CliError> {
    let mut c = RunConfig::default();
    if let Some(path) = &common.config {
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        c.apply_file(&text)?;
    }
    let usage = CliError::Usage;
    if !common.inputs.is_empty() {
        c.inputs = common.inputs.clone();
    }
    if let Some(p) = &common.cache {
        c.cache = Some(p.clone());
    }
    if let Some(y) = &common.years {
        c.years = Some(parse_years(y).map_err(usage)?);
    }
    if let Some(m) = &common.mode {
        c.mode = m.parse().map_err(usage)?;
    }
    if let Some(l) = &common.leverage {
        c.leverage = parse_switch(l).map_err(usage)?;
    }
    if common.retired_since.is_some() {
        c.cohort.retired_since = common.retired_since;
    }
    if common.active_through.is_some() {
        c.cohort.active_through = common.active_through;
    }
    if let Some(b) = &common.buckets {
        c.buckets = parse_buckets(b).map_err(usage)?;
    }
    if let Some(f) = &common.format {
        c.format = f.parse().map_err(usage)?;
    }
    if let Some(e) = &common.era {
        c.era = Some(e.clone());
    }
    if let Some(s) = &common.save_leaders {
        c.save_leaders = s.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect();
    }
    if let Some(m) = common.min_appearances {
        c.min_appearances = m;
    }
    if let Some(o) = common.outs {
        c.outs = o;
    }
    c.validate()?;
    Ok(c)
}

struct Loaded {
    tally: TallyTable,
    names: BTreeMap<String, String>,
}

/// Tallies from the cache when one is given (checked against the inputs'
/// fingerprint if inputs are named too), otherwise from the inputs.
fn load(config: &RunConfig, err: &mut dyn Write) -> Result<Loaded, CliError> {
    if let Some(path) = &config.cache {
        let file = fs::File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let (manifest, tally) = read_cache(BufReader::new(file))?;
        if manifest.mode != config.mode {
            return Err(CliError::Data(format!(
                "cache was built in {} mode but {} was requested",
                manifest.mode.name(),
                config.mode.name()
            )));
        }
        let mut names = BTreeMap::new();
        if !config.inputs.is_empty() {
            let inputs = ingest::discover(&config.inputs)?;
            let fp = ingest::fingerprint(&inputs.event_files, config.mode)?;
            if fp != manifest.fingerprint {
                return Err(CliError::Data("cache fingerprint does not match the input files".into()));
            }
            for r in &inputs.roster_files {
                let text = fs::read(r).map_err(|e| CliError::Data(format!("{}: {e}", r.display())))?;
                names.extend(ingest::read_roster(&crate::event::decode_latin1(&text)));
            }
        }
        return Ok(Loaded { tally, names });
    }
    if config.inputs.is_empty() {
        return Err(CliError::Usage("no inputs or cache given".into()));
    }
    let ing = ingest::ingest(&config.inputs, config.mode)?;
    report_problems(&ing.report, err);
    Ok(Loaded { tally: ing.tally, names: ing.names })
}

fn report_problems(report: &ingest::IngestReport, err: &mut dyn Write) {
    for f in report.problem_files() {
        let _ = writeln!(err, "{}: {} diagnostic(s)", f.path.display(), f.diagnostics.len());
        for d in f.diagnostics.iter().take(5) {
            let _ = writeln!(err, "  {d}");
        }
    }
}

fn emit(out: &mut dyn Write, table: &Table, format: OutputFormat) -> Result<(), CliError> {
    out.write_all(table.render(format).as_bytes()).map_err(output_error)
}

fn output_error(e: std::io::Error) -> CliError {
    if e.kind() == std::io::ErrorKind::BrokenPipe {
        CliError::Closed
    } else {
        CliError::Data(format!("write: {e}"))
    }
}

fn parse_tsf(s: &str) -> Result<(f64, f64, f64), CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("bad --tsf `{s}`")))?;
    match v[..] {
        [t, s, f] if [t, s, f].iter().all(|x| (0.0..=1.0).contains(x)) => Ok((t, s, f)),
        _ => Err(CliError::Usage(format!("--tsf needs three probabilities, got `{s}`"))),
    }
}

fn parse_change(s: &str) -> Result<PitcherChange, CliError> {
    let bad = || CliError::Usage(format!("bad --pitcher-change `{s}` (expected inning:outs)"));
    let (i, o) = s.split_once(':').unwrap_or((s, "0"));
    let change = PitcherChange { inning: i.parse().map_err(|_| bad())?, after_outs: o.parse().map_err(|_| bad())? };
    if change.after_outs > 2 {
        return Err(bad());
    }
    Ok(change)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest { common, output } => {
            let config = build_config(&common)?;
            if config.inputs.is_empty() {
                return Err(CliError::Usage("ingest needs input files or directories".into()));
            }
            let ing = ingest::ingest(&config.inputs, config.mode)?;
            report_problems(&ing.report, err);
            let manifest =
                CacheManifest { mode: config.mode, fingerprint: ing.fingerprint.clone(), games: ing.report.games() };
            let mut buf = Vec::new();
            write_cache(&mut buf, &manifest, &ing.tally)?;
            fs::write(&output, buf).map_err(|e| CliError::Data(format!("{}: {e}", output.display())))?;
            let mut t = Table::new(["files", "games", "half_innings", "quarantined", "observations", "problem_files"]);
            t.push(vec![
                ing.report.files.len().to_string(),
                ing.report.games().to_string(),
                ing.report.half_innings().to_string(),
                ing.report.quarantined().to_string(),
                ing.report.observations().to_string(),
                ing.report.problem_files().count().to_string(),
            ]);
            emit(out, &t, config.format)
        }
        Command::Table1 { common } => {
            let config = build_config(&common)?;
            let loaded = load(&config, err)?;
            emit(out, &report::table1(&report::prepare(&loaded.tally, &config)), config.format)
        }
        Command::Table2 { common } => {
            let config = build_config(&common)?;
            let loaded = load(&config, err)?;
            emit(out, &report::table2(&report::prepare(&loaded.tally, &config), &config), config.format)
        }
        Command::Table3 { common } => {
            let config = build_config(&common)?;
            let era = match &config.era {
                Some(p) => report::read_era(
                    &fs::read_to_string(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?,
                )?,
                None => BTreeMap::new(),
            };
            let loaded = load(&config, err)?;
            let table = report::table3(&report::prepare(&loaded.tally, &config), &config, &era, &loaded.names);
            emit(out, &table, config.format)
        }
        Command::Decide { common, p, pitcher, tsf } => {
            let config = build_config(&common)?;
            let source = match (pitcher, tsf) {
                (Some(id), _) => BrtSource::Pitcher(id),
                (None, Some(s)) => {
                    let (t, s, f) = parse_tsf(&s)?;
                    BrtSource::Explicit { t, s, f }
                }
                (None, None) => BrtSource::Aggregate,
            };
            let tally = match source {
                BrtSource::Explicit { .. } => None,
                _ => Some(report::prepare(&load(&config, err)?.tally, &config)),
            };
            let outcome = report::decide_with(tally.as_ref(), &source, p, &config)?;
            emit(out, &report::decide_table(&outcome, p), config.format)
        }
        Command::Query { common, pitcher, class } => {
            let config = build_config(&common)?;
            let class: SituationClass = class.parse().map_err(CliError::Usage)?;
            if config.inputs.is_empty() {
                return Err(CliError::Usage("query needs input files or directories".into()));
            }
            let matches: Vec<_> = ingest::observations(&config.inputs, config.mode)?
                .into_iter()
                .filter(|o| o.class == class)
                .filter(|o| pitcher.as_ref().is_none_or(|p| &o.pitcher_id == p))
                .filter(|o| config.years.as_ref().is_none_or(|y| y.contains(&o.season)))
                .filter(|o| config.stratum() == Stratum::All || o.high_leverage)
                .collect();
            emit(out, &report::query_table(&matches), config.format)?;
            let scored = matches.iter().filter(|o| o.scored_later).count();
            writeln!(out, "matches={} scored={}", matches.len(), scored).map_err(output_error)
        }
        Command::Simulate {
            model,
            games,
            seed,
            start_year,
            pitchers_per_team,
            pitcher_change,
            output,
            truth,
            format,
        } => {
            let format: OutputFormat = format.as_deref().unwrap_or("text").parse().map_err(CliError::Usage)?;
            let model = match model {
                Some(p) => OutcomeModel::parse(
                    &fs::read_to_string(&p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?,
                )
                .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?,
                None => OutcomeModel::default(),
            };
            let config = SeasonConfig {
                games,
                seed,
                start_year,
                pitchers_per_team: pitchers_per_team.max(1),
                pitcher_change: pitcher_change.as_deref().map(parse_change).transpose()?,
                ..SeasonConfig::default()
            };
            let season = generate_season(&model, &config).map_err(|e| CliError::Usage(e.to_string()))?;
            for g in &season {
                for d in &g.diagnostics {
                    let _ = writeln!(err, "{d}");
                }
            }
            if let Some(dir) = &output {
                fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
                let mut by_year: BTreeMap<i32, String> = BTreeMap::new();
                for g in &season {
                    emit_game(g, by_year.entry(chrono::Datelike::year(&g.date)).or_default());
                }
                for (year, text) in by_year {
                    write_file(&dir.join(format!("{year}HOM.EVN")), &text)?;
                }
            }
            if let Some(path) = &truth {
                let mut t = Table::new(["pitcher_id", "hl_innings"]);
                for (p, n) in high_leverage_appearances(&season) {
                    t.push(vec![p, n.to_string()]);
                }
                write_file(path, &t.render(OutputFormat::Csv))?;
            }
            let mut t = Table::new(["outs", "T", "S", "F", "BRT", "class_T", "class_S", "class_F"]);
            for i in [1u8, 0] {
                let (tv, sv, fv) = exact_tsf(&model, i).map_err(|e| CliError::Usage(e.to_string()))?;
                let c = exact_class_rates(&model, i).map_err(|e| CliError::Usage(e.to_string()))?;
                let mut row =
                    vec![i.to_string(), round3(tv), round3(sv), round3(fv), round3(compute_brt(tv, sv, fv).brt)];
                row.extend(c.iter().map(|v| v.map(round3).unwrap_or_default()));
                t.push(row);
            }
            writeln!(out, "games={} plays={}", season.len(), season.iter().map(|g| g.plays.len()).sum::<usize>())
                .map_err(output_error)?;
            emit(out, &t, format)
        }
    }
}

/// Runs the CLI and returns its exit status: 0 on success, 1 for usage
/// errors, 2 for data errors.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match run(cli, out, err) {
        Ok(()) | Err(CliError::Closed) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::CountingMode;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = main_with(std::iter::once("brt").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_args(&["bogus"]).0, 1);
        assert_eq!(run_args(&["table1", "--years", "x"]).0, 1);
        assert_eq!(run_args(&["table1"]).0, 1);
        assert_eq!(run_args(&["decide", "--p", "0.5", "--tsf", "1,2"]).0, 1);
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn decide_explicit() {
        let (code, out, _) = run_args(&["decide", "--p", "0.2", "--tsf", "0.627,0.398,0.142", "--format", "csv"]);
        assert_eq!(code, 0);
        assert!(out.contains(",conventional,"), "{out}");
    }

    #[test]
    fn data_error_exit_two() {
        let dir = tempfile::tempdir().unwrap();
        let (code, _, err) = run_args(&["table1", dir.path().to_str().unwrap()]);
        assert_eq!(code, 2, "{err}");
    }

    #[test]
    fn counting_mode_flag() {
        let common = Common { mode: Some("excluding".into()), ..Common::default() };
        assert_eq!(build_config(&common).unwrap().mode, CountingMode::ExcludingPlay);
    }
}
