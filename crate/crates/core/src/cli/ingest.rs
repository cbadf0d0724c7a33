use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use walkdir::WalkDir;

use crate::event::{decode_latin1, parse_event_file};
use crate::state::replay_game;
use crate::stats::{extract_observations, CountingMode, SituationObservation, TallyTable};

use super::CliError;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Inputs {
    pub event_files: Vec<PathBuf>,
    pub roster_files: Vec<PathBuf>,
}

fn extension(path: &Path) -> String {
    path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_uppercase()
}

/// Expands directories to the event (`.EV*`) and roster (`.ROS`) files
/// beneath them. Files named directly are taken as event files unless they
/// are rosters.
pub fn discover(paths: &[PathBuf]) -> Result<Inputs, CliError> {
    let mut inputs = Inputs::default();
    for path in paths {
        if path.is_dir() {
            for entry in WalkDir::new(path).sort_by_file_name() {
                let entry = entry.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
                if !entry.file_type().is_file() {
                    continue;
                }
                let ext = extension(entry.path());
                if ext.starts_with("EV") {
                    inputs.event_files.push(entry.into_path());
                } else if ext == "ROS" {
                    inputs.roster_files.push(entry.into_path());
                }
            }
        } else if path.is_file() {
            if extension(path) == "ROS" {
                inputs.roster_files.push(path.clone());
            } else {
                inputs.event_files.push(path.clone());
            }
        } else {
            return Err(CliError::Data(format!("{}: no such file or directory", path.display())));
        }
    }
    inputs.event_files.sort();
    inputs.event_files.dedup();
    inputs.roster_files.sort();
    inputs.roster_files.dedup();
    Ok(inputs)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read(path).map(|b| decode_latin1(&b)).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Digest of the counting mode and every event file's name and contents,
/// in name order, so a cache can be matched to the archive it came from.
pub fn fingerprint(files: &[PathBuf], mode: CountingMode) -> Result<String, CliError> {
    let mut named: Vec<(String, &PathBuf)> = files
        .iter()
        .map(|p| (p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(), p))
        .collect();
    named.sort();
    let mut hasher = Sha256::new();
    hasher.update(mode.name().as_bytes());
    for (name, path) in named {
        let bytes = fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        hasher.update((name.len() as u64).to_le_bytes());
        hasher.update(name.as_bytes());
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(&bytes);
    }
    Ok(hex::encode(hasher.finalize()))
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FileSummary {
    pub path: PathBuf,
    pub games: usize,
    pub half_innings: usize,
    pub quarantined: usize,
    pub observations: usize,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub files: Vec<FileSummary>,
}

impl IngestReport {
    pub fn games(&self) -> usize {
        self.files.iter().map(|f| f.games).sum()
    }

    pub fn half_innings(&self) -> usize {
        self.files.iter().map(|f| f.half_innings).sum()
    }

    pub fn quarantined(&self) -> usize {
        self.files.iter().map(|f| f.quarantined).sum()
    }

    pub fn observations(&self) -> usize {
        self.files.iter().map(|f| f.observations).sum()
    }

    pub fn problem_files(&self) -> impl Iterator<Item = &FileSummary> {
        self.files.iter().filter(|f| !f.diagnostics.is_empty())
    }
}

#[derive(Debug, Clone)]
pub struct Ingest {
    pub tally: TallyTable,
    pub report: IngestReport,
    pub fingerprint: String,
    pub names: BTreeMap<String, String>,
}

fn ingest_file(path: &Path, mode: CountingMode) -> Result<(TallyTable, FileSummary), CliError> {
    let text = read_text(path)?;
    let assembled = parse_event_file(&text);
    let mut summary = FileSummary {
        path: path.to_path_buf(),
        games: assembled.games.len(),
        diagnostics: assembled.diagnostics.iter().map(ToString::to_string).collect(),
        ..FileSummary::default()
    };
    let mut tally = TallyTable::new();
    for game in &assembled.games {
        for timeline in replay_game(game) {
            summary.half_innings += 1;
            if let Some(reason) = &timeline.excluded {
                summary.quarantined += 1;
                summary.diagnostics.push(format!(
                    "{} inning {} {:?}: {reason}",
                    timeline.key.game_id, timeline.key.inning, timeline.key.half
                ));
            }
            summary.observations += tally.record_timeline(&timeline, mode);
        }
    }
    Ok((tally, summary))
}

/// Parses files in parallel and folds their tallies in path order.
pub fn ingest(paths: &[PathBuf], mode: CountingMode) -> Result<Ingest, CliError> {
    let inputs = discover(paths)?;
    if inputs.event_files.is_empty() {
        return Err(CliError::Data("no event files found".into()));
    }
    let per_file: Vec<(TallyTable, FileSummary)> =
        inputs.event_files.par_iter().map(|p| ingest_file(p, mode)).collect::<Result<_, _>>()?;
    let mut tally = TallyTable::new();
    let mut report = IngestReport::default();
    for (t, s) in per_file {
        tally.merge_from(&t);
        report.files.push(s);
    }
    if report.games() == 0 {
        return Err(CliError::Data("no parseable games in input".into()));
    }
    let mut names = BTreeMap::new();
    for path in &inputs.roster_files {
        names.extend(read_roster(&read_text(path)?));
    }
    Ok(Ingest { tally, report, fingerprint: fingerprint(&inputs.event_files, mode)?, names })
}

/// Every observation in the archive, in file and game order.
pub fn observations(paths: &[PathBuf], mode: CountingMode) -> Result<Vec<SituationObservation>, CliError> {
    let inputs = discover(paths)?;
    let per_file: Vec<Vec<SituationObservation>> = inputs
        .event_files
        .par_iter()
        .map(|p| {
            let assembled = parse_event_file(&read_text(p)?);
            Ok(assembled.games.iter().flat_map(replay_game).flat_map(|t| extract_observations(&t, mode)).collect())
        })
        .collect::<Result<_, CliError>>()?;
    Ok(per_file.into_iter().flatten().collect())
}

/// Roster lines `id,last,first,...` as id -> "First Last".
pub fn read_roster(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|line| {
            let mut cells = line.split(',').map(str::trim);
            let id = cells.next().filter(|s| !s.is_empty())?;
            let last = cells.next()?;
            let first = cells.next().unwrap_or("");
            let name = if first.is_empty() { last.to_string() } else { format!("{first} {last}") };
            Some((id.to_string(), name))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roster_names() {
        let names = read_roster("riverm001,Rivera,Mariano,R,R,NYA,P\n\nshort,Only\n");
        assert_eq!(names["riverm001"], "Mariano Rivera");
        assert_eq!(names["short"], "Only");
    }

    #[test]
    fn discovery_filters_by_extension() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["2003NYA.EVA", "NYA2003.ROS", "notes.txt", "b.evn"] {
            fs::write(dir.path().join(name), "").unwrap();
        }
        let found = discover(&[dir.path().to_path_buf()]).unwrap();
        assert_eq!(found.event_files.len(), 2);
        assert_eq!(found.roster_files.len(), 1);
        assert!(discover(&[dir.path().join("missing")]).is_err());
    }

    #[test]
    fn fingerprint_depends_on_content_and_mode() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.EVN");
        fs::write(&p, "x").unwrap();
        let files = vec![p.clone()];
        let a = fingerprint(&files, CountingMode::IncludingPlay).unwrap();
        assert_ne!(a, fingerprint(&files, CountingMode::ExcludingPlay).unwrap());
        fs::write(&p, "y").unwrap();
        assert_ne!(a, fingerprint(&files, CountingMode::IncludingPlay).unwrap());
    }
}
