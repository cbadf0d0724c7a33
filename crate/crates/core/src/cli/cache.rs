use std::io::{BufRead, Write};

use crate::stats::{AppearanceKey, Cell, CellKey, CountingMode, SituationClass, Stratum, TallyTable};

use super::CliError;

const MAGIC: &str = "# brt-cache v1";
const HEADER: [&str; 8] = ["kind", "pitcher_id", "season", "class", "outs", "stratum", "numerator", "denominator"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheManifest {
    pub mode: CountingMode,
    pub fingerprint: String,
    pub games: usize,
}

/// One manifest comment line, then CSV rows. `cell` rows hold situation
/// tallies; `appear` rows hold half-innings (numerator) and snapshots
/// (denominator) credited to a pitcher.
pub fn write_cache<W: Write>(out: W, manifest: &CacheManifest, table: &TallyTable) -> Result<(), CliError> {
    let mut out = out;
    writeln!(
        out,
        "{MAGIC} mode={} fingerprint={} games={}",
        manifest.mode.name(),
        manifest.fingerprint,
        manifest.games
    )
    .map_err(io_err)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER).map_err(csv_err)?;
    for (k, c) in &table.cells {
        w.write_record([
            "cell",
            &k.pitcher_id,
            &k.season.to_string(),
            k.class.name(),
            &k.class.outs().to_string(),
            k.stratum.name(),
            &c.numerator.to_string(),
            &c.denominator.to_string(),
        ])
        .map_err(csv_err)?;
    }
    for (k, c) in &table.appearances {
        w.write_record([
            "appear",
            &k.pitcher_id,
            &k.season.to_string(),
            "",
            "",
            k.stratum.name(),
            &c.numerator.to_string(),
            &c.denominator.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

pub fn read_cache<R: BufRead>(mut input: R) -> Result<(CacheManifest, TallyTable), CliError> {
    let mut first = String::new();
    input.read_line(&mut first).map_err(io_err)?;
    let manifest = parse_manifest(first.trim_end())?;
    let mut r = csv::Reader::from_reader(input);
    let mut table = TallyTable::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let bad = |what: &str| CliError::Data(format!("cache row {}: bad {what}", i + 1));
        if rec.len() != HEADER.len() {
            return Err(bad("column count"));
        }
        let season: u16 = rec[2].parse().map_err(|_| bad("season"))?;
        let stratum = Stratum::from_name(&rec[5]).ok_or_else(|| bad("stratum"))?;
        let cell = Cell {
            numerator: rec[6].parse().map_err(|_| bad("numerator"))?,
            denominator: rec[7].parse().map_err(|_| bad("denominator"))?,
        };
        if cell.numerator > cell.denominator && &rec[0] == "cell" {
            return Err(bad("cell (numerator exceeds denominator)"));
        }
        let pitcher_id = rec[1].to_string();
        match &rec[0] {
            "cell" => {
                let outs: u8 = rec[4].parse().map_err(|_| bad("outs"))?;
                let class = SituationClass::from_parts(&rec[3], outs).ok_or_else(|| bad("class"))?;
                table.add_cell(CellKey { pitcher_id, season, class, stratum }, cell);
            }
            "appear" => table.add_appearance(AppearanceKey { pitcher_id, season, stratum }, cell),
            _ => return Err(bad("row kind")),
        }
    }
    Ok((manifest, table))
}

fn parse_manifest(line: &str) -> Result<CacheManifest, CliError> {
    let rest = line.strip_prefix(MAGIC).ok_or_else(|| CliError::Data("not a stats cache (missing manifest)".into()))?;
    let mut mode = None;
    let mut fingerprint = None;
    let mut games = 0;
    for field in rest.split_whitespace() {
        match field.split_once('=') {
            Some(("mode", v)) => mode = v.parse().ok(),
            Some(("fingerprint", v)) => fingerprint = Some(v.to_string()),
            Some(("games", v)) => games = v.parse().unwrap_or(0),
            _ => {}
        }
    }
    match (mode, fingerprint) {
        (Some(mode), Some(fingerprint)) => Ok(CacheManifest { mode, fingerprint, games }),
        _ => Err(CliError::Data("cache manifest lacks mode or fingerprint".into())),
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Data(format!("cache: {e}"))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Data(format!("cache: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut t = TallyTable::new();
        t.add_cell(
            CellKey {
                pitcher_id: "p,q".into(),
                season: 2001,
                class: SituationClass::FirstOnly(2),
                stratum: Stratum::HighLeverage,
            },
            Cell { numerator: 3, denominator: 7 },
        );
        t.add_appearance(
            AppearanceKey { pitcher_id: "p".into(), season: 2001, stratum: Stratum::All },
            Cell { numerator: 4, denominator: 30 },
        );
        let m = CacheManifest { mode: CountingMode::ExcludingPlay, fingerprint: "ab12".into(), games: 5 };
        let mut buf = Vec::new();
        write_cache(&mut buf, &m, &t).unwrap();
        let (m2, t2) = read_cache(&buf[..]).unwrap();
        assert_eq!(m, m2);
        assert_eq!(t, t2);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_cache(&b"pitcher,season\n"[..]).is_err());
        let bad = format!(
            "{MAGIC} mode=including fingerprint=x games=1\n{}\ncell,p,2001,fourth,1,all,1,2\n",
            HEADER.join(",")
        );
        assert!(read_cache(bad.as_bytes()).is_err());
    }
}
