//! Line-level tokenizer for Retrosheet event files.

use std::fmt;

use super::EventFileError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RecordKind {
    Id,
    Version,
    Info,
    Start,
    Sub,
    Play,
    Data,
    Com,
    Badj,
    Padj,
    Ladj,
}

impl RecordKind {
    pub fn from_keyword(keyword: &str) -> Option<Self> {
        Some(match keyword {
            "id" => Self::Id,
            "version" => Self::Version,
            "info" => Self::Info,
            "start" => Self::Start,
            "sub" => Self::Sub,
            "play" => Self::Play,
            "data" => Self::Data,
            "com" => Self::Com,
            "badj" => Self::Badj,
            "padj" => Self::Padj,
            "ladj" => Self::Ladj,
            _ => return None,
        })
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Self::Id => "id",
            Self::Version => "version",
            Self::Info => "info",
            Self::Start => "start",
            Self::Sub => "sub",
            Self::Play => "play",
            Self::Data => "data",
            Self::Com => "com",
            Self::Badj => "badj",
            Self::Padj => "padj",
            Self::Ladj => "ladj",
        }
    }
}

impl fmt::Display for RecordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// One line of an event file. `fields` excludes the leading keyword, except
/// for unknown record kinds, which are kept as `Com` with every cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRecord {
    pub kind: RecordKind,
    pub fields: Vec<String>,
    pub line_no: usize,
}

#[derive(Debug, Default)]
pub struct Tokenized {
    pub records: Vec<RawRecord>,
    pub diagnostics: Vec<EventFileError>,
}

/// Splits one line into cells, honoring double-quoted cells that may contain
/// commas. Quotes are removed from the cell value.
pub(crate) fn split_cells(line: &str) -> Vec<String> {
    let mut cells = Vec::new();
    let mut cell = String::new();
    let mut in_quotes = false;
    for c in line.chars() {
        match c {
            '"' => in_quotes = !in_quotes,
            ',' if !in_quotes => cells.push(std::mem::take(&mut cell)),
            _ => cell.push(c),
        }
    }
    cells.push(cell);
    cells
}

/// Tokenizes a whole event file. Every non-empty line yields exactly one
/// record or one `UnreadableLine` diagnostic.
pub fn tokenize_event_file(text: &str) -> Tokenized {
    let mut out = Tokenized::default();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let mut cells = split_cells(line);
        let keyword = cells[0].trim().to_string();
        if keyword.is_empty() {
            out.diagnostics.push(EventFileError::UnreadableLine { line_no });
            continue;
        }
        match RecordKind::from_keyword(&keyword) {
            Some(kind) => {
                cells.remove(0);
                out.records.push(RawRecord { kind, fields: cells, line_no });
            }
            None => {
                out.diagnostics.push(EventFileError::UnknownRecord { line_no, keyword });
                out.records.push(RawRecord { kind: RecordKind::Com, fields: cells, line_no });
            }
        }
    }
    out
}

/// Decodes raw file bytes one byte per char so non-ASCII bytes survive.
pub fn decode_latin1(bytes: &[u8]) -> String {
    bytes.iter().map(|&b| b as char).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id_line() {
        let t = tokenize_event_file("id,NYA200309180");
        assert_eq!(
            t.records,
            vec![RawRecord { kind: RecordKind::Id, fields: vec!["NYA200309180".into()], line_no: 1 }]
        );
        assert!(t.diagnostics.is_empty());
    }

    #[test]
    fn play_line_keeps_cells_in_order() {
        let t = tokenize_event_file("com,x\nplay,9,0,jeted001,12,BCX,S8/G.1-3\n");
        let rec = &t.records[1];
        assert_eq!(rec.kind, RecordKind::Play);
        assert_eq!(rec.fields, ["9", "0", "jeted001", "12", "BCX", "S8/G.1-3"]);
        assert_eq!(rec.line_no, 2);
    }

    #[test]
    fn empty_and_blank_lines_emit_nothing() {
        let t = tokenize_event_file("\n   \n\r\n");
        assert!(t.records.is_empty());
        assert!(t.diagnostics.is_empty());
    }

    #[test]
    fn quoted_commas_and_trailing_whitespace() {
        let t = tokenize_event_file("info,site,\"Park, The\"   \r\n");
        assert_eq!(t.records[0].fields, ["site", "Park, The"]);
    }

    #[test]
    fn missing_first_cell_is_unreadable() {
        let t = tokenize_event_file("id,A\n,oops\nid,B");
        assert_eq!(t.records.len(), 2);
        assert_eq!(t.diagnostics, vec![EventFileError::UnreadableLine { line_no: 2 }]);
    }

    #[test]
    fn unknown_kind_kept_as_comment() {
        let t = tokenize_event_file("radj,abc,2");
        assert_eq!(t.records[0].kind, RecordKind::Com);
        assert_eq!(t.records[0].fields, ["radj", "abc", "2"]);
        assert_eq!(t.diagnostics.len(), 1);
    }

    #[test]
    fn latin1_round_trip() {
        let bytes = b"com,\"Pe\xf1a\"";
        let text = decode_latin1(bytes);
        let t = tokenize_event_file(&text);
        let back: Vec<u8> = t.records[0].fields[0].chars().map(|c| c as u8).collect();
        assert_eq!(back, b"Pe\xf1a");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn every_nonempty_line_accounted_once(lines in proptest::collection::vec("[a-z,\" ]{0,12}", 0..30)) {
                let text = lines.join("\n");
                let t = tokenize_event_file(&text);
                let nonempty = text.lines().filter(|l| !l.trim_end().is_empty()).count();
                let unreadable = t.diagnostics.iter()
                    .filter(|d| matches!(d, EventFileError::UnreadableLine { .. }))
                    .count();
                prop_assert_eq!(t.records.len() + unreadable, nonempty);
                prop_assert!(t.records.windows(2).all(|w| w[0].line_no < w[1].line_no));
            }
        }
    }
}
