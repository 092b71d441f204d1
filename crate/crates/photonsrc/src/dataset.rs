//! The comparison dataset: one row per source plus the pair-source limit
//! curve.
//!
//! Sources are `record = source` rows; curve points are `record = limit`
//! rows with `brightness = mu`, `m_raw = M` and `g2` filled in. Missing
//! quantities are empty fields.

use std::fs;
use std::path::{Path, PathBuf};

use photonsrc_core::fom::{CurvePoint, FigureOfMerit, Measured, SourceKind};

use crate::error::{CliError, FormatError};
use crate::report::{Cell, Format, Table};

pub const COLUMNS: [&str; 12] = [
    "record",
    "label",
    "kind",
    "brightness",
    "brightness_sigma",
    "m_raw",
    "m_raw_sigma",
    "m_corrected",
    "m_corrected_sigma",
    "g2",
    "g2_sigma",
    "note",
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Comparison {
    pub sources: Vec<FigureOfMerit>,
    pub curve: Vec<CurvePoint>,
}

fn measured(m: Option<Measured>) -> [Cell; 2] {
    match m {
        Some(m) => [m.value.into(), m.sigma.into()],
        None => [Cell::Missing, Cell::Missing],
    }
}

impl Comparison {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&COLUMNS);
        for s in &self.sources {
            let mut row = vec!["source".into(), s.label.as_str().into(), s.kind.as_str().into()];
            row.extend(measured(Some(s.brightness)));
            row.extend(measured(s.m_raw));
            row.extend(measured(s.m_corrected));
            row.extend(measured(s.g2));
            row.push(s.note.as_str().into());
            t.push(row);
        }
        for p in &self.curve {
            let mut row = vec![
                "limit".into(),
                Cell::Text(format!("limit mu={}", p.mu)),
                SourceKind::Spdc.as_str().into(),
            ];
            row.extend([p.mu.into(), Cell::Missing, p.m.into(), Cell::Missing]);
            row.extend([Cell::Missing, Cell::Missing, p.g2.into(), Cell::Missing, Cell::Missing]);
            t.push(row);
        }
        t
    }

    pub fn write(&self, dir: &Path, stem: &str, format: Format) -> Result<PathBuf, CliError> {
        self.table().write(dir, stem, format)
    }

    /// Reads the CSV form.
    pub fn parse_csv(text: &str) -> Result<Self, FormatError> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| FormatError::new(1, e.to_string()))?;
        if header.iter().ne(COLUMNS.iter().copied()) {
            return Err(FormatError::new(1, format!("expected columns {}", COLUMNS.join(","))));
        }
        let mut out = Comparison::default();
        for (i, record) in reader.records().enumerate() {
            let line = i + 2;
            let record = record.map_err(|e| FormatError::new(line, e.to_string()))?;
            let num = |c: usize| -> Result<Option<f64>, FormatError> {
                let f = &record[c];
                if f.is_empty() {
                    Ok(None)
                } else {
                    f.parse()
                        .map(Some)
                        .map_err(|_| FormatError::new(line, format!("{}: cannot parse {f:?}", COLUMNS[c])))
                }
            };
            let pair = |c: usize| -> Result<Option<Measured>, FormatError> {
                match (num(c)?, num(c + 1)?) {
                    (Some(v), Some(s)) => Ok(Some(Measured::new(v, s))),
                    (None, None) => Ok(None),
                    _ => Err(FormatError::new(
                        line,
                        format!("{} without its uncertainty", COLUMNS[c]),
                    )),
                }
            };
            let required = |c: usize| num(c)?.ok_or_else(|| FormatError::new(line, format!("{} is empty", COLUMNS[c])));
            match &record[0] {
                "source" => {
                    let kind = SourceKind::parse(&record[2])
                        .ok_or_else(|| FormatError::new(line, format!("unknown kind {:?}", &record[2])))?;
                    let brightness = pair(3)?.ok_or_else(|| FormatError::new(line, "brightness is empty"))?;
                    out.sources.push(FigureOfMerit {
                        label: record[1].to_owned(),
                        kind,
                        brightness,
                        m_raw: pair(5)?,
                        m_corrected: pair(7)?,
                        g2: pair(9)?,
                        note: record[11].to_owned(),
                    });
                }
                "limit" => out.curve.push(CurvePoint {
                    mu: required(3)?,
                    m: required(5)?,
                    g2: required(9)?,
                }),
                other => return Err(FormatError::new(line, format!("unknown record {other:?}"))),
            }
        }
        Ok(out)
    }

    pub fn read_csv(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse_csv(&text).map_err(|source| CliError::Format {
            path: path.to_path_buf(),
            source,
        })
    }
}
